#include "gainflow/simplex.hpp"

#include <doctest.h>

using namespace gainflow;

TEST_CASE("simplex state accepts valid points and renormalizes") {
  SimplexState x({0.9, 0.05, 0.05});
  CHECK(x.size() == 3);
  CHECK(x.values().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x.mass() == 1.0);

  SimplexState half({0.25, 0.25}, 0.5);
  CHECK(half.values().sum() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("simplex state rejects a mass mismatch") {
  CHECK_THROWS_AS(SimplexState({0.5, 0.499}), DomainError);
  CHECK_THROWS_AS(SimplexState({0.5, 0.5}, 0.9), DomainError);
}

TEST_CASE("simplex state rejects negatives beyond the tolerance and clips tiny ones") {
  CHECK_THROWS_AS(SimplexState({1.0 + 1e-6, -1e-6}), DomainError);
  SimplexState x({1.0 + 1e-13, -1e-13});
  CHECK(x[1] == 0.0);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(std::abs(x.values().sum() - 1.0) <= 1e-12);
}

TEST_CASE("simplex state rejects non-finite and empty input") {
  CHECK_THROWS_AS(SimplexState({std::nan(""), 1.0}), DomainError);
  CHECK_THROWS_AS(SimplexState(Vector(), 1.0), DomainError);
}

TEST_CASE("named points") {
  auto v = SimplexState::vertex(3, 1);
  CHECK(v[1] == 1.0);
  CHECK(v.support() == 0b010u);
  auto b = SimplexState::barycenter(4, 2.0);
  CHECK(b[3] == doctest::Approx(0.5));
  auto w = SimplexState::from_weights(Vector::Constant(2, 3.0));
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(sup_distance(v, SimplexState::vertex(3, 2)) == doctest::Approx(1.0));
}
