#include "gainflow/integrator.hpp"
#include "gainflow/specs.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace gainflow;
using gainflow::testing::Gen;

namespace {

IntegratorConfig config(double dt, double horizon, Scheme scheme = Scheme::rk4) {
  IntegratorConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.scheme = scheme;
  return c;
}

std::vector<MeanDynamic> rps_dynamics() {
  return {MeanDynamic::rationalizable(protocols::smith(3, 1.0)),
          MeanDynamic::rationalizable(protocols::brd(3)),
          MeanDynamic::rationalizable(protocols::tempered_brd(3, default_tempered_cost())),
          MeanDynamic::rationalizable(protocols::pairwise(3, default_pairwise_cost())),
          MeanDynamic::rationalizable(protocols::ordinal(3, 0.5)),
          MeanDynamic::replicator(3),
          MeanDynamic::bnn(3)};
}

}  // namespace

TEST_CASE("a step from the equilibrium stays put") {
  auto game = games::good_rps(1.0, 0.9);
  auto xs = SimplexState::barycenter(3);
  for (const auto& dyn : rps_dynamics())
    for (auto scheme : {Scheme::euler, Scheme::rk4}) {
      auto next = step(game, dyn, xs, 0.01, scheme);
      CHECK(sup_distance(next, xs) <= 1e-12);
    }
}

TEST_CASE("one Euler step of BRD") {
  auto game = games::good_rps(1.0, 0.9);
  SimplexState x{0.9, 0.05, 0.05};
  auto brd = MeanDynamic::rationalizable(protocols::brd(3));
  auto next = step(game, brd, x, 0.1, Scheme::euler);
  CHECK(next[0] == doctest::Approx(0.81).epsilon(1e-14));
  CHECK(next[1] == doctest::Approx(0.145).epsilon(1e-14));
  CHECK(next[2] == doctest::Approx(0.045).epsilon(1e-14));
}

TEST_CASE("replicator leaves vertices fixed") {
  auto game = games::good_rps(1.0, 0.9);
  for (std::size_t a = 0; a < 3; ++a) {
    auto v = SimplexState::vertex(3, a);
    CHECK(sup_distance(step(game, MeanDynamic::replicator(3), v, 0.01), v) == 0.0);
  }
}

TEST_CASE("zero horizon keeps only the initial state") {
  auto game = games::good_rps(1.0, 0.9);
  SimplexState x{0.9, 0.05, 0.05};
  auto traj = simulate(game, MeanDynamic::rationalizable(protocols::smith(3)), x, config(0.01, 0.0));
  REQUIRE(traj.size() == 1);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.states[0] == x.values());
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(config(0.0, 1.0).check(), ArgumentError);
  CHECK_THROWS_AS(config(-0.1, 1.0).check(), ArgumentError);
  CHECK_THROWS_AS(config(0.5, 0.1).check(), ArgumentError);
  CHECK_THROWS_AS(config(0.1, -1.0).check(), ArgumentError);
  auto c = config(0.01, 1.0);
  c.record_every = 0;
  CHECK_THROWS_AS(c.check(), ArgumentError);
  CHECK(config(0.01, 2.0).step_count() == 200);
  CHECK(config(0.1, 0.3).step_count() == 3);
}

TEST_CASE("recording cadence and series") {
  auto game = games::good_rps(1.0, 0.9);
  auto c = config(0.01, 1.0);
  c.record_every = 10;
  auto traj = simulate(game, MeanDynamic::rationalizable(protocols::smith(3)),
                       SimplexState{0.9, 0.05, 0.05}, c);
  REQUIRE(traj.size() == 11);
  CHECK(traj.times.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  for (const auto* s : {"G", "H", "Gamma", "nash_gap"}) {
    CHECK(traj.has_series(s));
    CHECK(traj.series(s).size() == traj.size());
  }
  CHECK_THROWS_AS(traj.series("nope"), ArgumentError);
  CHECK(traj.game_name == game.name());
  CHECK(traj.dynamic_name == "smith");

  auto rep = simulate(game, MeanDynamic::replicator(3), SimplexState{0.9, 0.05, 0.05}, c);
  CHECK(rep.has_series("W"));
  CHECK(rep.has_series("G_replicator"));
  CHECK(&rep.series("G_replicator") == &rep.series("G"));
  CHECK(rep.series("W").front() == doctest::Approx(0.9335).epsilon(1e-4));
}

TEST_CASE("property: states stay on the simplex with little clipping") {
  Gen gen(101);
  auto game = games::good_rps(1.0, 0.9);
  for (const auto& dyn : rps_dynamics()) {
    for (int t = 0; t < 3; ++t) {
      SimplexState x0(gen.simplex(3));
      auto c = config(0.01, 5.0, t % 2 ? Scheme::euler : Scheme::rk4);
      auto traj = simulate(game, dyn, x0, c);
      INFO(dyn.name());
      for (const auto& s : traj.states) {
        CHECK(s.minCoeff() >= 0.0);
        CHECK(s.maxCoeff() <= 1.0);
        CHECK(std::abs(s.sum() - 1.0) <= 1e-9);
      }
      CHECK(traj.total_clipping < 1e-6 * static_cast<double>(c.step_count()));
    }
  }
}

TEST_CASE("simulation is deterministic") {
  auto game = games::friedman();
  auto dyn = MeanDynamic::rationalizable(protocols::friedman_asymmetric());
  SimplexState x0{0.6, 0.3, 0.1};
  auto a = simulate(game, dyn, x0, config(0.01, 3.0));
  auto b = simulate(game, dyn, x0, config(0.01, 3.0));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.states[i] == b.states[i]);
    CHECK(a.G[i] == b.G[i]);
    CHECK(a.H[i] == b.H[i]);
  }
}

TEST_CASE("step halving") {
  auto game = games::good_rps(1.0, 0.9);
  auto dyn = MeanDynamic::rationalizable(protocols::smith(3));
  SimplexState x0{0.9, 0.05, 0.05};
  for (auto scheme : {Scheme::euler, Scheme::rk4}) {
    auto coarse = simulate(game, dyn, x0, config(0.01, 5.0, scheme));
    auto fine = simulate(game, dyn, x0, config(0.005, 5.0, scheme));
    double diff = (coarse.states.back() - fine.states.back()).cwiseAbs().maxCoeff();
    CHECK(diff < 10 * 0.01);
    if (scheme == Scheme::rk4) CHECK(diff < 1e-6);
  }
}

TEST_CASE("non-finite payoffs raise a numeric error") {
  PopulationGame bad("nan", 2, [](const Vector& x) -> Vector {
    Vector pi(2);
    pi << (x[0] < 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0), 1.0;
    return pi;
  });
  auto dyn = MeanDynamic::rationalizable(protocols::smith(2));
  CHECK_THROWS_AS(simulate(bad, dyn, SimplexState{0.9, 0.1}, config(0.1, 10.0)), NumericError);
}

TEST_CASE("two populations") {
  Matrix base(3, 3);
  base << 0, -0.9, 1, 1, 0, -0.9, -0.9, 1, 0;
  Vector zero = Vector::Zero(3);
  auto game = games::anonymous(base, {zero, zero}, {0.5, 0.5});
  std::vector<MeanDynamic> dyns = {MeanDynamic::rationalizable(protocols::brd(3)),
                                   MeanDynamic::rationalizable(protocols::smith(3))};
  auto profile = make_profile(game.layout(), {SimplexState({0.45, 0.025, 0.025}, 0.5),
                                              SimplexState({0.025, 0.45, 0.025}, 0.5)});
  auto traj = simulate(game, dyns, profile, config(0.01, 2.0));
  REQUIRE(traj.size() == 201);
  for (const auto& s : traj.states) {
    REQUIRE(s.size() == 6);
    CHECK(s.head(3).sum() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.tail(3).sum() == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(simulate(game, {dyns[0]}, profile, config(0.01, 1.0)), ArgumentError);
}
