#include "gainflow/gains.hpp"
#include "gainflow/specs.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

using namespace gainflow;
using gainflow::testing::Gen;
using gainflow::testing::ix;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

GainEvaluator evaluator(const RevisionProtocol& p) {
  return GainEvaluator(MeanDynamic::rationalizable(p));
}

// Midpoint rule on each piece between atoms and kinks of Q.
double quadrature(const CostDistribution& c, double upper, int n = 20000) {
  if (upper <= 0) return 0.0;
  std::vector<double> cuts = {0.0, upper};
  for (double q : c.atoms())
    if (q > 0 && q < upper) cuts.push_back(q);
  for (double q : c.kinks())
    if (q > 0 && q < upper) cuts.push_back(q);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], h = (cuts[k + 1] - lo) / n;
    for (int i = 0; i < n; ++i) s += c.cdf(lo + (i + 0.5) * h) * h;
  }
  return s;
}

// g_a by enumerating draws of the uniform-singleton or full kind with a
// quadrature of the cost CDF.
double g_oracle(bool singletons, const CostDistribution& c, const Vector& pi, std::size_t a) {
  const auto n = static_cast<std::size_t>(pi.size());
  if (!singletons) {
    double best = -1e300;
    for (std::size_t b = 0; b < n; ++b)
      if (b != a) best = std::max(best, pi[ix(b)]);
    return quadrature(c, best - pi[ix(a)]);
  }
  double s = 0.0;
  for (std::size_t b = 0; b < n; ++b)
    if (b != a) s += quadrature(c, pi[ix(b)] - pi[ix(a)]) / static_cast<double>(n - 1);
  return s;
}

}  // namespace

TEST_CASE("first-order gains: spot values") {
  Vector pi = vec({0, 1, 2});
  auto smith = evaluator(protocols::smith(3, 1.0));
  CHECK(first_order_gain(smith, 0, pi) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(first_order_gain(smith, 1, pi) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(first_order_gain(smith, 2, pi) == 0.0);
  auto brd = evaluator(protocols::brd(3));
  CHECK(first_order_gain(brd, 0, pi) == 2.0);
  for (const auto& name : canonical_protocol_names()) {
    auto counts = supported_action_counts(name);
    if (std::find(counts.begin(), counts.end(), 3u) == counts.end()) continue;
    CHECK(first_order_gain(evaluator(protocol_from_name(name, 3)), 2, pi) == 0.0);
  }
}

TEST_CASE("second-order gains: spot values") {
  Vector pi = vec({0, 1, 2});
  auto smith = evaluator(protocols::smith(3, 1.0));
  CHECK(second_order_gain(smith, 0, pi) == doctest::Approx(-1.75).epsilon(1e-14));
  CHECK(second_order_gain(smith, 1, pi) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(second_order_gain(smith, 2, pi) == 0.0);
  auto brd = evaluator(protocols::brd(3));
  CHECK(second_order_gain(brd, 0, pi) == -2.0);
  CHECK(second_order_gain(brd, 2, pi) == 0.0);
}

TEST_CASE("gross gains: spot values") {
  Vector pi = vec({0, 1, 2});
  CHECK(gross_gain(evaluator(protocols::smith(3, 1.0)), 0, pi) == doctest::Approx(2.5));
  CHECK(gross_gain(evaluator(protocols::smith(3, 1.0)), 2, pi) == 0.0);
  CHECK(gross_gain(evaluator(protocols::brd(3)), 0, pi) == 2.0);
  // Q_- at the atom of the tempered cost: gross 0.5 sees Q_-(0.5) = 0.4.
  auto tb = evaluator(protocols::tempered_brd(2, default_tempered_cost()));
  CHECK(gross_gain(tb, 0, vec({0, 0.5})) == doctest::Approx(0.4 * 0.5));
}

TEST_CASE("aggregate gains: spot values") {
  Vector pi = vec({0, 1, 2});
  auto x = SimplexState::barycenter(3);
  auto brd = evaluator(protocols::brd(3));
  auto s = aggregate_gains(brd, x, pi);
  CHECK(s.G == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.Gamma == s.G);
  CHECK(s.H == doctest::Approx(-(2.0 + 1.0) / 3.0));

  auto smith = evaluator(protocols::smith(3, 1.0));
  auto t = aggregate_gains(smith, x, pi);
  CHECK(t.G == doctest::Approx(1.5 / 3.0));
  CHECK(t.H == doctest::Approx((-1.75 - 0.125) / 3.0));
  CHECK(t.Gamma == doctest::Approx((2.5 + 0.5) / 3.0));

  for (const auto& name : canonical_protocol_names()) {
    auto counts = supported_action_counts(name);
    if (std::find(counts.begin(), counts.end(), 3u) == counts.end()) continue;
    auto z = aggregate_gains(evaluator(protocol_from_name(name, 3)), SimplexState{0, 0, 1}, pi);
    CHECK(z.G == 0.0);
    CHECK(z.H == 0.0);
  }
}

TEST_CASE("property: first-order gains match a quadrature oracle") {
  Gen gen(81);
  for (int t = 0; t < 60; ++t) {
    std::size_t n = 2 + gen.index(5);
    Vector pi = gen.payoffs(n);
    std::size_t a = gen.index(n);
    auto tb = evaluator(protocols::tempered_brd(n, default_tempered_cost()));
    auto pw = evaluator(protocols::pairwise(n, default_pairwise_cost()));
    auto sm = evaluator(protocols::smith(n, 1.0));
    CHECK(first_order_gain(tb, a, pi) ==
          doctest::Approx(g_oracle(false, default_tempered_cost(), pi, a)).epsilon(1e-6));
    CHECK(first_order_gain(pw, a, pi) ==
          doctest::Approx(g_oracle(true, default_pairwise_cost(), pi, a)).epsilon(1e-6));
    CHECK(first_order_gain(sm, a, pi) ==
          doctest::Approx(g_oracle(true, CostDistribution::linear(1.0, 1e300), pi, a))
              .epsilon(1e-6));
  }
}

TEST_CASE("property: snapshot invariants and H = g . xdot") {
  Gen gen(83);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 2 + gen.index(5);
    Vector pi = gen.payoffs(n);
    SimplexState x(gen.simplex(n));
    for (const auto& name : canonical_protocol_names()) {
      auto counts = supported_action_counts(name);
      if (std::find(counts.begin(), counts.end(), n) == counts.end()) continue;
      auto ev = evaluator(protocol_from_name(name, n));
      auto s = aggregate_gains(ev, x, pi);
      INFO(name << " A=" << n);
      CHECK(s.G >= 0.0);
      CHECK(s.H <= 0.0);
      CHECK(s.Gamma >= s.G - 1e-12);
      for (std::size_t a = 0; a < n; ++a) {
        CHECK(s.g[ix(a)] >= 0.0);
        CHECK(s.h[ix(a)] <= 0.0);
        CHECK(s.gamma[ix(a)] >= s.g[ix(a)] - 1e-12);
      }
      Vector xdot = transition(ev.dynamic(), x, pi);
      CHECK(s.H == doctest::Approx(s.g.dot(xdot)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("aggregates do not depend on the mixing rule") {
  Gen gen(87);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 2 + gen.index(4);
    Vector pi = gen.tied_payoffs(n);
    SimplexState x(gen.simplex(n));
    for (auto proto : {protocols::brd(n), protocols::tempered_brd(n, default_tempered_cost()),
                       protocols::ordinal(n, 0.5)}) {
      SelectionRule lowest, weighted;
      lowest.mixing = SelectionRule::Mixing::lowest_index;
      weighted.mixing = SelectionRule::Mixing::given_weights;
      weighted.weights = gen.simplex(n);
      auto base = aggregate_gains(GainEvaluator(MeanDynamic::rationalizable(proto)), x, pi);
      for (const auto& rule : {lowest, weighted}) {
        auto other = aggregate_gains(GainEvaluator(MeanDynamic::rationalizable(proto, rule)), x, pi);
        CHECK(other.G == base.G);
        CHECK(other.H == base.H);
      }
    }
  }
}

TEST_CASE("birth-death gains: BNN spot values") {
  auto ev = GainEvaluator(MeanDynamic::bnn(3));
  auto s = birth_death_gains(ev, SimplexState::barycenter(3), vec({0, 1, 2}));
  CHECK(std::abs(s.G - 1.0 / 6.0) <= 1e-12);
  CHECK(std::abs(s.H + 1.0 / 9.0) <= 1e-12);
  for (Eigen::Index a = 0; a < 3; ++a) {
    CHECK(s.g[a] == s.G);
    CHECK(s.h[a] == s.H);
  }
  auto z = birth_death_gains(ev, SimplexState{0, 0, 1}, vec({0, 1, 2}));
  CHECK(z.G == 0.0);
  CHECK(z.H == 0.0);
  CHECK_THROWS_AS(birth_death_gains(evaluator(protocols::smith(3)), SimplexState::barycenter(3),
                                    vec({0, 1, 2})),
                  ArgumentError);
}

TEST_CASE("property: birth-death gains vanish exactly on argmax-supported states") {
  Gen gen(89);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 2 + gen.index(5);
    Vector pi = gen.tied_payoffs(n);
    Vector w = gen.simplex(n);
    if (gen.coin()) {
      for (std::size_t a = 0; a < n; ++a)
        if (pi[ix(a)] < pi.maxCoeff()) w[ix(a)] = 0.0;
    }
    auto x = SimplexState::from_weights(w);
    auto s = birth_death_gains(GainEvaluator(MeanDynamic::bnn(n)), x, pi);
    bool on_argmax = true;
    for (std::size_t a = 0; a < n; ++a)
      if (x[a] > 0 && pi[ix(a)] < pi.maxCoeff()) on_argmax = false;
    CHECK(s.G >= 0.0);
    CHECK(s.H <= 0.0);
    // x . pi carries rounding, so the zero set is read with a small floor.
    CHECK((s.G <= 1e-15) == on_argmax);
    CHECK((s.H >= -1e-15) == on_argmax);
  }
}

TEST_CASE("replicator aggregates") {
  auto zero = CostDistribution::zero_cost();
  CHECK(replicator_aggregate_gain(SimplexState{0.5, 0.5}, vec({0, 1}), zero) == 0.25);
  CHECK(replicator_aggregate_gain(SimplexState{0, 1}, vec({0, 1}), zero) == 0.0);
  Gen gen(91);
  for (int t = 0; t < 20; ++t)
    CHECK(replicator_aggregate_gain(gen.state(4), Vector::Constant(4, 1.5), zero) == 0.0);
  CHECK(replicator_gross_gain_raw(vec({0.5, 0.5}), vec({0, 1}), zero) == 0.25);
  CHECK(replicator_second_order_raw(vec({0.5, 0.5}), vec({0, 1}), zero) == -0.125);

  auto ev = GainEvaluator(MeanDynamic::replicator(2, zero));
  auto s = ev.snapshot(vec({0.5, 0.5}), vec({0, 1}));
  CHECK(s.G == 0.25);
  CHECK(s.Gamma == 0.25);
  CHECK(s.H == -0.125);
  CHECK_THROWS_AS(first_order_gain(ev, 0, vec({0, 1})), ArgumentError);
}

TEST_CASE("replicator Lyapunov function") {
  auto xs = SimplexState::barycenter(3);
  CHECK(replicator_lyapunov(xs, xs) == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
  double want = (std::log(1.0 / 2.7) + 2.0 * std::log(20.0 / 3.0)) / 3.0;
  CHECK(replicator_lyapunov(SimplexState{0.9, 0.05, 0.05}, xs) == doctest::Approx(want));
  CHECK(replicator_lyapunov(SimplexState{0.9, 0.05, 0.05}, xs) == doctest::Approx(0.9335).epsilon(1e-4));
  CHECK(replicator_lyapunov(SimplexState{0.5, 0.5, 0}, SimplexState{1, 0, 0}) ==
        doctest::Approx(std::log(2.0)));
  CHECK(replicator_lyapunov(SimplexState{0.5, 0.5, 0}, xs) == std::numeric_limits<double>::infinity());
}

TEST_CASE("delta-passivity") {
  Gen gen(97);
  SUBCASE("smith at smooth interior points") {
    auto ev = evaluator(protocols::smith(3, 1.0));
    for (int t = 0; t < 100; ++t) {
      SimplexState x(gen.interior(3));
      Vector pi = gen.payoffs(3);
      Vector pid = gen.direction(3);
      auto r = delta_passivity(ev, x, pi, pid);
      CHECK_FALSE(r.kink);
      CHECK(std::abs(r.residual) < 1e-5);
    }
  }
  SUBCASE("brd at a payoff tie") {
    auto ev = evaluator(protocols::brd(3));
    for (int t = 0; t < 50; ++t) {
      SimplexState x(gen.interior(3));
      Vector pi = vec({0, 1, 1});
      Vector pid = vec({gen.uniform(-1, 1), 0.5, -0.5});
      auto r = delta_passivity(ev, x, pi, pid);
      CHECK(r.kink);
      CHECK(r.residual <= 1e-5);
    }
  }
  SUBCASE("Nash-supported state with constant payoffs") {
    for (const auto& name : canonical_protocol_names()) {
      auto counts = supported_action_counts(name);
      if (std::find(counts.begin(), counts.end(), 3u) == counts.end()) continue;
      auto ev = evaluator(protocol_from_name(name, 3));
      double r = delta_passivity_residual(ev, SimplexState{0, 0.4, 0.6}, vec({0, 1, 1}),
                                          Vector::Zero(3));
      CHECK(std::abs(r) <= 1e-6);
    }
  }
}

TEST_CASE("multi-population sums") {
  auto ev = evaluator(protocols::brd(3));
  auto x = SimplexState::barycenter(3);
  Vector pi = vec({0, 1, 2});
  auto single = aggregate_gains(ev, x, pi);
  auto both = multi_aggregate_gain({ev, ev}, {x, x}, {pi, pi});
  CHECK(both.G == 2.0 * single.G);
  CHECK(both.H == 2.0 * single.H);

  auto sm = evaluator(protocols::smith(3, 1.0));
  SimplexState y{0.2, 0.3, 0.5};
  Vector pj = vec({1, -1, 0.5});
  auto mixed = multi_aggregate_gain({ev, sm}, {x, y}, {pi, pj});
  CHECK(mixed.G == doctest::Approx(single.G + aggregate_gains(sm, y, pj).G));
  CHECK_THROWS_AS(multi_aggregate_gain({ev}, {x, x}, {pi, pi}), ArgumentError);
}
