#include "gainflow/analysis.hpp"
#include "gainflow/specs.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace gainflow;
using gainflow::testing::Gen;

namespace {

// A trajectory shell carrying only an aux series on a unit time grid.
Trajectory synthetic(const std::vector<double>& values, double dt = 1.0) {
  Trajectory t;
  t.layout = PopulationLayout::single(1);
  for (std::size_t i = 0; i < values.size(); ++i) t.times.push_back(dt * static_cast<double>(i));
  t.add_aux("S") = values;
  return t;
}

IntegratorConfig config(double dt, double horizon) {
  IntegratorConfig c;
  c.dt = dt;
  c.horizon = horizon;
  return c;
}

}  // namespace

TEST_CASE("monotonicity verdicts on synthetic series") {
  auto down = audit_monotonicity(synthetic({5, 4, 3, 3, 1}), "S", 0.1);
  CHECK(down.verdict == Verdict::monotone);
  CHECK(down.violation_count == 0);
  CHECK(down.max_violation == 0.0);
  CHECK(down.intervals == 4);

  // One isolated small bump.
  auto bump = audit_monotonicity(synthetic({5, 4, 4.05, 3, 2}), "S", 0.1);
  CHECK(bump.verdict == Verdict::monotone_up_to_transients);
  CHECK(bump.violation_count == 1);
  CHECK(bump.transient_count == 1);
  CHECK(bump.max_violation == doctest::Approx(0.05));

  // An increase above the budget.
  auto big = audit_monotonicity(synthetic({5, 4, 4.5, 3, 2}), "S", 0.1);
  CHECK(big.verdict == Verdict::non_monotone);
  CHECK(big.transient_count == 0);

  // Two consecutive small increases are not an isolated transient.
  auto run = audit_monotonicity(synthetic({5, 4, 4.05, 4.1, 2}), "S", 0.1);
  CHECK(run.verdict == Verdict::non_monotone);
  CHECK(run.longest_increase_run == 2);

  auto bad = synthetic({1, 2});
  CHECK_THROWS_AS(audit_monotonicity(bad, "missing", 0.1), ArgumentError);
  CHECK_THROWS_AS(audit_monotonicity(bad, "S", -1.0), ArgumentError);
  CHECK(to_string(Verdict::monotone_up_to_transients) == "monotone_up_to_transients");
}

TEST_CASE("roundoff-level wiggles are not increases") {
  auto r = audit_monotonicity(synthetic({12.0, 1.0, 1e-18, 2e-18, 1e-19, 3e-19}), "S", 0.0);
  CHECK(r.verdict == Verdict::monotone);
  CHECK(r.violation_count == 0);
  auto real = audit_monotonicity(synthetic({12.0, 1.0, 1.0 + 1e-9}), "S", 0.0);
  CHECK(real.violation_count == 1);
}

TEST_CASE("rates use the record spacing") {
  auto r = audit_monotonicity(synthetic({1.0, 0.9, 0.9005, 0.8}, 0.01), "S", 0.1);
  CHECK(r.max_violation == doctest::Approx(0.05));
  CHECK(r.verdict == Verdict::monotone_up_to_transients);
}

TEST_CASE("smith run in good RPS: G decays, audits are idempotent") {
  auto game = games::good_rps(1.0, 0.9);
  auto dyn = MeanDynamic::rationalizable(protocols::smith(3));
  auto traj = simulate(game, dyn, SimplexState{0.9, 0.05, 0.05}, config(0.01, 30.0));
  double budget = default_budget(traj, game);
  CHECK(budget == doctest::Approx(10 * 0.01 * 1.9));
  auto r1 = audit_monotonicity(traj, "G", budget);
  auto r2 = audit_monotonicity(traj, "G", budget);
  CHECK(r1.verdict != Verdict::non_monotone);
  CHECK(r1.decay_checked);
  CHECK(r1.decay_fraction >= 0.99);
  CHECK(r1.initial_value == traj.G.front());
  CHECK(r1.final_value == traj.G.back());
  CHECK(r1.violation_count == r2.violation_count);
  CHECK(r1.max_violation == r2.max_violation);
  CHECK(r1.verdict == r2.verdict);
  CHECK(r1.decay_satisfied == r2.decay_satisfied);
  CHECK_FALSE(audit_monotonicity(traj, "H", budget).decay_checked);
}

TEST_CASE("convergence reports") {
  auto game = games::good_rps(1.0, 0.9);
  auto xs = SimplexState::barycenter(3);
  for (const auto& name : canonical_protocol_names()) {
    auto counts = supported_action_counts(name);
    if (std::find(counts.begin(), counts.end(), 3u) == counts.end()) continue;
    auto traj = simulate(game, MeanDynamic::rationalizable(protocol_from_name(name, 3)), xs,
                         config(0.01, 1.0));
    auto r = audit_convergence(traj, xs.values(), 1e-3);
    INFO(name);
    CHECK(r.converged);
    CHECK(r.first_entry_time == 0.0);
  }

  auto bad = games::good_rps(1.0, 1.1);
  auto traj = simulate(bad, MeanDynamic::rationalizable(protocols::smith(3)),
                       SimplexState{0.9, 0.05, 0.05}, config(0.01, 60.0));
  auto r = audit_convergence(traj, xs.values(), 1e-3);
  CHECK_FALSE(r.converged);
  CHECK(r.final_distance > 1e-3);
  CHECK(r.first_entry_time == -1.0);
  CHECK_THROWS_AS(audit_convergence(traj, Vector::Zero(2), 1e-3), ArgumentError);
}

TEST_CASE("W violations shrink with the step size") {
  auto game = games::good_rps(1.0, 0.9);
  SimplexState x0{0.9, 0.05, 0.05};
  auto coarse = simulate(game, MeanDynamic::replicator(3), x0, config(0.01, 20.0));
  auto fine = simulate(game, MeanDynamic::replicator(3), x0, config(0.005, 20.0));
  auto rc = audit_monotonicity(coarse, "W", 0.0);
  auto rf = audit_monotonicity(fine, "W", 0.0);
  CHECK(rf.violation_count <= rc.violation_count);
  CHECK(rf.max_violation <= rc.max_violation + 1e-15);
}

TEST_CASE("stationarity and Nash coincide for rationalizable dynamics") {
  Gen gen(107);
  for (auto game : {games::good_rps(1.0, 0.9), games::friedman()}) {
    std::vector<SimplexState> states = {*game.equilibrium()};
    for (int i = 0; i < 100; ++i) states.push_back(gen.state(3));
    for (const auto& name : canonical_protocol_names()) {
      auto counts = supported_action_counts(name);
      if (std::find(counts.begin(), counts.end(), 3u) == counts.end()) continue;
      auto rep = check_stationarity_nash(game, MeanDynamic::rationalizable(protocol_from_name(name, 3)),
                                         states);
      INFO(game.name() << " " << name);
      CHECK(rep.states == states.size());
      CHECK(rep.mismatches.empty());
    }
  }
}

TEST_CASE("the replicator is stationary at a non-Nash vertex") {
  auto game = games::good_rps(1.0, 0.9);
  auto rep = check_stationarity_nash(game, MeanDynamic::replicator(3), {SimplexState::vertex(3, 0)});
  REQUIRE(rep.mismatches.size() == 1);
  CHECK(rep.mismatches[0].field_norm == 0.0);
  CHECK(rep.mismatches[0].gap == doctest::Approx(1.0));
}
