#include "gainflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace gainflow {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::monotone: return "monotone";
    case Verdict::monotone_up_to_transients: return "monotone_up_to_transients";
    case Verdict::non_monotone: return "non_monotone";
  }
  return "unknown";
}

namespace {

double sup_jacobian_norm(const std::vector<Vector>& states, const std::function<Matrix(const Vector&)>& jac) {
  double sup = 0.0;
  for (const auto& x : states) sup = std::max(sup, jac(x).cwiseAbs().rowwise().sum().maxCoeff());
  return sup;
}

}  // namespace

double default_budget(const Trajectory& traj, const PopulationGame& game) {
  return 10.0 * traj.config.dt *
         sup_jacobian_norm(traj.states, [&](const Vector& x) { return game.evaluate_jacobian(x); });
}

double default_budget(const Trajectory& traj, const MultiPopulationGame& game) {
  return 10.0 * traj.config.dt *
         sup_jacobian_norm(traj.states, [&](const Vector& x) { return game.evaluate_jacobian(x); });
}

MonotonicityReport audit_monotonicity(const Trajectory& traj, const std::string& series, double budget) {
  if (!(budget >= 0.0)) throw ArgumentError("budget must be non-negative");
  const auto& s = traj.series(series);
  if (s.size() != traj.times.size()) throw ArgumentError("series '" + series + "' does not match the time grid");

  MonotonicityReport r;
  r.series = series;
  r.budget = budget;
  r.intervals = s.empty() ? 0 : s.size() - 1;
  if (!s.empty()) {
    r.initial_value = s.front();
    r.final_value = s.back();
  }

  // Changes below the series' floating-point resolution are not increases.
  double scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * scale;

  std::vector<double> rate(r.intervals);
  std::vector<bool> up(r.intervals);
  for (std::size_t i = 0; i < r.intervals; ++i) {
    rate[i] = (s[i + 1] - s[i]) / (traj.times[i + 1] - traj.times[i]);
    up[i] = s[i + 1] - s[i] > floor;
  }

  bool over_budget = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < r.intervals; ++i) {
    if (!up[i]) {
      run = 0;
      continue;
    }
    ++r.violation_count;
    r.max_violation = std::max(r.max_violation, rate[i]);
    r.longest_increase_run = std::max(r.longest_increase_run, ++run);
    if (rate[i] > budget) {
      over_budget = true;
      continue;
    }
    const bool isolated = (i == 0 || !up[i - 1]) && (i + 1 == r.intervals || !up[i + 1]);
    if (isolated) ++r.transient_count;
  }
  if (over_budget || r.longest_increase_run >= 2)
    r.verdict = Verdict::non_monotone;
  else if (r.violation_count == 0)
    r.verdict = Verdict::monotone;
  else
    r.verdict = Verdict::monotone_up_to_transients;

  if (series == "G" || series == "G_replicator") {
    r.decay_checked = true;
    for (std::size_t i = 0; i < r.intervals; ++i)
      if (rate[i] <= traj.H[i] + budget) ++r.decay_satisfied;
    r.decay_fraction =
        r.intervals == 0 ? 1.0 : static_cast<double>(r.decay_satisfied) / static_cast<double>(r.intervals);
  }
  r.toward_zero = !s.empty() && s.back() < std::max(1e-6, 1e-3 * s.front());
  return r;
}

namespace {

ConvergenceReport convergence_from(const Trajectory& traj, const std::function<double(const Vector&)>& dist,
                                   double radius) {
  ConvergenceReport r;
  r.radius = radius;
  if (traj.size() == 0) return r;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (dist(traj.states[i]) < radius && traj.nash_gap[i] < radius) {
      r.first_entry_time = traj.times[i];
      break;
    }
  }
  r.final_distance = dist(traj.states.back());
  r.final_gap = traj.nash_gap.back();
  r.converged = r.final_distance < radius && r.final_gap < radius;
  return r;
}

}  // namespace

ConvergenceReport audit_convergence(const Trajectory& traj, const Vector& target, double radius) {
  if (static_cast<std::size_t>(target.size()) != traj.layout.total_actions())
    throw ArgumentError("target length differs from the trajectory state");
  return convergence_from(traj, [&](const Vector& x) { return (x - target).cwiseAbs().maxCoeff(); }, radius);
}

ConvergenceReport audit_aggregate_convergence(const Trajectory& traj, const Vector& aggregate, double radius) {
  const auto& layout = traj.layout;
  for (std::size_t p = 0; p < layout.population_count(); ++p)
    if (layout.population(p).actions != static_cast<std::size_t>(aggregate.size()))
      throw ArgumentError("aggregate length differs from a population's action count");
  return convergence_from(
      traj,
      [&](const Vector& x) {
        Vector sum = Vector::Zero(aggregate.size());
        for (std::size_t p = 0; p < layout.population_count(); ++p) sum += layout.segment(x, p);
        return (sum - aggregate).cwiseAbs().maxCoeff();
      },
      radius);
}

bool SuiteReport::all_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed(); });
}

const PropertyOutcome& SuiteReport::property(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return p;
  throw ArgumentError("unknown property '" + name + "'");
}

namespace {

Eigen::Index ix(std::size_t a) { return static_cast<Eigen::Index>(a); }

constexpr double kTol = 1e-9;
constexpr double kEps = 1e-5;
constexpr double kSmoothMargin = 1e-4;
constexpr std::size_t kMaxCounterexamples = 5;

std::string show(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

class Suite {
 public:
  explicit Suite(const RevisionProtocol& protocol)
      : dyn_(MeanDynamic::rationalizable(protocol, {}, true)), ev_(dyn_), n_(protocol.action_count()) {
    for (const char* name : {"g0", "g1", "g2", "h", "gh", "GH-i", "GH-ii", "gross"}) out_.push_back({name, 0, 0, {}});
    const auto& cost = dyn_.cost();
    marks_ = cost.atoms();
    auto kinks = cost.kinks();
    marks_.insert(marks_.end(), kinks.begin(), kinks.end());
    marks_.push_back(0.0);
    zero_cost_ = cost.kind() == CostDistribution::Kind::zero_cost;
  }

  std::vector<PropertyOutcome> take() { return std::move(out_); }

  // Payoff-only properties.
  void payoff_checks(const Vector& pi, const Vector& g, const Vector& h) {
    const double top = pi.maxCoeff();
    for (std::size_t a = 0; a < n_; ++a) {
      const bool argmax = pi[ix(a)] == top;
      check("g0", g[ix(a)] >= 0.0 && ((g[ix(a)] == 0.0) == argmax), pi, a, 0, "g = " + num(g[ix(a)]));
      check("h", h[ix(a)] <= 0.0 && ((h[ix(a)] == 0.0) == argmax), pi, a, 0, "h = " + num(h[ix(a)]));
      const double gamma = ev_.gross(a, pi);
      bool ok = gamma >= g[ix(a)] - kTol * std::max(1.0, std::abs(g[ix(a)]));
      if (zero_cost_) ok = ok && std::abs(gamma - g[ix(a)]) <= kTol * std::max(1.0, std::abs(g[ix(a)]));
      check("gross", ok, pi, a, 0, "gamma = " + num(gamma) + ", g = " + num(g[ix(a)]));
      for (std::size_t b = 0; b < n_; ++b) {
        if (b == a || !(pi[ix(a)] <= pi[ix(b)])) continue;
        bool mono = g[ix(b)] <= g[ix(a)] + kTol * std::max(1.0, std::abs(g[ix(a)]));
        if (pi[ix(b)] - pi[ix(a)] >= 1e-6) mono = mono && g[ix(b)] < g[ix(a)];
        check("g1", mono, pi, a, b,
              "g_" + std::to_string(a + 1) + " = " + num(g[ix(a)]) + ", g_" + std::to_string(b + 1) + " = " +
                  num(g[ix(b)]));
      }
    }
  }

  void probe(const Vector& pi) {
    const Vector g = ev_.first_order(pi);
    Vector h(ix(n_));
    for (std::size_t a = 0; a < n_; ++a) h[ix(a)] = ev_.second_order(a, pi, g);
    payoff_checks(pi, g, h);
  }

  bool smooth(const Vector& pi) const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b)
        if (std::abs(pi[ix(a)] - pi[ix(b)]) < kSmoothMargin) return false;
    const auto& avail = dyn_.protocol().availability;
    for (std::size_t a = 0; a < n_; ++a)
      for (const auto& d : avail.draws(a)) {
        if (d.set == 0) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b : members(d.set)) best = std::max(best, pi[ix(b)]);
        for (double m : marks_)
          if (std::abs(best - pi[ix(a)] - m) < kSmoothMargin) return false;
      }
    return true;
  }

  void trial(const Vector& pi, const Vector& x, const Vector& dpi, bool& was_smooth) {
    const Vector g = ev_.first_order(pi);
    Vector h(ix(n_));
    for (std::size_t a = 0; a < n_; ++a) h[ix(a)] = ev_.second_order(a, pi, g);
    payoff_checks(pi, g, h);

    const Vector xdot = transition_raw(dyn_, x, pi);
    const auto snap = ev_.snapshot(x, pi);
    const double gx = g.dot(xdot);
    check("GH-i", std::abs(snap.H - gx) <= kTol * std::max(1.0, std::abs(gx)), pi, 0, 0,
          "H = " + num(snap.H) + ", g.xdot = " + num(gx) + " at x = " + show(x));

    was_smooth = smooth(pi);
    if (!was_smooth) return;

    for (std::size_t a = 0; a < n_; ++a) {
      const Vector z = per_action_transition(dyn_, a, pi);
      const double fd = (ev_.first_order(a, pi + kEps * dpi) - ev_.first_order(a, pi - kEps * dpi)) / (2 * kEps);
      const double exact = z.dot(dpi);
      check("g2", std::abs(fd - exact) <= 1e-4 * std::abs(exact) + kTol, pi, a, 0,
            "fd = " + num(fd) + ", z.dpi = " + num(exact) + " along " + show(dpi));
      const double zg = z.dot(g);
      check("gh", std::abs(h[ix(a)] - zg) <= kTol * std::max(1.0, std::abs(zg)), pi, a, 0,
            "h = " + num(h[ix(a)]) + ", z.g = " + num(zg));
    }

    const double fdx =
        (ev_.aggregate_G(x + kEps * xdot, pi) - ev_.aggregate_G(x - kEps * xdot, pi)) / (2 * kEps);
    check("GH-i", std::abs(fdx - snap.H) <= 1e-5, pi, 0, 0,
          "dG/dx.xdot = " + num(fdx) + ", H = " + num(snap.H) + " at x = " + show(x));

    const double fdp =
        (ev_.aggregate_G(x, pi + kEps * dpi) - ev_.aggregate_G(x, pi - kEps * dpi)) / (2 * kEps);
    const double want = xdot.dot(dpi);
    check("GH-ii", std::abs(fdp - want) <= 1e-4 * std::abs(want) + kTol, pi, 0, 0,
          "dG/dpi.dpi = " + num(fdp) + ", xdot.dpi = " + num(want) + " at x = " + show(x));
  }

 private:
  static std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

  void check(const std::string& name, bool ok, const Vector& pi, std::size_t a, std::size_t b,
             const std::string& detail) {
    auto& p = *std::find_if(out_.begin(), out_.end(), [&](const auto& o) { return o.name == name; });
    ++p.checks;
    if (ok) return;
    ++p.failures;
    if (p.counterexamples.size() < kMaxCounterexamples)
      p.counterexamples.push_back("pi = " + show(pi) + ", a = " + std::to_string(a + 1) +
                                  (name == "g1" ? ", b = " + std::to_string(b + 1) : "") + ": " + detail);
  }

  MeanDynamic dyn_;
  GainEvaluator ev_;
  std::size_t n_;
  std::vector<double> marks_;
  bool zero_cost_ = false;
  std::vector<PropertyOutcome> out_;
};

}  // namespace

SuiteReport run_property_suite(const RevisionProtocol& protocol, std::uint64_t seed, std::size_t trial_count) {
  const std::size_t n = protocol.action_count();
  Suite suite(protocol);
  SuiteReport rep;
  rep.protocol = protocol.name;
  rep.actions = n;
  rep.trials = trial_count;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> level(-2, 2);
  for (std::size_t t = 0; t < trial_count; ++t) {
    Vector pi(ix(n)), x(ix(n)), dpi(ix(n));
    // Every fourth trial uses integer payoffs so that ties occur.
    const bool tied = t % 4 == 3;
    for (auto& e : pi) e = tied ? static_cast<double>(level(rng)) : -5.0 + 10.0 * unit(rng);
    for (auto& e : x) e = -std::log(1e-12 + (1.0 - 1e-12) * unit(rng));
    x /= x.sum();
    for (auto& e : dpi) e = -1.0 + 2.0 * unit(rng);
    bool smooth = false;
    suite.trial(pi, x, dpi, smooth);
    if (smooth) ++rep.smooth_trials;
  }

  // Every ordering of two fixed payoff profiles, one with doubling gaps and
  // one with halving gaps.
  if (n <= 6) {
    for (bool widen : {true, false}) {
      Vector base(ix(n));
      double v = 0.0, gap = widen ? 1.0 : std::pow(2.0, static_cast<double>(n) - 2.0);
      for (std::size_t k = 0; k < n; ++k) {
        base[ix(k)] = v;
        v += gap;
        gap = widen ? 2.0 * gap : 0.5 * gap;
      }
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      do {
        Vector pi(ix(n));
        for (std::size_t k = 0; k < n; ++k) pi[ix(order[k])] = base[ix(k)];
        suite.probe(pi);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

  rep.properties = suite.take();
  return rep;
}

StationarityReport check_stationarity_nash(const PopulationGame& game, const MeanDynamic& dyn,
                                           const std::vector<SimplexState>& states) {
  StationarityReport rep;
  for (const auto& x : states) {
    ++rep.states;
    const double field = combined_field(game, dyn, x).cwiseAbs().maxCoeff();
    const double gap = nash_gap(game, x);
    if ((field < 1e-9) != (gap < 1e-9)) rep.mismatches.push_back({x.values(), field, gap});
  }
  return rep;
}

}  // namespace gainflow
