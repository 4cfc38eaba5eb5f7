#include "gainflow/gains.hpp"

#include <cmath>
#include <limits>

namespace gainflow {

namespace {

Eigen::Index ix(std::size_t a) { return static_cast<Eigen::Index>(a); }

double best_in(const Vector& pi, ActionSet s) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b : members(s)) best = std::max(best, pi[ix(b)]);
  return best;
}

void require_rationalizable(const MeanDynamic& dyn) {
  if (dyn.kind() != MeanDynamic::Kind::rationalizable)
    throw ArgumentError("per-action gains need a rationalizable dynamic, got '" + dyn.name() + "'");
}

void require_size(const MeanDynamic& dyn, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != dyn.action_count())
    throw ArgumentError("dimension mismatch for dynamic '" + dyn.name() + "'");
}

// Lowest first-order gain among the best actions of s.
double min_gain_over_best(const Vector& pi, const Vector& g, ActionSet s, double tie_tol) {
  const double best = best_in(pi, s);
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t b : members(s))
    if (pi[ix(b)] >= best - tie_tol) low = std::min(low, g[ix(b)]);
  return low;
}

GainSnapshot replicator_snapshot(const Vector& x, const Vector& pi, const CostDistribution& cost) {
  const auto n = x.size();
  const Vector xbar = x / x.sum();
  GainSnapshot s;
  s.g = Vector::Zero(n);
  s.h = Vector::Zero(n);
  s.gamma = Vector::Zero(n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b == a || xbar[b] == 0.0) continue;
      const double d = pi[b] - pi[a];
      s.g[a] += xbar[b] * cost.expected_clipped_gain(d);
      if (d > 0.0) s.gamma[a] += xbar[b] * cost.cdf_left(d) * d;
    }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b == a || xbar[b] == 0.0) continue;
      const double sw = switch_probability(cost, pi[b] - pi[a], kDefaultTieTol);
      if (sw != 0.0) s.h[a] += xbar[b] * sw * (s.g[b] - s.g[a]);
    }
  s.G = x.dot(s.g);
  s.H = x.dot(s.h);
  s.Gamma = x.dot(s.gamma);
  return s;
}

GainSnapshot birth_death_snapshot(const MeanDynamic& dyn, const Vector& x, const Vector& pi) {
  const double mass = x.sum();
  const Vector rel = pi.array() - x.dot(pi) / mass;
  const auto& cost = dyn.cost();
  const double tol = dyn.selection().tie_tol;
  double g = 0.0, q_mass = 0.0, q_gain = 0.0, gamma = 0.0;
  for (const auto& d : dyn.birth_death_availability().draws) {
    if (d.set == 0 || d.probability == 0.0) continue;
    const double top = best_in(rel, d.set);
    g += d.probability * cost.expected_clipped_gain(top);
    if (top > 0.0) gamma += d.probability * cost.cdf_left(top) * top;
    const double sw = switch_probability(cost, top, tol);
    q_mass += d.probability * sw;
    q_gain += d.probability * sw * top;
  }
  GainSnapshot s;
  s.G = mass * g;
  s.H = -mass * q_mass * q_gain;
  s.Gamma = mass * gamma;
  s.g = Vector::Constant(x.size(), s.G);
  s.h = Vector::Constant(x.size(), s.H);
  s.gamma = Vector::Constant(x.size(), s.Gamma);
  return s;
}

}  // namespace

GainEvaluator::GainEvaluator(const MeanDynamic& dyn) : dyn_(dyn) {}

double GainEvaluator::first_order(std::size_t a, const Vector& pi) const {
  require_rationalizable(dyn_);
  require_size(dyn_, pi);
  const auto& proto = dyn_.protocol();
  double g = 0.0;
  for (const auto& d : proto.availability.draws(a)) {
    if (d.set == 0) continue;
    g += d.probability * proto.cost.expected_clipped_gain(best_in(pi, d.set) - pi[ix(a)]);
  }
  return g;
}

Vector GainEvaluator::first_order(const Vector& pi) const {
  Vector g(pi.size());
  for (Eigen::Index a = 0; a < pi.size(); ++a) g[a] = first_order(static_cast<std::size_t>(a), pi);
  return g;
}

double GainEvaluator::gross(std::size_t a, const Vector& pi) const {
  require_rationalizable(dyn_);
  require_size(dyn_, pi);
  const auto& proto = dyn_.protocol();
  double s = 0.0;
  for (const auto& d : proto.availability.draws(a)) {
    if (d.set == 0) continue;
    const double q = best_in(pi, d.set) - pi[ix(a)];
    if (q > 0.0) s += d.probability * proto.cost.cdf_left(q) * q;
  }
  return s;
}

double GainEvaluator::second_order(std::size_t a, const Vector& pi, const Vector& g) const {
  require_rationalizable(dyn_);
  require_size(dyn_, pi);
  require_size(dyn_, g);
  const auto& proto = dyn_.protocol();
  const double tol = dyn_.selection().tie_tol;
  double h = 0.0;
  for (const auto& d : proto.availability.draws(a)) {
    if (d.set == 0) continue;
    const double sw = switch_probability(proto.cost, best_in(pi, d.set) - pi[ix(a)], tol);
    if (sw == 0.0) continue;
    h += d.probability * sw * (min_gain_over_best(pi, g, d.set, tol) - g[ix(a)]);
  }
  return h;
}

double GainEvaluator::second_order(std::size_t a, const Vector& pi) const {
  return second_order(a, pi, first_order(pi));
}

GainSnapshot GainEvaluator::snapshot(const Vector& x, const Vector& pi) const {
  require_size(dyn_, x);
  require_size(dyn_, pi);
  switch (dyn_.kind()) {
    case MeanDynamic::Kind::replicator:
      return replicator_snapshot(x, pi, dyn_.cost());
    case MeanDynamic::Kind::birth_death:
      return birth_death_snapshot(dyn_, x, pi);
    case MeanDynamic::Kind::rationalizable:
      break;
  }
  GainSnapshot s;
  const auto n = pi.size();
  s.g = first_order(pi);
  s.h.resize(n);
  s.gamma.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    s.h[a] = second_order(ua, pi, s.g);
    s.gamma[a] = gross(ua, pi);
  }
  s.G = x.dot(s.g);
  s.H = x.dot(s.h);
  s.Gamma = x.dot(s.gamma);
  return s;
}

GainSnapshot GainEvaluator::snapshot(const SimplexState& x, const Vector& pi) const {
  return snapshot(x.values(), pi);
}

double GainEvaluator::aggregate_G(const Vector& x, const Vector& pi) const {
  require_size(dyn_, x);
  require_size(dyn_, pi);
  switch (dyn_.kind()) {
    case MeanDynamic::Kind::replicator:
      return replicator_aggregate_gain_raw(x, pi, dyn_.cost());
    case MeanDynamic::Kind::birth_death:
      return birth_death_snapshot(dyn_, x, pi).G;
    case MeanDynamic::Kind::rationalizable:
      break;
  }
  return x.dot(first_order(pi));
}

double first_order_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi) {
  return ev.first_order(a, pi);
}

double second_order_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi) {
  return ev.second_order(a, pi);
}

double gross_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi) { return ev.gross(a, pi); }

GainSnapshot aggregate_gains(const GainEvaluator& ev, const SimplexState& x, const Vector& pi) {
  return ev.snapshot(x, pi);
}

GainSnapshot birth_death_gains(const GainEvaluator& ev, const SimplexState& x, const Vector& pi) {
  if (ev.dynamic().kind() != MeanDynamic::Kind::birth_death)
    throw ArgumentError("dynamic '" + ev.dynamic().name() + "' is not of birth-death kind");
  return ev.snapshot(x, pi);
}

double replicator_aggregate_gain(const SimplexState& x, const Vector& pi, const CostDistribution& cost) {
  return replicator_aggregate_gain_raw(x.values(), pi, cost);
}

double replicator_aggregate_gain_raw(const Vector& x, const Vector& pi, const CostDistribution& cost) {
  if (x.size() != pi.size()) throw ArgumentError("dimension mismatch");
  return replicator_snapshot(x, pi, cost).G;
}

double replicator_gross_gain_raw(const Vector& x, const Vector& pi, const CostDistribution& cost) {
  if (x.size() != pi.size()) throw ArgumentError("dimension mismatch");
  return replicator_snapshot(x, pi, cost).Gamma;
}

double replicator_second_order_raw(const Vector& x, const Vector& pi, const CostDistribution& cost) {
  if (x.size() != pi.size()) throw ArgumentError("dimension mismatch");
  return replicator_snapshot(x, pi, cost).H;
}

double replicator_lyapunov(const SimplexState& x, const SimplexState& x_star) {
  return replicator_lyapunov_raw(x.values(), x_star.values());
}

double replicator_lyapunov_raw(const Vector& x, const Vector& x_star) {
  if (x.size() != x_star.size()) throw ArgumentError("dimension mismatch");
  double w = 0.0;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (!(x_star[a] > 0.0)) continue;
    if (!(x[a] > 0.0)) return std::numeric_limits<double>::infinity();
    w += x_star[a] * std::log(x_star[a] / x[a]);
  }
  return w;
}

PassivityResidual delta_passivity(const GainEvaluator& ev, const SimplexState& x, const Vector& pi,
                                  const Vector& pi_dot) {
  constexpr double h = 1e-6;
  constexpr double kink_tol = 1e-3;
  const auto& dyn = ev.dynamic();
  require_size(dyn, pi_dot);
  const Vector& x0 = x.values();
  const Vector xdot = transition_raw(dyn, x0, pi);

  auto derivative = [&](const Vector& dx, const Vector& dpi, bool& kink) {
    const double mid = ev.aggregate_G(x0, pi);
    const double up = ev.aggregate_G(x0 + h * dx, pi + h * dpi);
    const double down = ev.aggregate_G(x0 - h * dx, pi - h * dpi);
    const double fwd = (up - mid) / h;
    const double bwd = (mid - down) / h;
    if (std::abs(fwd - bwd) > kink_tol) {
      kink = true;
      return std::min(fwd, bwd);
    }
    return (up - down) / (2.0 * h);
  };

  PassivityResidual r;
  bool joint_kink = false, part_kink = false;
  const double joint = derivative(xdot, pi_dot, joint_kink);
  r.dG_dx = derivative(xdot, Vector::Zero(pi.size()), part_kink);
  r.dG_dpi = derivative(Vector::Zero(x0.size()), pi_dot, part_kink);
  r.kink = joint_kink;
  r.H = ev.snapshot(x0, pi).H;
  r.xdot_dot_pidot = xdot.dot(pi_dot);
  r.residual = joint - (r.H + r.xdot_dot_pidot);
  return r;
}

double delta_passivity_residual(const GainEvaluator& ev, const SimplexState& x, const Vector& pi,
                                const Vector& pi_dot) {
  return delta_passivity(ev, x, pi, pi_dot).residual;
}

GainSnapshot multi_aggregate_gain(const std::vector<GainEvaluator>& evs, const std::vector<SimplexState>& xs,
                                  const std::vector<Vector>& pis) {
  if (evs.size() != xs.size() || evs.size() != pis.size())
    throw ArgumentError("one evaluator, state and payoff vector per population expected");
  GainSnapshot total;
  std::vector<GainSnapshot> parts;
  Eigen::Index len = 0;
  for (std::size_t p = 0; p < evs.size(); ++p) {
    parts.push_back(evs[p].snapshot(xs[p], pis[p]));
    total.G += parts.back().G;
    total.H += parts.back().H;
    total.Gamma += parts.back().Gamma;
    len += parts.back().g.size();
  }
  total.g.resize(len);
  total.h.resize(len);
  total.gamma.resize(len);
  Eigen::Index at = 0;
  for (const auto& s : parts) {
    total.g.segment(at, s.g.size()) = s.g;
    total.h.segment(at, s.h.size()) = s.h;
    total.gamma.segment(at, s.gamma.size()) = s.gamma;
    at += s.g.size();
  }
  return total;
}

}  // namespace gainflow
