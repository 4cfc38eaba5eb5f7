#include "gainflow/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace gainflow {

namespace {

Eigen::Index ix(std::size_t a) { return static_cast<Eigen::Index>(a); }

void require_dims(std::size_t n, const Vector& x, const Vector& pi) {
  if (static_cast<std::size_t>(x.size()) != n || static_cast<std::size_t>(pi.size()) != n) {
    std::ostringstream os;
    os << "dimension mismatch: dynamic has " << n << " actions, state " << x.size() << ", payoffs "
       << pi.size();
    throw ArgumentError(os.str());
  }
}

double best_in(const Vector& pi, ActionSet s) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b : members(s)) best = std::max(best, pi[ix(b)]);
  return best;
}

void check_selection(const SelectionRule& sel, std::size_t n) {
  if (!(sel.tie_tol >= 0.0)) throw ArgumentError("tie tolerance must be non-negative");
  if (sel.mixing == SelectionRule::Mixing::given_weights) {
    if (static_cast<std::size_t>(sel.weights.size()) != n) throw ArgumentError("selection weights need one entry per action");
    if ((sel.weights.array() < 0.0).any() || !sel.weights.allFinite())
      throw ArgumentError("selection weights must be non-negative");
  }
}

}  // namespace

void SelectionRule::select(const Vector& pi, ActionSet available, Vector& y) const {
  y = Vector::Zero(pi.size());
  if (available == 0) return;
  const double best = best_in(pi, available);
  ActionSet top = 0;
  for (std::size_t b : members(available))
    if (pi[ix(b)] >= best - tie_tol) top |= singleton(b);
  switch (mixing) {
    case Mixing::lowest_index:
      y[ix(members(top).front())] = 1.0;
      return;
    case Mixing::given_weights: {
      double total = 0.0;
      for (std::size_t b : members(top)) total += weights[ix(b)];
      if (total > 0.0) {
        for (std::size_t b : members(top)) y[ix(b)] = weights[ix(b)] / total;
        return;
      }
      break;
    }
    case Mixing::uniform_over_best:
      break;
  }
  const double share = 1.0 / set_size(top);
  for (std::size_t b : members(top)) y[ix(b)] = share;
}

double switch_probability(const CostDistribution& cost, double gross, double tie_tol) {
  if (gross <= tie_tol) return 0.0;
  return cost.cdf(gross);
}

BirthDeathAvailability BirthDeathAvailability::uniform_singleton(std::size_t n) {
  std::vector<Draw> draws;
  for (std::size_t a = 0; a < n; ++a) draws.push_back({singleton(a), 1.0 / static_cast<double>(n)});
  return from_draws(n, std::move(draws));
}

BirthDeathAvailability BirthDeathAvailability::full(std::size_t n) {
  return from_draws(n, {{full_set(n), 1.0}});
}

BirthDeathAvailability BirthDeathAvailability::from_draws(std::size_t n, std::vector<Draw> draws) {
  if (n == 0 || n > kMaxActions) throw ArgumentError("action count out of range");
  double total = 0.0;
  for (const auto& d : draws) {
    if ((d.set & ~full_set(n)) != 0) throw DomainError("draw " + format_set(d.set) + " leaves the action set");
    if (!(d.probability >= 0.0)) throw DomainError("negative draw probability");
    total += d.probability;
  }
  if (std::abs(total - 1.0) > kProbabilityTol) throw DomainError("draw probabilities must sum to 1");
  BirthDeathAvailability b;
  b.actions = n;
  b.draws = std::move(draws);
  return b;
}

bool BirthDeathAvailability::every_action_reachable() const {
  for (std::size_t a = 0; a < actions; ++a) {
    double p = 0.0;
    for (const auto& d : draws)
      if (contains(d.set, a)) p += d.probability;
    if (!(p > 0.0)) return false;
  }
  return true;
}

MeanDynamic MeanDynamic::rationalizable(RevisionProtocol protocol, SelectionRule selection, bool allow_invalid) {
  const auto& report = protocol.validate();
  MeanDynamic d;
  if (!report.all_pass()) {
    if (!allow_invalid) {
      std::string failed;
      if (!report.q1_pass) failed += " Q1";
      if (!report.a1i_pass) failed += " A1-i";
      if (!report.a1ii_pass) failed += " A1-ii";
      throw DomainError("protocol '" + protocol.name + "' fails" + failed);
    }
    d.overridden_ = true;
  }
  check_selection(selection, protocol.action_count());
  d.kind_ = Kind::rationalizable;
  d.name_ = protocol.name;
  d.n_ = protocol.action_count();
  d.selection_ = std::move(selection);
  d.cost_ = protocol.cost;
  d.protocol_ = std::move(protocol);
  return d;
}

MeanDynamic MeanDynamic::replicator(std::size_t n, CostDistribution cost) {
  if (n == 0 || n > kMaxActions) throw ArgumentError("action count out of range");
  MeanDynamic d;
  d.kind_ = Kind::replicator;
  d.name_ = "replicator";
  d.n_ = n;
  d.cost_ = std::move(cost);
  return d;
}

MeanDynamic MeanDynamic::birth_death(BirthDeathAvailability availability, CostDistribution cost,
                                     SelectionRule selection, std::string name) {
  if (!availability.every_action_reachable())
    throw DomainError("birth-death availability must reach every action with positive probability");
  if (auto q = cost.q1_violation())
    throw DomainError("birth-death cost violates Q1 at q = " + std::to_string(*q));
  check_selection(selection, availability.actions);
  MeanDynamic d;
  d.kind_ = Kind::birth_death;
  d.name_ = std::move(name);
  d.n_ = availability.actions;
  d.selection_ = std::move(selection);
  d.cost_ = std::move(cost);
  d.bd_ = std::move(availability);
  return d;
}

MeanDynamic MeanDynamic::bnn(std::size_t n) {
  return birth_death(BirthDeathAvailability::uniform_singleton(n),
                     CostDistribution::linear(1.0, std::numeric_limits<double>::infinity()), {}, "bnn");
}

const RevisionProtocol& MeanDynamic::protocol() const {
  if (!protocol_) throw ArgumentError("dynamic '" + name_ + "' has no revision protocol");
  return *protocol_;
}

const BirthDeathAvailability& MeanDynamic::birth_death_availability() const {
  if (!bd_) throw ArgumentError("dynamic '" + name_ + "' is not of birth-death kind");
  return *bd_;
}

Vector per_action_transition(const MeanDynamic& dyn, std::size_t a, const Vector& pi) {
  if (dyn.kind() != MeanDynamic::Kind::rationalizable)
    throw ArgumentError("per-action transitions exist only for rationalizable dynamics");
  const std::size_t n = dyn.action_count();
  if (static_cast<std::size_t>(pi.size()) != n || a >= n) throw ArgumentError("dimension mismatch");
  const auto& proto = dyn.protocol();
  const auto& sel = dyn.selection();
  Vector z = Vector::Zero(ix(n));
  Vector y;
  for (const auto& d : proto.availability.draws(a)) {
    if (d.set == 0) continue;
    double sw = switch_probability(proto.cost, best_in(pi, d.set) - pi[ix(a)], sel.tie_tol);
    if (sw == 0.0) continue;
    sel.select(pi, d.set, y);
    y[ix(a)] -= 1.0;
    z += (d.probability * sw) * y;
  }
  return z;
}

Vector transition_raw(const MeanDynamic& dyn, const Vector& x, const Vector& pi) {
  const std::size_t n = dyn.action_count();
  require_dims(n, x, pi);
  Vector v = Vector::Zero(ix(n));
  switch (dyn.kind()) {
    case MeanDynamic::Kind::rationalizable:
      for (std::size_t a = 0; a < n; ++a)
        if (x[ix(a)] != 0.0) v += x[ix(a)] * per_action_transition(dyn, a, pi);
      return v;
    case MeanDynamic::Kind::replicator: {
      double avg = x.dot(pi) / x.sum();
      for (std::size_t a = 0; a < n; ++a) v[ix(a)] = x[ix(a)] * (pi[ix(a)] - avg);
      return v;
    }
    case MeanDynamic::Kind::birth_death: {
      const double mass = x.sum();
      const double avg = x.dot(pi) / mass;
      const auto& sel = dyn.selection();
      Vector y;
      for (const auto& d : dyn.birth_death_availability().draws) {
        if (d.set == 0) continue;
        double sw = switch_probability(dyn.cost(), best_in(pi, d.set) - avg, sel.tie_tol);
        if (sw == 0.0) continue;
        sel.select(pi, d.set, y);
        v += (d.probability * sw) * (mass * y - x);
      }
      return v;
    }
  }
  return v;
}

Vector transition(const MeanDynamic& dyn, const SimplexState& x, const Vector& pi) {
  return transition_raw(dyn, x.values(), pi);
}

Vector combined_field(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x) {
  if (game.action_count() != dyn.action_count()) throw ArgumentError("game and dynamic action counts differ");
  return transition(dyn, x, payoff(game, x));
}

Vector combined_field_raw(const PopulationGame& game, const MeanDynamic& dyn, const Vector& x) {
  if (game.action_count() != dyn.action_count()) throw ArgumentError("game and dynamic action counts differ");
  return transition_raw(dyn, x, game.evaluate(x));
}

Vector combined_field(const MultiPopulationGame& game, const std::vector<MeanDynamic>& dyns,
                      const Vector& profile) {
  const auto& layout = game.layout();
  if (dyns.size() != layout.population_count()) throw ArgumentError("one dynamic per population expected");
  Vector pi = game.evaluate(profile);
  Vector v(profile.size());
  for (std::size_t p = 0; p < dyns.size(); ++p) {
    if (dyns[p].action_count() != layout.population(p).actions)
      throw ArgumentError("dynamic action count differs from its population");
    layout.segment(v, p) = transition_raw(dyns[p], Vector(layout.segment(profile, p)), Vector(layout.segment(pi, p)));
  }
  return v;
}

}  // namespace gainflow
