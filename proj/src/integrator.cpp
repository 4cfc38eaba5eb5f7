#include "gainflow/integrator.hpp"

#include <cmath>
#include <sstream>

namespace gainflow {

void IntegratorConfig::check() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon must be non-negative");
  if (horizon > 0.0 && dt > horizon) throw ArgumentError("dt exceeds the horizon");
  if (record_every == 0) throw ArgumentError("record_every must be at least 1");
}

std::size_t IntegratorConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

bool Trajectory::has_series(const std::string& name) const {
  if (name == "G" || name == "H" || name == "Gamma" || name == "nash_gap") return true;
  if (name == "G_replicator") return dynamic_name == "replicator";
  for (const auto& [key, _] : aux)
    if (key == name) return true;
  return false;
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  if (name == "G") return G;
  if (name == "H") return H;
  if (name == "Gamma") return Gamma;
  if (name == "nash_gap") return nash_gap;
  if (name == "G_replicator" && dynamic_name == "replicator") return G;
  for (const auto& [key, values] : aux)
    if (key == name) return values;
  throw ArgumentError("unknown series '" + name + "'");
}

std::vector<std::string> Trajectory::series_names() const {
  std::vector<std::string> out = {"G", "H", "Gamma", "nash_gap"};
  for (const auto& [key, _] : aux) out.push_back(key);
  return out;
}

std::vector<double>& Trajectory::add_aux(const std::string& name) {
  for (auto& [key, values] : aux)
    if (key == name) return values;
  aux.emplace_back(name, std::vector<double>{});
  return aux.back().second;
}

StepResult step(const std::function<Vector(const Vector&)>& field, const Vector& x, double dt,
                Scheme scheme, const PopulationLayout& layout, bool clip_negative) {
  Vector next;
  if (scheme == Scheme::euler) {
    next = x + dt * field(x);
  } else {
    const Vector k1 = field(x);
    const Vector k2 = field(x + 0.5 * dt * k1);
    const Vector k3 = field(x + 0.5 * dt * k2);
    const Vector k4 = field(x + dt * k3);
    next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!next.allFinite()) throw NumericError("state became non-finite");
  StepResult r;
  for (std::size_t p = 0; p < layout.population_count(); ++p) {
    auto block = layout.segment(next, p);
    if (clip_negative) {
      for (Eigen::Index i = 0; i < block.size(); ++i)
        if (block[i] < 0.0) {
          r.clipped -= block[i];
          block[i] = 0.0;
        }
    }
    const double sum = block.sum();
    if (!(sum > 0.0)) throw NumericError("population mass collapsed");
    block *= layout.population(p).mass / sum;
  }
  r.x = std::move(next);
  return r;
}

namespace {

Vector checked_payoff(const PayoffMap& f, const Vector& x) {
  Vector pi = f(x);
  if (!pi.allFinite()) {
    std::ostringstream os;
    os << "non-finite payoff at x = [" << x.transpose() << "]";
    throw NumericError(os.str());
  }
  return pi;
}

Vector single_field(const PopulationGame& game, const MeanDynamic& dyn, const Vector& x) {
  return transition_raw(dyn, x, checked_payoff([&](const Vector& v) { return game.evaluate(v); }, x));
}

}  // namespace

SimplexState step(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x, double dt,
                  Scheme scheme) {
  if (game.action_count() != dyn.action_count()) throw ArgumentError("game and dynamic action counts differ");
  auto layout = PopulationLayout::single(x.size(), x.mass());
  auto r = step([&](const Vector& v) { return single_field(game, dyn, v); }, x.values(), dt, scheme, layout);
  return SimplexState(r.x, x.mass());
}

Trajectory simulate(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x0,
                    const IntegratorConfig& config) {
  config.check();
  if (game.action_count() != dyn.action_count() || x0.size() != dyn.action_count())
    throw ArgumentError("game, dynamic and initial state sizes differ");
  Trajectory traj;
  traj.layout = PopulationLayout::single(x0.size(), x0.mass());
  traj.game_name = game.name();
  traj.dynamic_name = dyn.name();
  traj.config = config;

  const GainEvaluator ev(dyn);
  const bool track_w = dyn.kind() == MeanDynamic::Kind::replicator && game.equilibrium().has_value();
  std::vector<double>* w = track_w ? &traj.add_aux("W") : nullptr;

  auto record = [&](double t, const Vector& x) {
    Vector pi = checked_payoff([&](const Vector& v) { return game.evaluate(v); }, x);
    auto s = ev.snapshot(x, pi);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.payoffs.push_back(pi);
    traj.G.push_back(s.G);
    traj.H.push_back(s.H);
    traj.Gamma.push_back(s.Gamma);
    traj.nash_gap.push_back(nash_gap(x, pi));
    if (w) w->push_back(replicator_lyapunov_raw(x, game.equilibrium()->values()));
  };

  const std::size_t steps = config.step_count();
  Vector x = x0.values();
  record(0.0, x);
  auto field = [&](const Vector& v) { return single_field(game, dyn, v); };
  for (std::size_t k = 1; k <= steps; ++k) {
    auto r = step(field, x, config.dt, config.scheme, traj.layout, config.clip_negative);
    x = std::move(r.x);
    traj.total_clipping += r.clipped;
    if (k % config.record_every == 0 || k == steps) record(static_cast<double>(k) * config.dt, x);
  }
  return traj;
}

Trajectory simulate(const MultiPopulationGame& game, const std::vector<MeanDynamic>& dyns, const Vector& profile0,
                    const IntegratorConfig& config) {
  config.check();
  const auto& layout = game.layout();
  if (dyns.size() != layout.population_count()) throw ArgumentError("one dynamic per population expected");
  if (static_cast<std::size_t>(profile0.size()) != layout.total_actions())
    throw ArgumentError("profile length differs from the layout");
  split_profile(layout, profile0);

  Trajectory traj;
  traj.layout = layout;
  traj.game_name = game.name();
  for (std::size_t p = 0; p < dyns.size(); ++p) {
    if (dyns[p].action_count() != layout.population(p).actions)
      throw ArgumentError("dynamic action count differs from its population");
    traj.dynamic_name += (p ? "+" : "") + dyns[p].name();
  }
  traj.config = config;

  std::vector<GainEvaluator> evs(dyns.begin(), dyns.end());
  auto payoff_of = [&](const Vector& v) { return checked_payoff([&](const Vector& u) { return game.evaluate(u); }, v); };

  auto record = [&](double t, const Vector& x) {
    Vector pi = payoff_of(x);
    double g = 0.0, h = 0.0, gamma = 0.0, gap = 0.0;
    for (std::size_t p = 0; p < evs.size(); ++p) {
      Vector xp = layout.segment(x, p), pp = layout.segment(pi, p);
      auto s = evs[p].snapshot(xp, pp);
      g += s.G;
      h += s.H;
      gamma += s.Gamma;
      gap += nash_gap(xp, pp);
    }
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.payoffs.push_back(pi);
    traj.G.push_back(g);
    traj.H.push_back(h);
    traj.Gamma.push_back(gamma);
    traj.nash_gap.push_back(gap);
  };

  auto field = [&](const Vector& x) {
    Vector pi = payoff_of(x);
    Vector v(x.size());
    for (std::size_t p = 0; p < dyns.size(); ++p)
      layout.segment(v, p) = transition_raw(dyns[p], Vector(layout.segment(x, p)), Vector(layout.segment(pi, p)));
    return v;
  };

  const std::size_t steps = config.step_count();
  Vector x = profile0;
  record(0.0, x);
  for (std::size_t k = 1; k <= steps; ++k) {
    auto r = step(field, x, config.dt, config.scheme, layout, config.clip_negative);
    x = std::move(r.x);
    traj.total_clipping += r.clipped;
    if (k % config.record_every == 0 || k == steps) record(static_cast<double>(k) * config.dt, x);
  }
  return traj;
}

}  // namespace gainflow
