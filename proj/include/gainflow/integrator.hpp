#pragma once

#include "gainflow/common.hpp"
#include "gainflow/dynamics.hpp"
#include "gainflow/game.hpp"
#include "gainflow/gains.hpp"

#include <map>
#include <string>
#include <vector>

namespace gainflow {

enum class Scheme { euler, rk4 };

struct IntegratorConfig {
  double dt = 0.01;
  double horizon = 1.0;
  Scheme scheme = Scheme::rk4;
  std::size_t record_every = 1;
  bool clip_negative = true;

  void check() const;
  std::size_t step_count() const;
};

struct StepResult {
  Vector x;
  double clipped = 0.0;  // total mass removed by clipping negatives
};

class Trajectory {
 public:
  PopulationLayout layout;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> payoffs;
  std::vector<double> G;
  std::vector<double> H;
  std::vector<double> Gamma;
  std::vector<double> nash_gap;
  // Extra diagnostics keyed by name, in insertion order.
  std::vector<std::pair<std::string, std::vector<double>>> aux;
  double total_clipping = 0.0;

  std::string game_name;
  std::string dynamic_name;
  IntegratorConfig config;
  std::uint64_t seed = 0;

  std::size_t size() const { return times.size(); }
  bool has_series(const std::string& name) const;
  // G, H, Gamma, nash_gap or an aux name. "G_replicator" aliases G for
  // replicator runs.
  const std::vector<double>& series(const std::string& name) const;
  std::vector<std::string> series_names() const;
  std::vector<double>& add_aux(const std::string& name);
};

// One step of the combined field followed by clipping and renormalisation.
StepResult step(const std::function<Vector(const Vector&)>& field, const Vector& x, double dt,
                Scheme scheme, const PopulationLayout& layout, bool clip_negative = true);
SimplexState step(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x,
                  double dt, Scheme scheme = Scheme::rk4);

Trajectory simulate(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x0,
                    const IntegratorConfig& config);
Trajectory simulate(const MultiPopulationGame& game, const std::vector<MeanDynamic>& dyns,
                    const Vector& profile0, const IntegratorConfig& config);

}  // namespace gainflow
