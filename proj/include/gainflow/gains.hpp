#pragma once

#include "gainflow/common.hpp"
#include "gainflow/dynamics.hpp"
#include "gainflow/simplex.hpp"

#include <vector>

namespace gainflow {

struct GainSnapshot {
  Vector g;
  Vector h;
  Vector gamma;
  double G = 0.0;
  double H = 0.0;
  double Gamma = 0.0;
};

// Gains of the protocol behind a rationalizable or birth-death dynamic.
class GainEvaluator {
 public:
  explicit GainEvaluator(const MeanDynamic& dyn);

  const MeanDynamic& dynamic() const { return dyn_; }

  double first_order(std::size_t a, const Vector& pi) const;
  Vector first_order(const Vector& pi) const;
  double gross(std::size_t a, const Vector& pi) const;
  // h_a given the full vector g of first-order gains.
  double second_order(std::size_t a, const Vector& pi, const Vector& g) const;
  double second_order(std::size_t a, const Vector& pi) const;

  // Aggregates at a raw state; birth-death G and H depend on x nonlinearly.
  GainSnapshot snapshot(const Vector& x, const Vector& pi) const;
  GainSnapshot snapshot(const SimplexState& x, const Vector& pi) const;
  double aggregate_G(const Vector& x, const Vector& pi) const;

 private:
  MeanDynamic dyn_;
};

double first_order_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi);
double second_order_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi);
double gross_gain(const GainEvaluator& ev, std::size_t a, const Vector& pi);
GainSnapshot aggregate_gains(const GainEvaluator& ev, const SimplexState& x, const Vector& pi);
GainSnapshot birth_death_gains(const GainEvaluator& ev, const SimplexState& x, const Vector& pi);

// sum_a x_a sum_b x_b E_Q[pi_b - pi_a - q]_+.
double replicator_aggregate_gain(const SimplexState& x, const Vector& pi,
                                 const CostDistribution& cost);
double replicator_aggregate_gain_raw(const Vector& x, const Vector& pi,
                                     const CostDistribution& cost);
// Same double sum with Q_-(d) d in place of the clipped gain.
double replicator_gross_gain_raw(const Vector& x, const Vector& pi, const CostDistribution& cost);
// x . h with h_a = sum_b x_b Q(pi_b - pi_a) (g_b - g_a).
double replicator_second_order_raw(const Vector& x, const Vector& pi,
                                   const CostDistribution& cost);

// sum over supp(x*) of x*_a ln(x*_a / x_a); +inf if x vanishes there.
double replicator_lyapunov(const SimplexState& x, const SimplexState& x_star);
double replicator_lyapunov_raw(const Vector& x, const Vector& x_star);

struct PassivityResidual {
  double residual = 0.0;
  bool kink = false;
  double dG_dx = 0.0;
  double dG_dpi = 0.0;
  double H = 0.0;
  double xdot_dot_pidot = 0.0;
};

// (dG/dx . xdot + dG/dpi . pidot) - (H + xdot . pidot) with central differences.
// At detected kinks the lower one-sided derivative is used.
PassivityResidual delta_passivity(const GainEvaluator& ev, const SimplexState& x,
                                  const Vector& pi, const Vector& pi_dot);
double delta_passivity_residual(const GainEvaluator& ev, const SimplexState& x, const Vector& pi,
                                const Vector& pi_dot);

GainSnapshot multi_aggregate_gain(const std::vector<GainEvaluator>& evs,
                                  const std::vector<SimplexState>& xs,
                                  const std::vector<Vector>& pis);

}  // namespace gainflow
