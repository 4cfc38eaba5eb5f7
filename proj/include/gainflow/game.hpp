#pragma once

#include "gainflow/common.hpp"
#include "gainflow/simplex.hpp"

#include <functional>
#include <optional>
#include <string>

namespace gainflow {

// Payoff maps are defined on an open neighbourhood of the simplex so that
// coordinate finite differences and Runge-Kutta stage points make sense.
using PayoffMap = std::function<Vector(const Vector&)>;
using JacobianMap = std::function<Matrix(const Vector&)>;

class PopulationGame {
 public:
  PopulationGame(std::string name, std::size_t action_count, PayoffMap payoff,
                 JacobianMap jacobian = {});

  // F(x) = Pi x.
  static PopulationGame matrix(Matrix pi, std::string name = "matrix");

  const std::string& name() const { return name_; }
  std::size_t action_count() const { return actions_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  // Set for matching games; the Jacobian is then constant.
  const std::optional<Matrix>& payoff_matrix() const { return matrix_; }

  const std::optional<SimplexState>& equilibrium() const { return equilibrium_; }
  PopulationGame& set_equilibrium(SimplexState x);

  // Unchecked evaluation on raw vectors.
  Vector evaluate(const Vector& x) const;
  Matrix evaluate_jacobian(const Vector& x) const;
  // Central differences, step 1e-6, clipped symmetrically at the boundary.
  Matrix finite_difference_jacobian(const Vector& x) const;

 private:
  std::string name_;
  std::size_t actions_;
  PayoffMap payoff_;
  JacobianMap jacobian_;
  std::optional<Matrix> matrix_;
  std::optional<SimplexState> equilibrium_;
};

struct Population {
  std::size_t actions;
  double mass;
};

// Layout of a profile vector: populations stored back to back.
class PopulationLayout {
 public:
  PopulationLayout() = default;
  explicit PopulationLayout(std::vector<Population> populations);
  static PopulationLayout single(std::size_t actions, double mass = 1.0);

  std::size_t population_count() const { return pops_.size(); }
  const Population& population(std::size_t p) const { return pops_.at(p); }
  std::size_t offset(std::size_t p) const { return offsets_.at(p); }
  std::size_t total_actions() const { return total_; }

  auto segment(Vector& v, std::size_t p) const {
    return v.segment(static_cast<Eigen::Index>(offsets_[p]),
                     static_cast<Eigen::Index>(pops_[p].actions));
  }
  auto segment(const Vector& v, std::size_t p) const {
    return v.segment(static_cast<Eigen::Index>(offsets_[p]),
                     static_cast<Eigen::Index>(pops_[p].actions));
  }

 private:
  std::vector<Population> pops_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

class MultiPopulationGame {
 public:
  MultiPopulationGame(std::string name, PopulationLayout layout, PayoffMap payoff,
                      JacobianMap jacobian = {});

  const std::string& name() const { return name_; }
  const PopulationLayout& layout() const { return layout_; }
  std::size_t population_count() const { return layout_.population_count(); }

  Vector evaluate(const Vector& profile) const;
  Matrix evaluate_jacobian(const Vector& profile) const;

  // Annotated equilibrium profile, if any.
  const std::optional<Vector>& equilibrium() const { return equilibrium_; }
  MultiPopulationGame& set_equilibrium(Vector profile);
  // Anonymous games: the equilibrium is pinned down only in aggregate.
  const std::optional<Vector>& aggregate_equilibrium() const { return aggregate_equilibrium_; }
  MultiPopulationGame& set_aggregate_equilibrium(Vector aggregate);

 private:
  std::string name_;
  PopulationLayout layout_;
  PayoffMap payoff_;
  JacobianMap jacobian_;
  std::optional<Vector> equilibrium_;
  std::optional<Vector> aggregate_equilibrium_;
};

// Concatenated per-population states; validates each block against its mass.
Vector make_profile(const PopulationLayout& layout, const std::vector<SimplexState>& states);
std::vector<SimplexState> split_profile(const PopulationLayout& layout, const Vector& profile);

Vector payoff(const PopulationGame& game, const SimplexState& x);
Matrix jacobian(const PopulationGame& game, const SimplexState& x);

// Actions within tie_tol of the best payoff. Never empty.
ActionSet best_response_set(const Vector& pi, double tie_tol = kDefaultTieTol);

// m * max_a pi_a - x . pi for a state of mass m.
double nash_gap(const Vector& x, const Vector& pi);
double nash_gap(const PopulationGame& game, const SimplexState& x);
// Sum of per-population gaps.
double nash_gap(const MultiPopulationGame& game, const Vector& profile);

// Orthonormal basis of {z : 1.z = 0}, A x (A-1).
Matrix tangent_basis(std::size_t n);
Matrix tangent_basis(const PopulationLayout& layout);

// Largest eigenvalue of the symmetrised Jacobian restricted to the tangent space.
double static_stability_margin(const PopulationGame& game, const SimplexState& x);
double static_stability_margin(const MultiPopulationGame& game, const Vector& profile);
double stability_margin_of(const Matrix& df, const Matrix& basis);

struct StabilityReport {
  bool stable = false;
  double worst_margin = 0.0;
  Vector worst_state;
  std::size_t evaluations = 0;
  bool constant_jacobian = false;
  std::string note;
};

inline constexpr double kStabilityTol = 1e-9;

StabilityReport is_stable_game(const PopulationGame& game, std::size_t sample_count,
                               std::uint64_t seed);
StabilityReport is_stable_game(const MultiPopulationGame& game, std::size_t sample_count,
                               std::uint64_t seed);
// Samples inside the sup-norm ball of the given radius around center.
StabilityReport is_locally_stable(const PopulationGame& game, const SimplexState& center,
                                  double radius, std::size_t sample_count, std::uint64_t seed);

// Scrambled Halton points mapped onto the simplex.
std::vector<Vector> quasi_random_simplex(std::size_t n, std::size_t count, std::uint64_t seed,
                                         double mass = 1.0);

namespace games {

// Cyclic 3x3 matrix: win w, draw 0, loss -l.
PopulationGame good_rps(double win = 1.0, double loss = 0.9);
PopulationGame friedman();
PopulationGame zero_game(std::size_t n);

// F^p(x) = F0(sum_q x^q) + theta^p with F0(y) = base * y.
MultiPopulationGame anonymous(const Matrix& base, const std::vector<Vector>& offsets,
                              const std::vector<double>& masses);

// phi(x) = 1/2 x'Mx + c'x on the concatenated profile; populations flagged
// concave receive dphi/dx^p, the others -dphi/dx^p.
MultiPopulationGame saddle(const Matrix& m, const Vector& c, const PopulationLayout& layout,
                           const std::vector<bool>& concave);

}  // namespace games

}  // namespace gainflow
