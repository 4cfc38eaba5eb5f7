#pragma once

#include "gainflow/common.hpp"

namespace gainflow {

// A point of m * Delta^A. Entries are non-negative and sum to the mass.
class SimplexState {
 public:
  static constexpr double kNegativeTol = 1e-12;
  static constexpr double kMassTol = 1e-9;

  // Throws DomainError on entries below -1e-12 or a sum off the mass by more
  // than 1e-9. Tiny negatives are clipped and the result renormalized.
  explicit SimplexState(Vector masses, double mass = 1.0);
  SimplexState(std::initializer_list<double> masses, double mass = 1.0);

  // Non-negative weights rescaled onto the simplex.
  static SimplexState from_weights(const Vector& weights, double mass = 1.0);
  static SimplexState barycenter(std::size_t n, double mass = 1.0);
  static SimplexState vertex(std::size_t n, std::size_t a, double mass = 1.0);

  const Vector& values() const { return x_; }
  double mass() const { return mass_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.size()); }
  double operator[](std::size_t a) const { return x_[static_cast<Eigen::Index>(a)]; }

  // Support as a set of actions with positive mass.
  ActionSet support() const;

 private:
  Vector x_;
  double mass_;
};

double sup_distance(const SimplexState& a, const SimplexState& b);

}  // namespace gainflow
