#pragma once

#include "gainflow/common.hpp"
#include "gainflow/game.hpp"
#include "gainflow/protocol.hpp"
#include "gainflow/simplex.hpp"

#include <limits>
#include <string>
#include <vector>

namespace gainflow {

// Picks y in Delta(best available actions) where the inclusion is multivalued.
struct SelectionRule {
  enum class Mixing { uniform_over_best, lowest_index, given_weights };

  double tie_tol = kDefaultTieTol;
  Mixing mixing = Mixing::uniform_over_best;
  // Used by given_weights; renormalised over the best set (uniform if all zero).
  Vector weights;

  // Writes the selected distribution into y (length A, zeroed first).
  void select(const Vector& pi, ActionSet available, Vector& y) const;
};

// Switching probability used for a gross gain: zero at gains within the tie
// tolerance (the lower end Q_-(0) of the admissible interval), Q otherwise.
double switch_probability(const CostDistribution& cost, double gross, double tie_tol);

// Distribution over subsets of the full action set for birth-death dynamics.
struct BirthDeathAvailability {
  std::size_t actions = 0;
  std::vector<Draw> draws;

  static BirthDeathAvailability uniform_singleton(std::size_t n);
  static BirthDeathAvailability full(std::size_t n);
  static BirthDeathAvailability from_draws(std::size_t n, std::vector<Draw> draws);

  // Every action is drawn with positive probability.
  bool every_action_reachable() const;
};

class MeanDynamic {
 public:
  enum class Kind { rationalizable, replicator, birth_death };

  // Throws DomainError unless the protocol validates, or allow_invalid is set;
  // the override is then recorded.
  static MeanDynamic rationalizable(RevisionProtocol protocol, SelectionRule selection = {},
                                    bool allow_invalid = false);
  // Pairwise proportional imitation. The cost only enters the gain diagnostics.
  static MeanDynamic replicator(std::size_t n,
                                CostDistribution cost = CostDistribution::linear(
                                    1.0, std::numeric_limits<double>::infinity()));
  static MeanDynamic birth_death(BirthDeathAvailability availability, CostDistribution cost,
                                 SelectionRule selection = {}, std::string name = "birth_death");
  // Uniform singleton draws over A with Q(q) = [q]_+.
  static MeanDynamic bnn(std::size_t n);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t action_count() const { return n_; }
  const SelectionRule& selection() const { return selection_; }
  const CostDistribution& cost() const { return cost_; }
  const RevisionProtocol& protocol() const;
  const BirthDeathAvailability& birth_death_availability() const;
  bool validation_overridden() const { return overridden_; }

 private:
  MeanDynamic() = default;
  Kind kind_ = Kind::replicator;
  std::string name_;
  std::size_t n_ = 0;
  SelectionRule selection_;
  CostDistribution cost_ = CostDistribution::zero_cost();
  std::optional<RevisionProtocol> protocol_;
  std::optional<BirthDeathAvailability> bd_;
  bool overridden_ = false;
};

// z_a for a rationalizable dynamic.
Vector per_action_transition(const MeanDynamic& dyn, std::size_t a, const Vector& pi);

Vector transition(const MeanDynamic& dyn, const SimplexState& x, const Vector& pi);
// Same field on a raw vector; the mass is read off as the sum of entries.
Vector transition_raw(const MeanDynamic& dyn, const Vector& x, const Vector& pi);

Vector combined_field(const PopulationGame& game, const MeanDynamic& dyn, const SimplexState& x);
Vector combined_field_raw(const PopulationGame& game, const MeanDynamic& dyn, const Vector& x);
Vector combined_field(const MultiPopulationGame& game, const std::vector<MeanDynamic>& dyns,
                      const Vector& profile);

}  // namespace gainflow
