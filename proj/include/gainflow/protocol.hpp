#pragma once

#include "gainflow/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gainflow {

// Switching-cost distribution given through its CDF Q.
class CostDistribution {
 public:
  enum class Kind { zero_cost, linear, piecewise, atom_at };

  // Q(q) = 1{q >= 0}.
  static CostDistribution zero_cost();
  // Q(q) = min(slope [q]_+, cap). Pass an infinite cap for the plain ramp.
  static CostDistribution linear(double slope, double cap = 1.0);
  // Breakpoints (q_k, Q_k), q nondecreasing from q_0 = 0, joined linearly.
  // A repeated q marks a jump: the first value is the left limit, the last the
  // value at q. Q is held constant after the final breakpoint.
  static CostDistribution piecewise(std::vector<std::pair<double, double>> breakpoints);
  // Point mass at q_bar >= 0.
  static CostDistribution atom_at(double q_bar);

  Kind kind() const { return kind_; }
  std::string describe() const;

  double cdf(double q) const;        // Q(q)
  double cdf_left(double q) const;   // Q_-(q)
  // Integral of Q over [0, max(gross, 0)].
  double expected_clipped_gain(double gross) const;

  // Locations where Q_- < Q.
  std::vector<double> atoms() const;
  // Points where Q is continuous but its slope changes.
  std::vector<double> kinks() const;
  double sup() const;

  // Q(q) > 0 for all q > 0. Returns the offending q on failure.
  std::optional<double> q1_violation() const;

 private:
  CostDistribution() = default;
  Kind kind_ = Kind::zero_cost;
  double slope_ = 0.0;
  double cap_ = 1.0;
  double q_bar_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

struct Draw {
  ActionSet set;
  double probability;
};

// Distribution of the available set A'_a for each current action a.
class AvailabilityDistribution {
 public:
  enum class Kind { explicit_tables, full_set, uniform_singleton, independent, partitioned };

  struct Entry {
    std::size_t current;
    ActionSet subset;
    double probability;
  };

  static AvailabilityDistribution explicit_tables(std::size_t n, const std::vector<Entry>& entries,
                                                  std::string label = "explicit");
  static AvailabilityDistribution full(std::size_t n);
  static AvailabilityDistribution uniform_singleton(std::size_t n);
  // Each b != a is available with probability p_b, independently. With
  // condition_on_nonempty the empty draw is excluded and the rest rescaled;
  // otherwise the empty draw keeps its mass and the agent cannot switch.
  static AvailabilityDistribution independent(std::vector<double> probabilities,
                                              bool condition_on_nonempty = true);
  // Part i is drawn with weight w_i; the available set is A_i minus a.
  static AvailabilityDistribution partitioned(std::size_t n, std::vector<ActionSet> parts,
                                              std::vector<double> weights);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  std::size_t action_count() const { return n_; }
  const std::vector<Draw>& draws(std::size_t current) const { return draws_.at(current); }

  // P(A'_current meets targets); closed form for structured kinds.
  double event_probability(std::size_t current, ActionSet targets) const;
  // The same event computed by summing the enumerated draws.
  double event_probability_enumerated(std::size_t current, ActionSet targets) const;

  const std::vector<double>& independent_probabilities() const { return probs_; }
  bool conditioned_on_nonempty() const { return conditioned_; }

 private:
  AvailabilityDistribution() = default;
  void check_tables() const;

  Kind kind_ = Kind::full_set;
  std::string label_;
  std::size_t n_ = 0;
  std::vector<std::vector<Draw>> draws_;
  std::vector<double> probs_;
  bool conditioned_ = true;
  std::vector<ActionSet> parts_;
  std::vector<double> weights_;
};

struct AssumptionWitness {
  std::string assumption;  // "Q1", "A1-i", "A1-ii"
  std::size_t a = 0;
  std::size_t b = 0;
  ActionSet subset = 0;
  double probability_a = 0.0;
  double probability_b = 0.0;
  double q = 0.0;
};

struct AssumptionReport {
  bool a0_pass = true;
  bool q1_pass = true;
  bool a1i_pass = true;
  bool a1ii_pass = true;
  std::string a0_note;
  std::vector<AssumptionWitness> witnesses;

  bool all_pass() const { return a0_pass && q1_pass && a1i_pass && a1ii_pass; }
};

AssumptionReport validate_assumptions(const AvailabilityDistribution& avail,
                                      const CostDistribution& cost);

struct RevisionProtocol {
  std::string name;
  AvailabilityDistribution availability;
  CostDistribution cost;
  std::optional<AssumptionReport> validation;

  std::size_t action_count() const { return availability.action_count(); }
  const AssumptionReport& validate();
};

namespace protocols {

RevisionProtocol brd(std::size_t n);
RevisionProtocol tempered_brd(std::size_t n, CostDistribution cost);
RevisionProtocol smith(std::size_t n, double slope = 1.0);
RevisionProtocol pairwise(std::size_t n, CostDistribution cost);
// Every other action available independently with probability p_bar, zero cost.
RevisionProtocol ordinal(std::size_t n, double p_bar);
RevisionProtocol partitioned(std::size_t n, std::vector<ActionSet> parts,
                             std::vector<double> weights,
                             CostDistribution cost = CostDistribution::zero_cost());
RevisionProtocol independent(std::vector<double> probabilities,
                             CostDistribution cost = CostDistribution::zero_cost());
RevisionProtocol explicit_tables(std::size_t n,
                                 const std::vector<AvailabilityDistribution::Entry>& entries,
                                 CostDistribution cost = CostDistribution::zero_cost());
// Three actions, asymmetric access with a continuous capped cost.
RevisionProtocol friedman_asymmetric(CostDistribution cost = CostDistribution::linear(1.0));
// Five-action tables violating A1-ii; variant 1 or 2.
RevisionProtocol a1ii_counterexample(int variant,
                                     CostDistribution cost = CostDistribution::zero_cost());

// Contiguous parts of size >= 2 with weights proportional to 1, 2, ...
std::vector<ActionSet> default_parts(std::size_t n);

}  // namespace protocols

}  // namespace gainflow
