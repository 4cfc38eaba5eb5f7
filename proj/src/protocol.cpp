#include "gainflow/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace gainflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxEnumeratedIndependent = 20;
constexpr std::size_t kMaxWitnesses = 64;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- costs

CostDistribution CostDistribution::zero_cost() { return CostDistribution(); }

CostDistribution CostDistribution::linear(double slope, double cap) {
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ArgumentError("linear cost needs a positive slope");
  if (!(cap > 0.0)) throw ArgumentError("linear cost needs a positive cap");
  CostDistribution c;
  c.kind_ = Kind::linear;
  c.slope_ = slope;
  c.cap_ = cap;
  return c;
}

CostDistribution CostDistribution::piecewise(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.size() < 2) throw ArgumentError("piecewise cost needs at least two breakpoints");
  if (breakpoints.front().first != 0.0) throw ArgumentError("piecewise cost must start at q = 0");
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    auto [q, v] = breakpoints[k];
    if (!std::isfinite(q) || !std::isfinite(v)) throw ArgumentError("piecewise breakpoints must be finite");
    if (v < 0.0 || v > 1.0) throw ArgumentError("piecewise CDF values must lie in [0, 1]");
    if (k > 0) {
      if (q < breakpoints[k - 1].first) throw ArgumentError("piecewise breakpoints must be nondecreasing in q");
      if (v < breakpoints[k - 1].second) throw ArgumentError("piecewise CDF must be nondecreasing");
    }
  }
  CostDistribution c;
  c.kind_ = Kind::piecewise;
  c.points_ = std::move(breakpoints);
  return c;
}

CostDistribution CostDistribution::atom_at(double q_bar) {
  if (!(q_bar >= 0.0) || !std::isfinite(q_bar)) throw ArgumentError("atom location must be finite and >= 0");
  CostDistribution c;
  c.kind_ = Kind::atom_at;
  c.q_bar_ = q_bar;
  return c;
}

std::string CostDistribution::describe() const {
  switch (kind_) {
    case Kind::zero_cost:
      return "zero_cost";
    case Kind::linear:
      return "linear(slope=" + fmt(slope_) + (std::isinf(cap_) ? "" : ", cap=" + fmt(cap_)) + ")";
    case Kind::atom_at:
      return "atom_at(" + fmt(q_bar_) + ")";
    case Kind::piecewise: {
      std::string s = "piecewise(";
      for (std::size_t k = 0; k < points_.size(); ++k)
        s += (k ? ", " : "") + std::string("(") + fmt(points_[k].first) + ", " + fmt(points_[k].second) + ")";
      return s + ")";
    }
  }
  return "";
}

double CostDistribution::cdf(double q) const {
  if (q < 0.0) return 0.0;
  switch (kind_) {
    case Kind::zero_cost:
      return 1.0;
    case Kind::linear:
      return std::min(slope_ * q, cap_);
    case Kind::atom_at:
      return q >= q_bar_ ? 1.0 : 0.0;
    case Kind::piecewise: {
      // Last breakpoint with q_k <= q.
      auto it = std::upper_bound(points_.begin(), points_.end(), q,
                                 [](double v, const auto& p) { return v < p.first; });
      std::size_t k = static_cast<std::size_t>(it - points_.begin()) - 1;
      if (k + 1 == points_.size()) return points_.back().second;
      const auto& [q0, v0] = points_[k];
      const auto& [q1, v1] = points_[k + 1];
      return v0 + (v1 - v0) * (q - q0) / (q1 - q0);
    }
  }
  return 0.0;
}

double CostDistribution::cdf_left(double q) const {
  if (q <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::zero_cost:
      return 1.0;
    case Kind::linear:
      return std::min(slope_ * q, cap_);
    case Kind::atom_at:
      return q > q_bar_ ? 1.0 : 0.0;
    case Kind::piecewise: {
      // First breakpoint with q_j >= q.
      auto it = std::lower_bound(points_.begin(), points_.end(), q,
                                 [](const auto& p, double v) { return p.first < v; });
      if (it == points_.end()) return points_.back().second;
      if (it->first == q) return it->second;
      const auto& [q0, v0] = *(it - 1);
      const auto& [q1, v1] = *it;
      return v0 + (v1 - v0) * (q - q0) / (q1 - q0);
    }
  }
  return 0.0;
}

double CostDistribution::expected_clipped_gain(double gross) const {
  if (!(gross > 0.0)) return 0.0;
  switch (kind_) {
    case Kind::zero_cost:
      return gross;
    case Kind::linear: {
      double knee = cap_ / slope_;
      if (gross <= knee) return 0.5 * slope_ * gross * gross;
      return 0.5 * slope_ * knee * knee + cap_ * (gross - knee);
    }
    case Kind::atom_at:
      return std::max(gross - q_bar_, 0.0);
    case Kind::piecewise: {
      double area = 0.0;
      for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
        const auto& [q0, v0] = points_[k];
        const auto& [q1, v1] = points_[k + 1];
        if (q0 >= gross) return area;
        if (q1 == q0) continue;
        double upper = std::min(gross, q1);
        double vu = v0 + (v1 - v0) * (upper - q0) / (q1 - q0);
        area += 0.5 * (upper - q0) * (v0 + vu);
      }
      const auto& [ql, vl] = points_.back();
      if (gross > ql) area += vl * (gross - ql);
      return area;
    }
  }
  return 0.0;
}

std::vector<double> CostDistribution::atoms() const {
  switch (kind_) {
    case Kind::zero_cost:
      return {0.0};
    case Kind::linear:
      return {};
    case Kind::atom_at:
      return {q_bar_};
    case Kind::piecewise: {
      std::vector<double> out;
      if (points_.front().second > 0.0) out.push_back(0.0);
      for (std::size_t k = 1; k < points_.size(); ++k)
        if (points_[k].first == points_[k - 1].first && points_[k].second > points_[k - 1].second &&
            (out.empty() || out.back() != points_[k].first))
          out.push_back(points_[k].first);
      return out;
    }
  }
  return {};
}

std::vector<double> CostDistribution::kinks() const {
  switch (kind_) {
    case Kind::linear:
      if (std::isfinite(cap_)) return {cap_ / slope_};
      return {};
    case Kind::piecewise: {
      std::vector<double> out;
      auto slope = [&](std::size_t k) {
        if (k + 1 >= points_.size()) return 0.0;
        double dq = points_[k + 1].first - points_[k].first;
        return dq == 0.0 ? kInf : (points_[k + 1].second - points_[k].second) / dq;
      };
      for (std::size_t k = 1; k < points_.size(); ++k) {
        double q = points_[k].first;
        if (q == points_[k - 1].first) continue;
        if (k + 1 < points_.size() && points_[k + 1].first == q) continue;
        if (slope(k - 1) != slope(k)) out.push_back(q);
      }
      return out;
    }
    default:
      return {};
  }
}

double CostDistribution::sup() const {
  switch (kind_) {
    case Kind::linear:
      return cap_;
    case Kind::piecewise:
      return points_.back().second;
    default:
      return 1.0;
  }
}

std::optional<double> CostDistribution::q1_violation() const {
  switch (kind_) {
    case Kind::zero_cost:
    case Kind::linear:
      return std::nullopt;
    case Kind::atom_at:
      if (q_bar_ > 0.0) return q_bar_ / 2.0;
      return std::nullopt;
    case Kind::piecewise: {
      // Q(0) is the last value listed at q = 0.
      std::size_t k = 0;
      while (k + 1 < points_.size() && points_[k + 1].first == 0.0) ++k;
      if (points_[k].second > 0.0) return std::nullopt;
      if (k + 1 == points_.size()) return 1.0;
      if (points_[k + 1].second > 0.0) return std::nullopt;
      return points_[k + 1].first / 2.0;
    }
  }
  return std::nullopt;
}

// --------------------------------------------------------- availability

AvailabilityDistribution AvailabilityDistribution::explicit_tables(std::size_t n,
                                                                   const std::vector<Entry>& entries,
                                                                   std::string label) {
  if (n == 0 || n > kMaxActions) throw ArgumentError("action count out of range");
  AvailabilityDistribution d;
  d.kind_ = Kind::explicit_tables;
  d.label_ = std::move(label);
  d.n_ = n;
  d.draws_.resize(n);
  std::vector<std::map<ActionSet, double>> merged(n);
  for (const auto& e : entries) {
    if (e.current >= n) throw DomainError("table entry names action " + std::to_string(e.current + 1) +
                                          " outside the action set");
    if ((e.subset & ~full_set(n)) != 0)
      throw DomainError("subset " + format_set(e.subset) + " leaves the action set");
    if (contains(e.subset, e.current))
      throw DomainError("subset " + format_set(e.subset) + " contains the current action " +
                        std::to_string(e.current + 1));
    if (!(e.probability >= 0.0) || e.probability > 1.0)
      throw DomainError("table probability " + fmt(e.probability) + " outside [0, 1]");
    merged[e.current][e.subset] += e.probability;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (const auto& [s, p] : merged[a])
      if (p > 0.0) d.draws_[a].push_back({s, p});
  d.check_tables();
  return d;
}

AvailabilityDistribution AvailabilityDistribution::full(std::size_t n) {
  if (n == 0 || n > kMaxActions) throw ArgumentError("action count out of range");
  AvailabilityDistribution d;
  d.kind_ = Kind::full_set;
  d.label_ = "full_set";
  d.n_ = n;
  for (std::size_t a = 0; a < n; ++a) d.draws_.push_back({{full_set(n) & ~singleton(a), 1.0}});
  return d;
}

AvailabilityDistribution AvailabilityDistribution::uniform_singleton(std::size_t n) {
  if (n < 2 || n > kMaxActions) throw ArgumentError("uniform singleton draws need 2 to 30 actions");
  AvailabilityDistribution d;
  d.kind_ = Kind::uniform_singleton;
  d.label_ = "uniform_singleton";
  d.n_ = n;
  const double p = 1.0 / static_cast<double>(n - 1);
  d.draws_.resize(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (b != a) d.draws_[a].push_back({singleton(b), p});
  return d;
}

AvailabilityDistribution AvailabilityDistribution::independent(std::vector<double> probabilities,
                                                               bool condition_on_nonempty) {
  const std::size_t n = probabilities.size();
  if (n < 2) throw ArgumentError("independent draws need at least two actions");
  if (n > kMaxEnumeratedIndependent)
    throw CapabilityError("independent draws are enumerated; at most 20 actions supported");
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("availability probability " + fmt(p) + " outside [0, 1]");
  AvailabilityDistribution d;
  d.kind_ = Kind::independent;
  d.label_ = condition_on_nonempty ? "independent" : "independent_unconditioned";
  d.n_ = n;
  d.probs_ = probabilities;
  d.conditioned_ = condition_on_nonempty;
  d.draws_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double empty = 1.0;
    for (std::size_t b = 0; b < n; ++b)
      if (b != a) empty *= 1.0 - probabilities[b];
    if (condition_on_nonempty && empty >= 1.0)
      throw ArgumentError("no action is ever available to action " + std::to_string(a + 1));
    const ActionSet others = full_set(n) & ~singleton(a);
    // Enumerate submasks of the other actions.
    for (ActionSet s = others;; s = (s - 1) & others) {
      double p = 1.0;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) p *= contains(s, b) ? probabilities[b] : 1.0 - probabilities[b];
      if (condition_on_nonempty) p = s == 0 ? 0.0 : p / (1.0 - empty);
      if (p > 0.0) d.draws_[a].push_back({s, p});
      if (s == 0) break;
    }
    std::reverse(d.draws_[a].begin(), d.draws_[a].end());
  }
  return d;
}

AvailabilityDistribution AvailabilityDistribution::partitioned(std::size_t n, std::vector<ActionSet> parts,
                                                               std::vector<double> weights) {
  if (n == 0 || n > kMaxActions) throw ArgumentError("action count out of range");
  if (parts.empty() || parts.size() != weights.size()) throw ArgumentError("one weight per part expected");
  ActionSet seen = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == 0) throw ArgumentError("empty part");
    if (parts[i] & seen) throw ArgumentError("parts overlap");
    if ((parts[i] & ~full_set(n)) != 0) throw ArgumentError("part leaves the action set");
    if (!(weights[i] >= 0.0)) throw ArgumentError("negative part weight");
    seen |= parts[i];
    total += weights[i];
  }
  if (seen != full_set(n)) throw ArgumentError("parts must cover every action");
  if (std::abs(total - 1.0) > kProbabilityTol) throw ArgumentError("part weights must sum to 1");
  AvailabilityDistribution d;
  d.kind_ = Kind::partitioned;
  d.label_ = "partitioned";
  d.n_ = n;
  d.draws_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::map<ActionSet, double> merged;
    for (std::size_t i = 0; i < parts.size(); ++i) merged[parts[i] & ~singleton(a)] += weights[i];
    for (const auto& [s, p] : merged)
      if (p > 0.0) d.draws_[a].push_back({s, p});
  }
  d.parts_ = std::move(parts);
  d.weights_ = std::move(weights);
  return d;
}

void AvailabilityDistribution::check_tables() const {
  for (std::size_t a = 0; a < n_; ++a) {
    double total = 0.0;
    for (const auto& dr : draws_[a]) total += dr.probability;
    if (std::abs(total - 1.0) > kProbabilityTol)
      throw DomainError("probabilities for current action " + std::to_string(a + 1) + " sum to " + fmt(total));
  }
}

double AvailabilityDistribution::event_probability(std::size_t current, ActionSet targets) const {
  if (current >= n_) throw ArgumentError("current action out of range");
  const ActionSet t = targets & full_set(n_) & ~singleton(current);
  if (t == 0) return 0.0;
  switch (kind_) {
    case Kind::full_set:
      return 1.0;
    case Kind::uniform_singleton:
      return static_cast<double>(set_size(t)) / static_cast<double>(n_ - 1);
    case Kind::independent: {
      double miss = 1.0, empty = 1.0;
      for (std::size_t b = 0; b < n_; ++b) {
        if (b == current) continue;
        if (contains(t, b)) miss *= 1.0 - probs_[b];
        empty *= 1.0 - probs_[b];
      }
      double p = 1.0 - miss;
      return conditioned_ ? p / (1.0 - empty) : p;
    }
    case Kind::partitioned: {
      double p = 0.0;
      for (std::size_t i = 0; i < parts_.size(); ++i)
        if ((parts_[i] & ~singleton(current)) & t) p += weights_[i];
      return p;
    }
    case Kind::explicit_tables:
      return event_probability_enumerated(current, targets);
  }
  return 0.0;
}

double AvailabilityDistribution::event_probability_enumerated(std::size_t current, ActionSet targets) const {
  if (current >= n_) throw ArgumentError("current action out of range");
  double p = 0.0;
  for (const auto& d : draws_[current])
    if (d.set & targets) p += d.probability;
  return p;
}

// ----------------------------------------------------------- validation

namespace {

bool structured(AvailabilityDistribution::Kind k) {
  return k != AvailabilityDistribution::Kind::explicit_tables;
}

void check_a1ii_exhaustive(const AvailabilityDistribution& avail, AssumptionReport& r) {
  const std::size_t n = avail.action_count();
  std::size_t recorded = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const ActionSet rest = full_set(n) & ~singleton(a) & ~singleton(b);
      // Nonempty submasks of rest in increasing order.
      for (ActionSet s = (ActionSet{0} - rest) & rest; s != 0; s = (s - rest) & rest) {
        double pa = avail.event_probability(a, s), pb = avail.event_probability(b, s);
        if (std::abs(pa - pb) > kProbabilityTol) {
          r.a1ii_pass = false;
          if (recorded++ < kMaxWitnesses) r.witnesses.push_back({"A1-ii", a, b, s, pa, pb, 0.0});
        }
      }
    }
  }
}

// Independent draws are status-quo independent unless conditioning rescales
// each current action differently.
void check_a1ii_independent(const AvailabilityDistribution& avail, AssumptionReport& r) {
  const auto& p = avail.independent_probabilities();
  const std::size_t n = p.size();
  if (!avail.conditioned_on_nonempty()) return;
  // With two sure actions no draw is ever empty.
  if (std::count(p.begin(), p.end(), 1.0) >= 2) return;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || c == b) continue;
        double pa = avail.event_probability(a, singleton(c)), pb = avail.event_probability(b, singleton(c));
        if (std::abs(pa - pb) > kProbabilityTol) {
          r.a1ii_pass = false;
          r.witnesses.push_back({"A1-ii", a, b, singleton(c), pa, pb, 0.0});
          return;
        }
      }
}

}  // namespace

AssumptionReport validate_assumptions(const AvailabilityDistribution& avail, const CostDistribution& cost) {
  const std::size_t n = avail.action_count();
  if (!structured(avail.kind()) && n > kMaxExplicitActions)
    throw CapabilityError("explicit availability tables with more than 16 actions cannot be checked "
                          "exhaustively; use a structured availability kind");
  AssumptionReport r;
  r.a0_note = "availability kind '" + avail.label() +
              "' is parameterised without reference to the social state";

  if (auto q = cost.q1_violation()) {
    r.q1_pass = false;
    AssumptionWitness w;
    w.assumption = "Q1";
    w.q = *q;
    w.probability_a = cost.cdf(*q);
    r.witnesses.push_back(w);
  }

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double p = avail.event_probability(a, singleton(b));
      if (!(p > 0.0)) {
        r.a1i_pass = false;
        r.witnesses.push_back({"A1-i", a, b, singleton(b), p, 0.0, 0.0});
      }
    }

  switch (avail.kind()) {
    case AvailabilityDistribution::Kind::full_set:
    case AvailabilityDistribution::Kind::uniform_singleton:
    case AvailabilityDistribution::Kind::partitioned:
      if (n <= kMaxExplicitActions) check_a1ii_exhaustive(avail, r);
      break;
    case AvailabilityDistribution::Kind::independent:
      if (n <= kMaxExplicitActions)
        check_a1ii_exhaustive(avail, r);
      else
        check_a1ii_independent(avail, r);
      break;
    case AvailabilityDistribution::Kind::explicit_tables:
      check_a1ii_exhaustive(avail, r);
      break;
  }
  return r;
}

const AssumptionReport& RevisionProtocol::validate() {
  if (!validation) validation = validate_assumptions(availability, cost);
  return *validation;
}

// ------------------------------------------------------------ protocols

namespace protocols {

RevisionProtocol brd(std::size_t n) {
  return {"brd", AvailabilityDistribution::full(n), CostDistribution::zero_cost(), std::nullopt};
}

RevisionProtocol tempered_brd(std::size_t n, CostDistribution cost) {
  return {"tempered_brd", AvailabilityDistribution::full(n), std::move(cost), std::nullopt};
}

RevisionProtocol smith(std::size_t n, double slope) {
  return {"smith", AvailabilityDistribution::uniform_singleton(n), CostDistribution::linear(slope, kInf),
          std::nullopt};
}

RevisionProtocol pairwise(std::size_t n, CostDistribution cost) {
  return {"pairwise", AvailabilityDistribution::uniform_singleton(n), std::move(cost), std::nullopt};
}

RevisionProtocol ordinal(std::size_t n, double p_bar) {
  if (!(p_bar > 0.0 && p_bar <= 1.0)) throw ArgumentError("ordinal availability must lie in (0, 1]");
  return {"ordinal", AvailabilityDistribution::independent(std::vector<double>(n, p_bar), false),
          CostDistribution::zero_cost(), std::nullopt};
}

RevisionProtocol partitioned(std::size_t n, std::vector<ActionSet> parts, std::vector<double> weights,
                             CostDistribution cost) {
  return {"partitioned", AvailabilityDistribution::partitioned(n, std::move(parts), std::move(weights)),
          std::move(cost), std::nullopt};
}

RevisionProtocol independent(std::vector<double> probabilities, CostDistribution cost) {
  return {"independent", AvailabilityDistribution::independent(std::move(probabilities), true), std::move(cost),
          std::nullopt};
}

RevisionProtocol explicit_tables(std::size_t n, const std::vector<AvailabilityDistribution::Entry>& entries,
                                 CostDistribution cost) {
  return {"explicit", AvailabilityDistribution::explicit_tables(n, entries), std::move(cost), std::nullopt};
}

RevisionProtocol friedman_asymmetric(CostDistribution cost) {
  std::vector<AvailabilityDistribution::Entry> t = {
      {0, 0b010, 0.75}, {0, 0b100, 0.25}, {1, 0b001, 0.75},
      {1, 0b101, 0.25}, {2, 0b011, 0.75}, {2, 0b001, 0.25},
  };
  return {"friedman_asymmetric", AvailabilityDistribution::explicit_tables(3, t, "friedman_asymmetric"),
          std::move(cost), std::nullopt};
}

RevisionProtocol a1ii_counterexample(int variant, CostDistribution cost) {
  // Actions a..e are 0..4; c, d and e draw a uniform singleton.
  constexpr ActionSet A = 1, B = 2, C = 4, D = 8, E = 16;
  std::vector<AvailabilityDistribution::Entry> t;
  if (variant == 1) {
    t = {{0, B, 0.4}, {0, C | D, 0.3}, {0, E, 0.3}, {1, A, 0.4}, {1, C, 0.3}, {1, D | E, 0.3}};
  } else if (variant == 2) {
    t = {{0, B, 0.8}, {0, B | C | D, 0.1}, {0, B | E, 0.1},
         {1, A, 0.8}, {1, A | C, 0.1},     {1, A | D | E, 0.1}};
  } else {
    throw ArgumentError("counterexample variant must be 1 or 2");
  }
  for (std::size_t a = 2; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      if (b != a) t.push_back({a, singleton(b), 0.25});
  std::string name = "a1ii_fixture_" + std::to_string(variant);
  return {name, AvailabilityDistribution::explicit_tables(5, t, name), std::move(cost), std::nullopt};
}

std::vector<ActionSet> default_parts(std::size_t n) {
  if (n < 2) throw ArgumentError("partitions need at least two actions");
  std::vector<ActionSet> parts;
  std::size_t a = 0;
  while (a < n) {
    std::size_t len = (n - a == 3 || n - a < 2) ? n - a : 2;
    ActionSet s = 0;
    for (std::size_t k = 0; k < len; ++k) s |= singleton(a + k);
    parts.push_back(s);
    a += len;
  }
  return parts;
}

}  // namespace protocols

}  // namespace gainflow
