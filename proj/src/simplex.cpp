#include "gainflow/simplex.hpp"

#include <cmath>
#include <sstream>

namespace gainflow {

std::vector<std::size_t> members(ActionSet s) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; s != 0; ++a, s >>= 1)
    if (s & 1u) out.push_back(a);
  return out;
}

ActionSet make_set(const std::vector<std::size_t>& actions) {
  ActionSet s = 0;
  for (std::size_t a : actions) {
    if (a >= kMaxActions) throw ArgumentError("action index out of range");
    s |= singleton(a);
  }
  return s;
}

std::string format_set(ActionSet s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t a : members(s)) {
    if (!first) os << ',';
    os << a + 1;
    first = false;
  }
  os << '}';
  return os.str();
}

SimplexState::SimplexState(Vector masses, double mass) : x_(std::move(masses)), mass_(mass) {
  if (x_.size() == 0) throw DomainError("state has no actions");
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw DomainError("population mass must be positive");
  if (static_cast<std::size_t>(x_.size()) > kMaxActions) throw DomainError("too many actions");
  for (double v : x_) {
    if (!std::isfinite(v)) throw DomainError("state entry is not finite");
    if (v < -kNegativeTol) {
      std::ostringstream os;
      os << "negative state entry " << v;
      throw DomainError(os.str());
    }
  }
  x_ = x_.cwiseMax(0.0);
  double sum = x_.sum();
  if (std::abs(sum - mass_) > kMassTol) {
    std::ostringstream os;
    os << "state sums to " << sum << ", expected " << mass_;
    throw DomainError(os.str());
  }
  x_ *= mass_ / sum;
}

SimplexState::SimplexState(std::initializer_list<double> masses, double mass)
    : SimplexState(Eigen::Map<const Vector>(masses.begin(), static_cast<Eigen::Index>(masses.size())),
                   mass) {}

SimplexState SimplexState::from_weights(const Vector& weights, double mass) {
  if (weights.size() == 0) throw DomainError("no weights");
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw DomainError("weights must be finite and non-negative");
  double s = weights.sum();
  if (!(s > 0.0)) throw DomainError("weights sum to zero");
  Vector x = weights * (mass / s);
  return SimplexState(x * (mass / x.sum()), mass);
}

SimplexState SimplexState::barycenter(std::size_t n, double mass) {
  return SimplexState(Vector::Constant(static_cast<Eigen::Index>(n), mass / static_cast<double>(n)),
                      mass);
}

SimplexState SimplexState::vertex(std::size_t n, std::size_t a, double mass) {
  if (a >= n) throw ArgumentError("vertex index out of range");
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  x[static_cast<Eigen::Index>(a)] = mass;
  return SimplexState(x, mass);
}

ActionSet SimplexState::support() const {
  ActionSet s = 0;
  for (Eigen::Index a = 0; a < x_.size(); ++a)
    if (x_[a] > 0.0) s |= singleton(static_cast<std::size_t>(a));
  return s;
}

double sup_distance(const SimplexState& a, const SimplexState& b) {
  if (a.size() != b.size()) throw ArgumentError("dimension mismatch");
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace gainflow
