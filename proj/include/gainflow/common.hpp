#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gainflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Subsets of actions are bitmasks; bit a is action a (0-based).
using ActionSet = std::uint32_t;

inline constexpr std::size_t kMaxActions = 30;
inline constexpr std::size_t kMaxExplicitActions = 16;
inline constexpr double kDefaultTieTol = 1e-9;
inline constexpr double kProbabilityTol = 1e-12;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr ActionSet singleton(std::size_t a) { return ActionSet{1} << a; }
inline constexpr ActionSet full_set(std::size_t n) {
  return n >= 32 ? ~ActionSet{0} : (ActionSet{1} << n) - 1;
}
inline constexpr bool contains(ActionSet s, std::size_t a) { return (s >> a) & 1u; }
inline int set_size(ActionSet s) { return std::popcount(s); }

std::vector<std::size_t> members(ActionSet s);
ActionSet make_set(const std::vector<std::size_t>& actions);
// 1-based rendering, e.g. "{2,3}".
std::string format_set(ActionSet s);

}  // namespace gainflow
