#include "gainflow/game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace gainflow {

namespace {

constexpr double kFdStep = 1e-6;

Eigen::Index ix(std::size_t a) { return static_cast<Eigen::Index>(a); }

void require_size(const Vector& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.size()) != n) {
    std::ostringstream os;
    os << what << ": expected " << n << " entries, got " << x.size();
    throw ArgumentError(os.str());
  }
}

Matrix finite_difference(const std::function<Vector(const Vector&)>& f, const Vector& x) {
  const Eigen::Index n = x.size();
  Vector f0 = f(x);
  Matrix jac(f0.size(), n);
  for (Eigen::Index b = 0; b < n; ++b) {
    Vector up = x, down = x;
    if (x[b] >= kFdStep) {
      up[b] += kFdStep;
      down[b] -= kFdStep;
      jac.col(b) = (f(up) - f(down)) / (2.0 * kFdStep);
    } else {
      up[b] += kFdStep;
      jac.col(b) = (f(up) - f0) / kFdStep;
    }
  }
  return jac;
}

constexpr std::array<unsigned, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                              37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                              83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

// Radical inverse with a fixed random digit permutation per dimension.
double scrambled_radical_inverse(std::uint64_t index, unsigned base, const std::vector<unsigned>& perm) {
  double inv = 1.0 / base, factor = inv, result = 0.0;
  while (index > 0) {
    result += perm[index % base] * factor;
    index /= base;
    factor *= inv;
  }
  return result;
}

StabilityReport sample_margins(const std::vector<Vector>& points, const std::function<Matrix(const Vector&)>& df,
                               const Matrix& basis) {
  StabilityReport r;
  r.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    double m = stability_margin_of(df(p), basis);
    ++r.evaluations;
    if (m > r.worst_margin) {
      r.worst_margin = m;
      r.worst_state = p;
    }
  }
  r.stable = r.worst_margin <= kStabilityTol;
  return r;
}

}  // namespace

PopulationGame::PopulationGame(std::string name, std::size_t action_count, PayoffMap payoff,
                               JacobianMap jacobian)
    : name_(std::move(name)), actions_(action_count), payoff_(std::move(payoff)),
      jacobian_(std::move(jacobian)) {
  if (actions_ == 0 || actions_ > kMaxActions) throw ArgumentError("action count out of range");
  if (!payoff_) throw ArgumentError("game needs a payoff map");
}

PopulationGame PopulationGame::matrix(Matrix pi, std::string name) {
  if (pi.rows() != pi.cols() || pi.rows() == 0) throw ArgumentError("payoff matrix must be square");
  const auto n = static_cast<std::size_t>(pi.rows());
  PopulationGame g(std::move(name), n, [pi](const Vector& x) -> Vector { return pi * x; },
                   [pi](const Vector&) -> Matrix { return pi; });
  g.matrix_ = pi;
  return g;
}

PopulationGame& PopulationGame::set_equilibrium(SimplexState x) {
  if (x.size() != actions_) throw ArgumentError("equilibrium has the wrong dimension");
  equilibrium_ = std::move(x);
  return *this;
}

Vector PopulationGame::evaluate(const Vector& x) const { return payoff_(x); }

Matrix PopulationGame::evaluate_jacobian(const Vector& x) const {
  if (jacobian_) return jacobian_(x);
  return finite_difference_jacobian(x);
}

Matrix PopulationGame::finite_difference_jacobian(const Vector& x) const {
  return finite_difference(payoff_, x);
}

PopulationLayout::PopulationLayout(std::vector<Population> populations) : pops_(std::move(populations)) {
  if (pops_.empty()) throw ArgumentError("layout needs at least one population");
  for (const auto& p : pops_) {
    if (p.actions == 0 || p.actions > kMaxActions) throw ArgumentError("action count out of range");
    if (!(p.mass > 0.0)) throw ArgumentError("population mass must be positive");
    offsets_.push_back(total_);
    total_ += p.actions;
  }
}

PopulationLayout PopulationLayout::single(std::size_t actions, double mass) {
  return PopulationLayout({{actions, mass}});
}

MultiPopulationGame::MultiPopulationGame(std::string name, PopulationLayout layout, PayoffMap payoff,
                                         JacobianMap jacobian)
    : name_(std::move(name)), layout_(std::move(layout)), payoff_(std::move(payoff)),
      jacobian_(std::move(jacobian)) {
  if (!payoff_) throw ArgumentError("game needs a payoff map");
}

Vector MultiPopulationGame::evaluate(const Vector& profile) const {
  require_size(profile, layout_.total_actions(), "profile");
  return payoff_(profile);
}

Matrix MultiPopulationGame::evaluate_jacobian(const Vector& profile) const {
  require_size(profile, layout_.total_actions(), "profile");
  if (jacobian_) return jacobian_(profile);
  return finite_difference(payoff_, profile);
}

MultiPopulationGame& MultiPopulationGame::set_equilibrium(Vector profile) {
  require_size(profile, layout_.total_actions(), "equilibrium");
  equilibrium_ = std::move(profile);
  return *this;
}

MultiPopulationGame& MultiPopulationGame::set_aggregate_equilibrium(Vector aggregate) {
  aggregate_equilibrium_ = std::move(aggregate);
  return *this;
}

Vector make_profile(const PopulationLayout& layout, const std::vector<SimplexState>& states) {
  if (states.size() != layout.population_count()) throw ArgumentError("one state per population expected");
  Vector prof(ix(layout.total_actions()));
  for (std::size_t p = 0; p < states.size(); ++p) {
    const auto& pop = layout.population(p);
    if (states[p].size() != pop.actions) throw ArgumentError("population state has the wrong dimension");
    if (std::abs(states[p].mass() - pop.mass) > SimplexState::kMassTol)
      throw DomainError("population state has the wrong mass");
    layout.segment(prof, p) = states[p].values();
  }
  return prof;
}

std::vector<SimplexState> split_profile(const PopulationLayout& layout, const Vector& profile) {
  require_size(profile, layout.total_actions(), "profile");
  std::vector<SimplexState> out;
  for (std::size_t p = 0; p < layout.population_count(); ++p)
    out.emplace_back(Vector(layout.segment(profile, p)), layout.population(p).mass);
  return out;
}

Vector payoff(const PopulationGame& game, const SimplexState& x) {
  require_size(x.values(), game.action_count(), "state");
  return game.evaluate(x.values());
}

Matrix jacobian(const PopulationGame& game, const SimplexState& x) {
  require_size(x.values(), game.action_count(), "state");
  return game.evaluate_jacobian(x.values());
}

ActionSet best_response_set(const Vector& pi, double tie_tol) {
  if (pi.size() == 0) throw ArgumentError("empty payoff vector");
  double best = pi.maxCoeff();
  ActionSet s = 0;
  for (Eigen::Index a = 0; a < pi.size(); ++a)
    if (pi[a] >= best - tie_tol) s |= singleton(static_cast<std::size_t>(a));
  return s;
}

double nash_gap(const Vector& x, const Vector& pi) {
  if (x.size() != pi.size()) throw ArgumentError("state and payoff dimensions differ");
  return x.sum() * pi.maxCoeff() - x.dot(pi);
}

double nash_gap(const PopulationGame& game, const SimplexState& x) {
  return nash_gap(x.values(), payoff(game, x));
}

double nash_gap(const MultiPopulationGame& game, const Vector& profile) {
  Vector pi = game.evaluate(profile);
  const auto& layout = game.layout();
  double total = 0.0;
  for (std::size_t p = 0; p < layout.population_count(); ++p)
    total += nash_gap(Vector(layout.segment(profile, p)), Vector(layout.segment(pi, p)));
  return total;
}

Matrix tangent_basis(std::size_t n) {
  if (n == 0) throw ArgumentError("empty action set");
  // Helmert contrasts.
  Matrix b = Matrix::Zero(ix(n), ix(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) b(ix(i), ix(k - 1)) = scale;
    b(ix(k), ix(k - 1)) = -static_cast<double>(k) * scale;
  }
  return b;
}

Matrix tangent_basis(const PopulationLayout& layout) {
  std::size_t cols = layout.total_actions() - layout.population_count();
  Matrix b = Matrix::Zero(ix(layout.total_actions()), ix(cols));
  std::size_t col = 0;
  for (std::size_t p = 0; p < layout.population_count(); ++p) {
    std::size_t n = layout.population(p).actions;
    b.block(ix(layout.offset(p)), ix(col), ix(n), ix(n - 1)) = tangent_basis(n);
    col += n - 1;
  }
  return b;
}

double stability_margin_of(const Matrix& df, const Matrix& basis) {
  if (basis.cols() == 0) return 0.0;
  Matrix s = basis.transpose() * (0.5 * (df + df.transpose())) * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double static_stability_margin(const PopulationGame& game, const SimplexState& x) {
  return stability_margin_of(jacobian(game, x), tangent_basis(game.action_count()));
}

double static_stability_margin(const MultiPopulationGame& game, const Vector& profile) {
  return stability_margin_of(game.evaluate_jacobian(profile), tangent_basis(game.layout()));
}

std::vector<Vector> quasi_random_simplex(std::size_t n, std::size_t count, std::uint64_t seed,
                                         double mass) {
  if (n == 0 || n > kPrimes.size()) throw ArgumentError("unsupported dimension for sampling");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<unsigned>> perms(n);
  for (std::size_t d = 0; d < n; ++d) {
    perms[d].resize(kPrimes[d]);
    std::iota(perms[d].begin(), perms[d].end(), 0u);
    // Keep 0 fixed so the sequence stays inside (0, 1).
    std::shuffle(perms[d].begin() + 1, perms[d].end(), rng);
  }
  std::uint64_t start = 1 + (rng() % 1024);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector v(ix(n));
    for (std::size_t d = 0; d < n; ++d) {
      double u = scrambled_radical_inverse(start + i, kPrimes[d], perms[d]);
      v[ix(d)] = -std::log(std::clamp(u, 1e-12, 1.0 - 1e-12));
    }
    out.push_back(v * (mass / v.sum()));
  }
  return out;
}

StabilityReport is_stable_game(const PopulationGame& game, std::size_t sample_count, std::uint64_t seed) {
  const std::size_t n = game.action_count();
  Matrix basis = tangent_basis(n);
  if (game.payoff_matrix()) {
    std::vector<Vector> pts = {SimplexState::barycenter(n).values()};
    auto r = sample_margins(pts, [&](const Vector& x) { return game.evaluate_jacobian(x); }, basis);
    r.constant_jacobian = true;
    r.note = "linear game: constant Jacobian evaluated once";
    return r;
  }
  auto pts = quasi_random_simplex(n, sample_count, seed);
  for (std::size_t a = 0; a < n; ++a) pts.push_back(SimplexState::vertex(n, a).values());
  pts.push_back(SimplexState::barycenter(n).values());
  auto r = sample_margins(pts, [&](const Vector& x) { return game.evaluate_jacobian(x); }, basis);
  std::ostringstream os;
  os << "sampled " << r.evaluations << " states (quasi-random, vertices, barycenter)";
  r.note = os.str();
  return r;
}

StabilityReport is_stable_game(const MultiPopulationGame& game, std::size_t sample_count,
                               std::uint64_t seed) {
  const auto& layout = game.layout();
  std::vector<std::vector<Vector>> per_pop;
  for (std::size_t p = 0; p < layout.population_count(); ++p)
    per_pop.push_back(quasi_random_simplex(layout.population(p).actions, sample_count, seed + p,
                                           layout.population(p).mass));
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < sample_count; ++i) {
    Vector prof(ix(layout.total_actions()));
    for (std::size_t p = 0; p < layout.population_count(); ++p) layout.segment(prof, p) = per_pop[p][i];
    pts.push_back(prof);
  }
  Vector bary(ix(layout.total_actions()));
  for (std::size_t p = 0; p < layout.population_count(); ++p) {
    const auto& pop = layout.population(p);
    layout.segment(bary, p).setConstant(pop.mass / static_cast<double>(pop.actions));
  }
  pts.push_back(bary);
  auto r = sample_margins(pts, [&](const Vector& x) { return game.evaluate_jacobian(x); },
                          tangent_basis(layout));
  r.note = "sampled product of population simplices";
  return r;
}

StabilityReport is_locally_stable(const PopulationGame& game, const SimplexState& center, double radius,
                                  std::size_t sample_count, std::uint64_t seed) {
  if (!(radius > 0.0)) throw ArgumentError("radius must be positive");
  const std::size_t n = game.action_count();
  if (center.size() != n) throw ArgumentError("center has the wrong dimension");
  std::vector<Vector> pts = {center.values()};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < sample_count; ++i) {
    Vector d(ix(n));
    for (auto& e : d) e = unit(rng);
    d.array() -= d.mean();
    double norm = d.cwiseAbs().maxCoeff();
    if (norm > 0.0) d *= radius * std::abs(unit(rng)) / norm;
    // Pull back along the direction if a coordinate would turn negative.
    double t = 1.0;
    for (std::size_t a = 0; a < n; ++a)
      if (d[ix(a)] < 0.0) t = std::min(t, center[a] / -d[ix(a)]);
    pts.push_back(center.values() + t * d);
  }
  auto r = sample_margins(pts, [&](const Vector& x) { return game.evaluate_jacobian(x); }, tangent_basis(n));
  r.constant_jacobian = game.payoff_matrix().has_value();
  r.note = "sampled sup-norm ball around the center";
  return r;
}

namespace games {

PopulationGame good_rps(double win, double loss) {
  Matrix m(3, 3);
  m << 0, -loss, win, win, 0, -loss, -loss, win, 0;
  std::string name = loss < win ? "good_rps" : (loss == win ? "standard_rps" : "bad_rps");
  auto g = PopulationGame::matrix(m, name);
  g.set_equilibrium(SimplexState::barycenter(3));
  return g;
}

PopulationGame friedman() {
  Matrix m(3, 3);
  m << -5, -26, 31, 34, -5, -29, -29, 31, -2;
  auto g = PopulationGame::matrix(m, "friedman");
  g.set_equilibrium(SimplexState::barycenter(3));
  return g;
}

PopulationGame zero_game(std::size_t n) {
  auto g = PopulationGame::matrix(Matrix::Zero(ix(n), ix(n)), "zero");
  g.set_equilibrium(SimplexState::barycenter(n));
  return g;
}

MultiPopulationGame anonymous(const Matrix& base, const std::vector<Vector>& offsets,
                              const std::vector<double>& masses) {
  if (base.rows() != base.cols() || base.rows() == 0) throw ArgumentError("base matrix must be square");
  if (offsets.size() != masses.size() || masses.empty())
    throw ArgumentError("one offset vector per population expected");
  const auto n = static_cast<std::size_t>(base.rows());
  std::vector<Population> pops;
  for (std::size_t p = 0; p < masses.size(); ++p) {
    if (static_cast<std::size_t>(offsets[p].size()) != n) throw ArgumentError("offset has the wrong dimension");
    pops.push_back({n, masses[p]});
  }
  PopulationLayout layout(pops);
  const std::size_t k = masses.size();
  auto payoff = [base, offsets, n, k](const Vector& prof) -> Vector {
    Vector agg = Vector::Zero(ix(n));
    for (std::size_t p = 0; p < k; ++p) agg += prof.segment(ix(p * n), ix(n));
    Vector common = base * agg;
    Vector out(ix(n * k));
    for (std::size_t p = 0; p < k; ++p) out.segment(ix(p * n), ix(n)) = common + offsets[p];
    return out;
  };
  auto jac = [base, n, k](const Vector&) -> Matrix {
    Matrix j(ix(n * k), ix(n * k));
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < k; ++q) j.block(ix(p * n), ix(q * n), ix(n), ix(n)) = base;
    return j;
  };
  MultiPopulationGame game("anonymous", layout, payoff, jac);

  // Without offsets, an interior aggregate with equal payoffs is an equilibrium.
  bool plain = std::all_of(offsets.begin(), offsets.end(), [](const Vector& t) { return t.isZero(0.0); });
  if (plain) {
    double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    Matrix sys = Matrix::Zero(ix(n + 1), ix(n + 1));
    sys.topLeftCorner(ix(n), ix(n)) = base;
    sys.topRightCorner(ix(n), 1).setConstant(-1.0);
    sys.bottomLeftCorner(1, ix(n)).setConstant(1.0);
    Vector rhs = Vector::Zero(ix(n + 1));
    rhs[ix(n)] = total;
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.isInvertible()) {
      Vector sol = lu.solve(rhs);
      Vector y = sol.head(ix(n));
      if ((y.array() > 0.0).all()) {
        game.set_aggregate_equilibrium(y);
        Vector prof(ix(n * k));
        for (std::size_t p = 0; p < k; ++p) prof.segment(ix(p * n), ix(n)) = y * (masses[p] / total);
        game.set_equilibrium(prof);
      }
    }
  }
  return game;
}

MultiPopulationGame saddle(const Matrix& m, const Vector& c, const PopulationLayout& layout,
                           const std::vector<bool>& concave) {
  const auto total = ix(layout.total_actions());
  if (m.rows() != total || m.cols() != total || c.size() != total)
    throw ArgumentError("saddle data must match the layout");
  if (concave.size() != layout.population_count()) throw ArgumentError("one concavity flag per population");
  Vector sign(total);
  for (std::size_t p = 0; p < layout.population_count(); ++p)
    layout.segment(sign, p).setConstant(concave[p] ? 1.0 : -1.0);
  Matrix sym = 0.5 * (m + m.transpose());
  auto payoff = [sym, c, sign](const Vector& x) -> Vector {
    return sign.asDiagonal() * (sym * x + c);
  };
  auto jac = [sym, sign](const Vector&) -> Matrix { return sign.asDiagonal() * sym; };
  return MultiPopulationGame("saddle", layout, payoff, jac);
}

}  // namespace games

}  // namespace gainflow
