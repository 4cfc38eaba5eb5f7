#include "gainflow/scenario.hpp"

#include "gainflow/specs.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace gainflow {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) out += (out.empty() ? "" : "\n") + e;
  return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

namespace {

Eigen::Index ix(std::size_t a) { return static_cast<Eigen::Index>(a); }

// Error sink with helpers that read typed values and record failures by key path.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void only_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) return;
    for (auto it = node.begin(); it != node.end(); ++it) {
      auto key = it->first.as<std::string>();
      if (!allowed.count(key)) fail(join(path, key), "unknown key");
    }
  }

  bool is_map(const YAML::Node& node, const std::string& path) {
    if (node.IsMap()) return true;
    fail(path, "expected a table");
    return false;
  }

  std::optional<double> number(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(path, "expected a number, got '" + node.Scalar() + "'");
      return std::nullopt;
    }
  }

  double number_or(const YAML::Node& parent, const std::string& key, const std::string& path, double dflt) {
    if (!parent[key]) return dflt;
    return number(parent[key], join(path, key)).value_or(dflt);
  }

  std::optional<std::string> text(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return node.Scalar();
  }

  std::optional<bool> flag(const YAML::Node& node, const std::string& path) {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(path, "expected true or false");
      return std::nullopt;
    }
  }

  std::optional<std::uint64_t> count(const YAML::Node& node, const std::string& path) {
    try {
      auto v = node.as<long long>();
      if (v >= 0) return static_cast<std::uint64_t>(v);
    } catch (const YAML::Exception&) {
    }
    fail(path, "expected a non-negative integer");
    return std::nullopt;
  }

  std::optional<Vector> vector(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) {
      fail(path, "expected a list of numbers");
      return std::nullopt;
    }
    Vector v(static_cast<Eigen::Index>(node.size()));
    bool ok = true;
    for (std::size_t i = 0; i < node.size(); ++i) {
      auto e = number(node[i], path + "[" + std::to_string(i) + "]");
      if (e)
        v[ix(i)] = *e;
      else
        ok = false;
    }
    return ok ? std::optional<Vector>(v) : std::nullopt;
  }

  std::optional<Matrix> matrix(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence() || node.size() == 0) {
      fail(path, "expected a list of rows");
      return std::nullopt;
    }
    const std::size_t rows = node.size();
    Matrix m(ix(rows), ix(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = vector(node[r], path + "[" + std::to_string(r) + "]");
      if (!row) return std::nullopt;
      if (static_cast<std::size_t>(row->size()) != rows) {
        fail(path, "matrix must be square");
        return std::nullopt;
      }
      m.row(ix(r)) = row->transpose();
    }
    return m;
  }

  // 1-based action list to a set.
  std::optional<ActionSet> action_set(const YAML::Node& node, const std::string& path, std::size_t n) {
    if (!node.IsSequence()) {
      fail(path, "expected a list of actions");
      return std::nullopt;
    }
    ActionSet s = 0;
    for (std::size_t i = 0; i < node.size(); ++i) {
      auto a = count(node[i], path + "[" + std::to_string(i) + "]");
      if (!a) return std::nullopt;
      if (*a < 1 || *a > n) {
        fail(path, "action " + std::to_string(*a) + " outside 1.." + std::to_string(n));
        return std::nullopt;
      }
      s |= singleton(static_cast<std::size_t>(*a - 1));
    }
    return s;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

struct GameSpec {
  std::optional<std::variant<PopulationGame, MultiPopulationGame>> game;
  std::vector<Population> populations;
};

Matrix rps_matrix(double win, double loss) {
  Matrix m(3, 3);
  m << 0, -loss, win, win, 0, -loss, -loss, win, 0;
  return m;
}

GameSpec read_game(Reader& rd, const YAML::Node& node, std::string& type_out) {
  GameSpec spec;
  const std::string path = "game";
  if (!rd.is_map(node, path)) return spec;
  rd.only_keys(node, path, {"type", "win", "loss", "matrix", "base", "offsets", "masses", "actions"});
  if (!node["type"]) {
    rd.fail("game.type", "missing");
    return spec;
  }
  auto type = rd.text(node["type"], "game.type");
  if (!type) return spec;
  type_out = *type;
  const double win = rd.number_or(node, "win", path, 1.0);
  try {
    if (*type == "good_rps" || *type == "standard_rps" || *type == "bad_rps") {
      const double dflt = *type == "good_rps" ? 0.9 : (*type == "standard_rps" ? 1.0 : 1.1);
      spec.game = games::good_rps(win, rd.number_or(node, "loss", path, dflt));
    } else if (*type == "friedman") {
      spec.game = games::friedman();
    } else if (*type == "zero") {
      spec.game = games::zero_game(static_cast<std::size_t>(rd.number_or(node, "actions", path, 3)));
    } else if (*type == "matrix") {
      if (!node["matrix"]) {
        rd.fail("game.matrix", "missing");
        return spec;
      }
      if (auto m = rd.matrix(node["matrix"], "game.matrix")) spec.game = PopulationGame::matrix(*m);
    } else if (*type == "anonymous") {
      Matrix base = rps_matrix(win, rd.number_or(node, "loss", path, 0.9));
      if (node["base"]) {
        auto m = rd.matrix(node["base"], "game.base");
        if (!m) return spec;
        base = *m;
      }
      std::vector<double> masses = {0.5, 0.5};
      if (node["masses"]) {
        auto v = rd.vector(node["masses"], "game.masses");
        if (!v) return spec;
        masses.assign(v->begin(), v->end());
      }
      std::vector<Vector> offsets(masses.size(), Vector::Zero(base.rows()));
      if (node["offsets"]) {
        const auto& o = node["offsets"];
        if (!o.IsSequence() || o.size() != masses.size()) {
          rd.fail("game.offsets", "expected one offset vector per population");
          return spec;
        }
        for (std::size_t p = 0; p < o.size(); ++p) {
          auto v = rd.vector(o[p], "game.offsets[" + std::to_string(p) + "]");
          if (!v) return spec;
          offsets[p] = *v;
        }
      }
      spec.game = games::anonymous(base, offsets, masses);
    } else {
      rd.fail("game.type", "unknown game type '" + *type + "'");
      return spec;
    }
  } catch (const std::exception& e) {
    rd.fail(path, e.what());
    spec.game.reset();
    return spec;
  }
  if (std::holds_alternative<PopulationGame>(*spec.game)) {
    spec.populations = {{std::get<PopulationGame>(*spec.game).action_count(), 1.0}};
  } else {
    const auto& layout = std::get<MultiPopulationGame>(*spec.game).layout();
    for (std::size_t p = 0; p < layout.population_count(); ++p) spec.populations.push_back(layout.population(p));
  }
  return spec;
}

std::optional<CostDistribution> read_cost(Reader& rd, const YAML::Node& node, const std::string& path) {
  if (!rd.is_map(node, path)) return std::nullopt;
  rd.only_keys(node, path, {"type", "slope", "cap", "breakpoints", "at"});
  auto type = node["type"] ? rd.text(node["type"], path + ".type") : std::optional<std::string>("linear");
  if (!type) return std::nullopt;
  try {
    if (*type == "zero") return CostDistribution::zero_cost();
    if (*type == "linear") {
      double cap = std::numeric_limits<double>::infinity();
      if (node["cap"] && node["cap"].IsScalar() && node["cap"].Scalar() != "inf")
        cap = rd.number_or(node, "cap", path, cap);
      return CostDistribution::linear(rd.number_or(node, "slope", path, 1.0), cap);
    }
    if (*type == "atom") return CostDistribution::atom_at(rd.number_or(node, "at", path, 0.0));
    if (*type == "piecewise") {
      const auto& b = node["breakpoints"];
      if (!b || !b.IsSequence()) {
        rd.fail(path + ".breakpoints", "expected a list of [q, Q] pairs");
        return std::nullopt;
      }
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < b.size(); ++i) {
        auto v = rd.vector(b[i], path + ".breakpoints[" + std::to_string(i) + "]");
        if (!v || v->size() != 2) {
          rd.fail(path + ".breakpoints[" + std::to_string(i) + "]", "expected a [q, Q] pair");
          return std::nullopt;
        }
        pts.emplace_back((*v)[0], (*v)[1]);
      }
      return CostDistribution::piecewise(std::move(pts));
    }
  } catch (const std::exception& e) {
    rd.fail(path, e.what());
    return std::nullopt;
  }
  rd.fail(path + ".type", "unknown cost type '" + *type + "'");
  return std::nullopt;
}

std::optional<SelectionRule> read_selection(Reader& rd, const YAML::Node& node, const std::string& path,
                                            std::size_t n) {
  SelectionRule rule;
  if (node.IsScalar()) {
    const auto& s = node.Scalar();
    if (s == "uniform") return rule;
    if (s == "lowest_index") {
      rule.mixing = SelectionRule::Mixing::lowest_index;
      return rule;
    }
    rd.fail(path, "unknown selection '" + s + "'");
    return std::nullopt;
  }
  if (!rd.is_map(node, path)) return std::nullopt;
  rd.only_keys(node, path, {"mixing", "tie_tol", "weights"});
  rule.tie_tol = rd.number_or(node, "tie_tol", path, rule.tie_tol);
  if (node["mixing"]) {
    auto m = rd.text(node["mixing"], path + ".mixing");
    if (!m) return std::nullopt;
    if (*m == "uniform")
      rule.mixing = SelectionRule::Mixing::uniform_over_best;
    else if (*m == "lowest_index")
      rule.mixing = SelectionRule::Mixing::lowest_index;
    else if (*m == "weights")
      rule.mixing = SelectionRule::Mixing::given_weights;
    else {
      rd.fail(path + ".mixing", "unknown mixing '" + *m + "'");
      return std::nullopt;
    }
  }
  if (rule.mixing == SelectionRule::Mixing::given_weights) {
    if (!node["weights"]) {
      rd.fail(path + ".weights", "missing");
      return std::nullopt;
    }
    auto w = rd.vector(node["weights"], path + ".weights");
    if (!w) return std::nullopt;
    if (static_cast<std::size_t>(w->size()) != n) {
      rd.fail(path + ".weights", "expected " + std::to_string(n) + " entries");
      return std::nullopt;
    }
    rule.weights = *w;
  }
  return rule;
}

std::optional<MeanDynamic> read_dynamic(Reader& rd, const YAML::Node& node, const std::string& path,
                                        std::optional<std::size_t> actions) {
  if (!rd.is_map(node, path)) return std::nullopt;
  rd.only_keys(node, path,
               {"type", "slope", "cost", "p", "parts", "weights", "probabilities", "tables", "draws", "selection",
                "allow_invalid"});
  if (!node["type"]) {
    rd.fail(path + ".type", "missing");
    return std::nullopt;
  }
  auto type = rd.text(node["type"], path + ".type");
  if (!type) return std::nullopt;
  static const std::set<std::string> known = {"brd",         "tempered_brd",  "smith",          "pairwise",
                                              "ordinal",     "partitioned",   "independent",    "explicit",
                                              "friedman_asymmetric", "a1ii_fixture_1", "a1ii_fixture_2",
                                              "replicator",  "bnn",           "birth_death"};
  if (!known.count(*type)) {
    rd.fail(path + ".type", "unknown dynamic '" + *type + "'");
    return std::nullopt;
  }
  if (!actions) return std::nullopt;
  const std::size_t n = *actions;

  std::optional<CostDistribution> cost;
  if (node["cost"]) {
    cost = read_cost(rd, node["cost"], path + ".cost");
    if (!cost) return std::nullopt;
  }
  SelectionRule selection;
  if (node["selection"]) {
    auto s = read_selection(rd, node["selection"], path + ".selection", n);
    if (!s) return std::nullopt;
    selection = *s;
  }
  bool allow_invalid = false;
  if (node["allow_invalid"]) allow_invalid = rd.flag(node["allow_invalid"], path + ".allow_invalid").value_or(false);

  const std::size_t errors_before = rd.errors.size();
  try {
    auto rational = [&](RevisionProtocol p) { return MeanDynamic::rationalizable(std::move(p), selection, allow_invalid); };
    const auto& t = *type;
    if (t == "brd") return rational(cost ? protocols::tempered_brd(n, *cost) : protocols::brd(n));
    if (t == "tempered_brd") return rational(protocols::tempered_brd(n, cost.value_or(default_tempered_cost())));
    if (t == "smith") {
      if (cost) return rational(protocols::pairwise(n, *cost));
      auto p = protocols::smith(n, rd.number_or(node, "slope", path, 1.0));
      return rational(std::move(p));
    }
    if (t == "pairwise") return rational(protocols::pairwise(n, cost.value_or(default_pairwise_cost())));
    if (t == "ordinal") {
      auto p = protocols::ordinal(n, rd.number_or(node, "p", path, 0.5));
      if (cost) p.cost = *cost;
      return rational(std::move(p));
    }
    if (t == "partitioned") {
      std::vector<ActionSet> parts = protocols::default_parts(n);
      if (node["parts"]) {
        parts.clear();
        const auto& ps = node["parts"];
        if (!ps.IsSequence()) {
          rd.fail(path + ".parts", "expected a list of action lists");
          return std::nullopt;
        }
        for (std::size_t i = 0; i < ps.size(); ++i) {
          auto s = rd.action_set(ps[i], path + ".parts[" + std::to_string(i) + "]", n);
          if (!s) return std::nullopt;
          parts.push_back(*s);
        }
      }
      std::vector<double> weights;
      if (node["weights"]) {
        auto w = rd.vector(node["weights"], path + ".weights");
        if (!w) return std::nullopt;
        weights.assign(w->begin(), w->end());
      } else {
        const double total = static_cast<double>(parts.size() * (parts.size() + 1)) / 2.0;
        for (std::size_t i = 0; i < parts.size(); ++i) weights.push_back(static_cast<double>(i + 1) / total);
      }
      return rational(protocols::partitioned(n, std::move(parts), std::move(weights),
                                             cost.value_or(CostDistribution::zero_cost())));
    }
    if (t == "independent") {
      std::vector<double> probs(n, 0.5);
      if (node["probabilities"]) {
        auto v = rd.vector(node["probabilities"], path + ".probabilities");
        if (!v) return std::nullopt;
        if (static_cast<std::size_t>(v->size()) != n) {
          rd.fail(path + ".probabilities", "expected " + std::to_string(n) + " entries");
          return std::nullopt;
        }
        probs.assign(v->begin(), v->end());
      }
      return rational(protocols::independent(std::move(probs), cost.value_or(CostDistribution::zero_cost())));
    }
    if (t == "explicit") {
      const auto& tables = node["tables"];
      if (!tables || !tables.IsSequence()) {
        rd.fail(path + ".tables", "expected a list of {current, subset, probability} rows");
        return std::nullopt;
      }
      std::vector<AvailabilityDistribution::Entry> entries;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string rp = path + ".tables[" + std::to_string(i) + "]";
        const auto& row = tables[i];
        if (!rd.is_map(row, rp)) return std::nullopt;
        rd.only_keys(row, rp, {"current", "subset", "probability"});
        if (!row["current"] || !row["subset"] || !row["probability"]) {
          rd.fail(rp, "needs current, subset and probability");
          return std::nullopt;
        }
        auto cur = rd.count(row["current"], rp + ".current");
        auto sub = rd.action_set(row["subset"], rp + ".subset", n);
        auto prob = rd.number(row["probability"], rp + ".probability");
        if (!cur || !sub || !prob) return std::nullopt;
        if (*cur < 1 || *cur > n) {
          rd.fail(rp + ".current", "outside 1.." + std::to_string(n));
          return std::nullopt;
        }
        entries.push_back({static_cast<std::size_t>(*cur - 1), *sub, *prob});
      }
      return rational(protocols::explicit_tables(n, entries, cost.value_or(CostDistribution::zero_cost())));
    }
    if (t == "friedman_asymmetric" || t == "a1ii_fixture_1" || t == "a1ii_fixture_2") {
      auto p = protocol_from_name(t, n);
      if (cost) p.cost = *cost;
      return rational(std::move(p));
    }
    if (t == "replicator") return cost ? MeanDynamic::replicator(n, *cost) : MeanDynamic::replicator(n);
    if (t == "bnn") return MeanDynamic::bnn(n);
    if (t == "birth_death") {
      auto avail = BirthDeathAvailability::uniform_singleton(n);
      if (node["draws"]) {
        const auto& ds = node["draws"];
        if (!ds.IsSequence()) {
          rd.fail(path + ".draws", "expected a list of {subset, probability} rows");
          return std::nullopt;
        }
        std::vector<Draw> draws;
        for (std::size_t i = 0; i < ds.size(); ++i) {
          const std::string rp = path + ".draws[" + std::to_string(i) + "]";
          if (!rd.is_map(ds[i], rp)) return std::nullopt;
          rd.only_keys(ds[i], rp, {"subset", "probability"});
          auto sub = ds[i]["subset"] ? rd.action_set(ds[i]["subset"], rp + ".subset", n) : std::nullopt;
          auto prob = ds[i]["probability"] ? rd.number(ds[i]["probability"], rp + ".probability") : std::nullopt;
          if (!sub || !prob) {
            if (rd.errors.size() == errors_before) rd.fail(rp, "needs subset and probability");
            return std::nullopt;
          }
          draws.push_back({*sub, *prob});
        }
        avail = BirthDeathAvailability::from_draws(n, std::move(draws));
      }
      return MeanDynamic::birth_death(std::move(avail),
                                      cost.value_or(CostDistribution::linear(1.0, std::numeric_limits<double>::infinity())),
                                      selection);
    }
  } catch (const std::exception& e) {
    rd.fail(path, e.what());
  }
  return std::nullopt;
}

std::optional<Verdict> parse_verdict(const std::string& s) {
  for (auto v : {Verdict::monotone, Verdict::monotone_up_to_transients, Verdict::non_monotone})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<AuditRequest> read_audit(Reader& rd, const YAML::Node& node, const std::string& path) {
  if (!rd.is_map(node, path)) return std::nullopt;
  rd.only_keys(node, path, {"kind", "series", "budget", "expect", "radius", "min_fraction", "require_toward_zero"});
  AuditRequest req;
  const std::size_t before = rd.errors.size();
  if (node["kind"]) {
    auto k = rd.text(node["kind"], path + ".kind");
    if (k == "monotonicity")
      req.kind = AuditRequest::Kind::monotonicity;
    else if (k == "convergence")
      req.kind = AuditRequest::Kind::convergence;
    else if (k == "decay")
      req.kind = AuditRequest::Kind::decay;
    else if (k)
      rd.fail(path + ".kind", "unknown audit kind '" + *k + "'");
  }
  if (node["series"]) req.series = rd.text(node["series"], path + ".series").value_or(req.series);
  if (node["budget"]) {
    req.budget = rd.number(node["budget"], path + ".budget");
    if (req.budget && *req.budget < 0) rd.fail(path + ".budget", "must be non-negative");
  }
  if (node["radius"]) {
    req.radius = rd.number(node["radius"], path + ".radius").value_or(req.radius);
    if (!(req.radius > 0)) rd.fail(path + ".radius", "must be positive");
  }
  if (node["min_fraction"]) req.min_fraction = rd.number(node["min_fraction"], path + ".min_fraction").value_or(0.99);
  if (node["require_toward_zero"])
    req.require_toward_zero = rd.flag(node["require_toward_zero"], path + ".require_toward_zero").value_or(false);
  if (const auto& e = node["expect"]) {
    std::vector<std::string> names;
    if (e.IsScalar())
      names.push_back(e.Scalar());
    else if (e.IsSequence())
      for (const auto& item : e) names.push_back(item.IsScalar() ? item.Scalar() : "?");
    else
      rd.fail(path + ".expect", "expected a verdict or a list of verdicts");
    for (const auto& s : names) {
      if (auto v = parse_verdict(s))
        req.expect.push_back(*v);
      else
        rd.fail(path + ".expect", "unknown verdict '" + s + "'");
    }
  }
  if (rd.errors.size() != before) return std::nullopt;
  return req;
}

Scenario build(const YAML::Node& root, const std::string& origin) {
  Reader rd;
  if (!root.IsMap()) throw ScenarioError({origin + ": expected a table at the top level"});
  rd.only_keys(root, "",
               {"name", "seed", "game", "dynamic", "dynamics", "initial_state", "integrator", "aux", "audits",
                "output"});

  Scenario sc{.name = "",
              .seed = 0,
              .game_type = "",
              .game = games::zero_game(1),
              .dynamics = {},
              .initial_states = {},
              .integrator = {},
              .aux = {},
              .audits = {},
              .csv_path = "",
              .json_path = "",
              .plot_path = ""};

  if (root["name"])
    sc.name = rd.text(root["name"], "name").value_or("");
  else
    rd.fail("name", "missing");
  if (root["seed"]) sc.seed = rd.count(root["seed"], "seed").value_or(0);

  GameSpec game;
  if (root["game"])
    game = read_game(rd, root["game"], sc.game_type);
  else
    rd.fail("game", "missing");
  if (game.game) sc.game = *game.game;
  const std::size_t pops = game.game ? game.populations.size() : 0;

  // Dynamics: one per population.
  if (root["dynamic"] && root["dynamics"]) rd.fail("dynamics", "give either dynamic or dynamics, not both");
  std::vector<std::pair<YAML::Node, std::string>> dyn_nodes;
  if (root["dynamics"]) {
    const auto& ds = root["dynamics"];
    if (!ds.IsSequence())
      rd.fail("dynamics", "expected a list");
    else
      for (std::size_t i = 0; i < ds.size(); ++i) dyn_nodes.emplace_back(ds[i], "dynamics[" + std::to_string(i) + "]");
  } else if (root["dynamic"]) {
    if (pops > 1)
      for (std::size_t p = 0; p < pops; ++p) dyn_nodes.emplace_back(root["dynamic"], "dynamic");
    else
      dyn_nodes.emplace_back(root["dynamic"], "dynamic");
  } else {
    rd.fail("dynamic", "missing");
  }
  if (game.game && !dyn_nodes.empty() && dyn_nodes.size() != pops)
    rd.fail("dynamics", "expected " + std::to_string(pops) + " entries, one per population");
  for (std::size_t i = 0; i < dyn_nodes.size(); ++i) {
    std::optional<std::size_t> n;
    if (game.game && i < pops) n = game.populations[i].actions;
    auto d = read_dynamic(rd, dyn_nodes[i].first, dyn_nodes[i].second, n);
    if (d) sc.dynamics.push_back(std::move(*d));
  }

  // Initial state.
  if (!root["initial_state"]) {
    rd.fail("initial_state", "missing");
  } else if (game.game) {
    const auto& node = root["initial_state"];
    std::vector<std::pair<YAML::Node, std::string>> rows;
    if (pops == 1 && node.IsSequence() && (node.size() == 0 || node[0].IsScalar())) {
      rows.emplace_back(node, "initial_state");
    } else if (node.IsSequence() && node.size() == pops) {
      for (std::size_t p = 0; p < pops; ++p) rows.emplace_back(node[p], "initial_state[" + std::to_string(p) + "]");
    } else {
      rd.fail("initial_state", "expected " + std::to_string(pops) + " per-population share lists");
    }
    for (std::size_t p = 0; p < rows.size(); ++p) {
      auto v = rd.vector(rows[p].first, rows[p].second);
      if (!v) continue;
      const auto& pop = game.populations[p];
      if (static_cast<std::size_t>(v->size()) != pop.actions) {
        rd.fail(rows[p].second, "expected " + std::to_string(pop.actions) + " entries, got " + std::to_string(v->size()));
        continue;
      }
      try {
        // Single-population states are masses; per-population rows are shares.
        Vector x = pops == 1 ? *v : Vector(*v * pop.mass);
        sc.initial_states.push_back(SimplexState(x, pop.mass).values());
      } catch (const std::exception& e) {
        rd.fail(rows[p].second, e.what());
      }
    }
  }

  // Integrator.
  if (const auto& node = root["integrator"]; node && rd.is_map(node, "integrator")) {
    rd.only_keys(node, "integrator", {"dt", "horizon", "scheme", "record_every", "clip_negative"});
    auto& cfg = sc.integrator;
    if (node["dt"]) {
      if (auto v = rd.number(node["dt"], "integrator.dt")) {
        if (*v > 0)
          cfg.dt = *v;
        else
          rd.fail("integrator.dt", "must be positive");
      }
    }
    if (node["horizon"]) {
      if (auto v = rd.number(node["horizon"], "integrator.horizon")) {
        if (*v >= 0)
          cfg.horizon = *v;
        else
          rd.fail("integrator.horizon", "must be non-negative");
      }
    }
    if (node["scheme"]) {
      auto s = rd.text(node["scheme"], "integrator.scheme");
      if (s == "rk4")
        cfg.scheme = Scheme::rk4;
      else if (s == "euler")
        cfg.scheme = Scheme::euler;
      else if (s)
        rd.fail("integrator.scheme", "unknown scheme '" + *s + "'");
    }
    if (node["record_every"]) {
      auto v = rd.count(node["record_every"], "integrator.record_every");
      if (v && *v == 0) rd.fail("integrator.record_every", "must be at least 1");
      if (v && *v > 0) cfg.record_every = *v;
    }
    if (node["clip_negative"]) cfg.clip_negative = rd.flag(node["clip_negative"], "integrator.clip_negative").value_or(true);
    try {
      cfg.check();
    } catch (const ArgumentError& e) {
      rd.fail("integrator", e.what());
    }
  }

  if (const auto& node = root["aux"]) {
    if (!node.IsSequence()) {
      rd.fail("aux", "expected a list of series names");
    } else {
      for (std::size_t i = 0; i < node.size(); ++i) {
        auto s = rd.text(node[i], "aux[" + std::to_string(i) + "]");
        if (!s) continue;
        if (*s != "W") {
          rd.fail("aux[" + std::to_string(i) + "]", "unknown series '" + *s + "'");
          continue;
        }
        if (game.game && (pops != 1 || !std::get<PopulationGame>(sc.game).equilibrium()))
          rd.fail("aux[" + std::to_string(i) + "]", "W needs a single-population game with a known equilibrium");
        sc.aux.push_back(*s);
      }
    }
  }

  if (const auto& node = root["audits"]) {
    if (!node.IsSequence()) {
      rd.fail("audits", "expected a list");
    } else {
      for (std::size_t i = 0; i < node.size(); ++i)
        if (auto a = read_audit(rd, node[i], "audits[" + std::to_string(i) + "]")) sc.audits.push_back(*a);
    }
  }

  if (const auto& node = root["output"]; node && rd.is_map(node, "output")) {
    rd.only_keys(node, "output", {"csv", "json", "plot"});
    if (node["csv"]) sc.csv_path = rd.text(node["csv"], "output.csv").value_or("");
    if (node["json"]) sc.json_path = rd.text(node["json"], "output.json").value_or("");
    if (node["plot"]) sc.plot_path = rd.text(node["plot"], "output.plot").value_or("");
  }

  if (!rd.errors.empty()) {
    for (auto& e : rd.errors) e = origin + ": " + e;
    throw ScenarioError(rd.errors);
  }
  return sc;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScenarioError({origin + ": " + e.what()});
  }
  return build(root, origin);
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

std::uint64_t effective_seed(const Scenario& scenario) {
  const char* env = std::getenv("GAINFLOW_SEED");
  if (!env) return scenario.seed;
  std::string s = env;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-')
    throw ArgumentError("GAINFLOW_SEED must be a non-negative integer, got '" + s + "'");
  return v;
}

Trajectory run_scenario(const Scenario& scenario) {
  Trajectory traj;
  if (const auto* game = std::get_if<PopulationGame>(&scenario.game)) {
    traj = simulate(*game, scenario.dynamics.at(0), SimplexState(scenario.initial_states.at(0)), scenario.integrator);
    for (const auto& name : scenario.aux) {
      if (traj.has_series(name) || name != "W" || !game->equilibrium()) continue;
      auto& w = traj.add_aux("W");
      for (const auto& x : traj.states) w.push_back(replicator_lyapunov_raw(x, game->equilibrium()->values()));
    }
  } else {
    const auto& multi = std::get<MultiPopulationGame>(scenario.game);
    const auto& layout = multi.layout();
    Vector profile(ix(layout.total_actions()));
    for (std::size_t p = 0; p < layout.population_count(); ++p) layout.segment(profile, p) = scenario.initial_states.at(p);
    traj = simulate(multi, scenario.dynamics, profile, scenario.integrator);
  }
  traj.seed = effective_seed(scenario);
  return traj;
}

std::vector<AuditOutcome> run_audits(const Scenario& scenario, const Trajectory& traj) {
  std::vector<AuditOutcome> out;
  const auto* single = std::get_if<PopulationGame>(&scenario.game);
  const auto* multi = std::get_if<MultiPopulationGame>(&scenario.game);
  for (const auto& req : scenario.audits) {
    AuditOutcome o;
    o.request = req;
    if (req.kind == AuditRequest::Kind::convergence) {
      if (single && single->equilibrium()) {
        o.convergence = audit_convergence(traj, single->equilibrium()->values(), req.radius);
      } else if (multi && multi->aggregate_equilibrium()) {
        // Any profile with this aggregate is an equilibrium.
        o.convergence = audit_aggregate_convergence(traj, *multi->aggregate_equilibrium(), req.radius);
      } else if (multi && multi->equilibrium()) {
        o.convergence = audit_convergence(traj, *multi->equilibrium(), req.radius);
      }
      o.passed = o.convergence && o.convergence->converged;
    } else {
      const double budget = req.budget ? *req.budget : (single ? default_budget(traj, *single) : default_budget(traj, *multi));
      o.monotonicity = audit_monotonicity(traj, req.series, budget);
      const auto& m = *o.monotonicity;
      if (req.kind == AuditRequest::Kind::decay)
        o.passed = m.decay_checked && m.decay_fraction >= req.min_fraction;
      else
        o.passed = req.expect.empty() || std::find(req.expect.begin(), req.expect.end(), m.verdict) != req.expect.end();
      if (req.require_toward_zero) o.passed = o.passed && m.toward_zero;
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace gainflow
