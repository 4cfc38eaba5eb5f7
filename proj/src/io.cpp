#include "gainflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gainflow {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ArgumentError("no column '" + name + "'");
}

std::vector<std::string> csv_header(const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? traj.layout.total_actions() : static_cast<std::size_t>(traj.states[0].size());
  std::vector<std::string> h = {"t"};
  for (std::size_t i = 1; i <= n; ++i) h.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) h.push_back("pi" + std::to_string(i));
  for (const char* s : {"G", "H", "Gamma", "nash_gap"}) h.push_back(s);
  for (const auto& [name, _] : traj.aux) h.push_back(name);
  return h;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_csv(const Trajectory& traj, std::ostream& out) {
  const auto header = csv_header(traj);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t r = 0; r < traj.size(); ++r) {
    put(out, traj.times[r]);
    for (double v : traj.states[r]) out << ',', put(out, v);
    for (double v : traj.payoffs[r]) out << ',', put(out, v);
    for (const auto* s : {&traj.G, &traj.H, &traj.Gamma, &traj.nash_gap}) out << ',', put(out, (*s)[r]);
    for (const auto& [_, values] : traj.aux) out << ',', put(out, values.at(r));
    out << '\n';
  }
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(traj, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("empty CSV");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw ArgumentError("bad CSV cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw ArgumentError("CSV row width differs from the header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  return read_csv(in);
}

std::string gnuplot_script(const std::string& csv_path, const Trajectory& traj) {
  const auto header = csv_header(traj);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i + 1;
    return std::size_t{0};
  };
  std::ostringstream os;
  os << "# " << traj.game_name << " / " << traj.dynamic_name << "\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 't'\n"
     << "plot '" << csv_path << "' using 1:" << col("G") << " with lines title 'G', \\\n"
     << "     '' using 1:" << col("Gamma") << " with lines title 'Gamma'\n";
  return os.str();
}

namespace {

nlohmann::json vec(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

}  // namespace

nlohmann::json to_json(const Trajectory& traj) {
  nlohmann::json j;
  j["game"] = traj.game_name;
  j["dynamic"] = traj.dynamic_name;
  j["seed"] = traj.seed;
  j["dt"] = traj.config.dt;
  j["horizon"] = traj.config.horizon;
  j["scheme"] = traj.config.scheme == Scheme::rk4 ? "rk4" : "euler";
  j["total_clipping"] = traj.total_clipping;
  j["times"] = traj.times;
  auto& states = j["states"] = nlohmann::json::array();
  for (const auto& x : traj.states) states.push_back(vec(x));
  auto& payoffs = j["payoffs"] = nlohmann::json::array();
  for (const auto& p : traj.payoffs) payoffs.push_back(vec(p));
  j["G"] = traj.G;
  j["H"] = traj.H;
  j["Gamma"] = traj.Gamma;
  j["nash_gap"] = traj.nash_gap;
  auto& aux = j["aux"] = nlohmann::json::object();
  for (const auto& [name, values] : traj.aux) aux[name] = values;
  return j;
}

nlohmann::json to_json(const MonotonicityReport& r) {
  nlohmann::json j = {{"series", r.series},
                      {"budget", r.budget},
                      {"intervals", r.intervals},
                      {"violation_count", r.violation_count},
                      {"max_violation", r.max_violation},
                      {"transient_count", r.transient_count},
                      {"longest_increase_run", r.longest_increase_run},
                      {"verdict", to_string(r.verdict)},
                      {"initial_value", r.initial_value},
                      {"final_value", r.final_value},
                      {"toward_zero", r.toward_zero}};
  if (r.decay_checked) {
    j["decay_satisfied"] = r.decay_satisfied;
    j["decay_fraction"] = r.decay_fraction;
  }
  return j;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  return {{"final_gap", r.final_gap},
          {"final_distance", r.final_distance},
          {"first_entry_time", r.first_entry_time},
          {"radius", r.radius},
          {"converged", r.converged}};
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : r.witnesses) {
    nlohmann::json e = {{"assumption", x.assumption}, {"a", x.a + 1}};
    if (x.assumption == "Q1") {
      e["q"] = x.q;
    } else {
      e["b"] = x.b + 1;
      e["subset"] = format_set(x.subset);
      e["probability_a"] = x.probability_a;
      e["probability_b"] = x.probability_b;
    }
    w.push_back(std::move(e));
  }
  return {{"a0_pass", r.a0_pass},   {"q1_pass", r.q1_pass},   {"a1i_pass", r.a1i_pass},
          {"a1ii_pass", r.a1ii_pass}, {"a0_note", r.a0_note}, {"all_pass", r.all_pass()},
          {"witnesses", std::move(w)}};
}

nlohmann::json to_json(const StabilityReport& r) {
  return {{"stable", r.stable},
          {"worst_margin", r.worst_margin},
          {"worst_state", vec(r.worst_state)},
          {"evaluations", r.evaluations},
          {"constant_jacobian", r.constant_jacobian},
          {"note", r.note}};
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : r.properties)
    props.push_back({{"name", p.name},
                     {"checks", p.checks},
                     {"failures", p.failures},
                     {"passed", p.passed()},
                     {"counterexamples", p.counterexamples}});
  return {{"protocol", r.protocol},
          {"actions", r.actions},
          {"trials", r.trials},
          {"smooth_trials", r.smooth_trials},
          {"all_pass", r.all_pass()},
          {"properties", std::move(props)}};
}

nlohmann::json to_json(const StationarityReport& r) {
  nlohmann::json m = nlohmann::json::array();
  for (const auto& x : r.mismatches)
    m.push_back({{"state", vec(x.state)}, {"field_norm", x.field_norm}, {"gap", x.gap}});
  return {{"states", r.states}, {"mismatches", std::move(m)}};
}

nlohmann::json to_json(const AuditOutcome& r) {
  static const char* kinds[] = {"monotonicity", "convergence", "decay"};
  nlohmann::json j = {{"kind", kinds[static_cast<int>(r.request.kind)]}, {"passed", r.passed}};
  if (!r.request.expect.empty()) {
    auto& e = j["expect"] = nlohmann::json::array();
    for (auto v : r.request.expect) e.push_back(to_string(v));
  }
  if (r.monotonicity) j["report"] = to_json(*r.monotonicity);
  if (r.convergence) j["report"] = to_json(*r.convergence);
  return j;
}

}  // namespace gainflow
