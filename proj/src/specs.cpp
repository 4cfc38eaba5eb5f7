#include "gainflow/specs.hpp"

namespace gainflow {

PopulationGame game_from_name(const std::string& name, std::size_t actions) {
  if (name == "good_rps") return games::good_rps(1.0, 0.9);
  if (name == "standard_rps") return games::good_rps(1.0, 1.0);
  if (name == "bad_rps") return games::good_rps(1.0, 1.1);
  if (name == "friedman") return games::friedman();
  if (name == "zero") return games::zero_game(actions == 0 ? 3 : actions);
  throw ArgumentError("unknown game '" + name + "'");
}

std::vector<std::string> game_names() { return {"good_rps", "standard_rps", "bad_rps", "friedman", "zero"}; }

namespace {

std::size_t fixed_size(const std::string& name) {
  if (name == "friedman_asymmetric") return 3;
  if (name == "a1ii_fixture_1" || name == "a1ii_fixture_2") return 5;
  return 0;
}

std::vector<double> part_weights(std::size_t parts) {
  std::vector<double> w(parts);
  const double total = static_cast<double>(parts * (parts + 1)) / 2.0;
  for (std::size_t i = 0; i < parts; ++i) w[i] = static_cast<double>(i + 1) / total;
  return w;
}

}  // namespace

RevisionProtocol protocol_from_name(const std::string& name, std::size_t actions) {
  const std::size_t fixed = fixed_size(name);
  if (fixed != 0 && actions != 0 && actions != fixed)
    throw ArgumentError("protocol '" + name + "' is defined for " + std::to_string(fixed) + " actions only");
  const std::size_t n = actions == 0 ? (fixed ? fixed : 3) : actions;
  if (name == "brd") return protocols::brd(n);
  if (name == "tempered_brd") return protocols::tempered_brd(n, default_tempered_cost());
  if (name == "smith") return protocols::smith(n, 1.0);
  if (name == "pairwise") return protocols::pairwise(n, default_pairwise_cost());
  if (name == "ordinal") return protocols::ordinal(n, 0.5);
  if (name == "partitioned") {
    auto parts = protocols::default_parts(n);
    auto w = part_weights(parts.size());
    return protocols::partitioned(n, std::move(parts), std::move(w));
  }
  if (name == "independent") return protocols::independent(std::vector<double>(n, 0.5));
  if (name == "friedman_asymmetric") return protocols::friedman_asymmetric();
  if (name == "a1ii_fixture_1") return protocols::a1ii_counterexample(1);
  if (name == "a1ii_fixture_2") return protocols::a1ii_counterexample(2);
  throw ArgumentError("unknown protocol '" + name + "'");
}

std::vector<std::string> protocol_names() {
  return {"brd",          "tempered_brd",        "smith",       "pairwise",       "ordinal",
          "partitioned",  "friedman_asymmetric", "independent", "a1ii_fixture_1", "a1ii_fixture_2"};
}

std::vector<std::string> canonical_protocol_names() {
  return {"brd", "tempered_brd", "smith", "pairwise", "ordinal", "partitioned", "friedman_asymmetric"};
}

std::vector<std::size_t> supported_action_counts(const std::string& protocol) {
  if (std::size_t fixed = fixed_size(protocol)) return {fixed};
  return {2, 3, 4, 5, 6};
}

CostDistribution default_tempered_cost() {
  return CostDistribution::piecewise({{0.0, 0.0}, {0.5, 0.4}, {0.5, 0.6}, {1.0, 1.0}});
}

CostDistribution default_pairwise_cost() { return CostDistribution::linear(2.0, 1.0); }

}  // namespace gainflow
