#pragma once

#include "gainflow/dynamics.hpp"
#include "gainflow/game.hpp"
#include "gainflow/protocol.hpp"

#include <string>
#include <vector>

namespace gainflow {

// Named games: good_rps, standard_rps, bad_rps, friedman, zero.
PopulationGame game_from_name(const std::string& name, std::size_t actions = 3);
std::vector<std::string> game_names();

// Named protocols: brd, tempered_brd, smith, pairwise, ordinal, partitioned,
// friedman_asymmetric, independent, a1ii_fixture_1, a1ii_fixture_2.
RevisionProtocol protocol_from_name(const std::string& name, std::size_t actions);
std::vector<std::string> protocol_names();
// The rationalizable protocols exercised by the audits, and the action counts
// each one is defined for.
std::vector<std::string> canonical_protocol_names();
std::vector<std::size_t> supported_action_counts(const std::string& protocol);

// Piecewise cost with a ramp, an atom at 0.5 and a flat tail.
CostDistribution default_tempered_cost();
// min(2 [q]_+, 1).
CostDistribution default_pairwise_cost();

}  // namespace gainflow
