#ifndef PSIM_SCENARIO_IO_HPP
#define PSIM_SCENARIO_IO_HPP

#include <string>
#include <vector>

#include "psim/model.hpp"

namespace psim {

/// Parses and validates a scenario document (JSON). Error messages name
/// the offending field path. See docs/scenario_format.md for the schema.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// Canonical serialized form (sorted keys, full precision); feeding the
/// result back into load_scenario reproduces the same scenario.
std::string serialize_scenario(const Scenario& s);

/// Applies "dotted.path=json-value" overrides to a document before it is
/// parsed. Every path must already exist in the document.
std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides);

std::string read_file(const std::string& path);

} // namespace psim

#endif
