#pragma once

#include <string>

#include "phasemeter/joint.hpp"
#include "phasemeter/kernel1d.hpp"

#include "json.hpp"

namespace phasemeter {

using Json = nlohmann::json;

// JSON forms round-trip bit-exactly (shortest-round-trip double formatting).
Json grid_to_json(const PhaseSpaceGrid& g);
PhaseSpaceGrid grid_from_json(const Json& j);

Json state_to_json(const StateVector& s);  // amplitudes as [re, im] pairs
StateVector state_from_json(const Json& j);

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json error_report_to_json(const ErrorReport& r);
Json equality_report_to_json(const EqualityReport& r);
Json moment_table_to_json(const MomentTable& t);
Json outcome_to_json(const OutcomeDistribution& d);

/// CSV with one metadata header line, then "muX,muP,value" rows.
void write_grid_csv(const std::string& path, const PhaseSpaceGrid& g);
PhaseSpaceGrid read_grid_csv(const std::string& path);

/// Grid loader dispatching on extension (.json or .csv).
PhaseSpaceGrid read_grid(const std::string& path);

void write_outcome_csv(const std::string& path, const OutcomeDistribution& d);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace phasemeter
