#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace trustdyn {

inline constexpr const char* kSweepHeader =
    "param,value,replications,fraction_full_wisdom,mean_abs_offset_tail,mean_offset_tail,consensus_topics,"
    "diverged_topics,nonconverged_topics,mean_clusters,polarization_coefficient";

/// "0.1,0.2,0.5" or "lo:hi:count" (count evenly spaced points, ends included).
/// Throws InvalidArgument on malformed or empty input.
std::vector<double> parse_grid(std::string_view text);

/// Copy of doc with the value at the JSON pointer replaced. The parent must
/// exist; integer-valued slots keep integer type. Throws ConfigInvalid.
nlohmann::json with_parameter(const nlohmann::json& doc, const std::string& pointer, double value);

/// Runs the scenario at every grid point and returns one CSV row per point
/// with replication-averaged metrics. Throws InvalidArgument on an empty grid.
std::string sweep_csv(const nlohmann::json& doc, const std::string& pointer, const std::vector<double>& grid,
                      unsigned threads = 1);

}  // namespace trustdyn
