#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustdyn/metrics.hpp"
#include "trustdyn/scenario.hpp"
#include "trustdyn/trace.hpp"

namespace trustdyn {

// Output schemas. Agents, rows and columns are 1-based in every file.
inline constexpr const char* kTraceHeader = "topic,round,agent,belief";
inline constexpr const char* kWeightsHeader = "topic,row,col,weight";

/// Shortest-stable text form used for every number written ("%.17g").
std::string format_double(double x);

void write_trace_csv(const SimulationTrace& trace, std::ostream& out);
void write_weights_csv(const SimulationTrace& trace, std::ostream& out);

/// Per-replication report: metadata, truths, per-topic wisdom and flags,
/// aggregate metrics.
nlohmann::json replication_report(const SimulationTrace& trace, const WisdomReport& wisdom);

/// Report for a whole run; one entry per replication in seed order.
nlohmann::json run_report(const ScenarioConfig& cfg, const std::vector<SimulationTrace>& traces);

/// Writes trace.csv, weights.csv (per seed subdirectory when there is more
/// than one replication), report.json and the resolved config.json under dir.
void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                       const std::vector<SimulationTrace>& traces);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace trustdyn
