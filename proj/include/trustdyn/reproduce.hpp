#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace trustdyn {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceResult {
  std::string target;
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> files;  // relative path, content

  bool passed() const;
};

const std::vector<std::string>& reproduce_targets();

/// Scenario documents run by a target, keyed by panel name. Targets that are
/// purely analytic return an empty list. Throws UnknownTarget.
std::vector<std::pair<std::string, nlohmann::json>> bundled_scenarios(std::string_view target);

/// Runs the bundled configuration(s) of a figure or example and evaluates
/// its checks. Throws UnknownTarget.
ReproduceResult reproduce(std::string_view target, unsigned threads = 1);

/// report.json (checks and metrics) plus the target's data files under dir.
void write_reproduce_outputs(const std::filesystem::path& dir, const ReproduceResult& result);

}  // namespace trustdyn
