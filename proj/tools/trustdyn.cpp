#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "trustdyn/error.hpp"
#include "trustdyn/io.hpp"
#include "trustdyn/reproduce.hpp"
#include "trustdyn/scenario.hpp"
#include "trustdyn/simulation.hpp"
#include "trustdyn/sweep.hpp"

namespace {

using nlohmann::json;
using namespace trustdyn;

json read_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, path + ": " + e.what());
  }
}

json with_seed(json doc, const std::optional<std::uint64_t>& seed) {
  if (seed) doc["seed"] = *seed;
  return doc;
}

std::string resolve_out(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("TRUSTDYN_OUT"); env && *env) return env;
  throw Error(ErrorKind::InvalidArgument, "no output directory: pass --out or set TRUSTDYN_OUT");
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::InvalidArgument:
    case ErrorKind::UnknownTarget:
      return 2;
    case ErrorKind::IoError:
      return 4;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust dynamics across repeated topics"};
  app.require_subcommand(1);

  std::string config, out, target, param, grid;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  auto* run = app.add_subcommand("run", "simulate a scenario and write trace, weights and report");
  run->add_option("--config", config, "scenario JSON")->required();
  run->add_option("--out", out, "output directory (default: $TRUSTDYN_OUT)");
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--threads", threads, "replication worker threads")->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("reproduce", "run a bundled figure or example and check it");
  repro->add_option("target", target, "target id")->required();
  repro->add_option("--out", out, "output directory (default: $TRUSTDYN_OUT)");
  repro->add_option("--threads", threads, "replication worker threads")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "vary one parameter and print summary CSV");
  sweep->add_option("--config", config, "scenario JSON")->required();
  sweep->add_option("--param", param, "JSON pointer, e.g. /trust/eta")->required();
  sweep->add_option("--grid", grid, "comma list or lo:hi:count")->required();
  sweep->add_option("--out", out, "CSV file (default: stdout)");
  sweep->add_option("--seed", seed, "override the scenario seed");
  sweep->add_option("--threads", threads, "replication worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--config", config, "scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = parse_config(with_seed(read_doc(config), seed));
      const auto dir = resolve_out(out);
      write_run_outputs(dir, cfg, simulate_replications(cfg, threads));
      std::cout << "wrote " << dir << '\n';
    } else if (repro->parsed()) {
      const auto dir = resolve_out(out);
      const auto result = reproduce(target, threads);
      write_reproduce_outputs(dir, result);
      for (const auto& c : result.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")")
                  << '\n';
      std::cout << target << ": " << (result.passed() ? "pass" : "fail") << ", wrote " << dir << '\n';
      return result.passed() ? 0 : 3;
    } else if (sweep->parsed()) {
      const auto csv = sweep_csv(with_seed(read_doc(config), seed), param, parse_grid(grid), threads);
      if (out.empty()) {
        std::cout << csv;
      } else {
        write_text_file(out, csv);
      }
    } else if (validate->parsed()) {
      const auto cfg = parse_config(read_doc(config));
      std::cout << config << ": ok (" << to_string(cfg.model) << ", " << cfg.topics << " topics)\n";
    }
  } catch (const Error& e) {
    std::cerr << "trustdyn: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "trustdyn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
