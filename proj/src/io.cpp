#include "trustdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace trustdyn {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records)
    out << r.topic << ',' << r.round << ',' << (r.agent + 1) << ',' << format_double(r.belief) << '\n';
}

void write_weights_csv(const SimulationTrace& trace, std::ostream& out) {
  out << kWeightsHeader << '\n';
  for (const auto& snap : trace.weights) {
    for (Eigen::Index i = 0; i < snap.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < snap.weights.cols(); ++j)
        out << snap.topic << ',' << (i + 1) << ',' << (j + 1) << ',' << format_double(snap.weights(i, j)) << '\n';
  }
}

namespace {

json one_based(const std::vector<std::size_t>& members) {
  json a = json::array();
  for (auto m : members) a.push_back(m + 1);
  return a;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

json replication_report(const SimulationTrace& trace, const WisdomReport& wisdom) {
  json topics = json::array();
  json truths = json::array();
  std::size_t consensus = 0, diverged = 0, nonconverged = 0, skipped = 0;
  for (std::size_t i = 0; i < trace.topics.size(); ++i) {
    const auto& t = trace.topics[i];
    const auto& w = wisdom.topics[i];
    truths.push_back(t.mu);
    consensus += t.consensus;
    diverged += t.diverged;
    nonconverged += !t.converged;
    skipped += t.adjustment_skipped;
    topics.push_back({
        {"topic", t.topic},
        {"mu", t.mu},
        {"truthful_at_start", one_based(w.truthful_at_start)},
        {"eps_wise", one_based(w.eps_wise)},
        {"consensus_value", optional_number(w.consensus_value)},
        {"abs_offset", optional_number(w.abs_offset)},
        {"mean_offset", w.mean_offset},
        {"all_wise", w.all_wise},
        {"truthful_set", one_based(t.truthful.members)},
        {"adjustment_skipped", t.adjustment_skipped},
        {"consensus", t.consensus},
        {"diverged", t.diverged},
        {"nonconverged", !t.converged},
        {"weights_converged", t.weights_converged},
        {"rounds", t.rounds},
        {"clusters", t.clusters},
    });
  }
  return {
      {"metadata",
       {{"model", trace.metadata.model},
        {"config_hash", hex(trace.metadata.config_hash)},
        {"seed", trace.metadata.seed},
        {"version", trace.metadata.version}}},
      {"truths", truths},
      {"topics", topics},
      {"aggregate",
       {{"eps", wisdom.eps},
        {"fraction_full_wisdom", wisdom.fraction_full_wisdom},
        {"tail_window", wisdom.tail_window},
        {"mean_abs_offset_tail", wisdom.mean_abs_offset_tail},
        {"mean_offset_tail", wisdom.mean_offset_tail},
        {"consensus_topics", consensus},
        {"diverged_topics", diverged},
        {"nonconverged_topics", nonconverged},
        {"skipped_adjustments", skipped}}},
  };
}

json run_report(const ScenarioConfig& cfg, const std::vector<SimulationTrace>& traces) {
  json reps = json::array();
  for (const auto& t : traces) reps.push_back(replication_report(t, wisdom_report(t, cfg.wisdom_eps, cfg.tail_fraction)));
  return {{"name", cfg.name},
          {"model", std::string(to_string(cfg.model))},
          {"config_hash", hex(config_hash(cfg.source))},
          {"version", traces.empty() ? std::string() : traces.front().metadata.version},
          {"replications", reps}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                       const std::vector<SimulationTrace>& traces) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& t : traces) {
    auto sub = dir;
    if (traces.size() > 1) {
      sub /= "seed-" + std::to_string(t.metadata.seed);
      std::filesystem::create_directories(sub, ec);
      if (ec) throw Error(ErrorKind::IoError, "cannot create " + sub.string() + ": " + ec.message());
    }
    std::ostringstream trace_csv, weights_csv;
    write_trace_csv(t, trace_csv);
    write_weights_csv(t, weights_csv);
    write_text_file(sub / "trace.csv", trace_csv.str());
    write_text_file(sub / "weights.csv", weights_csv.str());
  }
  write_text_file(dir / "report.json", run_report(cfg, traces).dump(2) + "\n");
  write_text_file(dir / "config.json", cfg.source.dump(2) + "\n");
}

}  // namespace trustdyn
