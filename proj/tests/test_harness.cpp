#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "trustdyn/io.hpp"
#include "trustdyn/simulation.hpp"

using namespace trustdyn;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "name": "small",
    "model": "standard",
    "groups": [{"count": 3, "dist": "normal", "variance": 1.0},
               {"count": 2, "dist": "biased_normal", "bias": 1.0, "variance": 0.5}],
    "truth": {"kind": "constant", "mu": 0.5},
    "trust": {"eta": 0.5, "delta": 0.3},
    "topics": 6,
    "seed": 11
  })");
}

ErrorKind kind_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted");
  return ErrorKind::InvalidArgument;
}

std::string csv(const SimulationTrace& t, bool weights) {
  std::ostringstream out;
  weights ? write_weights_csv(t, out) : write_trace_csv(t, out);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("trustdyn-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto cfg = parse_config(base_config());
  CHECK(cfg.n() == 5);
  CHECK(cfg.model == ModelKind::Standard);
  CHECK(cfg.initial_w.kind == InitialWeights::Kind::Identity);
  CHECK(cfg.trust.tau == AdjustmentTime::InitialBeliefs);
  CHECK(cfg.trust.t_function == TFunction::ConstantOne);
  CHECK(cfg.wisdom_eps == 0.5);
  CHECK(cfg.replications == 1);
}

TEST_CASE("config validation errors") {
  auto doc = base_config();
  doc["surprise"] = 1;
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["model"] = "voter";
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["n"] = 7;
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["groups"] = json::array();
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["groups"][0]["variance"] = -1.0;
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["groups"].push_back({{"count", 1}, {"dist", "uniform"}, {"lo", 0}, {"hi", 1}});
  doc["truth"] = {{"kind", "affine"}, {"slope", 1.0}};
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["groups"].push_back({{"count", 1}, {"dist", "never_truthful"}, {"lo", 0.1}, {"hi", 1}});
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["initial_W"] = {{"kind", "explicit"}, {"matrix", {{1, 0}, {0, 1}}}};
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["initial_W"] = {{"kind", "block"}, {"b", 0.1}, {"c", 0.1}};
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["homophily"] = {{"eta_H", 0.2}};
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["model"] = "opposition";
  doc["opposition"] = {{"n1", 2}, {"n2", 2}};
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["trust"]["tau"] = "sometimes";
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  doc = base_config();
  doc["topics"] = 0;
  CHECK(kind_of(doc) == ErrorKind::ConfigInvalid);

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("every model parses") {
  auto doc = base_config();
  doc["model"] = "demarzo";
  doc["demarzo"] = {{"schedule", "harmonic"}};
  CHECK(parse_config(doc).schedule.kind == LambdaSchedule::Kind::Harmonic);

  doc = base_config();
  doc["model"] = "opposition";
  doc["opposition"] = {{"n1", 3}, {"n2", 2}};
  doc["initial_W"] = {{"kind", "block"}, {"b", 0.1}, {"c", 0.2}};
  auto cfg = parse_config(doc);
  CHECK(cfg.n1 == 3);
  CHECK(cfg.initial_w.block.a == doctest::Approx((1 - 2 * 0.1) / 3));

  doc = base_config();
  doc["model"] = "conformity";
  doc["conformity"] = {{"delta", 0.3}, {"Q", "uniform"}};
  cfg = parse_config(doc);
  CHECK(cfg.conformity.deltas.size() == 5);

  doc = base_config();
  doc["model"] = "homophily";
  doc["homophily"] = {{"eta_H", 0.2}, {"delta_H", 0.01}};
  cfg = parse_config(doc);
  CHECK(cfg.homophily.eta_T == 0.5);
  CHECK(cfg.homophily.delta_T == 0.3);
}

TEST_CASE("identity weights with point beliefs stay put") {
  auto doc = base_config();
  doc["groups"] = json::array({{{"count", 4}, {"dist", "point"}}});
  doc["topics"] = 1;
  const auto trace = simulate(parse_config(doc));
  REQUIRE(!trace.records.empty());
  for (const auto& r : trace.records) CHECK(r.belief == 0.5);
  CHECK(trace.topics.front().consensus);
}

TEST_CASE("same seed gives byte-identical output") {
  const auto cfg = parse_config(base_config());
  const auto a = simulate(cfg), b = simulate(cfg);
  CHECK(csv(a, false) == csv(b, false));
  CHECK(csv(a, true) == csv(b, true));
  CHECK(csv(a, false) != csv(simulate(cfg, 12), false));

  const auto one = scratch("det1"), two = scratch("det2");
  write_run_outputs(one, cfg, {a});
  write_run_outputs(two, cfg, {b});
  for (const char* f : {"trace.csv", "weights.csv", "report.json", "config.json"})
    CHECK(slurp(one / f) == slurp(two / f));
  std::filesystem::remove_all(one);
  std::filesystem::remove_all(two);
}

TEST_CASE("parallel replications match serial runs") {
  auto doc = base_config();
  doc["replications"] = 4;
  const auto cfg = parse_config(doc);
  CHECK(replication_seeds(cfg) == std::vector<std::uint64_t>{11, 12, 13, 14});
  const auto par = simulate_replications(cfg, 3);
  REQUIRE(par.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(par[i].metadata.seed == 11 + i);
    CHECK(csv(par[i], false) == csv(simulate(cfg, 11 + i), false));
  }

  const auto dir = scratch("reps");
  write_run_outputs(dir, cfg, par);
  CHECK(std::filesystem::exists(dir / "seed-13" / "trace.csv"));
  CHECK(json::parse(slurp(dir / "report.json"))["replications"].size() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("trace CSV layout") {
  auto doc = base_config();
  doc["trace"] = {{"thin", 2}, {"max_rounds_recorded", 7}};
  const auto trace = simulate(parse_config(doc));
  const std::string text = csv(trace, false);
  CHECK(text.rfind("topic,round,agent,belief\n", 0) == 0);

  // Rounds 0, 2, 4, 6 for each of 6 topics and 5 agents, in (topic, round, agent) order.
  CHECK(trace.records.size() == 6u * 4u * 5u);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    CHECK(r.topic == static_cast<int>(i / 20) + 1);
    CHECK(r.round == static_cast<int>((i / 5) % 4) * 2);
    CHECK(r.agent == static_cast<int>(i % 5));
  }
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.rfind("1,0,1,", 0) == 0);

  // Padding: a topic that converged early repeats its final state.
  const auto& last = trace.topics.back();
  if (last.rounds < 6) {
    const auto& r = trace.records.back();
    CHECK(r.round == 6);
    CHECK(r.belief == last.limit(4));
  }

  doc["trace"] = {{"record_rounds", false}, {"weights_every", 0}};
  const auto bare = simulate(parse_config(doc));
  CHECK(bare.records.empty());
  REQUIRE(bare.weights.size() == 1);
  CHECK(bare.weights.front().topic == 7);
}

TEST_CASE("weights CSV layout") {
  auto doc = base_config();
  doc["trace"] = {{"weights_every", 3}};
  const auto trace = simulate(parse_config(doc));
  REQUIRE(trace.weights.size() == 3);
  CHECK(trace.weights[0].topic == 1);
  CHECK(trace.weights[1].topic == 4);
  CHECK(trace.weights[2].topic == 7);
  const std::string text = csv(trace, true);
  CHECK(text.rfind("topic,row,col,weight\n1,1,1,1\n1,1,2,0\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 25);
}

TEST_CASE("report fields") {
  const auto cfg = parse_config(base_config());
  const auto trace = simulate(cfg);
  const json rep = run_report(cfg, {trace});
  CHECK(rep["name"] == "small");
  CHECK(rep["model"] == "standard");
  CHECK(rep["version"] == std::string(kVersion));
  CHECK(rep["config_hash"].get<std::string>().size() == 16);
  const json& r = rep["replications"][0];
  CHECK(r["metadata"]["seed"] == 11);
  CHECK(r["truths"].size() == 6);
  REQUIRE(r["topics"].size() == 6);
  for (const char* key : {"topic", "mu", "truthful_at_start", "eps_wise", "consensus_value", "abs_offset", "mean_offset",
                          "all_wise", "truthful_set", "adjustment_skipped", "consensus", "diverged", "nonconverged",
                          "weights_converged", "rounds", "clusters"})
    CHECK(r["topics"][0].contains(key));
  for (const char* key : {"eps", "fraction_full_wisdom", "tail_window", "mean_abs_offset_tail", "mean_offset_tail",
                          "consensus_topics", "diverged_topics", "nonconverged_topics", "skipped_adjustments"})
    CHECK(r["aggregate"].contains(key));
  for (const auto& t : r["topics"])
    for (const auto& m : t["truthful_set"]) CHECK((m >= 1 && m <= 5));
}

TEST_CASE("config hash ignores key order") {
  const json a = json::parse(R"({"x": 1, "y": [1, 2]})");
  const json b = json::parse(R"({"y": [1, 2], "x": 1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(json::parse(R"({"x": 2, "y": [1, 2]})")));
}

TEST_CASE("every model runs end to end") {
  auto doc = base_config();
  doc["model"] = "demarzo";
  doc["demarzo"] = {{"schedule", "constant"}, {"value", 0.5}};
  CHECK(simulate(parse_config(doc)).topics.size() == 6);

  doc = base_config();
  doc["model"] = "opposition";
  doc["opposition"] = {{"n1", 3}, {"n2", 2}};
  doc["initial_W"] = {{"kind", "block"}, {"b", 0.1}, {"c", 0.2}};
  auto trace = simulate(parse_config(doc));
  // Cross-side mass never moves.
  CHECK(trace.final_weights(0, 3) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(trace.final_weights(4, 0) == doctest::Approx(0.2).epsilon(1e-12));

  doc = base_config();
  doc["model"] = "conformity";
  doc["conformity"] = {{"delta", 0.3}};
  trace = simulate(parse_config(doc));
  CHECK(trace.topics.size() == 6);

  doc = base_config();
  doc["model"] = "homophily";
  doc["homophily"] = {{"eta_H", 0.3}, {"delta_H", 0.05}};
  const auto cfg = parse_config(doc);
  trace = run_scenario_homophily(cfg);
  for (const auto& t : trace.topics) CHECK(t.clusters >= 1);
  CHECK_THROWS_AS(run_scenario_homophily(parse_config(base_config())), Error);
}
