#include "trustdyn/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "trustdyn/conformity.hpp"
#include "trustdyn/io.hpp"
#include "trustdyn/metrics.hpp"
#include "trustdyn/opposition.hpp"
#include "trustdyn/rational.hpp"
#include "trustdyn/simulation.hpp"

namespace trustdyn {

using nlohmann::json;

namespace {

using Panels = std::vector<std::pair<std::string, json>>;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void check(ReproduceResult& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

// --- bundled configurations -------------------------------------------------

json inf_doc(bool lone_expert) {
  json others = lone_expert ? json{{"count", 49}, {"dist", "never_truthful"}, {"lo", 0.2}, {"hi", 1.0}}
                            : json{{"count", 49}, {"dist", "uniform"}, {"lo", 0.0}, {"hi", 1.0}};
  return {{"name", lone_expert ? "fig-inf-lone-expert" : "fig-inf"},
          {"model", "standard"},
          {"groups", json::array({{{"count", 1}, {"dist", "point"}}, others})},
          {"truth", {{"kind", "constant"}, {"mu", 0.0}}},
          {"trust", {{"eta", 0.2}, {"delta", 0.2}, {"tau", "limit"}, {"T", "zero_at_n"}}},
          {"topics", 20},
          {"seed", 1},
          {"replications", 10},
          {"wisdom_eps", 1e-6},
          {"trace", {{"max_rounds_recorded", 20}, {"weights_every", 1}}}};
}

json zero_doc() {
  return {{"name", "fig-0"},
          {"model", "standard"},
          {"groups", json::array({{{"count", 1}, {"dist", "point"}},
                                  {{"count", 49}, {"dist", "uniform"}, {"lo", 0.0}, {"hi", 1.0}}})},
          {"truth", {{"kind", "constant"}, {"mu", 0.0}}},
          {"trust", {{"eta", 0.05}, {"delta", 100.0}, {"tau", "initial"}, {"T", "zero_at_n"}}},
          {"topics", 30},
          {"seed", 1},
          {"replications", 5},
          {"wisdom_eps", 0.05},
          {"trace", {{"max_rounds_recorded", 5}, {"weights_every", 1}}}};
}

json three_groups_doc(const char* tau) {
  return {{"name", std::string("example-3groups-") + tau},
          {"model", "standard"},
          {"groups", json::array({{{"count", 20}, {"dist", "normal"}, {"variance", 1.0}},
                                  {{"count", 40}, {"dist", "biased_normal"}, {"bias", -3.0}, {"variance", 1.0}},
                                  {{"count", 40}, {"dist", "biased_normal"}, {"bias", 1.0}, {"variance", 1.0}}})},
          {"truth", {{"kind", "constant"}, {"mu", 0.0}}},
          {"trust", {{"eta", 0.25}, {"delta", 0.2}, {"tau", tau}, {"T", "one"}}},
          {"topics", 500},
          {"seed", 1},
          {"replications", 20},
          {"trace", {{"record_rounds", false}, {"weights_every", 1}}}};
}

json polsim_doc(double b, bool noisy) {
  json group = noisy ? json{{"count", 20}, {"dist", "normal"}, {"variance", 4.0}} : json{{"count", 20}, {"dist", "point"}};
  return {{"name", "fig-polsim"},
          {"model", "opposition"},
          {"groups", json::array({group})},
          {"truth", {{"kind", "affine"}, {"slope", 1.0}, {"intercept", 5.0}}},
          {"trust", {{"eta", 0.25}, {"delta", 0.2}}},
          {"topics", 10},
          {"opposition", {{"n1", 10}, {"n2", 10}}},
          {"initial_W", {{"kind", "block"}, {"b", b}, {"c", 0.025}}},
          {"trace", {{"max_rounds_recorded", 20}, {"weights_every", 1}}}};
}

json homophily_doc(double delta_h, double delta_t, double eta_h, double eta_t, int replications) {
  return {{"name", "homophily"},
          {"model", "homophily"},
          {"groups", json::array({{{"count", 10}, {"dist", "normal"}, {"variance", 0.04}, {"truncate_radius", 0.25}},
                                  {{"count", 40}, {"dist", "uniform"}, {"lo", 1.0}, {"hi", 4.0}}})},
          {"truth", {{"kind", "constant"}, {"mu", 0.0}}},
          {"trust", {{"eta", eta_t}, {"delta", delta_t}, {"tau", "initial"}, {"T", "one"}}},
          {"homophily", {{"eta_H", eta_h}, {"delta_H", delta_h}, {"cluster_gap", 0.05}}},
          {"topics", 20},
          {"seed", 1},
          {"replications", replications},
          {"wisdom_eps", 0.25},
          {"trace", {{"max_rounds_recorded", 10}, {"weights_every", 0}}}};
}

json illustration_doc(double sigma_l2, double delta, const char* t) {
  return {{"name", "fig-weights-illustration"},
          {"model", "standard"},
          {"groups", json::array({{{"count", 60}, {"dist", "normal"}, {"variance", sigma_l2}},
                                  {{"count", 40}, {"dist", "normal"}, {"variance", 2.0}}})},
          {"truth", {{"kind", "constant"}, {"mu", 0.0}}},
          {"trust", {{"eta", 0.25}, {"delta", delta}, {"tau", "initial"}, {"T", t}}},
          {"topics", 100},
          {"seed", 1},
          {"replications", 10},
          {"trace", {{"record_rounds", false}, {"weights_every", 1}}}};
}

struct DeltaPanel {
  double delta_h, delta_t;
};
const std::vector<DeltaPanel> kDeltaPanels = {{0.2, 1.0}, {0.1, 1.0}, {0.05, 1.0}, {0.02, 1.0}, {0.02, 0.1}, {0.001, 10.0}};
const std::vector<double> kEtaH = {0.05, 0.25, 1.1, 1.5};
const std::vector<double> kEtaT = {0.25, 2.5};
const std::vector<double> kIllustrationSigma = {0.5, 1.0, 2.0, 3.0};
const std::vector<double> kIllustrationDelta = {0.5, 1.5};
const std::vector<const char*> kIllustrationT = {"one", "neg_log_fraction"};

std::string illustration_panel(double s, double d, const char* t) {
  return "sigmaL" + num(s) + "-delta" + num(d) + "-" + t;
}

Panels panels_for(std::string_view target) {
  if (target == "fig-inf") return {{"lone-expert", inf_doc(true)}, {"uniform-others", inf_doc(false)}};
  if (target == "fig-0") return {{"baseline", zero_doc()}};
  if (target == "example-3groups")
    return {{"tau-initial", three_groups_doc("initial")}, {"tau-limit", three_groups_doc("limit")}};
  if (target == "fig-polsim")
    return {{"b0.09", polsim_doc(0.09, false)},
            {"b0.0245", polsim_doc(0.0245, false)},
            {"b0.0009", polsim_doc(0.0009, false)},
            {"b0.0009-noisy", polsim_doc(0.0009, true)}};
  if (target == "fig-deltaT") {
    Panels p;
    for (const auto& d : kDeltaPanels)
      p.emplace_back("dH" + num(d.delta_h) + "-dT" + num(d.delta_t), homophily_doc(d.delta_h, d.delta_t, 0.25, 0.25, 10));
    return p;
  }
  if (target == "fig-etaH") {
    Panels p;
    for (double e : kEtaH) p.emplace_back("etaH" + num(e), homophily_doc(0.2, 1.0, e, 0.25, 20));
    return p;
  }
  if (target == "fig-etaT") {
    Panels p;
    for (double e : kEtaT) p.emplace_back("etaT" + num(e), homophily_doc(0.2, 1.0, 0.25, e, 10));
    return p;
  }
  if (target == "fig-weights-illustration") {
    Panels p;
    for (const char* t : kIllustrationT)
      for (double d : kIllustrationDelta)
        for (double s : kIllustrationSigma) p.emplace_back(illustration_panel(s, d, t), illustration_doc(s, d, t));
    return p;
  }
  return {};
}

// --- output helpers ----------------------------------------------------------

// Keeps every `every`-th weight snapshot plus the final one.
SimulationTrace thin_weights(SimulationTrace t, int every) {
  std::vector<WeightSnapshot> kept;
  for (auto& w : t.weights)
    if ((w.topic - 1) % every == 0 || &w == &t.weights.back()) kept.push_back(std::move(w));
  t.weights = std::move(kept);
  return t;
}

void add_run_files(ReproduceResult& r, const std::string& panel, const ScenarioConfig& cfg, const SimulationTrace& t) {
  std::ostringstream trace_csv, weights_csv;
  write_trace_csv(t, trace_csv);
  write_weights_csv(t, weights_csv);
  r.files.emplace_back(panel + "/trace.csv", trace_csv.str());
  r.files.emplace_back(panel + "/weights.csv", weights_csv.str());
  r.files.emplace_back(panel + "/report.json", run_report(cfg, {t}).dump(2) + "\n");
  r.files.emplace_back(panel + "/config.json", cfg.source.dump(2) + "\n");
}

std::vector<double> group_mass_at(const Matrix& w, const std::vector<GroupSpec>& groups) {
  return group_influence(RowStochasticMatrix(w, 1e-9), groups);
}

// --- targets -----------------------------------------------------------------

ReproduceResult run_fig_inf(unsigned threads) {
  ReproduceResult r;
  const auto panels = panels_for("fig-inf");

  const auto lone_cfg = parse_config(panels[0].second);
  const auto lone = simulate_replications(lone_cfg, threads);
  int lone_ok = 0;
  for (const auto& t : lone) {
    const auto rep = wisdom_report(t, lone_cfg.wisdom_eps);
    bool all = rep.topics[0].truthful_at_start == std::vector<std::size_t>{0};
    for (std::size_t k = 1; k < rep.topics.size(); ++k) all = all && rep.topics[k].all_wise;
    lone_ok += all;
  }
  check(r, "only the expert truthful at topic 1: every agent wise on every later topic",
        lone_ok == static_cast<int>(lone.size()), num(lone_ok) + "/" + num(lone.size()) + " seeds");

  const auto cfg = parse_config(panels[1].second);
  const auto runs = simulate_replications(cfg, threads);
  int mixture_ok = 0;
  json per_seed = json::array();
  for (const auto& t : runs) {
    const auto& first = t.topics.front().truthful.members;
    double worst = 0.0, offset = 0.0;
    for (std::size_t k = 1; k < t.topics.size(); ++k) {
      const auto& s = t.topics[k];
      double mean = 0.0;
      for (auto j : first) mean += s.initial(static_cast<Eigen::Index>(j));
      mean /= static_cast<double>(first.size());
      worst = std::max(worst, s.consensus_value ? std::abs(*s.consensus_value - mean) : INFINITY);
      offset += s.offset() / static_cast<double>(t.topics.size() - 1);
    }
    mixture_ok += worst < 1e-8;
    const double m = static_cast<double>(first.size());
    per_seed.push_back({{"seed", t.metadata.seed},
                        {"truthful_at_topic_1", first.size()},
                        {"mean_offset_after_topic_1", offset},
                        {"expected_offset", (m - 1.0) / m * 0.5},
                        {"max_gap_to_mixture", worst}});
  }
  check(r, "later consensus is the average of truth and the topic-1 truthful agents' draws",
        mixture_ok == static_cast<int>(runs.size()), num(mixture_ok) + "/" + num(runs.size()) + " seeds");
  r.metrics["uniform_others"] = per_seed;
  add_run_files(r, "lone-expert", lone_cfg, lone.front());
  add_run_files(r, "uniform-others", cfg, runs.front());
  return r;
}

ReproduceResult run_fig_0(unsigned threads) {
  ReproduceResult r;
  const auto cfg = parse_config(panels_for("fig-0").front().second);
  const auto runs = simulate_replications(cfg, threads);
  int expert_truthful = 0, expert_top = 0;
  json per_seed = json::array();
  for (const auto& t : runs) {
    bool always = true;
    std::optional<int> m;
    for (const auto& s : t.topics) {
      always = always && s.truthful.contains(0);
      if (!m && s.truthful.members == std::vector<std::size_t>{0}) m = s.topic;
    }
    expert_truthful += always;
    const Vector infl = social_influence(RowStochasticMatrix(t.final_weights, 1e-9)).s;
    Eigen::Index top = 0;
    infl.maxCoeff(&top);
    expert_top += top == 0;
    const auto rep = wisdom_report(t, cfg.wisdom_eps);
    int wise_after = 0, after = 0;
    for (const auto& tw : rep.topics)
      if (m && tw.topic > *m) ++after, wise_after += tw.all_wise;
    per_seed.push_back({{"seed", t.metadata.seed},
                        {"first_expert_only_topic", m ? json(*m) : json(nullptr)},
                        {"wise_topics_after_it", wise_after},
                        {"topics_after_it", after},
                        {"expert_final_influence", infl(0)},
                        {"fraction_full_wisdom", rep.fraction_full_wisdom}});
  }
  check(r, "the expert is truthful on every topic", expert_truthful == static_cast<int>(runs.size()),
        num(expert_truthful) + "/" + num(runs.size()) + " seeds");
  check(r, "the expert ends with the largest social influence", expert_top == static_cast<int>(runs.size()),
        num(expert_top) + "/" + num(runs.size()) + " seeds");
  r.metrics["seeds"] = per_seed;
  add_run_files(r, "baseline", cfg, runs.front());
  return r;
}

ReproduceResult run_three_groups(unsigned threads) {
  ReproduceResult r;
  const auto panels = panels_for("example-3groups");
  const std::vector<double> target_mass = {0.44, 0.01, 0.55};
  for (const auto& [name, doc] : panels) {
    const auto cfg = parse_config(doc);
    const bool initial = cfg.trust.tau == AdjustmentTime::InitialBeliefs;

    const auto t0 = std::chrono::steady_clock::now();
    const auto single = simulate(cfg, cfg.seed);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto runs = simulate_replications(cfg, threads);
    const int k_total = cfg.topics, first = k_total - 99;
    std::vector<double> mass(3, 0.0);
    double offset = 0.0;
    json offsets = json::array();
    for (const auto& t : runs) {
      for (const auto& snap : t.weights) {
        if (snap.topic < first || snap.topic > k_total) continue;
        const auto g = group_mass_at(snap.weights, cfg.groups);
        for (int i = 0; i < 3; ++i) mass[i] += g[i] / 100.0 / static_cast<double>(runs.size());
      }
      const auto rep = wisdom_report(t, cfg.wisdom_eps, 100.0 / k_total);
      offset += rep.mean_offset_tail / static_cast<double>(runs.size());
      offsets.push_back(rep.mean_offset_tail);
    }
    const auto pred = predict_limiting(cfg.groups, cfg.trust.eta, cfg.trust.tau);
    r.metrics[name] = {{"group_mass_tail", mass},
                       {"mean_offset_tail", offset},
                       {"per_seed_offset", offsets},
                       {"predicted_group_mass", pred.group_mass},
                       {"predicted_offset", pred.predicted_mean_offset},
                       {"single_run_seconds", seconds}};
    if (initial) {
      double worst = 0.0;
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(mass[i] - target_mass[i]));
      check(r, "group influence within 0.03 of (0.44, 0.01, 0.55)", worst <= 0.03,
            "masses " + num(mass[0]) + " " + num(mass[1]) + " " + num(mass[2]) + ", max gap " + num(worst));
      check(r, "tail offset within 0.05 of 0.51227", std::abs(offset - 0.51227) <= 0.05, "offset " + num(offset));
      check(r, "one 500-topic run under 60 s", seconds < 60.0, num(seconds) + " s");
    } else {
      check(r, "tau=limit tail offset within 0.05 of -0.8", std::abs(offset + 0.8) <= 0.05, "offset " + num(offset));
    }

    std::ostringstream topics;
    topics << "topic,mu,consensus_value,mass_1,mass_2,mass_3\n";
    for (const auto& s : single.topics) {
      topics << s.topic << ',' << format_double(s.mu) << ','
             << (s.consensus_value ? format_double(*s.consensus_value) : std::string());
      try {
        const auto g = group_mass_at(single.weights[static_cast<std::size_t>(s.topic - 1)].weights, cfg.groups);
        topics << ',' << format_double(g[0]) << ',' << format_double(g[1]) << ',' << format_double(g[2]) << '\n';
      } catch (const Error&) {
        topics << ",,,\n";  // W has no influence vector yet
      }
    }
    r.files.emplace_back(name + "/topics.csv", topics.str());
    add_run_files(r, name, cfg, thin_weights(single, 50));
  }
  return r;
}

ReproduceResult run_fig_pol(unsigned) {
  ReproduceResult r;
  const auto f = OppositionStructure::blocks(10, 10);
  std::ostringstream by_b;
  by_b << "b,x,y,coefficient,x_eigen,y_eigen\n";
  double worst = 0.0;
  bool sign_rule = true;
  for (int i = 1; i <= 40; ++i) {
    const double b = 0.0025 * i;
    const auto p = OppositionParams::from_b(10, 10, b, 0.025);
    const auto [x, y] = closed_form_xy(p);
    const auto pol = polarization_limit(build_A(block_trust_matrix(p), f), f, Vector::Zero(20));
    worst = std::max({worst, std::abs(pol.s(0) - x), std::abs(pol.s(19) - y)});
    const double coef = 10 * x + 10 * y;
    if (std::abs(b - 0.025) > 1e-12) sign_rule = sign_rule && ((coef > 0) == (b < 0.025));
    by_b << format_double(b) << ',' << format_double(x) << ',' << format_double(y) << ',' << format_double(coef) << ','
         << format_double(pol.s(0)) << ',' << format_double(pol.s(19)) << '\n';
  }
  r.files.emplace_back("pol_b.csv", by_b.str());
  check(r, "closed-form (x, y) matches the eigenvector of A^T on the b grid", worst <= 1e-8, "max gap " + num(worst));

  const auto sym = closed_form_xy(OppositionParams::from_b(10, 10, 0.025, 0.025));
  const double c_sym = 10 * sym.first + 10 * sym.second;
  check(r, "coefficient vanishes at b = c", std::abs(c_sym) <= 1e-8, "coefficient " + num(c_sym));
  check(r, "coefficient positive exactly when b < c", sign_rule, "");

  std::ostringstream by_d;
  by_d << "b,d,y\n";
  bool monotone = true;
  for (double b : {0.01, 0.03, 0.05, 0.07, 0.09}) {
    double prev = -1.0;
    for (int i = 1; i <= 39; ++i) {
      const double d = 0.0025 * i;
      OppositionParams p = OppositionParams::from_b(10, 10, b, (1.0 - 10 * d) / 10);
      const double y = closed_form_xy(p).second;
      monotone = monotone && std::abs(y) > prev;
      prev = std::abs(y);
      by_d << format_double(b) << ',' << format_double(d) << ',' << format_double(y) << '\n';
    }
  }
  r.files.emplace_back("pol_d.csv", by_d.str());
  check(r, "|y| increases in d for fixed b", monotone, "");

  OppositionParams one;
  one.n1 = 1;
  one.n2 = 2;
  one.a = 0.5;
  one.b = 0.25;
  one.c = 0.25;
  one.d = 0.375;
  const auto spec = check_spectrum_n1_equals_1(one);
  check(r, "single-agent side A spectrum is {0, 1, q}", spec.max_error <= 1e-9 && std::abs(spec.q - 0.25) < 1e-15,
        "q " + num(spec.q) + ", eigenvalue error " + num(spec.max_error));
  r.metrics = {{"max_eigen_gap", worst}, {"coefficient_at_b_equals_c", c_sym}, {"n1_equals_1_error", spec.max_error}};
  return r;
}

ReproduceResult run_fig_polsim(unsigned) {
  ReproduceResult r;
  bool pairs_ok = true, closed_ok = true;
  for (const auto& [name, doc] : panels_for("fig-polsim")) {
    const auto cfg = parse_config(doc);
    const auto t = simulate(cfg);
    const bool point = std::holds_alternative<PointTruth>(cfg.groups.front().distribution);
    json topics = json::array();
    for (const auto& s : t.topics) {
      const double pa = s.limit(0), pb = s.limit(19);
      const double scale = std::max(1.0, std::abs(pa));
      const double spread_a = s.limit.head(10).maxCoeff() - s.limit.head(10).minCoeff();
      const double spread_b = s.limit.tail(10).maxCoeff() - s.limit.tail(10).minCoeff();
      pairs_ok = pairs_ok && s.converged && std::abs(pa + pb) < 1e-6 * scale && spread_a < 1e-6 * scale &&
                 spread_b < 1e-6 * scale;
      topics.push_back({{"topic", s.topic}, {"mu", s.mu}, {"p_A", pa}, {"p_B", pb}});
    }
    if (point) {
      const auto [x, y] = closed_form_xy(OppositionParams::from_b(10, 10, cfg.initial_w.block.b, 0.025));
      const double coef = 10 * x + 10 * y;
      for (const auto& s : t.topics)
        closed_ok = closed_ok && std::abs(s.limit(0) - coef * s.mu) < 1e-6 * std::max(1.0, std::abs(s.mu));
      r.metrics[name]["coefficient"] = coef;
    }
    r.metrics[name]["topics"] = topics;
    add_run_files(r, name, cfg, t);
  }
  check(r, "every topic ends in a polarization pair (p, -p)", pairs_ok, "");
  check(r, "with beliefs at truth side A ends at c * mu_k", closed_ok, "");
  return r;
}

ReproduceResult run_fig_socinf(unsigned) {
  ReproduceResult r;
  Matrix raw(3, 3);
  raw << 0.5, 0.5, 0, 0.5, 0.5, 0, 0.5, 0.5, 0;
  const RowStochasticMatrix w(raw);
  ConformityParams params;
  params.q = Matrix::Constant(3, 3, 0.5);
  params.q.diagonal().setZero();
  const auto numeric = [&](double a, double b) {
    params.deltas = Vector(3);
    params.deltas << a, a, b;
    return conformity_influence(w, params).s(2);
  };

  double worst = 0.0;
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      const double a = 0.1 * i, b = 0.1 * j;
      worst = std::max(worst, std::abs(numeric(a, b) - three_agent_influence(a, b)));
    }
  check(r, "closed form matches the numeric influence on the 0.1 grid", worst <= 1e-8, "max gap " + num(worst));
  const double hi = three_agent_influence(0.99, 0.1), lo = three_agent_influence(0.1, 0.99);
  check(r, "y(0.99, 0.1) > 0.9", hi > 0.9, "y " + num(hi));
  check(r, "y(0.1, 0.99) < 0.01", lo < 0.01, "y " + num(lo));

  std::ostringstream csv;
  csv << "a,b,y,y_numeric\n";
  for (double a : {0.1, 0.5, 0.8, 0.99})
    for (int j = 0; j < 100; ++j) {
      const double b = 0.01 * j;
      csv << format_double(a) << ',' << format_double(b) << ',' << format_double(three_agent_influence(a, b)) << ','
          << format_double(numeric(a, b)) << '\n';
    }
  r.files.emplace_back("socinf.csv", csv.str());
  r.metrics = {{"max_grid_gap", worst}, {"y_0.99_0.1", hi}, {"y_0.1_0.99", lo}};
  return r;
}

ReproduceResult run_example_counter(unsigned) {
  ReproduceResult r;
  const double delta = 5.0;
  Matrix m(3, 3);
  m << 1 + delta, delta, 0, delta, 1 + delta, 0, delta, delta, 1;
  const RowStochasticMatrix w(m / (1 + 2 * delta), 1e-12);
  ConformityParams params;
  params.q = Matrix::Constant(3, 3, 0.5);
  params.q.diagonal().setZero();
  Vector b0(3);
  b0 << 1.0, 0.5, 0.0;

  std::map<double, LimitResult> results;
  for (double a : {0.1, -0.6, -0.95}) {
    params.deltas = Vector(3);
    params.deltas << a, a, 0.1;
    SimulationTrace t;
    const auto res = run_conformity_topic(w, params, b0, {}, [&](int round, const Vector& b) {
      if (round > 30) return;
      for (Eigen::Index i = 0; i < b.size(); ++i) t.records.push_back({1, round, static_cast<int>(i), b(i)});
    });
    std::ostringstream csv;
    write_trace_csv(t, csv);
    r.files.emplace_back("a" + num(a) + "/trace.csv", csv.str());
    r.metrics["a" + num(a)] = {{"converged", res.converged},
                               {"diverged", res.diverged},
                               {"consensus", res.is_consensus},
                               {"rounds", res.rounds_used},
                               {"max_abs_belief", res.beliefs.cwiseAbs().maxCoeff()}};
    results.emplace(a, res);
  }
  const auto& calm = results.at(0.1);
  check(r, "a = b = 0.1 reaches consensus", calm.converged && calm.is_consensus && !calm.diverged,
        "rounds " + num(calm.rounds_used));
  const auto& wild = results.at(-0.95);
  check(r, "a = b = -0.95 diverges", wild.diverged, "rounds " + num(wild.rounds_used));
  return r;
}

struct HomophilyStats {
  int wise_topics = 0;      // topics 2..K with every agent eps-wise
  int total_clusters = 0;   // summed over all topics
  double mean_distance = 0; // mean |b_i(limit) - mu| over topics 2..K
};

HomophilyStats homophily_stats(const ScenarioConfig& cfg, const SimulationTrace& t) {
  HomophilyStats h;
  const auto rep = wisdom_report(t, cfg.wisdom_eps);
  for (std::size_t k = 0; k < t.topics.size(); ++k) {
    h.total_clusters += static_cast<int>(t.topics[k].clusters);
    if (k == 0) continue;
    h.wise_topics += rep.topics[k].all_wise;
    h.mean_distance += (t.topics[k].limit.array() - t.topics[k].mu).abs().mean() / static_cast<double>(t.topics.size() - 1);
  }
  return h;
}

ReproduceResult run_fig_deltat(unsigned threads) {
  ReproduceResult r;
  std::ostringstream csv;
  csv << "delta_H,delta_T,seed,wise_topics,total_clusters,mean_distance\n";
  const auto panels = panels_for("fig-deltaT");
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto cfg = parse_config(panels[i].second);
    const auto runs = simulate_replications(cfg, threads);
    const int later = cfg.topics - 1;
    int all_seeds_wise = 0, some_unwise = 0;
    double frac = 0.0;
    for (const auto& t : runs) {
      const auto h = homophily_stats(cfg, t);
      all_seeds_wise += h.wise_topics == later;
      some_unwise += h.wise_topics < later;
      frac += static_cast<double>(h.wise_topics) / later / static_cast<double>(runs.size());
      csv << format_double(kDeltaPanels[i].delta_h) << ',' << format_double(kDeltaPanels[i].delta_t) << ','
          << t.metadata.seed << ',' << h.wise_topics << ',' << h.total_clusters << ',' << format_double(h.mean_distance)
          << '\n';
    }
    r.metrics[panels[i].first] = {{"wise_topic_fraction", frac}};
    const auto seeds = static_cast<int>(runs.size());
    if (kDeltaPanels[i].delta_t == 10.0)
      check(r, "delta_T = 10, delta_H = 0.001: every agent wise on topics 2..20 for every seed", all_seeds_wise == seeds,
            num(all_seeds_wise) + "/" + num(seeds) + " seeds");
    if (kDeltaPanels[i].delta_h == 0.2)
      check(r, "delta_T = 1, delta_H = 0.2: some agent not wise on every seed", some_unwise == seeds,
            num(some_unwise) + "/" + num(seeds) + " seeds");
    if (i == 0) add_run_files(r, panels[i].first, cfg, runs.front());
  }
  r.files.emplace_back("deltaT.csv", csv.str());
  return r;
}

ReproduceResult run_fig_etah(unsigned threads) {
  ReproduceResult r;
  std::ostringstream csv;
  csv << "eta_H,seed,total_clusters,mean_distance\n";
  std::vector<std::vector<HomophilyStats>> stats;
  const auto panels = panels_for("fig-etaH");
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto cfg = parse_config(panels[i].second);
    const auto runs = simulate_replications(cfg, threads);
    stats.emplace_back();
    double clusters = 0, distance = 0;
    for (const auto& t : runs) {
      stats.back().push_back(homophily_stats(cfg, t));
      const auto& h = stats.back().back();
      clusters += h.total_clusters / static_cast<double>(runs.size());
      distance += h.mean_distance / static_cast<double>(runs.size());
      csv << format_double(kEtaH[i]) << ',' << t.metadata.seed << ',' << h.total_clusters << ','
          << format_double(h.mean_distance) << '\n';
    }
    r.metrics[panels[i].first] = {{"mean_total_clusters", clusters}, {"mean_distance", distance}};
    add_run_files(r, panels[i].first, cfg, runs.front());
  }
  const auto& narrow = stats.front();
  const auto& wide = stats.back();
  int paired = 0;
  for (std::size_t s = 0; s < narrow.size(); ++s) paired += narrow[s].total_clusters >= wide[s].total_clusters;
  check(r, "eta_H = 0.05 fragments at least as much as eta_H = 1.5 in >= 18/20 seeds", paired >= 18,
        num(paired) + "/" + num(narrow.size()) + " seeds");
  r.files.emplace_back("etaH.csv", csv.str());
  return r;
}

ReproduceResult run_fig_etat(unsigned threads) {
  ReproduceResult r;
  std::ostringstream csv;
  csv << "eta_T,seed,mean_distance\n";
  std::vector<double> avg;
  const auto panels = panels_for("fig-etaT");
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto cfg = parse_config(panels[i].second);
    const auto runs = simulate_replications(cfg, threads);
    double d = 0;
    for (const auto& t : runs) {
      const auto h = homophily_stats(cfg, t);
      d += h.mean_distance / static_cast<double>(runs.size());
      csv << format_double(kEtaT[i]) << ',' << t.metadata.seed << ',' << format_double(h.mean_distance) << '\n';
    }
    avg.push_back(d);
    r.metrics[panels[i].first] = {{"mean_distance", d}};
    add_run_files(r, panels[i].first, cfg, runs.front());
  }
  check(r, "larger eta_T moves limiting beliefs further from truth", avg[1] > avg[0],
        num(avg[0]) + " at eta_T = 0.25, " + num(avg[1]) + " at eta_T = 2.5");
  r.files.emplace_back("etaT.csv", csv.str());
  return r;
}

std::vector<GroupSpec> lh_groups(double sigma_l2) {
  return {{60, NormalAroundTruth{sigma_l2, std::nullopt}}, {40, NormalAroundTruth{2.0, std::nullopt}}};
}

ReproduceResult run_weights_illustration(unsigned threads) {
  ReproduceResult r;
  std::ostringstream by_eta, by_sigma, variance, sim;
  by_eta << "eta,heuristic_mass_L,optimal_mass_L\n";
  const double optimal = optimal_weight_mass(lh_groups(1.0))[0];
  for (int i = 1; i <= 300; ++i) {
    const double eta = 0.01 * i;
    by_eta << format_double(eta) << ',' << format_double(heuristic_weight_mass(lh_groups(1.0), eta)[0]) << ','
           << format_double(optimal) << '\n';
  }
  by_sigma << "sigma_L2,heuristic_mass_L,optimal_mass_L\n";
  for (int i = 1; i <= 40; ++i) {
    const double s = 0.1 * i;
    by_sigma << format_double(s) << ',' << format_double(heuristic_weight_mass(lh_groups(s), 0.25)[0]) << ','
             << format_double(optimal_weight_mass(lh_groups(s))[0]) << '\n';
  }
  variance << "mass_L,variance\n";
  for (int i = 0; i <= 100; ++i) {
    const double m = 0.01 * i;
    Vector wts(100), vars(100);
    wts.head(60).setConstant(m / 60);
    wts.tail(40).setConstant((1 - m) / 40);
    vars.head(60).setConstant(1.0);
    vars.tail(40).setConstant(2.0);
    variance << format_double(m) << ',' << format_double(combined_variance(wts, vars)) << '\n';
  }

  const double wide = heuristic_weight_mass(lh_groups(1.0), 50.0)[0];
  const double narrow = heuristic_weight_mass(lh_groups(1.0), 1e-4)[0];
  const double density_ratio = 60.0 / (60.0 + 40.0 / std::sqrt(2.0));
  check(r, "heuristic mass tends to the population share for large eta", std::abs(wide - 0.6) < 1e-3, num(wide));
  check(r, "heuristic mass tends to the density ratio for small eta", std::abs(narrow - density_ratio) < 1e-3,
        num(narrow) + " vs " + num(density_ratio));
  check(r, "optimal mass for L types is 3/4", std::abs(optimal - 0.75) < 1e-12, num(optimal));

  sim << "sigma_L2,delta,T,simulated_mass_L,heuristic_mass_L\n";
  double worst = 0.0;
  for (const auto& [name, doc] : panels_for("fig-weights-illustration")) {
    const auto cfg = parse_config(doc);
    const auto runs = simulate_replications(cfg, threads);
    double mass = 0.0;
    int count = 0;
    for (const auto& t : runs)
      for (const auto& snap : t.weights)
        if (snap.topic > cfg.topics / 2 + 1) {
          mass += snap.weights.leftCols(60).rowwise().sum().mean();
          ++count;
        }
    mass /= count;
    const double sigma = std::get<NormalAroundTruth>(cfg.groups[0].distribution).variance;
    const double heuristic = heuristic_weight_mass(cfg.groups, cfg.trust.eta)[0];
    worst = std::max(worst, std::abs(mass - heuristic));
    sim << format_double(sigma) << ',' << format_double(cfg.trust.delta) << ','
        << doc["trust"]["T"].get<std::string>() << ',' << format_double(mass) << ',' << format_double(heuristic) << '\n';
  }
  check(r, "simulated weight mass within 0.03 of the heuristic", worst <= 0.03, "max gap " + num(worst));
  r.metrics = {{"optimal_mass_L", optimal}, {"max_simulation_gap", worst}};
  r.files.emplace_back("mass_vs_eta.csv", by_eta.str());
  r.files.emplace_back("mass_vs_sigmaL.csv", by_sigma.str());
  r.files.emplace_back("variance_vs_mass.csv", variance.str());
  r.files.emplace_back("simulated_mass.csv", sim.str());
  return r;
}

using Runner = std::function<ReproduceResult(unsigned)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"fig-inf", run_fig_inf},
      {"fig-0", run_fig_0},
      {"example-3groups", run_three_groups},
      {"fig-pol", run_fig_pol},
      {"fig-polsim", run_fig_polsim},
      {"fig-socinf", run_fig_socinf},
      {"example-counter", run_example_counter},
      {"fig-deltaT", run_fig_deltat},
      {"fig-etaH", run_fig_etah},
      {"fig-etaT", run_fig_etat},
      {"fig-weights-illustration", run_weights_illustration},
  };
  return r;
}

const Runner& find_target(std::string_view target) {
  for (const auto& [name, fn] : registry())
    if (name == target) return fn;
  std::string known;
  for (const auto& [name, fn] : registry()) known += (known.empty() ? "" : ", ") + name;
  throw Error(ErrorKind::UnknownTarget, "unknown target '" + std::string(target) + "' (known: " + known + ")");
}

}  // namespace

bool ReproduceResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<std::pair<std::string, json>> bundled_scenarios(std::string_view target) {
  find_target(target);
  return panels_for(target);
}

ReproduceResult reproduce(std::string_view target, unsigned threads) {
  ReproduceResult r = find_target(target)(threads);
  r.target = std::string(target);
  return r;
}

void write_reproduce_outputs(const std::filesystem::path& dir, const ReproduceResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [rel, content] : result.files) {
    const auto path = dir / rel;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    write_text_file(path, content);
  }
  json checks = json::array();
  for (const auto& c : result.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  const json report = {{"target", result.target},
                       {"version", std::string(kVersion)},
                       {"passed", result.passed()},
                       {"checks", checks},
                       {"metrics", result.metrics}};
  write_text_file(dir / "report.json", report.dump(2) + "\n");
}

}  // namespace trustdyn
