#include "trustdyn/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace trustdyn {

namespace {

class Recorder {
 public:
  Recorder(const TraceOptions& opts, std::vector<BeliefRecord>& out) : opts_(opts), out_(out) {}

  void begin(int topic) {
    topic_ = topic;
    last_round_ = -1;
  }

  void observe(int round, const Vector& b) {
    if (!opts_.record_rounds || round > opts_.max_rounds_recorded || round % opts_.thin != 0) return;
    push(round, b);
  }

  // Rounds after the loop stopped repeat the final state.
  void finish(const Vector& final_beliefs) {
    if (!opts_.record_rounds) return;
    int r = last_round_ < 0 ? 0 : last_round_ + opts_.thin;
    for (; r <= opts_.max_rounds_recorded; r += opts_.thin) push(r, final_beliefs);
  }

  RoundObserver observer() {
    if (!opts_.record_rounds) return {};
    return [this](int round, const Vector& b) { observe(round, b); };
  }

 private:
  void push(int round, const Vector& b) {
    for (Eigen::Index i = 0; i < b.size(); ++i) out_.push_back({topic_, round, static_cast<int>(i), b(i)});
    last_round_ = round;
  }

  const TraceOptions& opts_;
  std::vector<BeliefRecord>& out_;
  int topic_ = 1;
  int last_round_ = -1;
};

void snapshot_if_due(const ScenarioConfig& cfg, SimulationTrace& trace, int topic, const RowStochasticMatrix& w) {
  const int every = cfg.trace.weights_every;
  if (every > 0 && (topic - 1) % every == 0) trace.weights.push_back({topic, w.matrix()});
}

TruthfulSet reference_set(const ScenarioConfig& cfg, const Vector& b0, const LimitResult& lim, double mu, int topic,
                          bool& skipped) {
  skipped = false;
  if (cfg.trust.tau == AdjustmentTime::InitialBeliefs)
    return truthful_set(b0, mu, cfg.trust.eta, topic, AdjustmentTime::InitialBeliefs);
  if (!lim.converged || lim.diverged) {
    skipped = true;
    return TruthfulSet{topic, {}, AdjustmentTime::LimitBeliefs};
  }
  return truthful_set(lim.beliefs, mu, cfg.trust.eta, topic, AdjustmentTime::LimitBeliefs);
}

}  // namespace

std::vector<std::uint64_t> replication_seeds(const ScenarioConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < cfg.replications; ++r) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(r));
  return seeds;
}

SimulationTrace simulate(const ScenarioConfig& cfg) { return simulate(cfg, cfg.seed); }

SimulationTrace run_scenario_homophily(const ScenarioConfig& cfg) {
  if (cfg.model != ModelKind::Homophily) throw Error(ErrorKind::ConfigInvalid, "model is not homophily");
  return simulate(cfg);
}

SimulationTrace simulate(const ScenarioConfig& cfg, std::uint64_t seed) {
  const std::size_t n = cfg.n();
  SimulationTrace trace;
  trace.metadata = {std::string(to_string(cfg.model)), config_hash(cfg.source), seed, std::string(kVersion)};
  const SeededRng rng(seed);
  Recorder rec(cfg.trace, trace.records);

  RowStochasticMatrix w = cfg.initial_w.build(n);
  const OppositionStructure sides =
      cfg.model == ModelKind::Opposition ? OppositionStructure::blocks(cfg.n1, cfg.n2) : OppositionStructure{};

  for (int k = 1; k <= cfg.topics; ++k) {
    snapshot_if_due(cfg, trace, k, w);
    const double mu = cfg.truth.at(k);
    const Vector b0 = sample_initial(cfg.groups, mu, rng, k);
    rec.begin(k);

    TopicSummary s;
    s.topic = k;
    s.mu = mu;
    s.initial = b0;
    LimitResult lim;

    switch (cfg.model) {
      case ModelKind::Standard:
        lim = iterate_to_limit(w, b0, cfg.tolerances, rec.observer());
        break;
      case ModelKind::DeMarzo: {
        if (cfg.trace.record_rounds) {
          IterationOptions shown = cfg.tolerances;
          shown.max_rounds = std::max(1, cfg.trace.max_rounds_recorded);
          shown.tol = 0.0;
          iterate_self_weight(w, b0, cfg.schedule, shown, rec.observer());
        }
        lim = self_weight_limit(w, b0, cfg.schedule, cfg.tolerances);
        break;
      }
      case ModelKind::Opposition:
        lim = iterate_linear(build_A(w, sides), b0, cfg.tolerances, rec.observer());
        break;
      case ModelKind::Conformity:
        lim = iterate_linear(build_M(w, cfg.conformity), b0, cfg.tolerances, rec.observer());
        break;
      case ModelKind::Homophily: {
        const auto run = run_topic_homophily(w, b0, mu, cfg.homophily, rec.observer());
        lim.beliefs = run.beliefs;
        lim.converged = run.converged();
        lim.rounds_used = run.rounds_used;
        fill_consensus(lim, cfg.tolerances.consensus_tol);
        s.weights_converged = run.weights_converged;
        s.clusters = run.clusters.size();
        w = run.weights_limit;
        break;
      }
    }
    rec.finish(lim.beliefs);

    s.limit = lim.beliefs;
    s.rounds = lim.rounds_used;
    s.converged = lim.converged;
    s.diverged = lim.diverged;
    s.consensus = lim.is_consensus;
    s.consensus_value = lim.consensus_value;
    if (cfg.model != ModelKind::Homophily) {
      s.clusters = lim.is_consensus ? 1 : cluster_detect(lim.beliefs, cfg.tolerances.consensus_tol).size();
    }

    s.truthful = reference_set(cfg, b0, lim, mu, k, s.adjustment_skipped);
    if (cfg.model == ModelKind::Opposition) {
      w = adjust_weights_grouped(w, s.truthful, cfg.trust, sides);
    } else {
      w = adjust_weights(w, s.truthful, cfg.trust);
    }
    trace.topics.push_back(std::move(s));
  }
  trace.weights.push_back({cfg.topics + 1, w.matrix()});
  trace.final_weights = w.matrix();
  return trace;
}

std::vector<SimulationTrace> simulate_replications(const ScenarioConfig& cfg, unsigned threads) {
  const auto seeds = replication_seeds(cfg);
  std::vector<SimulationTrace> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = simulate(cfg, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> group_influence(const RowStochasticMatrix& w, const std::vector<GroupSpec>& groups) {
  if (population_size(groups) != w.size()) throw Error(ErrorKind::DimensionMismatch, "groups do not cover W");
  const Vector s = social_influence(w).s;
  std::vector<double> mass;
  Eigen::Index at = 0;
  for (const auto& g : groups) {
    const auto c = static_cast<Eigen::Index>(g.count);
    mass.push_back(s.segment(at, c).sum());
    at += c;
  }
  return mass;
}

}  // namespace trustdyn
