#include "trustdyn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace trustdyn {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) invalid(where, "unknown key '" + k + "'");
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) invalid(where, std::string("missing '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) invalid(where + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(where + "." + key, "must be finite");
  return x;
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

long long integer(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) invalid(where, std::string("missing '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) invalid(where + "." + key, "expected an integer");
  return v.get<long long>();
}

long long integer_or(const json& obj, const std::string& where, const char* key, long long fallback) {
  return obj.contains(key) ? integer(obj, where, key) : fallback;
}

std::string text(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) invalid(where, std::string("missing '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) invalid(where + "." + key, "expected a string");
  return v.get<std::string>();
}

bool flag_or(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) invalid(where + "." + key, "expected a boolean");
  return obj.at(key).get<bool>();
}

Matrix matrix_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) invalid(where, "expected a non-empty array of rows");
  const auto rows = v.size();
  const auto cols = v.at(0).is_array() ? v.at(0).size() : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = v.at(i);
    if (!row.is_array() || row.size() != cols) invalid(where, "rows must be arrays of equal length");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row.at(j).is_number()) invalid(where, "entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).get<double>();
    }
  }
  return m;
}

ModelKind parse_model(const std::string& s) {
  if (s == "standard") return ModelKind::Standard;
  if (s == "demarzo") return ModelKind::DeMarzo;
  if (s == "opposition") return ModelKind::Opposition;
  if (s == "conformity") return ModelKind::Conformity;
  if (s == "homophily") return ModelKind::Homophily;
  invalid("model", "unknown model '" + s + "'");
}

AdjustmentTime parse_tau(const std::string& s, const std::string& where) {
  if (s == "initial") return AdjustmentTime::InitialBeliefs;
  if (s == "limit") return AdjustmentTime::LimitBeliefs;
  invalid(where, "tau must be 'initial' or 'limit'");
}

TFunction parse_t(const std::string& s, const std::string& where) {
  if (s == "one") return TFunction::ConstantOne;
  if (s == "zero_at_n") return TFunction::ZeroAtN;
  if (s == "neg_log_fraction") return TFunction::NegLogFraction;
  invalid(where, "T must be 'one', 'zero_at_n' or 'neg_log_fraction'");
}

GroupSpec parse_group(const json& g, const std::string& where) {
  GroupSpec spec;
  const auto count = integer(g, where, "count");
  if (count < 1) invalid(where + ".count", "must be >= 1");
  spec.count = static_cast<std::size_t>(count);
  const auto dist = text(g, where, "dist");
  if (dist == "point") {
    allow_keys(g, where, {"count", "dist"});
    spec.distribution = PointTruth{};
  } else if (dist == "normal") {
    allow_keys(g, where, {"count", "dist", "variance", "truncate_radius"});
    NormalAroundTruth d{number(g, where, "variance"), std::nullopt};
    if (g.contains("truncate_radius")) d.truncate_radius = number(g, where, "truncate_radius");
    spec.distribution = d;
  } else if (dist == "biased_normal") {
    allow_keys(g, where, {"count", "dist", "bias", "variance"});
    spec.distribution = BiasedNormal{number(g, where, "bias"), number(g, where, "variance")};
  } else if (dist == "uniform") {
    allow_keys(g, where, {"count", "dist", "lo", "hi"});
    spec.distribution = UniformInterval{number(g, where, "lo"), number(g, where, "hi")};
  } else if (dist == "never_truthful") {
    allow_keys(g, where, {"count", "dist", "lo", "hi"});
    spec.distribution = NeverTruthful{number(g, where, "lo"), number(g, where, "hi")};
  } else {
    invalid(where + ".dist", "unknown distribution '" + dist + "'");
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    invalid(where, e.what());
  }
  return spec;
}

TruthSequence parse_truth(const json& t) {
  const std::string where = "truth";
  const auto kind = text(t, where, "kind");
  if (kind == "constant") {
    allow_keys(t, where, {"kind", "mu"});
    return TruthSequence(TruthSequence::Constant{number(t, where, "mu")});
  }
  if (kind == "explicit") {
    allow_keys(t, where, {"kind", "values"});
    if (!t.contains("values") || !t.at("values").is_array() || t.at("values").empty())
      invalid(where + ".values", "expected a non-empty array");
    TruthSequence::Explicit e;
    for (const auto& v : t.at("values")) {
      if (!v.is_number()) invalid(where + ".values", "entries must be numbers");
      e.values.push_back(v.get<double>());
    }
    return TruthSequence(std::move(e));
  }
  if (kind == "affine") {
    allow_keys(t, where, {"kind", "slope", "intercept"});
    return TruthSequence(TruthSequence::Affine{number(t, where, "slope"), number_or(t, where, "intercept", 0.0)});
  }
  invalid(where + ".kind", "unknown truth kind '" + kind + "'");
}

void parse_initial_w(const json& w, ScenarioConfig& cfg) {
  const std::string where = "initial_W";
  const auto kind = text(w, where, "kind");
  auto& iw = cfg.initial_w;
  if (kind == "identity") {
    allow_keys(w, where, {"kind"});
    iw.kind = InitialWeights::Kind::Identity;
  } else if (kind == "uniform") {
    allow_keys(w, where, {"kind"});
    iw.kind = InitialWeights::Kind::Uniform;
  } else if (kind == "explicit") {
    allow_keys(w, where, {"kind", "matrix"});
    if (!w.contains("matrix")) invalid(where, "missing 'matrix'");
    iw.kind = InitialWeights::Kind::Explicit;
    iw.explicit_w = matrix_from(w.at("matrix"), where + ".matrix");
  } else if (kind == "block") {
    allow_keys(w, where, {"kind", "a", "b", "c", "d"});
    iw.kind = InitialWeights::Kind::Block;
    iw.block.b = number(w, where, "b");
    iw.block.c = number(w, where, "c");
    // a and d default to the values that make the rows sum to one
    iw.block.a = w.contains("a") ? number(w, where, "a") : std::nan("");
    iw.block.d = w.contains("d") ? number(w, where, "d") : std::nan("");
  } else {
    invalid(where + ".kind", "unknown kind '" + kind + "'");
  }
}

IterationOptions parse_tolerances(const json& t) {
  const std::string where = "tolerances";
  allow_keys(t, where, {"tol", "max_rounds", "consensus_tol", "overflow_bound"});
  IterationOptions o;
  o.tol = number_or(t, where, "tol", o.tol);
  o.max_rounds = static_cast<int>(integer_or(t, where, "max_rounds", o.max_rounds));
  o.consensus_tol = number_or(t, where, "consensus_tol", o.consensus_tol);
  o.overflow_bound = number_or(t, where, "overflow_bound", o.overflow_bound);
  if (!(o.tol > 0.0) || !(o.consensus_tol > 0.0) || !(o.overflow_bound > 0.0) || o.max_rounds < 1)
    invalid(where, "tolerances must be positive");
  return o;
}

TraceOptions parse_trace(const json& t) {
  const std::string where = "trace";
  allow_keys(t, where, {"record_rounds", "thin", "max_rounds_recorded", "weights_every"});
  TraceOptions o;
  o.record_rounds = flag_or(t, where, "record_rounds", o.record_rounds);
  o.thin = static_cast<int>(integer_or(t, where, "thin", o.thin));
  o.max_rounds_recorded = static_cast<int>(integer_or(t, where, "max_rounds_recorded", o.max_rounds_recorded));
  o.weights_every = static_cast<int>(integer_or(t, where, "weights_every", o.weights_every));
  if (o.thin < 1) invalid(where + ".thin", "must be >= 1");
  if (o.max_rounds_recorded < 0) invalid(where + ".max_rounds_recorded", "must be >= 0");
  if (o.weights_every < 0) invalid(where + ".weights_every", "must be >= 0");
  return o;
}

LambdaSchedule parse_schedule(const json& d) {
  const std::string where = "demarzo";
  allow_keys(d, where, {"schedule", "value"});
  LambdaSchedule s;
  const auto kind = text(d, where, "schedule");
  if (kind == "constant") {
    s.kind = LambdaSchedule::Kind::Constant;
    s.value = number(d, where, "value");
  } else if (kind == "harmonic") {
    s.kind = LambdaSchedule::Kind::Harmonic;
  } else if (kind == "geometric") {
    s.kind = LambdaSchedule::Kind::Geometric;
    s.value = number(d, where, "value");
  } else {
    invalid(where + ".schedule", "unknown schedule '" + kind + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    invalid(where, e.what());
  }
  return s;
}

ConformityParams parse_conformity(const json& c, std::size_t n) {
  const std::string where = "conformity";
  allow_keys(c, where, {"deltas", "delta", "Q"});
  ConformityParams p;
  if (c.contains("deltas") == c.contains("delta")) invalid(where, "give exactly one of 'deltas' or 'delta'");
  if (c.contains("delta")) {
    p.deltas = Vector::Constant(static_cast<Eigen::Index>(n), number(c, where, "delta"));
  } else {
    const auto& d = c.at("deltas");
    if (!d.is_array() || d.size() != n) invalid(where + ".deltas", "expected " + std::to_string(n) + " numbers");
    p.deltas.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!d.at(i).is_number()) invalid(where + ".deltas", "entries must be numbers");
      p.deltas(static_cast<Eigen::Index>(i)) = d.at(i).get<double>();
    }
  }
  const json q = c.value("Q", json("derived"));
  if (q.is_string() && q.get<std::string>() == "derived") {
    p.mode = ReferenceMode::DerivedFromW;
  } else if (q.is_string() && q.get<std::string>() == "uniform") {
    if (n < 2) invalid(where + ".Q", "uniform reference needs n >= 2");
    p.mode = ReferenceMode::Explicit;
    p.q = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n - 1));
    p.q.diagonal().setZero();
  } else if (q.is_array()) {
    p.mode = ReferenceMode::Explicit;
    p.q = matrix_from(q, where + ".Q");
  } else {
    invalid(where + ".Q", "expected 'derived', 'uniform' or a matrix");
  }
  try {
    p.validate(n);
  } catch (const Error& e) {
    invalid(where, e.what());
  }
  return p;
}

HomophilyParams parse_homophily(const json& h, const TrustPolicy& trust) {
  const std::string where = "homophily";
  allow_keys(h, where, {"eta_H", "delta_H", "belief_tol", "weight_tol", "max_rounds", "cluster_gap"});
  HomophilyParams p;
  p.eta_H = number_or(h, where, "eta_H", p.eta_H);
  p.delta_H = number_or(h, where, "delta_H", p.delta_H);
  p.eta_T = trust.eta;
  p.delta_T = trust.delta;
  p.tau = trust.tau;
  p.t_function = trust.t_function;
  p.belief_tol = number_or(h, where, "belief_tol", p.belief_tol);
  p.weight_tol = number_or(h, where, "weight_tol", p.weight_tol);
  p.max_rounds = static_cast<int>(integer_or(h, where, "max_rounds", p.max_rounds));
  if (h.contains("cluster_gap")) p.cluster_gap = number(h, where, "cluster_gap");
  try {
    p.validate();
  } catch (const Error& e) {
    invalid(where, e.what());
  }
  return p;
}

void cross_checks(ScenarioConfig& cfg) {
  const auto n = cfg.n();
  if (cfg.source.contains("n")) {
    const auto declared = integer(cfg.source, "", "n");
    if (declared < 0 || static_cast<std::size_t>(declared) != n)
      invalid("n", "declared " + std::to_string(declared) + " but groups add up to " + std::to_string(n));
  }
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    const auto& dist = cfg.groups[g].distribution;
    const std::string where = "groups[" + std::to_string(g) + "]";
    if (std::holds_alternative<UniformInterval>(dist) && !cfg.truth.is_constant())
      invalid(where, "a uniform interval group requires a constant truth");
    if (const auto* nt = std::get_if<NeverTruthful>(&dist)) {
      if (nt->lo < cfg.trust.eta && nt->hi > -cfg.trust.eta)
        invalid(where, "never_truthful interval overlaps the eta-ball around the truth");
    }
  }
  if (cfg.initial_w.kind == InitialWeights::Kind::Explicit) {
    const auto& m = cfg.initial_w.explicit_w;
    if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
      invalid("initial_W.matrix", "must be " + std::to_string(n) + " x " + std::to_string(n));
    if (!is_row_stochastic(m, 1e-9)) invalid("initial_W.matrix", "must be row-stochastic");
  }
  if (cfg.model == ModelKind::Opposition) {
    if (cfg.n1 + cfg.n2 != n) invalid("opposition", "n1 + n2 must equal the population size");
  }
  if (cfg.initial_w.kind == InitialWeights::Kind::Block) {
    if (cfg.model != ModelKind::Opposition) invalid("initial_W", "block weights need an opposition section");
    auto& p = cfg.initial_w.block;
    p.n1 = cfg.n1;
    p.n2 = cfg.n2;
    const double n1 = static_cast<double>(p.n1);
    const double n2 = static_cast<double>(p.n2);
    if (std::isnan(p.a)) p.a = (1.0 - n2 * p.b) / n1;
    if (std::isnan(p.d)) p.d = (1.0 - n1 * p.c) / n2;
    try {
      p.validate(1e-9);
    } catch (const Error& e) {
      invalid("initial_W", e.what());
    }
  }
}

}  // namespace

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Standard: return "standard";
    case ModelKind::DeMarzo: return "demarzo";
    case ModelKind::Opposition: return "opposition";
    case ModelKind::Conformity: return "conformity";
    case ModelKind::Homophily: return "homophily";
  }
  return "?";
}

RowStochasticMatrix InitialWeights::build(std::size_t n) const {
  switch (kind) {
    case Kind::Identity: return RowStochasticMatrix::identity(n);
    case Kind::Uniform: return RowStochasticMatrix::uniform(n);
    case Kind::Explicit: return normalize_rows(explicit_w);
    case Kind::Block: return block_trust_matrix(block);
  }
  return RowStochasticMatrix::identity(n);
}

ScenarioConfig parse_config(const json& doc) {
  allow_keys(doc, "config",
             {"name", "model", "n", "groups", "truth", "trust", "topics", "seed", "replications", "initial_W",
              "tolerances", "trace", "wisdom_eps", "tail_fraction", "demarzo", "opposition", "conformity",
              "homophily"});
  ScenarioConfig cfg;
  cfg.source = doc;
  cfg.name = doc.value("name", std::string("scenario"));
  cfg.model = parse_model(text(doc, "config", "model"));

  if (!doc.contains("groups") || !doc.at("groups").is_array() || doc.at("groups").empty())
    invalid("groups", "expected a non-empty array");
  for (std::size_t g = 0; g < doc.at("groups").size(); ++g)
    cfg.groups.push_back(parse_group(doc.at("groups").at(g), "groups[" + std::to_string(g) + "]"));

  cfg.truth = doc.contains("truth") ? parse_truth(doc.at("truth")) : TruthSequence{};

  if (doc.contains("trust")) {
    const auto& t = doc.at("trust");
    allow_keys(t, "trust", {"eta", "delta", "tau", "T"});
    cfg.trust.eta = number_or(t, "trust", "eta", cfg.trust.eta);
    cfg.trust.delta = number_or(t, "trust", "delta", cfg.trust.delta);
    if (t.contains("tau")) cfg.trust.tau = parse_tau(text(t, "trust", "tau"), "trust.tau");
    if (t.contains("T")) cfg.trust.t_function = parse_t(text(t, "trust", "T"), "trust.T");
    try {
      cfg.trust.validate();
    } catch (const Error& e) {
      invalid("trust", e.what());
    }
  }

  cfg.topics = static_cast<int>(integer_or(doc, "config", "topics", 1));
  if (cfg.topics < 1) invalid("topics", "must be >= 1");
  const auto seed = integer_or(doc, "config", "seed", 1);
  if (seed < 0) invalid("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.replications = static_cast<int>(integer_or(doc, "config", "replications", 1));
  if (cfg.replications < 1) invalid("replications", "must be >= 1");

  if (doc.contains("initial_W")) parse_initial_w(doc.at("initial_W"), cfg);
  if (doc.contains("tolerances")) cfg.tolerances = parse_tolerances(doc.at("tolerances"));
  if (doc.contains("trace")) cfg.trace = parse_trace(doc.at("trace"));
  cfg.wisdom_eps = number_or(doc, "config", "wisdom_eps", cfg.trust.eta);
  if (!(cfg.wisdom_eps >= 0.0)) invalid("wisdom_eps", "must be >= 0");
  cfg.tail_fraction = number_or(doc, "config", "tail_fraction", cfg.tail_fraction);
  if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0)) invalid("tail_fraction", "must be in (0, 1]");

  const auto need = [&](const char* key) {
    if (!doc.contains(key)) invalid(key, std::string("model '") + std::string(to_string(cfg.model)) + "' needs this section");
    return doc.at(key);
  };
  const auto forbid_other = [&](const char* own) {
    for (const char* k : {"demarzo", "opposition", "conformity", "homophily"}) {
      if (std::string_view(k) != own && doc.contains(k))
        invalid(k, std::string("section does not apply to model '") + std::string(to_string(cfg.model)) + "'");
    }
  };
  switch (cfg.model) {
    case ModelKind::Standard:
      forbid_other("");
      break;
    case ModelKind::DeMarzo:
      forbid_other("demarzo");
      cfg.schedule = parse_schedule(need("demarzo"));
      break;
    case ModelKind::Opposition: {
      forbid_other("opposition");
      const auto o = need("opposition");
      allow_keys(o, "opposition", {"n1", "n2"});
      const auto n1 = integer(o, "opposition", "n1");
      const auto n2 = integer(o, "opposition", "n2");
      if (n1 < 1 || n2 < 1) invalid("opposition", "n1 and n2 must be >= 1");
      cfg.n1 = static_cast<std::size_t>(n1);
      cfg.n2 = static_cast<std::size_t>(n2);
      break;
    }
    case ModelKind::Conformity:
      forbid_other("conformity");
      cfg.conformity = parse_conformity(need("conformity"), cfg.n());
      break;
    case ModelKind::Homophily:
      forbid_other("homophily");
      cfg.homophily = parse_homophily(need("homophily"), cfg.trust);
      break;
  }
  cross_checks(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::uint64_t config_hash(const json& doc) {
  const std::string s = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace trustdyn
