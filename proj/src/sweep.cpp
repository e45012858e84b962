#include "trustdyn/sweep.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "trustdyn/io.hpp"
#include "trustdyn/metrics.hpp"
#include "trustdyn/simulation.hpp"

namespace trustdyn {

using nlohmann::json;

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid entry");
  const std::string copy(s);
  char* end = nullptr;
  const double x = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size() || !std::isfinite(x))
    throw Error(ErrorKind::InvalidArgument, "bad grid entry '" + copy + "'");
  return x;
}

std::optional<double> opposition_coefficient(const ScenarioConfig& cfg, const SimulationTrace& trace) {
  if (cfg.model != ModelKind::Opposition) return std::nullopt;
  const auto f = OppositionStructure::blocks(cfg.n1, cfg.n2);
  try {
    const Matrix a = build_A(RowStochasticMatrix(trace.final_weights, 1e-9), f);
    return polarization_limit(a, f, Vector::Zero(a.rows())).coefficient;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1)
      parts.push_back(text.substr(start, pos - start));
    parts.push_back(text.substr(start));
    if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "range grid must be lo:hi:count");
    const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw Error(ErrorKind::InvalidArgument, "count must be a positive integer");
    const int m = static_cast<int>(count);
    for (int i = 0; i < m; ++i) out.push_back(m == 1 ? lo : lo + (hi - lo) * i / (m - 1));
    return out;
  }
  if (text.find_first_not_of(" ") == std::string_view::npos) throw Error(ErrorKind::InvalidArgument, "empty grid");
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(',', start)) != std::string_view::npos; start = pos + 1)
    out.push_back(parse_number(text.substr(start, pos - start)));
  out.push_back(parse_number(text.substr(start)));
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  return out;
}

json with_parameter(const json& doc, const std::string& pointer, double value) {
  json out = doc;
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(pointer);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, "bad parameter path '" + pointer + "': " + e.what());
  }
  if (ptr.empty()) throw Error(ErrorKind::ConfigInvalid, "parameter path must not be empty");
  const auto parent = ptr.parent_pointer();
  if (!out.contains(parent)) throw Error(ErrorKind::ConfigInvalid, "parameter path '" + pointer + "' not found");
  auto& slot = out[ptr];
  if (slot.is_number_integer()) {
    if (value != std::floor(value)) throw Error(ErrorKind::ConfigInvalid, pointer + " takes integer values");
    slot = static_cast<long long>(value);
  } else if (slot.is_null() || slot.is_number()) {
    slot = value;
  } else {
    throw Error(ErrorKind::ConfigInvalid, pointer + " is not numeric");
  }
  return out;
}

std::string sweep_csv(const json& doc, const std::string& pointer, const std::vector<double>& grid, unsigned threads) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (double value : grid) {
    const auto cfg = parse_config(with_parameter(doc, pointer, value));
    const auto traces = simulate_replications(cfg, threads);
    double wise = 0, abs_tail = 0, signed_tail = 0, consensus = 0, diverged = 0, nonconv = 0, clusters = 0, coef = 0;
    int coef_count = 0;
    for (const auto& t : traces) {
      const auto rep = wisdom_report(t, cfg.wisdom_eps, cfg.tail_fraction);
      wise += rep.fraction_full_wisdom;
      abs_tail += rep.mean_abs_offset_tail;
      signed_tail += rep.mean_offset_tail;
      for (const auto& s : t.topics) {
        consensus += s.consensus;
        diverged += s.diverged;
        nonconv += !s.converged;
        clusters += static_cast<double>(s.clusters) / static_cast<double>(t.topics.size());
      }
      if (const auto c = opposition_coefficient(cfg, t)) coef += *c, ++coef_count;
    }
    const double r = static_cast<double>(traces.size());
    out << pointer << ',' << format_double(value) << ',' << traces.size() << ',' << format_double(wise / r) << ','
        << format_double(abs_tail / r) << ',' << format_double(signed_tail / r) << ',' << format_double(consensus / r)
        << ',' << format_double(diverged / r) << ',' << format_double(nonconv / r) << ','
        << format_double(clusters / r) << ',';
    if (coef_count == static_cast<int>(traces.size())) out << format_double(coef / r);
    out << '\n';
  }
  return out.str();
}

}  // namespace trustdyn
