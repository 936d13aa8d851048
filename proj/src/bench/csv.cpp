#include "asgard/bench/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "asgard/bench/config.hpp"

namespace asgard::bench {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_row(const TraceRow &r) {
  std::string s = std::to_string(r.k);
  const auto add = [&s](const std::string &field) {
    s += ',';
    s += field;
  };
  add(format_double(r.objective));
  add(format_double(r.smoothed_objective));
  add(r.infeasibility ? format_double(*r.infeasibility) : std::string());
  add(format_double(r.tau));
  add(format_double(r.beta));
  add(format_double(r.B));
  add(std::to_string(r.grad_evals));
  add(std::to_string(r.prox_evals));
  add(format_double(r.wall_time));
  return s;
}

void write_trace(std::ostream &out, const std::vector<TraceRow> &rows) {
  out << kTraceHeader << '\n';
  for (const auto &r : rows) out << format_row(r) << '\n';
}

namespace {

double parse_double(const std::string &field, long line) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return INFINITY;
  if (field == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ConfigError("trace line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

long parse_long(const std::string &field, long line) {
  long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ConfigError("trace line " + std::to_string(line) + ": bad integer '" + field + "'");
  }
  return v;
}

} // namespace

std::vector<TraceRow> read_trace(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ConfigError("trace line 1: unexpected header in '" + path.string() + "'");
  }
  std::vector<TraceRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": expected 10 columns");
    }
    TraceRow r;
    r.k = parse_long(f[0], lineno);
    r.objective = parse_double(f[1], lineno);
    r.smoothed_objective = parse_double(f[2], lineno);
    if (!f[3].empty()) r.infeasibility = parse_double(f[3], lineno);
    r.tau = parse_double(f[4], lineno);
    r.beta = parse_double(f[5], lineno);
    r.B = parse_double(f[6], lineno);
    r.grad_evals = parse_long(f[7], lineno);
    r.prox_evals = parse_long(f[8], lineno);
    r.wall_time = parse_double(f[9], lineno);
    r.beta_next = update_beta(r.beta, r.tau);
    rows.push_back(r);
  }
  return rows;
}

} // namespace asgard::bench
