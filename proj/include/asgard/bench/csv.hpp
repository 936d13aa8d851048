#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "asgard/solvers.hpp"

namespace asgard::bench {

inline constexpr const char *kTraceHeader =
    "k,objective,smoothed_objective,infeasibility,tau,beta,B,grad_evals,prox_evals,wall_time_s";

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

/// One CSV line without the trailing newline. Missing infeasibility is empty.
std::string format_row(const TraceRow &row);

void write_trace(std::ostream &out, const std::vector<TraceRow> &rows);

/// Reads a trace written by write_trace; only the CSV columns are restored.
std::vector<TraceRow> read_trace(const std::filesystem::path &path);

} // namespace asgard::bench
