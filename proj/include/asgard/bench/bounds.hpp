#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asgard/solvers.hpp"

namespace asgard::bench {

inline constexpr double kRateSlack = 1e-8;        // times (1 + |F*|)
inline constexpr double kConstrainedSlack = 1e-6; // times max(1, |rhs|)
inline constexpr double kScheduleSlack = 1e-12;   // times max(1, |rhs|)
inline constexpr double kSlopeLimit = -0.9;
inline constexpr long kSlopeFirst = 100;
inline constexpr long kSlopeLast = 10000;
inline constexpr long kZetaTerms = 1000000;

/// Everything a bound needs besides the trace itself.
struct BoundContext {
  std::string algorithm;
  bool restarted = false;
  double beta0 = 1.0;
  double sigma = 0.0;
  double delta = 0.0;
  double a = 2.0;
  double L_f = 0.0;
  double M_norm_S = 0.0;
  double B1 = 0.0;
  std::optional<double> f_star;
  std::optional<double> dist_sq;       // ||x* - x_tilde^0||^2
  std::optional<double> y_star_norm_S; // ||y*||_S
  std::optional<double> y_gap_norm_S;  // ||y* - dot_y||_S
  bool constrained = false;            // h is the indicator of a point
  std::optional<double> D_Y;           // Lipschitz constant of h
  double dot_y_norm_S = 0.0;
};

struct BoundCheck {
  std::string name;
  bool checkable = false;
  std::string reason; // why it is not checkable
  long rows_checked = 0;
  long violations = 0;
  long first_violation = -1;
  double max_excess = 0.0; // max over rows of lhs - (rhs + slack); <= 0 when all hold
  std::optional<double> value; // fitted value for regression checks

  bool passed() const { return checkable && violations == 0; }
};

/// sum_{i=1}^{terms} i^{-s}
double zeta_truncated(double s, long terms = kZetaTerms);

/// Least-squares slope of log(infeasibility) against log(k + 1) over the rows
/// with k + 1 in [first, last]. Empty when fewer than two usable rows.
std::optional<double> loglog_slope(const std::vector<TraceRow> &rows, long first = kSlopeFirst,
                                   long last = kSlopeLast);

/// sigma (B_1 / (2 L_f))^{1 + delta} zeta(1 + delta), the old-gradients surcharge.
double old_grad_extra(const BoundContext &ctx);

/// Rate bound on the smoothed gap at a row; extra is old_grad_extra(ctx) for
/// the old-gradients variant and ignored otherwise.
double smoothed_gap_bound(const BoundContext &ctx, const TraceRow &row, double extra = 0.0);

std::vector<BoundCheck> check_bounds(const std::vector<TraceRow> &rows, const BoundContext &ctx);

} // namespace asgard::bench
