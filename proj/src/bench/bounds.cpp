#include "asgard/bench/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace asgard::bench {

namespace {

bool is_asgard_family(const std::string &name) {
  return name == "asgard" || name == "asgard_old_grad" || name == "asgard_linesearch" ||
         name == "parallel_asgard";
}

BoundCheck not_checkable(std::string name, std::string reason) {
  BoundCheck c;
  c.name = std::move(name);
  c.reason = std::move(reason);
  return c;
}

// Evaluates lhs <= rhs + slack on every row; rows returning nullopt are skipped.
struct Inequality {
  double lhs;
  double rhs;
  double slack;
};

BoundCheck row_check(std::string name, const std::vector<TraceRow> &rows,
                     const std::function<std::optional<Inequality>(const TraceRow &)> &eval) {
  BoundCheck c;
  c.name = std::move(name);
  c.checkable = true;
  c.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto &row : rows) {
    const auto q = eval(row);
    if (!q) continue;
    ++c.rows_checked;
    const double excess = q->lhs - (q->rhs + q->slack);
    c.max_excess = std::max(c.max_excess, excess);
    if (!(excess <= 0.0)) {
      ++c.violations;
      if (c.first_violation < 0) c.first_violation = row.k;
    }
  }
  if (c.rows_checked == 0) {
    c.checkable = false;
    c.reason = "no rows";
  }
  return c;
}

double relative_slack(double tol, double rhs) { return tol * std::max(1.0, std::abs(rhs)); }

} // namespace

double zeta_truncated(double s, long terms) {
  double sum = 0.0;
  for (long i = terms; i >= 1; --i) sum += std::pow(static_cast<double>(i), -s);
  return sum;
}

std::optional<double> loglog_slope(const std::vector<TraceRow> &rows, long first, long last) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (const auto &r : rows) {
    const long it = r.k + 1;
    if (it < first || it > last || !r.infeasibility || !(*r.infeasibility > 0.0)) continue;
    const double x = std::log(static_cast<double>(it));
    const double y = std::log(*r.infeasibility);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (!(denom > 0.0)) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

double old_grad_extra(const BoundContext &ctx) {
  return ctx.sigma * std::pow(ctx.B1 / (2.0 * ctx.L_f), 1.0 + ctx.delta) *
         zeta_truncated(1.0 + ctx.delta);
}

double smoothed_gap_bound(const BoundContext &ctx, const TraceRow &row, double extra) {
  const double k1 = static_cast<double>(row.k + 1);
  const double R2 = ctx.dist_sq.value_or(std::nan(""));
  if (ctx.algorithm == "asgard_old_grad") return ctx.B1 / k1 * (0.5 * R2 + extra);
  if (ctx.algorithm == "asgard_linesearch") return ctx.B1 * row.beta_next / ctx.beta0 * R2;
  return ctx.B1 / (2.0 * k1) * R2;
}

std::vector<BoundCheck> check_bounds(const std::vector<TraceRow> &rows, const BoundContext &ctx) {
  std::vector<BoundCheck> out;
  const bool family = is_asgard_family(ctx.algorithm);
  const char *no_bound = "no bound for this algorithm";
  const char *restarted = "restarted run";

  // Smoothed-gap rate.
  if (!family) {
    out.push_back(not_checkable("smoothed_gap_rate", no_bound));
  } else if (ctx.restarted) {
    out.push_back(not_checkable("smoothed_gap_rate", restarted));
  } else if (!ctx.f_star || !ctx.dist_sq) {
    out.push_back(not_checkable("smoothed_gap_rate", "oracle f_star and x_star required"));
  } else {
    const double fs = *ctx.f_star;
    const double extra = ctx.algorithm == "asgard_old_grad" ? old_grad_extra(ctx) : 0.0;
    out.push_back(row_check("smoothed_gap_rate", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
      return Inequality{r.smoothed_objective - fs, smoothed_gap_bound(ctx, r, extra),
                        kRateSlack * (1.0 + std::abs(fs))};
    }));
  }

  // Parameter schedule.
  if (!family) {
    out.push_back(not_checkable("parameter_schedule", no_bound));
  } else if (ctx.restarted) {
    out.push_back(not_checkable("parameter_schedule", restarted));
  } else if (ctx.algorithm == "asgard_linesearch") {
    out.push_back(row_check("parameter_schedule", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
      const double k = static_cast<double>(r.k);
      const double tau_ok = r.tau - 2.0 / (k + 2.0);
      const double q = 3.0 * ctx.a * ctx.beta0 / ctx.B1 * r.tau * r.tau;
      const double beta_bound =
          0.5 * (q * ctx.L_f + std::sqrt(q * ctx.L_f * q * ctx.L_f + 4.0 * q * ctx.M_norm_S * ctx.M_norm_S));
      const double beta_ok = r.beta_next - beta_bound;
      const double B_ok = r.B - ctx.a * (ctx.L_f + ctx.M_norm_S * ctx.M_norm_S / r.beta_next);
      // Report the worst of the three, each normalized by its right-hand side.
      const double worst = std::max({tau_ok / std::max(1.0, 2.0 / (k + 2.0)),
                                     beta_ok / std::max(1.0, beta_bound),
                                     B_ok / std::max(1.0, r.B)});
      return Inequality{worst, 0.0, kScheduleSlack};
    }));
  } else {
    const double tau0_sq_B1 = ctx.B1; // tau_0 = 1
    out.push_back(row_check("parameter_schedule", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
      const double k1 = static_cast<double>(r.k + 1);
      const double lo = 1.0 / k1 - r.tau;
      const double hi = r.tau - 2.0 / (k1 + 1.0);
      const double beta = r.beta - ctx.beta0 / k1;
      const double rate = (r.tau * r.tau * r.B - tau0_sq_B1 / k1) / std::max(1.0, tau0_sq_B1 / k1);
      return Inequality{std::max({lo, hi, beta / std::max(1.0, ctx.beta0 / k1), rate}), 0.0,
                        kScheduleSlack};
    }));
  }

  // Equality-constrained bounds, plain ASGARD only.
  const bool plain = ctx.algorithm == "asgard" && !ctx.restarted;
  const double Lhalf = 0.5 * ctx.L_f + ctx.M_norm_S * ctx.M_norm_S / (2.0 * ctx.beta0);
  if (!ctx.constrained) {
    const char *why = "h is not an indicator of a point";
    out.push_back(not_checkable("constrained_lower", why));
    out.push_back(not_checkable("constrained_upper", why));
    out.push_back(not_checkable("constrained_infeasibility", why));
    out.push_back(not_checkable("infeasibility_slope", why));
  } else if (!plain) {
    const char *why = ctx.restarted ? restarted : "stated for the non-restarted base method only";
    out.push_back(not_checkable("constrained_lower", why));
    out.push_back(not_checkable("constrained_upper", why));
    out.push_back(not_checkable("constrained_infeasibility", why));
    out.push_back(not_checkable("infeasibility_slope", why));
  } else {
    if (!ctx.f_star || !ctx.y_star_norm_S) {
      out.push_back(not_checkable("constrained_lower", "oracle f_star and y_star required"));
    } else {
      const double fs = *ctx.f_star;
      const double ys = *ctx.y_star_norm_S;
      // F* - F <= ||y*||_S ||M x - c||_{S^-1}
      out.push_back(row_check("constrained_lower", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
        if (!r.infeasibility) return std::nullopt;
        const double rhs = ys * *r.infeasibility;
        return Inequality{fs - r.objective, rhs, relative_slack(kConstrainedSlack, rhs)};
      }));
    }
    if (!ctx.f_star || !ctx.y_star_norm_S || !ctx.y_gap_norm_S || !ctx.dist_sq) {
      out.push_back(not_checkable("constrained_upper", "oracle f_star, x_star and y_star required"));
      out.push_back(not_checkable("constrained_infeasibility", "oracle x_star and y_star required"));
    } else {
      const double fs = *ctx.f_star;
      const double ys = *ctx.y_star_norm_S;
      const double yg = *ctx.y_gap_norm_S;
      const double R2 = *ctx.dist_sq;
      out.push_back(row_check("constrained_upper", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
        if (!r.infeasibility) return std::nullopt;
        const double k1 = static_cast<double>(r.k + 1);
        const double rhs = Lhalf * R2 / k1 + ys * *r.infeasibility + ctx.beta0 / (2.0 * k1) * yg * yg;
        return Inequality{r.objective - fs, rhs, relative_slack(kConstrainedSlack, rhs)};
      }));
      out.push_back(row_check("constrained_infeasibility", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
        if (!r.infeasibility) return std::nullopt;
        const double k1 = static_cast<double>(r.k + 1);
        const double rhs = ctx.beta0 / k1 * (yg + std::sqrt(yg * yg + 2.0 / ctx.beta0 * Lhalf * R2));
        return Inequality{*r.infeasibility, rhs, relative_slack(kConstrainedSlack, rhs)};
      }));
    }
    const auto last_k = rows.empty() ? 0 : rows.back().k + 1;
    if (last_k < kSlopeLast) {
      out.push_back(not_checkable("infeasibility_slope", "trace shorter than the regression window"));
    } else if (auto slope = loglog_slope(rows)) {
      BoundCheck c;
      c.name = "infeasibility_slope";
      c.checkable = true;
      c.rows_checked = kSlopeLast - kSlopeFirst + 1;
      c.value = *slope;
      c.max_excess = *slope - kSlopeLimit;
      if (!(*slope <= kSlopeLimit)) c.violations = 1;
      out.push_back(c);
    } else {
      out.push_back(not_checkable("infeasibility_slope", "no positive infeasibility values"));
    }
  }

  // Lipschitz h.
  if (ctx.constrained || !ctx.D_Y) {
    out.push_back(not_checkable("lipschitz_h_bound", "h is not Lipschitz with a known constant"));
  } else if (!plain) {
    out.push_back(not_checkable("lipschitz_h_bound",
                                ctx.restarted ? restarted : "stated for the non-restarted base method only"));
  } else if (!ctx.f_star || !ctx.dist_sq) {
    out.push_back(not_checkable("lipschitz_h_bound", "oracle f_star and x_star required"));
  } else {
    const double fs = *ctx.f_star;
    const double R2 = *ctx.dist_sq;
    const double D2 = *ctx.D_Y * *ctx.D_Y + ctx.dot_y_norm_S * ctx.dot_y_norm_S;
    out.push_back(row_check("lipschitz_h_bound", rows, [&](const TraceRow &r) -> std::optional<Inequality> {
      const double k1 = static_cast<double>(r.k + 1);
      const double rhs = Lhalf * R2 / k1 + ctx.beta0 / k1 * D2;
      return Inequality{r.objective - fs, rhs, kRateSlack * (1.0 + std::abs(fs))};
    }));
  }
  return out;
}

} // namespace asgard::bench
