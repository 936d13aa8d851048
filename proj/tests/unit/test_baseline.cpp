#include <cmath>

#include <gtest/gtest.h>

#include "asgard/baseline.hpp"
#include "asgard/errors.hpp"
#include "asgard/problems.hpp"
#include "sampling.hpp"

using namespace asgard;
using testing_support::Sampler;

TEST(VuCondatConfig, StepCondition) {
  EXPECT_NO_THROW(VuCondatConfig::make(0.4, 1.0, 10, 2.0, 1.0));
  EXPECT_THROW(VuCondatConfig::make(0.5, 1.0, 10, 2.0, 1.0), ParameterError);
  EXPECT_THROW(VuCondatConfig::make(0.0, 1.0, 10, 2.0, 1.0), ParameterError);
  EXPECT_THROW(VuCondatConfig::make(0.1, -1.0, 10, 2.0, 1.0), ParameterError);
}

TEST(VuCondatConfig, Defaults) {
  const auto cfg = VuCondatConfig::defaults(4.0, 2.0, 7);
  EXPECT_DOUBLE_EQ(cfg.sigma_d, 0.5);
  EXPECT_DOUBLE_EQ(cfg.tau_p, 0.9 / (2.0 + 0.5 * 4.0));
  EXPECT_EQ(cfg.max_iter, 7);
}

TEST(VuCondat, ContractsToFeasibility) {
  ProblemSpec p{SmoothTerm::zero(3), Proximable::zero(), Proximable::indicator_point(Vector::Zero(3)),
                LinearMap::identity(3)};
  p.constraint_target = Vector::Zero(3);
  const Vector x0{{1.0, -2.0, 0.5}};
  double prev = x0.norm();
  for (long n : {50L, 200L, 1000L}) {
    const auto r = run_vu_condat(p, VuCondatConfig::defaults(0.0, 1.0, n), x0, Vector::Zero(3));
    EXPECT_LT(r.x.norm(), prev);
    prev = r.x.norm();
    ASSERT_TRUE(r.rows.back().infeasibility.has_value());
    EXPECT_DOUBLE_EQ(*r.rows.back().infeasibility, r.x.norm());
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(VuCondat, DualStaysInBall) {
  Sampler rng(61);
  const double w = 0.7;
  ProblemSpec p{SmoothTerm::least_squares(LinearMap::dense(rng.normal_matrix(6, 5)), rng.normal_vector(6)),
                Proximable::l1(0.2), Proximable::l1(w), LinearMap::dense(rng.normal_matrix(4, 5))};
  const double L = p.f.lipschitz();
  const double Mn = operator_norm(p.M);
  const Vector x0 = rng.normal_vector(5);
  {
    const auto r = run_vu_condat(p, VuCondatConfig::defaults(L, Mn, 1), x0, Vector::Zero(4));
    EXPECT_LE(r.y.cwiseAbs().maxCoeff(), w * (1.0 + 1e-12));
  }
  for (long n = 2; n <= 60; n += 3) {
    const auto r = run_vu_condat(p, VuCondatConfig::defaults(L, Mn, n), x0, Vector::Zero(4), false);
    EXPECT_LE(r.y.cwiseAbs().maxCoeff(), w * (1.0 + 1e-12)) << n;
    EXPECT_TRUE(r.rows.empty());
  }
}

TEST(VuCondat, RowsCarryNanSmoothingColumns) {
  const Instance inst = gen_sparse_tv_ls(20, 10, 0.95, 0);
  const auto &p = inst.problem;
  const auto cfg = VuCondatConfig::defaults(p.f.lipschitz(), operator_norm(p.M), 5);
  long seen = 0;
  const auto r = run_vu_condat(p, cfg, Vector::Zero(20), Vector::Zero(19), true,
                               [&](const TraceRow &) { ++seen; });
  EXPECT_EQ(seen, 5);
  ASSERT_EQ(r.rows.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_TRUE(std::isnan(r.rows[k].tau));
    EXPECT_TRUE(std::isnan(r.rows[k].beta));
    EXPECT_TRUE(std::isnan(r.rows[k].B));
    EXPECT_TRUE(std::isnan(r.rows[k].smoothed_objective));
    EXPECT_EQ(r.rows[k].grad_evals, static_cast<long>(k) + 1);
    EXPECT_EQ(r.rows[k].prox_evals, 2 * (static_cast<long>(k) + 1));
  }
}

TEST(VuCondat, ConvergesOnSyntheticInstance) {
  const Instance inst = gen_sparse_tv_ls(20, 10, 0.95, 0);
  const auto &p = inst.problem;
  const auto cfg = VuCondatConfig::defaults(p.f.lipschitz(), operator_norm(p.M), 20000);
  const auto r = run_vu_condat(p, cfg, Vector::Zero(20), Vector::Zero(19), false);
  RunOptions o;
  o.max_iter = 20000;
  o.record_rows = false;
  const auto ref = restart_wrap([&](const RunOptions &ro) { return run_asgard(p, 1.0, Vector::Zero(20), ro); },
                                100)(o);
  const double F_vc = evaluate_metrics(p, r.x, 1.0).objective;
  const double F_ref = evaluate_metrics(p, ref.final_state.x_bar, 1.0).objective;
  EXPECT_LE(std::abs(F_vc - F_ref), 1e-6 * (1.0 + std::abs(F_ref)));
}

TEST(VuCondat, RejectsShapeMismatch) {
  ProblemSpec p{SmoothTerm::zero(3), Proximable::zero(), Proximable::l1(1.0), LinearMap::identity(3)};
  const auto cfg = VuCondatConfig::defaults(0.0, 1.0, 1);
  EXPECT_THROW(run_vu_condat(p, cfg, Vector::Zero(2), Vector::Zero(3)), ShapeError);
  EXPECT_THROW(run_vu_condat(p, cfg, Vector::Zero(3), Vector::Zero(2)), ShapeError);
}
