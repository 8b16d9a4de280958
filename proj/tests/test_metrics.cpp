#include "igs/error.hpp"
#include "igs/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace igs;

namespace {

SimInstance tiny_instance()
{
    SimSpec spec;
    spec.n = 40;
    spec.p = 20;
    spec.m = 4;
    spec.q = 5;
    spec.kbar = 2;
    spec.seed = 21;
    return gen_case1(spec);
}

} // namespace

TEST(Evaluate, CountsAndError)
{
    const auto inst = tiny_instance();
    ASSERT_EQ(inst.relevant, GroupSet({0, 2}));
    Eigen::VectorXd est = inst.truth;
    est.segment(0, 5).setZero();   // drop relevant group 0
    est[7] = 0.25;                 // spurious group 1
    est[16] = -0.5;                // spurious group 3
    const auto r = evaluate(est, inst, Family::gaussian);
    EXPECT_EQ(r.correct_groups, 1);
    EXPECT_EQ(r.incorrect_groups, 2);
    EXPECT_NEAR(r.l2_error * r.l2_error,
                inst.truth.segment(0, 5).squaredNorm() + 0.25 * 0.25 + 0.5 * 0.5, 1e-12);
    const Eigen::VectorXd resid = inst.data.y - inst.data.X * est;
    EXPECT_NEAR(r.prediction_loss, resid.squaredNorm() / (2.0 * 40), 1e-10);

    const auto thresholded = evaluate(est, inst, Family::gaussian, 0.3);
    EXPECT_EQ(thresholded.incorrect_groups, 1);
    EXPECT_THROW(evaluate(Eigen::VectorXd::Zero(3), inst, Family::gaussian), DimensionError);
}

TEST(Evaluate, PerfectEstimate)
{
    const auto inst = tiny_instance();
    const auto r = evaluate(inst.truth, inst, Family::gaussian);
    EXPECT_EQ(r.l2_error, 0.0);
    EXPECT_EQ(r.correct_groups, 2);
    EXPECT_EQ(r.incorrect_groups, 0);
}

TEST(WeakSignals, ThresholdAndCount)
{
    const auto inst = tiny_instance();
    EXPECT_NEAR(weak_signal_threshold(inst), std::sqrt((5.0 + std::log(4.0)) / 40.0), 1e-15);
    const auto part = GroupPartition::contiguous(6, 2);
    Eigen::VectorXd w(6);
    w << 0.1, 0.0, 3.0, 4.0, 0.0, 0.0;
    EXPECT_EQ(weak_signal_count(w, part, 0.5), 1);
    EXPECT_EQ(weak_signal_count(w, part, 5.0), 2);
    EXPECT_THROW(weak_signal_count(w, part, -1.0), RangeError);
}

TEST(Summaries, MeanAndStandardError)
{
    const auto s = summarize_values({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.standard_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
    EXPECT_THROW(summarize_values({1.0}), RangeError);

    std::vector<EvalReport> reports(3);
    for (int k = 0; k < 3; ++k) {
        reports[k].l2_error = k;
        reports[k].correct_groups = 5;
        reports[k].incorrect_groups = k * 2;
    }
    const auto r = summarize(reports);
    EXPECT_EQ(r.replications, 3);
    EXPECT_DOUBLE_EQ(r.l2_error.mean, 1.0);
    EXPECT_DOUBLE_EQ(r.correct_groups.standard_error, 0.0);
    EXPECT_DOUBLE_EQ(r.incorrect_groups.mean, 2.0);
}
