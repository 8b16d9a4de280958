#include "igs/baselines.hpp"
#include "igs/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace igs;
using namespace igs::test_util;

namespace {

double penalized(const Eigen::VectorXd& x, const Eigen::VectorXd& z, double tau, const GroupPartition& part)
{
    return 0.5 * (x - z).squaredNorm() + tau * group_norms(x, part).l2_1;
}

} // namespace

TEST(Prox, ClosedFormPerGroup)
{
    const auto part = GroupPartition::contiguous(4, 2);
    Eigen::VectorXd z(4);
    z << 3.0, 4.0, 0.3, 0.4;  // group norms 5 and 0.5
    const auto x = prox_group(z, 1.0, part);
    EXPECT_NEAR(x[0], 3.0 * 0.8, 1e-15);
    EXPECT_NEAR(x[1], 4.0 * 0.8, 1e-15);
    EXPECT_EQ(x[2], 0.0);
    EXPECT_EQ(x[3], 0.0);
    EXPECT_THROW(prox_group(z, 0.0, part), RangeError);
}

TEST(Prox, MinimizesPenalizedDistance)
{
    std::mt19937_64 rng(11);
    const auto part = GroupPartition::contiguous(12, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd z = random_vector(12, rng);
        const double tau = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
        const Eigen::VectorXd x = prox_group(z, tau, part);
        const double best = penalized(x, z, tau, part);
        for (int k = 0; k < 20; ++k) {
            const Eigen::VectorXd other = x + random_vector(12, rng, 0.1);
            EXPECT_LE(best, penalized(other, z, tau, part) + 1e-12);
        }
    }
}

TEST(Prox, NonExpansive)
{
    std::mt19937_64 rng(19);
    const auto part = GroupPartition::contiguous(10, 5);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::VectorXd a = random_vector(10, rng);
        const Eigen::VectorXd b = random_vector(10, rng);
        EXPECT_LE((prox_group(a, 0.7, part) - prox_group(b, 0.7, part)).norm(), (a - b).norm() + 1e-15);
    }
}

TEST(AlphaMax, ZeroSolutionExactlyAboveThreshold)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        const bool logistic = trial % 2 == 1;
        auto data = logistic ? logistic_data(80, 12, rng) : gaussian_data(60, 12, rng);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const auto part = GroupPartition::contiguous(12, 3);
        const double amax = alpha_max(*obj, part);
        const Eigen::VectorXd g = obj->gradient(Eigen::VectorXd::Zero(12));
        EXPECT_NEAR(amax, group_norms(g, part).l2_inf, 1e-14);
        GroupLassoConfig cfg;
        const auto above = group_lasso_fit(*obj, part, amax * (1 + 1e-3), nullptr, cfg);
        EXPECT_TRUE(above.w.isZero(0.0));
        const auto below = group_lasso_fit(*obj, part, amax * (1 - 1e-3), nullptr, cfg);
        EXPECT_GT(below.w.norm(), 0.0);
    }
}

TEST(GroupLasso, OrthonormalDesignMatchesProx)
{
    std::mt19937_64 rng(13);
    const auto part = GroupPartition::contiguous(20, 4);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd X = orthonormal_design(60, 20, rng);
        const Eigen::VectorXd y = random_vector(60, rng);
        const Eigen::VectorXd xty = X.transpose() * y / 60.0;
        GaussianObjective obj(std::make_shared<const Dataset>(X, y));
        const double alpha = 0.3 * alpha_max(obj, part);
        GroupLassoConfig cfg;
        cfg.kkt_tolerance = 1e-9;
        const auto fit = group_lasso_fit(obj, part, alpha, nullptr, cfg);
        EXPECT_LT((fit.w - prox_group(xty, alpha, part)).norm(), 1e-8);
        EXPECT_LE(fit.kkt_residual, 1e-8);
    }
}

TEST(GroupLasso, KktResidualSmallAtConvergence)
{
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 6; ++trial) {
        const bool logistic = trial % 2 == 1;
        auto data = logistic ? logistic_data(100, 30, rng) : gaussian_data(50, 30, rng);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const auto part = GroupPartition::contiguous(30, 5);
        const double alpha = 0.2 * alpha_max(*obj, part);
        const auto fit = group_lasso_fit(*obj, part, alpha, nullptr, GroupLassoConfig{});
        EXPECT_TRUE(fit.converged);
        EXPECT_LE(kkt_residual(*obj, part, fit.w, alpha), 1e-6);
        EXPECT_NEAR(fit.objective, obj->value(fit.w) + alpha * group_norms(fit.w, part).l2_1, 1e-12);
    }
}

TEST(AlphaMax, ClosedForms)
{
    std::mt19937_64 rng(20);
    const auto part = GroupPartition::contiguous(8, 4);
    const auto data = gaussian_data(30, 8, rng);
    GaussianObjective gauss(data);
    const Eigen::VectorXd xty = data->X.transpose() * data->y / 30.0;
    EXPECT_NEAR(alpha_max(gauss, part), std::max(xty.head(4).norm(), xty.tail(4).norm()), 1e-14);

    GaussianObjective zero_y(std::make_shared<const Dataset>(data->X, Eigen::VectorXd::Zero(30)));
    EXPECT_EQ(alpha_max(zero_y, part), 0.0);

    const auto ldata = logistic_data(30, 8, rng);
    LogisticObjective logit(ldata);
    const Eigen::VectorXd h = ldata->X.transpose() * (-ldata->y / 2.0) / 30.0;
    EXPECT_NEAR(alpha_max(logit, part), std::max(h.head(4).norm(), h.tail(4).norm()), 1e-14);
}

TEST(GroupLasso, UnpenalizedFitIsLeastSquares)
{
    std::mt19937_64 rng(21);
    GaussianObjective obj(gaussian_data(80, 6, rng));
    const auto part = GroupPartition::contiguous(6, 3);
    GroupLassoConfig cfg;
    cfg.max_iterations = 20000;
    const auto fit = group_lasso_fit(obj, part, 0.0, nullptr, cfg);
    const auto ols = obj.restricted_minimize({0, 1, 2, 3, 4, 5});
    EXPECT_LT((fit.w - ols.w).norm(), 1e-6);
}

TEST(GroupLasso, WarmStartNeverIncreasesObjective)
{
    std::mt19937_64 rng(22);
    const auto part = GroupPartition::contiguous(20, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const bool logistic = trial % 2 == 1;
        auto data = logistic ? logistic_data(60, 20, rng) : gaussian_data(40, 20, rng);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const double alpha = 0.3 * alpha_max(*obj, part);
        const Eigen::VectorXd warm = random_vector(20, rng, 0.3);
        const double start = obj->value(warm) + alpha * group_norms(warm, part).l2_1;
        const auto fit = group_lasso_fit(*obj, part, alpha, &warm, GroupLassoConfig{});
        EXPECT_LE(fit.objective, start + 1e-12);
    }
}

TEST(GroupLasso, KktResidualDetectsSuboptimalPoints)
{
    std::mt19937_64 rng(15);
    GaussianObjective obj(gaussian_data(40, 10, rng));
    const auto part = GroupPartition::contiguous(10, 2);
    const double alpha = 0.5 * alpha_max(obj, part);
    EXPECT_NEAR(kkt_residual(obj, part, Eigen::VectorXd::Zero(10), alpha), alpha, 1e-14);
    EXPECT_EQ(kkt_residual(obj, part, Eigen::VectorXd::Zero(10), 2.0 * alpha_max(obj, part)), 0.0);
}

TEST(GroupLasso, PathIsDecreasingAndOptimalAtEveryPoint)
{
    std::mt19937_64 rng(16);
    const auto part = GroupPartition::contiguous(20, 4);
    GroupLassoConfig cfg;
    cfg.grid_length = 15;
    cfg.grid_ratio = 1e-2;
    for (int trial = 0; trial < 20; ++trial) {
        const bool logistic = trial % 4 == 3;
        auto data = logistic ? logistic_data(80, 20, rng) : gaussian_data(50, 20, rng);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const auto path = group_lasso_path(*obj, part, cfg);
        ASSERT_EQ(path.alphas.size(), 15u);
        EXPECT_NEAR(path.alphas.front(), alpha_max(*obj, part), 1e-14);
        EXPECT_TRUE(path.active.front().empty());
        EXPECT_LE(path.iterations.front(), 1);
        for (std::size_t k = 0; k < path.alphas.size(); ++k) {
            if (k > 0) EXPECT_LT(path.alphas[k], path.alphas[k - 1]);
            EXPECT_LE(kkt_residual(*obj, part, path.coefficients[k], path.alphas[k]), 1e-6);
        }
        EXPECT_GE(path.active.back().size(), path.active.front().size());
    }
}

TEST(GroupLasso, DefaultGridIsLogSpaced)
{
    const auto grid = default_alpha_grid(2.0, 5, 1e-4);
    ASSERT_EQ(grid.size(), 5u);
    EXPECT_DOUBLE_EQ(grid.front(), 2.0);
    EXPECT_NEAR(grid.back(), 2e-4, 1e-16);
    for (std::size_t k = 1; k < grid.size(); ++k) EXPECT_NEAR(grid[k] / grid[k - 1], 0.1, 1e-12);
}

TEST(GroupLasso, ConfigValidation)
{
    GroupLassoConfig cfg;
    cfg.alpha_grid = {1.0, 2.0};
    EXPECT_THROW(cfg.validate(), RangeError);
    cfg.alpha_grid.clear();
    cfg.grid_ratio = 1.5;
    EXPECT_THROW(cfg.validate(), RangeError);
}

TEST(GroupLasso, LipschitzBoundsGradientVariation)
{
    std::mt19937_64 rng(17);
    for (const bool logistic : {false, true}) {
        auto data = logistic ? logistic_data(60, 8, rng) : gaussian_data(60, 8, rng);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const double L = lipschitz_constant(*obj);
        for (int k = 0; k < 50; ++k) {
            const Eigen::VectorXd a = random_vector(8, rng);
            const Eigen::VectorXd b = random_vector(8, rng);
            EXPECT_LE((obj->gradient(a) - obj->gradient(b)).norm(), L * (a - b).norm() * (1 + 1e-9));
        }
    }
}

TEST(Foba, EqualsIgaOnSingletons)
{
    std::mt19937_64 rng(18);
    GaussianObjective obj(gaussian_data(50, 15, rng));
    const auto foba = foba_fit(obj);
    const auto part = GroupPartition::singletons(15);
    const auto iga = run_path(obj, part, IgaConfig{}, SelectionPolicy::greedy());
    EXPECT_EQ(foba.signed_sequence(), iga.signed_sequence());
    ASSERT_FALSE(foba.snapshots.empty());
    EXPECT_EQ(foba.snapshots.back().coefficients, iga.snapshots.back().coefficients);
}
