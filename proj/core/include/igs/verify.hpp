#pragma once

#include "igs/criterion.hpp"
#include "igs/groups.hpp"
#include "igs/modelselect.hpp"
#include "igs/simgen.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace igs {

struct RhoBounds
{
    double rho_minus = 0.0;
    double rho_plus = 0.0;
};

/// Extreme eigenvalues of (1/n) X_{F_S}' X_{F_S}. Gaussian objectives only (FamilyError otherwise).
RhoBounds rho_bounds(const Objective& objective, const GroupPartition& partition, const GroupSet& set);

struct RegularityReport
{
    int t = 0;
    double phi_minus = 0.0;
    double phi_plus = 0.0;
    /// phi_plus / phi_minus; +inf when phi_minus is 0.
    double kappa = 0.0;
    GroupSet argmin_set;
    GroupSet argmax_set;
    bool exact = true;
    long subsets_evaluated = 0;
};

/// Largest number of subsets phi_bounds will enumerate.
inline constexpr double kMaxSubsets = 1e6;

/**
 * phi_-(t) = inf rho_-(F_S) and phi_+(t) = sup rho_+(F_S) over |S| <= t.
 * By eigenvalue interlacing both extremes are attained at |S| = min(t, m), so
 * only subsets of that size are enumerated. Throws CombinatorialBudgetError
 * when C(m, t) exceeds kMaxSubsets.
 */
RegularityReport phi_bounds(const Objective& objective, const GroupPartition& partition, int t);

struct LogisticRegularity
{
    double U1 = 0.0;
    double U2 = 0.0;
    double U3 = 0.0;
};

/**
 * U1 = ||(1/n) X_G'X_G||, U2 = ||((1/n) X_G' W* X_G)^{-1}||,
 * U3 = max_{g outside G} ||(1/n) X_g' W* X_G|| with W* = diag(p_i (1 - p_i)) at
 * the truth and G the relevant groups. Throws SingularError.
 */
LogisticRegularity logistic_regularity(const SimInstance& instance);

struct SandwichReport
{
    int trials = 0;
    int passed = 0;
    int upper_skipped = 0;
    /// Largest relative violation seen (<= 0 when all pass).
    double worst_violation = 0.0;
    bool ok() const { return passed == trials; }
};

/**
 * Checks ||grad_g||^2 / (2 rho_+(g)) <= gain_g <= ||grad_g||^2 / (2 rho_-(g)) at
 * `trials` random (w, g) pairs drawn from `seed`, relative slack 1e-9. The
 * upper bound is skipped for rank-deficient groups.
 */
SandwichReport gain_sandwich_check(const Objective& objective, const GroupPartition& partition, int trials,
                                   std::uint64_t seed);

struct ScalingPoint
{
    int n = 0;
    double mean_squared_error = 0.0;
    double recovery_rate = 0.0;
    std::vector<double> squared_errors;
};

struct ScalingReport
{
    std::vector<ScalingPoint> points;
    /// Least-squares slope of log(mean error^2) on log n.
    double slope = 0.0;
    /// Set when a grid point has a single replication.
    bool high_variance = false;
};

struct ScalingOptions
{
    int kbar = 5;
    double beta = 1.0;
    int folds = 10;
    int jobs = 1;
    /// Active-group cap for every path (0 = engine default).
    int k_max = 0;
    /// Sees every selection path computed (fold paths and final refits).
    PathObserver observer;
};

/// Case 1 / case 2 error scaling for cross-validated IGA (lambda = 1, greedy).
ScalingReport scaling_experiment(Family family, const std::vector<int>& n_grid, int replications,
                                 std::uint64_t seed, const ScalingOptions& options = {});

/// Least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace igs
