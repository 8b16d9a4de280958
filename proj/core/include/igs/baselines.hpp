#pragma once

#include "igs/criterion.hpp"
#include "igs/groups.hpp"
#include "igs/iga.hpp"

#include <Eigen/Core>
#include <vector>

namespace igs {

struct GroupLassoConfig
{
    /// Strictly decreasing penalties; empty selects `grid_length` log-spaced
    /// values from alpha_max down to alpha_max * grid_ratio.
    std::vector<double> alpha_grid;
    int grid_length = 100;
    double grid_ratio = 1e-3;
    /// Stop when the relative change of the penalized objective falls below this...
    double fista_tolerance = 1e-7;
    /// ...and the KKT residual is below this.
    double kkt_tolerance = 1e-7;
    int max_iterations = 5000;
    /// Group-norm threshold for counting a group as active.
    double active_threshold = 1e-10;

    void validate() const;
};

struct GroupLassoFit
{
    Eigen::VectorXd w;
    double objective = 0.0;  // Q(w) + alpha * ||w||_{G,1}
    int iterations = 0;
    double kkt_residual = 0.0;
    bool converged = true;
};

struct LassoPathResult
{
    std::vector<double> alphas;
    std::vector<Eigen::VectorXd> coefficients;
    std::vector<GroupSet> active;
    std::vector<int> iterations;
    std::vector<double> kkt_residuals;
    std::vector<bool> converged;
};

/// Block soft-thresholding: z_g * max(0, 1 - tau / ||z_g||).
Eigen::VectorXd prox_group(const Eigen::VectorXd& z, double tau, const GroupPartition& partition);

/// Smallest penalty with an all-zero solution: max_g ||grad_g Q(0)||.
double alpha_max(const Objective& objective, const GroupPartition& partition);

/// Log-spaced grid from alpha_max down to alpha_max * ratio.
std::vector<double> default_alpha_grid(double alpha_max, int length, double ratio);

/// Step-size constant for proximal gradient: power-iteration estimate of the
/// top eigenvalue of X'X/n times 1.01 (times 1/4 for the logistic family).
double lipschitz_constant(const Objective& objective);

/// Accelerated proximal gradient (FISTA with restart on objective increase).
/// `lipschitz` = 0 estimates the step constant with lipschitz_constant().
GroupLassoFit group_lasso_fit(const Objective& objective, const GroupPartition& partition, double alpha,
                              const Eigen::VectorXd* warm_start, const GroupLassoConfig& config,
                              double lipschitz = 0.0);

/// Fits in decreasing-alpha order with warm starts.
LassoPathResult group_lasso_path(const Objective& objective, const GroupPartition& partition,
                                 const GroupLassoConfig& config);

/// Max over groups of the optimality violation for the penalized problem.
double kkt_residual(const Objective& objective, const GroupPartition& partition, const Eigen::VectorXd& w,
                    double alpha);

/// Ungrouped forward-backward greedy selection: IGA on the singleton partition,
/// lambda = 1, greedy policy. Group indices in the result are feature indices.
SelectionPath foba_fit(const Objective& objective, IgaConfig config = {});

} // namespace igs
