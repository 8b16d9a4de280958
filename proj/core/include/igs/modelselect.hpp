#pragma once

#include "igs/baselines.hpp"
#include "igs/criterion.hpp"
#include "igs/dataset.hpp"
#include "igs/groups.hpp"
#include "igs/iga.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace igs {

enum class LossKind { mse, nll };

std::string_view to_string(LossKind kind);
LossKind loss_for(Family family);

/// Seeded shuffle of {0, ..., n-1} cut into K contiguous blocks whose sizes differ by at most one.
std::vector<std::vector<int>> kfold_split(int n, int K, std::uint64_t seed);

struct CvPlan
{
    int n = 0;
    std::vector<std::vector<int>> folds;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid{0.2, 0.4, 0.6, 0.8, 1.0};
    LossKind loss = LossKind::mse;

    static CvPlan make(int n, int K, std::uint64_t seed, LossKind loss,
                       std::vector<double> lambda_grid = {0.2, 0.4, 0.6, 0.8, 1.0});
    /// Throws RangeError unless the folds partition {0, ..., n-1} with sizes within one.
    void validate() const;
};

/// mse: mean squared residual; nll: mean log(1 + exp(-y x'w)).
double cv_loss(const Eigen::VectorXd& w, const Dataset& rows, LossKind kind);

/// Called for every path run (each fold and the final refit) with the objective
/// the path was computed on and the configuration used.
using PathObserver = std::function<void(const SelectionPath&, const Objective&, const GroupPartition&, const IgaConfig&)>;

struct CvOptions
{
    int jobs = 1;
    PathObserver observer;
};

struct CvResult
{
    std::vector<double> lambdas;
    /// mean_loss[l][t]: validation loss averaged over folds at lambda l, iteration t.
    std::vector<std::vector<double>> mean_loss;
    double best_lambda = 1.0;
    int best_iteration = 0;
    double best_loss = 0.0;
    /// Final model in raw column units.
    FittedModel model;
    /// Path on the full standardized data at best_lambda.
    SelectionPath path;
    Eigen::VectorXd scales;
};

/**
 * Cross-validates (lambda, t): for each lambda and fold, runs the path on the
 * standardized training rows and scores every snapshot on the validation rows.
 * Shorter fold paths are padded with their final loss. Ties prefer smaller t,
 * then larger lambda.
 */
CvResult cv_select(const Dataset& data, const GroupPartition& partition, Family family, const IgaConfig& config,
                   const CvPlan& plan, const SelectionPolicy& policy, const CvOptions& options = {});

struct GroupLassoCvResult
{
    std::vector<double> alphas;
    std::vector<double> mean_loss;
    double best_alpha = 0.0;
    std::size_t best_index = 0;
    /// Raw column units.
    Eigen::VectorXd coefficients;
    LassoPathResult path;
    Eigen::VectorXd scales;
};

/// Ten-fold (per plan) selection of the group lasso penalty on a grid derived from the full data.
GroupLassoCvResult cv_group_lasso(const Dataset& data, const GroupPartition& partition, Family family,
                                  const GroupLassoConfig& config, const CvPlan& plan, int jobs = 1);

} // namespace igs
