#include "igs/modelselect.hpp"

#include "igs/error.hpp"
#include "igs/parallel.hpp"
#include "igs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

namespace igs {

namespace {

struct FoldData
{
    std::shared_ptr<const Dataset> train;
    Dataset validation;
};

std::vector<FoldData> prepare_folds(const Dataset& data, const CvPlan& plan)
{
    std::vector<FoldData> out;
    out.reserve(plan.folds.size());
    for (const auto& fold : plan.folds) {
        std::vector<bool> held(static_cast<std::size_t>(data.n()), false);
        for (int i : fold) held[static_cast<std::size_t>(i)] = true;
        std::vector<int> train_rows;
        for (int i = 0; i < data.n(); ++i) {
            if (!held[static_cast<std::size_t>(i)]) train_rows.push_back(i);
        }
        const Dataset train_raw = subset_rows(data, train_rows);
        auto train = std::make_shared<const Dataset>(standardize(train_raw));
        // column_scales of `train` compose the incoming scales with the fold's own.
        const Eigen::VectorXd fold_scales = train->column_scales.cwiseQuotient(data.column_scales);
        out.push_back({train, apply_scales(subset_rows(data, fold), fold_scales)});
    }
    return out;
}

} // namespace

std::string_view to_string(LossKind kind)
{
    return kind == LossKind::mse ? "mse" : "nll";
}

LossKind loss_for(Family family)
{
    return family == Family::gaussian ? LossKind::mse : LossKind::nll;
}

std::vector<std::vector<int>> kfold_split(int n, int K, std::uint64_t seed)
{
    if (K < 2 || K > n) throw RangeError("fold count must satisfy 2 <= K <= n");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng rng(child_seed(seed, streams::folds));
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
    }
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(K));
    const int base = n / K;
    const int extra = n % K;
    std::size_t pos = 0;
    for (int k = 0; k < K; ++k) {
        const int size = base + (k < extra ? 1 : 0);
        auto& fold = folds[static_cast<std::size_t>(k)];
        fold.assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(size)));
        std::sort(fold.begin(), fold.end());
        pos += static_cast<std::size_t>(size);
    }
    return folds;
}

CvPlan CvPlan::make(int n, int K, std::uint64_t seed, LossKind loss, std::vector<double> lambda_grid)
{
    CvPlan plan;
    plan.n = n;
    plan.folds = kfold_split(n, K, seed);
    plan.seed = seed;
    plan.loss = loss;
    plan.lambda_grid = std::move(lambda_grid);
    return plan;
}

void CvPlan::validate() const
{
    if (folds.size() < 2) throw RangeError("need at least two folds");
    std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
    std::size_t lo = folds.front().size();
    std::size_t hi = lo;
    for (const auto& fold : folds) {
        lo = std::min(lo, fold.size());
        hi = std::max(hi, fold.size());
        for (int i : fold) {
            if (i < 0 || i >= n) throw RangeError("fold index out of range");
            if (seen[static_cast<std::size_t>(i)]++) throw RangeError("folds overlap");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw RangeError("folds do not cover every row");
    if (hi - lo > 1) throw RangeError("fold sizes differ by more than one");
    if (lambda_grid.empty()) throw RangeError("lambda grid is empty");
    for (double l : lambda_grid) {
        if (!(l > 0.0 && l <= 1.0)) throw RangeError("lambda grid values must lie in (0, 1]");
    }
}

double cv_loss(const Eigen::VectorXd& w, const Dataset& rows, LossKind kind)
{
    if (w.size() != rows.p()) throw DimensionError("coefficient length does not match validation rows");
    if (rows.n() == 0) throw DimensionError("no validation rows");
    const Eigen::VectorXd eta = rows.X * w;
    if (kind == LossKind::mse) return (rows.y - eta).squaredNorm() / rows.n();
    double total = 0.0;
    for (int i = 0; i < rows.n(); ++i) total += softplus(-rows.y[i] * eta[i]);
    return total / rows.n();
}

CvResult cv_select(const Dataset& data, const GroupPartition& partition, Family family, const IgaConfig& config,
                   const CvPlan& plan, const SelectionPolicy& policy, const CvOptions& options)
{
    plan.validate();
    config.validate();
    if (plan.n != data.n()) throw DimensionError("plan and dataset disagree on n");
    if (partition.p() != data.p()) throw DimensionError("partition and dataset disagree on p");

    const auto folds = prepare_folds(data, plan);
    const std::size_t L = plan.lambda_grid.size();
    const std::size_t K = folds.size();
    std::vector<std::vector<double>> losses(L * K);
    std::mutex observer_mutex;

    parallel_for(L * K, options.jobs, [&](std::size_t task) {
        const std::size_t l = task / K;
        const auto& fold = folds[task % K];
        IgaConfig cfg = config;
        cfg.lambda = plan.lambda_grid[l];
        const auto objective = make_objective(family, fold.train);
        const auto path = run_path(*objective, partition, cfg, policy);
        if (options.observer) {
            std::lock_guard lock(observer_mutex);
            options.observer(path, *objective, partition, cfg);
        }
        auto& out = losses[task];
        out.push_back(cv_loss(Eigen::VectorXd::Zero(data.p()), fold.validation, plan.loss));
        for (const auto& snap : path.snapshots) out.push_back(cv_loss(snap.coefficients, fold.validation, plan.loss));
    });

    CvResult result;
    result.lambdas = plan.lambda_grid;
    result.mean_loss.resize(L);
    bool have_best = false;
    for (std::size_t l = 0; l < L; ++l) {
        std::size_t longest = 0;
        for (std::size_t k = 0; k < K; ++k) longest = std::max(longest, losses[l * K + k].size());
        auto& row = result.mean_loss[l];
        row.assign(longest, 0.0);
        for (std::size_t t = 0; t < longest; ++t) {
            double total = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const auto& f = losses[l * K + k];
                total += f[std::min(t, f.size() - 1)];
            }
            row[t] = total / static_cast<double>(K);
        }
        for (std::size_t t = 0; t < longest; ++t) {
            const double lam = plan.lambda_grid[l];
            const int ti = static_cast<int>(t);
            const bool better = !have_best || row[t] < result.best_loss ||
                                (row[t] == result.best_loss &&
                                 (ti < result.best_iteration || (ti == result.best_iteration && lam > result.best_lambda)));
            if (better) {
                have_best = true;
                result.best_loss = row[t];
                result.best_iteration = ti;
                result.best_lambda = lam;
            }
        }
    }

    auto full = std::make_shared<const Dataset>(standardize(data));
    const Eigen::VectorXd scales = full->column_scales.cwiseQuotient(data.column_scales);
    const auto objective = make_objective(family, full);
    IgaConfig cfg = config;
    cfg.lambda = result.best_lambda;
    result.path = run_path(*objective, partition, cfg, policy);
    if (options.observer) options.observer(result.path, *objective, partition, cfg);
    const int t = std::min(result.best_iteration, static_cast<int>(result.path.snapshots.size()));
    result.model = state_at_iteration(result.path, t, *objective, partition);
    result.model.coefficients = to_raw_coefficients(result.model.coefficients, scales);
    result.scales = scales;
    return result;
}

GroupLassoCvResult cv_group_lasso(const Dataset& data, const GroupPartition& partition, Family family,
                                  const GroupLassoConfig& config, const CvPlan& plan, int jobs)
{
    plan.validate();
    config.validate();
    if (plan.n != data.n()) throw DimensionError("plan and dataset disagree on n");

    auto full = std::make_shared<const Dataset>(standardize(data));
    const auto full_objective = make_objective(family, full);
    GroupLassoConfig cfg = config;
    if (cfg.alpha_grid.empty()) {
        cfg.alpha_grid = default_alpha_grid(alpha_max(*full_objective, partition), cfg.grid_length, cfg.grid_ratio);
    }

    const auto folds = prepare_folds(data, plan);
    std::vector<std::vector<double>> losses(folds.size());
    parallel_for(folds.size(), jobs, [&](std::size_t k) {
        const auto objective = make_objective(family, folds[k].train);
        const auto path = group_lasso_path(*objective, partition, cfg);
        for (const auto& w : path.coefficients) losses[k].push_back(cv_loss(w, folds[k].validation, plan.loss));
    });

    GroupLassoCvResult result;
    result.alphas = cfg.alpha_grid;
    result.mean_loss.assign(cfg.alpha_grid.size(), 0.0);
    for (std::size_t a = 0; a < cfg.alpha_grid.size(); ++a) {
        for (const auto& f : losses) result.mean_loss[a] += f[a];
        result.mean_loss[a] /= static_cast<double>(losses.size());
        if (result.mean_loss[a] < result.mean_loss[result.best_index]) result.best_index = a;
    }
    result.best_alpha = cfg.alpha_grid[result.best_index];

    // The full-data path only needs to reach the chosen penalty.
    GroupLassoConfig final_cfg = cfg;
    final_cfg.alpha_grid.resize(result.best_index + 1);
    result.path = group_lasso_path(*full_objective, partition, final_cfg);
    result.scales = full->column_scales.cwiseQuotient(data.column_scales);
    result.coefficients = to_raw_coefficients(result.path.coefficients.back(), result.scales);
    return result;
}

} // namespace igs
