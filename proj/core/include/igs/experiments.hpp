#pragma once

#include "igs/baselines.hpp"
#include "igs/metrics.hpp"
#include "igs/modelselect.hpp"
#include "igs/simgen.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace igs {

enum class Method { iga, iga_lambda, group_lasso, foba };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Settings shared by every method of the simulation pipeline.
struct HarnessOptions
{
    int folds = 10;
    int jobs = 1;
    /// Active-group cap for IGA paths; 0 = engine default min(m, n / q).
    int k_max = 0;
    /// Active-feature cap for FoBa paths; 0 = engine default min(p, n).
    int foba_k_max = 0;
    std::vector<double> lambda_grid{0.2, 0.4, 0.6, 0.8, 1.0};
    GroupLassoConfig group_lasso;
    /// Observes every IGA / FoBa path computed (fold paths and final refits).
    PathObserver observer;
};

struct MethodFit
{
    Method method = Method::iga;
    /// Raw column units.
    Eigen::VectorXd estimate;
    double zero_threshold = 0.0;
    double lambda = 1.0;
    int iteration = 0;
    double alpha = 0.0;
    GroupSet priority;
};

/// Cross-validated fit of one method on a simulated instance.
MethodFit fit_method(const SimInstance& instance, Family family, Method method, const HarnessOptions& options,
                     std::uint64_t seed);

struct CellSpec
{
    double beta = 1.0;
    int kbar = 5;
    int n = 300;
};

/// Parses "beta=1,kbar=5[,n=300]".
CellSpec parse_cell(std::string_view text);

struct BenchRow
{
    Method method = Method::iga;
    std::vector<EvalReport> reports;
    ReplicationSummary summary;
};

struct BenchResult
{
    int table = 2;
    CellSpec cell;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<BenchRow> rows;
};

/// Generate -> fit each method with CV -> evaluate -> summarize, `reps` times.
/// table 2 = case 1 (gaussian), table 3 = case 2 (logistic).
BenchResult bench_table(int table, const CellSpec& cell, int reps, std::uint64_t seed,
                        const std::vector<Method>& methods, const HarnessOptions& options);

/// Plain-text layout: one block per metric, one row per method, "mean (se)".
std::string format_bench_table(const BenchResult& result);

} // namespace igs
