#pragma once

#include "igs/dataset.hpp"
#include "igs/groups.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string_view>

namespace igs {

enum class SimCase { case1, case2, heuristic };

std::string_view to_string(SimCase c);
SimCase parse_sim_case(std::string_view name);

struct SimSpec
{
    SimCase sim_case = SimCase::case1;
    int n = 300;
    int p = 1000;
    int m = 200;
    int q = 5;
    int kbar = 5;
    double beta = 1.0;
    double rho = 0.5;
    /// Variance of the additive gaussian error (case 1).
    double noise_variance = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimInstance
{
    Dataset data;
    GroupPartition partition;
    Eigen::VectorXd truth;
    GroupSet relevant;
    SimSpec spec;
};

/// Lower-triangular L with L L' = Sigma, Sigma_ij = rho^|i-j|.
Eigen::MatrixXd ar1_cholesky(int p, double rho);

/// Linear model y = X w* + eps, rows of X i.i.d. N(0, Sigma_AR1), relevant groups
/// {0, 2, ..., 2 kbar - 2}, w* entries U(-beta, beta) on relevant groups.
SimInstance gen_case1(const SimSpec& spec);

/// Same design and truth as case 1, y in {-1, +1} with P(y = 1 | x) = sigmoid(x'w*).
SimInstance gen_case2(const SimSpec& spec);

/// Five groups of two features; group 2 (zero-based) is a noisy copy of the sums of groups 0 and 1.
SimInstance gen_heuristic(int n, std::uint64_t seed);

/// Dispatches on spec.sim_case.
SimInstance generate(const SimSpec& spec);

/// floor(3 kbar / 5) relevant and as many irrelevant groups, sampled uniformly.
GroupSet make_priority_list(const SimInstance& instance, std::uint64_t seed);

} // namespace igs
