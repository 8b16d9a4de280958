#include "igs/simgen.hpp"

#include "igs/criterion.hpp"
#include "igs/error.hpp"
#include "igs/rng.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace igs {

namespace {

Eigen::MatrixXd ar1_design(int n, int p, double rho, std::uint64_t seed)
{
    CounterRng rng(child_seed(seed, streams::design));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i) {
        double prev = normal(rng);
        X(i, 0) = prev;
        for (int j = 1; j < p; ++j) {
            prev = rho * prev + innovation * normal(rng);
            X(i, j) = prev;
        }
    }
    return X;
}

struct Truth
{
    Eigen::VectorXd w;
    GroupSet relevant;
};

Truth draw_truth(const SimSpec& spec, const GroupPartition& partition)
{
    CounterRng rng(child_seed(spec.seed, streams::coefficients));
    std::uniform_real_distribution<double> unif(-spec.beta, spec.beta);
    Truth t;
    t.w = Eigen::VectorXd::Zero(spec.p);
    std::vector<int> relevant;
    for (int k = 0; k < spec.kbar; ++k) relevant.push_back(2 * k);
    t.relevant = GroupSet(relevant);
    if (spec.beta == 0.0) return t;
    for (int g : relevant) {
        double norm = 0.0;
        while (!(norm > 0.0)) {
            norm = 0.0;
            for (int j : partition.group(g)) {
                t.w[j] = unif(rng);
                norm += t.w[j] * t.w[j];
            }
        }
    }
    return t;
}

} // namespace

std::string_view to_string(SimCase c)
{
    switch (c) {
    case SimCase::case1:
        return "case1";
    case SimCase::case2:
        return "case2";
    case SimCase::heuristic:
        return "heuristic";
    }
    return "case1";
}

SimCase parse_sim_case(std::string_view name)
{
    if (name == "1" || name == "case1") return SimCase::case1;
    if (name == "2" || name == "case2") return SimCase::case2;
    if (name == "heuristic") return SimCase::heuristic;
    throw FormatError("unknown simulation case '" + std::string(name) + "'");
}

void SimSpec::validate() const
{
    if (sim_case == SimCase::heuristic) {
        if (n < 10) throw RangeError("heuristic example needs n >= 10");
        return;
    }
    if (n < 1 || p < 1 || m < 1 || q < 1) throw RangeError("n, p, m, q must be positive");
    if (p != m * q) throw RangeError("p must equal m * q");
    if (kbar < 0 || 2 * kbar > m + 1) throw RangeError("relevant groups {1, 3, ..., 2 kbar - 1} must fit in m");
    if (!(beta >= 0.0)) throw RangeError("beta must be non-negative");
    if (!(std::abs(rho) < 1.0)) throw RangeError("|rho| must be below 1");
    if (!(noise_variance >= 0.0)) throw RangeError("noise variance must be non-negative");
}

Eigen::MatrixXd ar1_cholesky(int p, double rho)
{
    if (p < 1) throw RangeError("p must be positive");
    if (!(std::abs(rho) < 1.0)) throw RangeError("|rho| must be below 1");
    const double innovation = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        L(i, 0) = std::pow(rho, i);
        for (int j = 1; j <= i; ++j) L(i, j) = std::pow(rho, i - j) * innovation;
    }
    return L;
}

SimInstance gen_case1(const SimSpec& spec)
{
    spec.validate();
    auto partition = GroupPartition::contiguous(spec.p, spec.q);
    Eigen::MatrixXd X = ar1_design(spec.n, spec.p, spec.rho, spec.seed);
    auto truth = draw_truth(spec, partition);

    CounterRng rng(child_seed(spec.seed, streams::noise));
    std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));
    Eigen::VectorXd y = X * truth.w;
    for (int i = 0; i < spec.n; ++i) y[i] += noise(rng);

    SimSpec s = spec;
    s.sim_case = SimCase::case1;
    return {Dataset(std::move(X), std::move(y)), std::move(partition), std::move(truth.w), std::move(truth.relevant),
            s};
}

SimInstance gen_case2(const SimSpec& spec)
{
    spec.validate();
    auto partition = GroupPartition::contiguous(spec.p, spec.q);
    Eigen::MatrixXd X = ar1_design(spec.n, spec.p, spec.rho, spec.seed);
    auto truth = draw_truth(spec, partition);

    CounterRng rng(child_seed(spec.seed, streams::response));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::VectorXd eta = X * truth.w;
    Eigen::VectorXd y(spec.n);
    for (int i = 0; i < spec.n; ++i) y[i] = unif(rng) < logistic_sigmoid(eta[i]) ? 1.0 : -1.0;

    SimSpec s = spec;
    s.sim_case = SimCase::case2;
    return {Dataset(std::move(X), std::move(y)), std::move(partition), std::move(truth.w), std::move(truth.relevant),
            s};
}

SimInstance gen_heuristic(int n, std::uint64_t seed)
{
    SimSpec spec;
    spec.sim_case = SimCase::heuristic;
    spec.n = n;
    spec.p = 10;
    spec.m = 5;
    spec.q = 2;
    spec.kbar = 2;
    spec.beta = 1.0;
    spec.rho = 0.0;
    spec.noise_variance = 1.0;
    spec.seed = seed;
    spec.validate();

    CounterRng design(child_seed(seed, streams::design));
    CounterRng noise(child_seed(seed, streams::noise));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double copy_sd = std::sqrt(0.5);

    Eigen::MatrixXd X(n, 10);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j : {0, 1, 2, 3, 6, 7, 8, 9}) X(i, j) = normal(design);
        X(i, 4) = X(i, 0) + X(i, 1) + copy_sd * normal(design);
        X(i, 5) = X(i, 2) + X(i, 3) + copy_sd * normal(design);
        y[i] = X(i, 0) + X(i, 1) + X(i, 2) + X(i, 3) + normal(noise);
    }
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(10);
    truth.head(4).setOnes();
    return {Dataset(std::move(X), std::move(y)), GroupPartition::contiguous(10, 2), std::move(truth), GroupSet({0, 1}),
            spec};
}

SimInstance generate(const SimSpec& spec)
{
    switch (spec.sim_case) {
    case SimCase::case1:
        return gen_case1(spec);
    case SimCase::case2:
        return gen_case2(spec);
    case SimCase::heuristic:
        return gen_heuristic(spec.n, spec.seed);
    }
    return gen_case1(spec);
}

GroupSet make_priority_list(const SimInstance& instance, std::uint64_t seed)
{
    const int kbar = static_cast<int>(instance.relevant.size());
    const int take = (3 * kbar) / 5;
    if (take < 1) throw RangeError("kbar = " + std::to_string(kbar) + " gives an empty priority list");

    std::vector<int> relevant = instance.relevant.members();
    std::vector<int> irrelevant;
    for (int g = 0; g < instance.partition.m(); ++g) {
        if (!instance.relevant.contains(g)) irrelevant.push_back(g);
    }
    if (static_cast<int>(irrelevant.size()) < take) throw RangeError("not enough irrelevant groups");

    CounterRng rng(child_seed(seed, streams::priority));
    auto sample = [&rng](std::vector<int>& pool, int count) {
        // Partial Fisher-Yates.
        std::vector<int> out;
        for (int k = 0; k < count; ++k) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), pool.size() - 1);
            std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
            out.push_back(pool[static_cast<std::size_t>(k)]);
        }
        return out;
    };
    auto chosen = sample(relevant, take);
    const auto wrong = sample(irrelevant, take);
    chosen.insert(chosen.end(), wrong.begin(), wrong.end());
    return GroupSet(std::move(chosen));
}

} // namespace igs
