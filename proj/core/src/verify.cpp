#include "igs/verify.hpp"

#include "igs/error.hpp"
#include "igs/experiments.hpp"
#include "igs/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace igs {

namespace {

const GaussianObjective& as_gaussian(const Objective& objective)
{
    const auto* g = dynamic_cast<const GaussianObjective*>(&objective);
    if (!g) throw FamilyError("restricted eigenvalues are computed exactly only for the gaussian criterion");
    return *g;
}

double binomial(int m, int t)
{
    double c = 1.0;
    for (int k = 1; k <= t; ++k) c = c * (m - t + k) / k;
    return c;
}

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& X, const IndexList& idx)
{
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(idx[k]);
    return out;
}

} // namespace

RhoBounds rho_bounds(const Objective& objective, const GroupPartition& partition, const GroupSet& set)
{
    const auto& gauss = as_gaussian(objective);
    if (set.empty()) throw RangeError("restricted eigenvalues need a nonempty group set");
    const auto G = gauss.gram_block(feature_set(partition, set));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
    return {std::max(0.0, eig.eigenvalues().minCoeff()), eig.eigenvalues().maxCoeff()};
}

RegularityReport phi_bounds(const Objective& objective, const GroupPartition& partition, int t)
{
    as_gaussian(objective);
    if (t < 1) throw RangeError("order t must be at least 1");
    const int m = partition.m();
    const int size = std::min(t, m);
    if (binomial(m, size) > kMaxSubsets) {
        throw CombinatorialBudgetError("C(" + std::to_string(m) + ", " + std::to_string(size) +
                                       ") subsets exceed the enumeration budget");
    }

    RegularityReport rep;
    rep.t = t;
    rep.phi_minus = std::numeric_limits<double>::infinity();
    rep.phi_plus = -std::numeric_limits<double>::infinity();
    std::vector<int> combo(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) combo[static_cast<std::size_t>(k)] = k;
    for (;;) {
        const GroupSet set(combo);
        const auto rb = rho_bounds(objective, partition, set);
        ++rep.subsets_evaluated;
        if (rb.rho_minus < rep.phi_minus) {
            rep.phi_minus = rb.rho_minus;
            rep.argmin_set = set;
        }
        if (rb.rho_plus > rep.phi_plus) {
            rep.phi_plus = rb.rho_plus;
            rep.argmax_set = set;
        }
        // Next combination in lexicographic order.
        int k = size - 1;
        while (k >= 0 && combo[static_cast<std::size_t>(k)] == m - size + k) --k;
        if (k < 0) break;
        ++combo[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < size; ++j) combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    rep.kappa = rep.phi_minus > 0.0 ? rep.phi_plus / rep.phi_minus : std::numeric_limits<double>::infinity();
    return rep;
}

LogisticRegularity logistic_regularity(const SimInstance& instance)
{
    const auto& X = instance.data.X;
    const double n = static_cast<double>(instance.data.n());
    const auto relevant = feature_set(instance.partition, instance.relevant);
    if (relevant.empty()) throw SingularError("no relevant groups");

    const Eigen::VectorXd eta = X * instance.truth;
    Eigen::VectorXd W(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double pi = logistic_sigmoid(eta[i]);
        W[i] = pi * (1.0 - pi);
    }
    const Eigen::MatrixXd XG = columns_of(X, relevant);

    LogisticRegularity out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(XG.transpose() * XG / n, Eigen::EigenvaluesOnly);
    out.U1 = gram.eigenvalues().maxCoeff();

    const Eigen::MatrixXd WXG = W.asDiagonal() * XG;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> weighted(XG.transpose() * WXG / n, Eigen::EigenvaluesOnly);
    const double lo = weighted.eigenvalues().minCoeff();
    const double hi = weighted.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(hi, 1.0))) throw SingularError("X_G' W* X_G is singular");
    out.U2 = 1.0 / lo;

    for (int g = 0; g < instance.partition.m(); ++g) {
        if (instance.relevant.contains(g)) continue;
        const Eigen::MatrixXd cross = columns_of(X, instance.partition.group(g)).transpose() * WXG / n;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
        out.U3 = std::max(out.U3, svd.singularValues()(0));
    }
    return out;
}

SandwichReport gain_sandwich_check(const Objective& objective, const GroupPartition& partition, int trials,
                                   std::uint64_t seed)
{
    const auto& gauss = as_gaussian(objective);
    constexpr double slack = 1e-9;
    CounterRng rng(seed);
    std::normal_distribution<double> normal(0.0, 0.5);
    std::uniform_int_distribution<int> pick(0, partition.m() - 1);

    SandwichReport rep;
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd w(objective.p());
        for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);
        const int g = pick(rng);

        const double gain = objective.forward_gain(w, g, partition);
        const double grad_sq = restrict_to(partition, g, objective.gradient(w)).squaredNorm();
        const auto G = gauss.gram_block(partition.group(g));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
        const double rho_minus = eig.eigenvalues().minCoeff();
        const double rho_plus = eig.eigenvalues().maxCoeff();

        ++rep.trials;
        bool ok = true;
        if (rho_plus > 0.0) {
            const double lower = grad_sq / (2.0 * rho_plus);
            if (gain < lower * (1.0 - slack)) {
                ok = false;
                rep.worst_violation = std::max(rep.worst_violation, (lower - gain) / lower);
            }
        }
        if (rho_minus > 1e-12 * std::max(rho_plus, 1.0)) {
            const double upper = grad_sq / (2.0 * rho_minus);
            if (gain > upper * (1.0 + slack)) {
                ok = false;
                rep.worst_violation = std::max(rep.worst_violation, (gain - upper) / upper);
            }
        } else {
            ++rep.upper_skipped;
        }
        if (ok) ++rep.passed;
    }
    return rep;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DimensionError("slope needs two or more paired points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw RangeError("slope undefined for a constant regressor");
    return sxy / sxx;
}

ScalingReport scaling_experiment(Family family, const std::vector<int>& n_grid, int replications,
                                 std::uint64_t seed, const ScalingOptions& options)
{
    if (replications < 1) throw RangeError("replications must be positive");
    if (n_grid.size() < 2) throw RangeError("need at least two sample sizes");
    HarnessOptions harness;
    harness.folds = options.folds;
    harness.jobs = options.jobs;
    harness.k_max = options.k_max;
    harness.observer = options.observer;

    ScalingReport rep;
    rep.high_variance = replications < 2;
    std::vector<double> log_n;
    std::vector<double> log_err;
    for (int n : n_grid) {
        ScalingPoint point;
        point.n = n;
        int recovered = 0;
        for (int r = 0; r < replications; ++r) {
            SimSpec spec;
            spec.sim_case = family == Family::gaussian ? SimCase::case1 : SimCase::case2;
            spec.n = n;
            spec.kbar = options.kbar;
            spec.beta = options.beta;
            spec.seed = child_seed(seed, static_cast<std::uint64_t>(n) * 1000003ULL + static_cast<std::uint64_t>(r));
            const auto instance = generate(spec);
            const auto fit = fit_method(instance, family, Method::iga, harness, spec.seed);
            point.squared_errors.push_back((fit.estimate - instance.truth).squaredNorm());
            if (nonzero_groups(fit.estimate, instance.partition) == instance.relevant) ++recovered;
        }
        double total = 0.0;
        for (double e : point.squared_errors) total += e;
        point.mean_squared_error = total / replications;
        point.recovery_rate = static_cast<double>(recovered) / replications;
        log_n.push_back(std::log(static_cast<double>(n)));
        log_err.push_back(std::log(point.mean_squared_error));
        rep.points.push_back(std::move(point));
    }
    rep.slope = ols_slope(log_n, log_err);
    return rep;
}

} // namespace igs
