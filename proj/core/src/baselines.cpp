#include "igs/baselines.hpp"

#include "igs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace igs {

namespace {

// Q as a function of the linear predictor eta = Xw.
struct MarginLoss
{
    Family family;
    const Eigen::VectorXd& y;

    double value(const Eigen::VectorXd& eta) const
    {
        const double n = static_cast<double>(y.size());
        if (family == Family::gaussian) return (y - eta).squaredNorm() / (2.0 * n);
        double total = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) total += softplus(-y[i] * eta[i]);
        return total / n;
    }

    // dQ / d eta
    Eigen::VectorXd derivative(const Eigen::VectorXd& eta) const
    {
        const double n = static_cast<double>(y.size());
        if (family == Family::gaussian) return (eta - y) / n;
        Eigen::VectorXd h(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) h[i] = -y[i] * logistic_sigmoid(-y[i] * eta[i]) / n;
        return h;
    }
};

double group_l1(const Eigen::VectorXd& w, const GroupPartition& partition)
{
    return group_norms(w, partition).l2_1;
}

} // namespace

void GroupLassoConfig::validate() const
{
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
        if (!(alpha_grid[k] >= 0.0)) throw RangeError("alpha grid values must be non-negative");
        if (k > 0 && !(alpha_grid[k] < alpha_grid[k - 1])) throw RangeError("alpha grid must be strictly decreasing");
    }
    if (alpha_grid.empty() && (grid_length < 1 || !(grid_ratio > 0.0 && grid_ratio < 1.0))) {
        throw RangeError("default grid needs length >= 1 and ratio in (0, 1)");
    }
    if (!(fista_tolerance > 0.0) || !(kkt_tolerance > 0.0)) throw RangeError("tolerances must be positive");
    if (max_iterations < 1) throw RangeError("max_iterations must be positive");
}

Eigen::VectorXd prox_group(const Eigen::VectorXd& z, double tau, const GroupPartition& partition)
{
    if (z.size() != partition.p()) throw DimensionError("vector length does not match partition");
    if (!(tau > 0.0)) throw RangeError("prox threshold must be positive");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
    for (int g = 0; g < partition.m(); ++g) {
        const auto& idx = partition.group(g);
        double sq = 0.0;
        for (int j : idx) sq += z[j] * z[j];
        const double norm = std::sqrt(sq);
        if (norm <= tau) continue;
        const double scale = 1.0 - tau / norm;
        for (int j : idx) out[j] = scale * z[j];
    }
    return out;
}

double alpha_max(const Objective& objective, const GroupPartition& partition)
{
    const Eigen::VectorXd grad = objective.gradient(Eigen::VectorXd::Zero(objective.p()));
    return group_norms(grad, partition).l2_inf;
}

std::vector<double> default_alpha_grid(double amax, int length, double ratio)
{
    std::vector<double> grid;
    if (!(amax > 0.0)) return {0.0};
    grid.reserve(static_cast<std::size_t>(length));
    if (length == 1) return {amax};
    const double step = std::log(ratio) / static_cast<double>(length - 1);
    for (int k = 0; k < length; ++k) grid.push_back(amax * std::exp(step * k));
    grid.front() = amax;
    return grid;
}

namespace {

double top_eigenvalue(const Eigen::MatrixXd& X)
{
    const double n = static_cast<double>(X.rows());
    Eigen::VectorXd v = Eigen::VectorXd::Ones(X.cols()).normalized();
    double eig = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd u = X.transpose() * (X * v) / n;
        const double next = v.dot(u);
        const double norm = u.norm();
        if (norm == 0.0) return 0.0;
        v = u / norm;
        const bool done = std::abs(next - eig) <= 1e-8 * std::abs(next);
        eig = next;
        if (done) break;
    }
    return eig;
}

// Largest per-group optimality violation given the gradient.
double kkt_from_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& w, const GroupPartition& partition,
                         double alpha)
{
    double worst = 0.0;
    for (int g = 0; g < partition.m(); ++g) {
        double wn = 0.0;
        double gn = 0.0;
        for (int j : partition.group(g)) {
            wn += w[j] * w[j];
            gn += grad[j] * grad[j];
        }
        wn = std::sqrt(wn);
        double r = 0.0;
        if (wn > 0.0) {
            double sq = 0.0;
            for (int j : partition.group(g)) {
                const double d = grad[j] + alpha * w[j] / wn;
                sq += d * d;
            }
            r = std::sqrt(sq);
        } else {
            r = std::max(0.0, std::sqrt(gn) - alpha);
        }
        worst = std::max(worst, r);
    }
    return worst;
}

// X x, skipping zero coefficients.
Eigen::VectorXd times_sparse(const Eigen::MatrixXd& X, const Eigen::VectorXd& x)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0) out.noalias() += x[j] * X.col(j);
    }
    return out;
}

struct FistaResult
{
    Eigen::VectorXd x;
    double F = 0.0;
    int iterations = 0;
};

// FISTA with restart on a (possibly column-restricted) design.
FistaResult fista(const Eigen::MatrixXd& X, const MarginLoss& loss, const GroupPartition& partition, double alpha,
                  Eigen::VectorXd x, double L, const GroupLassoConfig& config)
{
    FistaResult out;
    Eigen::VectorXd eta_x = times_sparse(X, x);
    double F = loss.value(eta_x) + alpha * group_l1(x, partition);
    Eigen::VectorXd y_pt = x;
    Eigen::VectorXd eta_y = eta_x;
    double t = 1.0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        out.iterations = it;
        const Eigen::VectorXd grad = X.transpose() * loss.derivative(eta_y);
        const Eigen::VectorXd z = y_pt - grad / L;
        Eigen::VectorXd x_new = alpha > 0.0 ? prox_group(z, alpha / L, partition) : z;
        Eigen::VectorXd eta_new = times_sparse(X, x_new);
        const double F_new = loss.value(eta_new) + alpha * group_l1(x_new, partition);

        if (F_new > F) {
            // Momentum overshoot: restart from the last accepted iterate.
            if (t == 1.0) {
                // A plain proximal step failed to descend: either round-off at the
                // optimum or a step constant that is too small.
                if (F_new - F <= 1e-12 * std::max(1.0, std::abs(F))) break;
                L *= 2.0;
            }
            t = 1.0;
            y_pt = x;
            eta_y = eta_x;
            continue;
        }
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_new;
        y_pt = x_new + beta * (x_new - x);
        eta_y = eta_new + beta * (eta_new - eta_x);
        const double change = std::abs(F - F_new);
        x = std::move(x_new);
        eta_x = std::move(eta_new);
        F = F_new;
        t = t_new;

        if (change <= config.fista_tolerance * std::max(std::abs(F), 1e-300) && it % 5 == 0) {
            const Eigen::VectorXd g = X.transpose() * loss.derivative(eta_x);
            if (kkt_from_gradient(g, x, partition, alpha) <= config.kkt_tolerance) break;
        }
    }
    out.x = std::move(x);
    out.F = F;
    return out;
}

} // namespace

double kkt_residual(const Objective& objective, const GroupPartition& partition, const Eigen::VectorXd& w,
                    double alpha)
{
    return kkt_from_gradient(objective.gradient(w), w, partition, alpha);
}

double lipschitz_constant(const Objective& objective)
{
    const double curvature = objective.family() == Family::logistic ? 0.25 : 1.0;
    return 1.01 * curvature * top_eigenvalue(objective.data().X);
}

GroupLassoFit group_lasso_fit(const Objective& objective, const GroupPartition& partition, double alpha,
                              const Eigen::VectorXd* warm_start, const GroupLassoConfig& config, double lipschitz)
{
    if (!(alpha >= 0.0)) throw RangeError("alpha must be non-negative");
    if (partition.p() != objective.p()) throw DimensionError("partition and dataset disagree on p");
    if (warm_start && warm_start->size() != objective.p()) throw DimensionError("warm start has wrong length");

    const MarginLoss loss{objective.family(), objective.data().y};
    const double L = lipschitz > 0.0 ? lipschitz : lipschitz_constant(objective);

    GroupLassoFit fit;
    if (!(L > 0.0)) {
        // Zero design: Q is constant, the penalty alone is minimized at 0.
        fit.w = Eigen::VectorXd::Zero(objective.p());
    } else {
        Eigen::VectorXd x0 = warm_start ? *warm_start : Eigen::VectorXd::Zero(objective.p());
        if (kkt_residual(objective, partition, x0, alpha) <= config.kkt_tolerance) {
            fit.w = std::move(x0);
        } else {
            auto res = fista(objective.data().X, loss, partition, alpha, std::move(x0), L, config);
            fit.w = std::move(res.x);
            fit.iterations = res.iterations;
        }
    }
    fit.objective = objective.value(fit.w) + alpha * group_l1(fit.w, partition);
    fit.kkt_residual = kkt_residual(objective, partition, fit.w, alpha);
    fit.converged = fit.kkt_residual <= config.kkt_tolerance;
    return fit;
}

LassoPathResult group_lasso_path(const Objective& objective, const GroupPartition& partition,
                                 const GroupLassoConfig& config)
{
    config.validate();
    LassoPathResult out;
    out.alphas = config.alpha_grid.empty()
                     ? default_alpha_grid(alpha_max(objective, partition), config.grid_length, config.grid_ratio)
                     : config.alpha_grid;
    const double L = lipschitz_constant(objective);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(objective.p());
    for (double alpha : out.alphas) {
        auto fit = group_lasso_fit(objective, partition, alpha, &warm, config, L);
        warm = fit.w;
        out.active.push_back(nonzero_groups(fit.w, partition, config.active_threshold));
        out.iterations.push_back(fit.iterations);
        out.kkt_residuals.push_back(fit.kkt_residual);
        out.converged.push_back(fit.converged);
        out.coefficients.push_back(std::move(fit.w));
    }
    return out;
}

SelectionPath foba_fit(const Objective& objective, IgaConfig config)
{
    const auto singletons = GroupPartition::singletons(objective.p());
    config.lambda = 1.0;
    return run_path(objective, singletons, config, SelectionPolicy::greedy());
}

} // namespace igs
