#include "igs/criterion.hpp"

#include "igs/error.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>
#include <string>

namespace igs {

namespace {

constexpr double kSoftplusBranch = 35.0;
constexpr double kMinRcond = 1e-12;

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& X, const IndexList& cols)
{
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(cols[k]);
    return out;
}

// Solves A x = b for symmetric positive semidefinite A, adding ridge * trace(A) * I
// (growing tenfold) whenever the factorization fails or is numerically singular.
Eigen::VectorXd solve_psd(Eigen::MatrixXd A, const Eigen::VectorXd& b, double ridge_scale, bool& ridge_applied)
{
    const auto k = A.rows();
    if (k == 0) return Eigen::VectorXd(0);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) return llt.solve(b);

    const double trace = A.trace();
    double ridge = ridge_scale * (trace > 0.0 ? trace : 1.0);
    for (int attempt = 0; attempt < 30; ++attempt, ridge *= 10.0) {
        Eigen::MatrixXd shifted = A;
        shifted.diagonal().array() += ridge;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success && std::isfinite(llt.rcond()) && llt.rcond() > 0.0) {
            ridge_applied = true;
            return llt.solve(b);
        }
    }
    throw SingularError("matrix could not be regularized");
}

struct NewtonResult
{
    Eigen::VectorXd alpha;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool ridge_applied = false;
    bool converged = false;
    bool capped = false;
};

double mean_logistic_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& eta)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) total += softplus(-y[i] * eta[i]);
    return total / static_cast<double>(y.size());
}

// Damped Newton for min_alpha (1/n) sum_i log(1 + exp(-y_i (offset_i + B_i alpha))) over the
// box ||alpha||_inf <= cap. Coordinates pinned at the box with an outward gradient are frozen for
// the Newton system; steps are projected back onto the box and accepted by an Armijo test along
// the projection arc, falling back to a projected gradient step when the Newton step stalls.
NewtonResult newton_logistic(const Eigen::MatrixXd& B, const Eigen::VectorXd& y, const Eigen::VectorXd& offset,
                             Eigen::VectorXd alpha, const NewtonOptions& opt)
{
    const double n = static_cast<double>(y.size());
    const double cap = opt.coefficient_cap;
    const auto k = alpha.size();
    NewtonResult res;
    alpha = alpha.cwiseMax(-cap).cwiseMin(cap);
    Eigen::VectorXd eta = offset + B * alpha;
    double f = mean_logistic_loss(y, eta);
    Eigen::VectorXd s(y.size());
    Eigen::VectorXd grad;

    auto compute_gradient = [&]() {
        for (Eigen::Index i = 0; i < y.size(); ++i) s[i] = logistic_sigmoid(-y[i] * eta[i]);
        grad = B.transpose() * (-y.cwiseProduct(s)) / n;
    };
    auto pinned = [&](Eigen::Index j) {
        return (alpha[j] >= cap && grad[j] < 0.0) || (alpha[j] <= -cap && grad[j] > 0.0);
    };
    auto projected_gradient = [&]() {
        Eigen::VectorXd pg = grad;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (pinned(j)) pg[j] = 0.0;
        }
        return pg;
    };
    // Armijo search along t -> clip(alpha + t d); updates state on success.
    auto line_search = [&](const Eigen::VectorXd& d) {
        double t = 1.0;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            const Eigen::VectorXd trial = (alpha + t * d).cwiseMax(-cap).cwiseMin(cap);
            const Eigen::VectorXd step = trial - alpha;
            const double decrease = grad.dot(step);
            if (!(decrease < 0.0)) continue;
            const Eigen::VectorXd eta_trial = offset + B * trial;
            const double f_trial = mean_logistic_loss(y, eta_trial);
            if (f_trial <= f + opt.armijo * decrease) {
                alpha = trial;
                eta = eta_trial;
                f = f_trial;
                return true;
            }
        }
        return false;
    };

    compute_gradient();
    Eigen::VectorXd pg = projected_gradient();
    for (;;) {
        if (pg.norm() <= opt.gradient_tolerance) {
            res.converged = true;
            break;
        }
        if (res.iterations >= opt.max_iterations) break;
        ++res.iterations;

        std::vector<Eigen::Index> free;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!pinned(j)) free.push_back(j);
        }
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd Bf(B.rows(), nf);
        Eigen::VectorXd gf(nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
            Bf.col(a) = B.col(free[static_cast<std::size_t>(a)]);
            gf[a] = grad[free[static_cast<std::size_t>(a)]];
        }
        const Eigen::VectorXd v = s.cwiseProduct(Eigen::VectorXd::Ones(s.size()) - s);
        const Eigen::MatrixXd H = Bf.transpose() * v.asDiagonal() * Bf / n;
        const Eigen::VectorXd df = -solve_psd(H, gf, opt.ridge_scale, res.ridge_applied);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(k);
        for (Eigen::Index a = 0; a < nf; ++a) d[free[static_cast<std::size_t>(a)]] = df[a];

        if (!line_search(d) && !line_search(-pg)) break;
        compute_gradient();
        pg = projected_gradient();
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        if (std::abs(alpha[j]) >= cap) res.capped = true;
    }
    res.alpha = std::move(alpha);
    res.value = f;
    res.gradient_norm = pg.norm();
    return res;
}

} // namespace

std::string_view to_string(Family family)
{
    return family == Family::gaussian ? "gaussian" : "logistic";
}

Family parse_family(std::string_view name)
{
    if (name == "gaussian") return Family::gaussian;
    if (name == "logistic") return Family::logistic;
    throw FormatError("unknown family '" + std::string(name) + "'");
}

double softplus(double z)
{
    if (z > kSoftplusBranch) return z;
    if (z < -kSoftplusBranch) return std::exp(z);
    return std::log1p(std::exp(z));
}

double logistic_sigmoid(double z)
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

Objective::Objective(std::shared_ptr<const Dataset> data) : data_(std::move(data))
{
    if (!data_) throw DimensionError("objective requires a dataset");
    if (data_->n() < 1 || data_->p() < 1 || data_->y.size() != data_->n()) {
        throw DimensionError("dataset shape is inconsistent");
    }
}

void Objective::check_dimension(const Eigen::VectorXd& w) const
{
    if (w.size() != p()) {
        throw DimensionError("coefficient vector has length " + std::to_string(w.size()) + ", expected " +
                             std::to_string(p()));
    }
}

double Objective::forward_gain(const Eigen::VectorXd& w, int g, const GroupPartition& partition) const
{
    return forward_gains(w, {g}, partition).front();
}

Eigen::VectorXd Objective::linear_predictor(const Eigen::VectorXd& w) const
{
    check_dimension(w);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n());
    for (int j = 0; j < p(); ++j) {
        if (w[j] != 0.0) eta.noalias() += w[j] * data_->X.col(j);
    }
    return eta;
}

std::vector<double> Objective::removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                             const GroupPartition& partition) const
{
    check_dimension(w);
    const double base = value(w);
    std::vector<double> out;
    out.reserve(groups.size());
    for (int g : groups) {
        Eigen::VectorXd reduced = w;
        for (int j : partition.group(g)) reduced[j] = 0.0;
        out.push_back(value(reduced) - base);
    }
    return out;
}

// ---------------------------------------------------------------------------

GaussianObjective::GaussianObjective(std::shared_ptr<const Dataset> data)
    : Objective(std::move(data)), gram_columns_(static_cast<std::size_t>(p()))
{
    xty_ = data_->X.transpose() * data_->y / static_cast<double>(n());
}

double GaussianObjective::value(const Eigen::VectorXd& w) const
{
    return (data_->y - linear_predictor(w)).squaredNorm() / (2.0 * n());
}

Eigen::VectorXd GaussianObjective::gradient(const Eigen::VectorXd& w) const
{
    return data_->X.transpose() * (linear_predictor(w) - data_->y) / static_cast<double>(n());
}

const Eigen::VectorXd& GaussianObjective::gram_column(int j) const
{
    std::lock_guard lock(cache_mutex_);
    auto& col = gram_columns_[static_cast<std::size_t>(j)];
    if (col.size() == 0) col = data_->X.transpose() * data_->X.col(j) / static_cast<double>(n());
    return col;
}

Eigen::MatrixXd GaussianObjective::gram_block(const IndexList& columns) const
{
    const auto k = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd G(k, k);
    for (Eigen::Index b = 0; b < k; ++b) {
        const auto& col = gram_column(columns[static_cast<std::size_t>(b)]);
        for (Eigen::Index a = 0; a < k; ++a) G(a, b) = col[columns[static_cast<std::size_t>(a)]];
    }
    return G;
}

RestrictedSolveReport GaussianObjective::restricted_minimize(const IndexList& support,
                                                             const Eigen::VectorXd* warm_start) const
{
    if (warm_start) check_dimension(*warm_start);
    RestrictedSolveReport rep;
    rep.support = support;
    std::sort(rep.support.begin(), rep.support.end());
    rep.w = Eigen::VectorXd::Zero(p());
    if (support.empty()) return rep;
    for (int j : rep.support) {
        if (j < 0 || j >= p()) throw DimensionError("support index out of range");
    }

    // Normal equations on the cached Gram block, then one refinement step against
    // the exact restricted gradient computed from X.
    const Eigen::MatrixXd G = gram_block(rep.support);
    const Eigen::VectorXd b = gather(xty_, rep.support);
    Eigen::VectorXd coef = solve_psd(G, b, 1e-10, rep.ridge_applied);

    const Eigen::MatrixXd XS = gather_columns(data_->X, rep.support);
    const double nn = static_cast<double>(n());
    Eigen::VectorXd grad = XS.transpose() * (XS * coef - data_->y) / nn;
    coef -= solve_psd(G, grad, 1e-10, rep.ridge_applied);
    grad = XS.transpose() * (XS * coef - data_->y) / nn;

    for (std::size_t k = 0; k < rep.support.size(); ++k) rep.w[rep.support[k]] = coef[static_cast<Eigen::Index>(k)];
    rep.iterations = 1;
    rep.gradient_norm_on_support = grad.norm();
    return rep;
}

std::vector<double> GaussianObjective::forward_gains(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                                     const GroupPartition& partition) const
{
    check_dimension(w);
    const Eigen::VectorXd r = data_->y - linear_predictor(w);
    const double nn = static_cast<double>(n());
    std::vector<double> out;
    out.reserve(groups.size());
    for (int g : groups) {
        const auto& idx = partition.group(g);
        const Eigen::MatrixXd B = gather_columns(data_->X, idx);
        const Eigen::VectorXd c = B.transpose() * r;
        if (c.squaredNorm() == 0.0) {
            out.push_back(0.0);
            continue;
        }
        const Eigen::MatrixXd A = B.transpose() * B;
        if (A.trace() == 0.0) {
            out.push_back(0.0);
            continue;
        }
        bool ridge = false;
        const Eigen::VectorXd sol = solve_psd(A, c, 1e-10, ridge);
        out.push_back(std::max(0.0, c.dot(sol) / (2.0 * nn)));
    }
    return out;
}

std::vector<double> GaussianObjective::removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                                     const GroupPartition& partition) const
{
    check_dimension(w);
    const Eigen::VectorXd r = data_->y - linear_predictor(w);
    const double nn = static_cast<double>(n());
    std::vector<double> out;
    out.reserve(groups.size());
    for (int g : groups) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n());
        for (int j : partition.group(g)) {
            if (w[j] != 0.0) u.noalias() += w[j] * data_->X.col(j);
        }
        // ||r + u||^2 - ||r||^2 = 2 r'u + ||u||^2
        out.push_back((2.0 * r.dot(u) + u.squaredNorm()) / (2.0 * nn));
    }
    return out;
}

// ---------------------------------------------------------------------------

LogisticObjective::LogisticObjective(std::shared_ptr<const Dataset> data, NewtonOptions options)
    : Objective(std::move(data)), options_(options)
{
    for (Eigen::Index i = 0; i < data_->y.size(); ++i) {
        const double yi = data_->y[i];
        if (yi != 1.0 && yi != -1.0) {
            throw FormatError("logistic responses must be -1 or +1 (row " + std::to_string(i) + ")");
        }
    }
}

double LogisticObjective::value_at_margin(const Eigen::VectorXd& eta) const
{
    return mean_logistic_loss(data_->y, eta);
}

double LogisticObjective::value(const Eigen::VectorXd& w) const
{
    return value_at_margin(linear_predictor(w));
}

Eigen::VectorXd LogisticObjective::gradient(const Eigen::VectorXd& w) const
{
    const Eigen::VectorXd eta = linear_predictor(w);
    Eigen::VectorXd h(n());
    for (int i = 0; i < n(); ++i) h[i] = -data_->y[i] * logistic_sigmoid(-data_->y[i] * eta[i]);
    return data_->X.transpose() * h / static_cast<double>(n());
}

RestrictedSolveReport LogisticObjective::restricted_minimize(const IndexList& support,
                                                             const Eigen::VectorXd* warm_start) const
{
    if (warm_start) check_dimension(*warm_start);
    RestrictedSolveReport rep;
    rep.support = support;
    std::sort(rep.support.begin(), rep.support.end());
    rep.w = Eigen::VectorXd::Zero(p());
    if (support.empty()) return rep;
    for (int j : rep.support) {
        if (j < 0 || j >= p()) throw DimensionError("support index out of range");
    }

    const Eigen::MatrixXd XS = gather_columns(data_->X, rep.support);
    Eigen::VectorXd start = warm_start ? gather(*warm_start, rep.support)
                                       : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rep.support.size()));
    const auto res = newton_logistic(XS, data_->y, Eigen::VectorXd::Zero(n()), std::move(start), options_);
    for (std::size_t k = 0; k < rep.support.size(); ++k) {
        rep.w[rep.support[k]] = res.alpha[static_cast<Eigen::Index>(k)];
    }
    rep.iterations = res.iterations;
    rep.gradient_norm_on_support = res.gradient_norm;
    rep.ridge_applied = res.ridge_applied;
    rep.capped = res.capped;
    rep.converged = res.converged || res.capped;
    return rep;
}

std::vector<double> LogisticObjective::forward_gains(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                                     const GroupPartition& partition) const
{
    check_dimension(w);
    const Eigen::VectorXd eta = linear_predictor(w);
    const double base = value_at_margin(eta);
    std::vector<double> out;
    out.reserve(groups.size());
    for (int g : groups) {
        const auto& idx = partition.group(g);
        const Eigen::MatrixXd B = gather_columns(data_->X, idx);
        Eigen::VectorXd start = gather(w, idx);
        const auto res = newton_logistic(B, data_->y, eta - B * start, start, options_);
        out.push_back(std::max(0.0, base - res.value));
    }
    return out;
}

std::vector<double> LogisticObjective::removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                                     const GroupPartition& partition) const
{
    check_dimension(w);
    const Eigen::VectorXd eta = linear_predictor(w);
    const double base = value_at_margin(eta);
    std::vector<double> out;
    out.reserve(groups.size());
    for (int g : groups) {
        Eigen::VectorXd reduced = eta;
        for (int j : partition.group(g)) {
            if (w[j] != 0.0) reduced.noalias() -= w[j] * data_->X.col(j);
        }
        out.push_back(value_at_margin(reduced) - base);
    }
    return out;
}

std::unique_ptr<Objective> make_objective(Family family, std::shared_ptr<const Dataset> data)
{
    if (family == Family::gaussian) return std::make_unique<GaussianObjective>(std::move(data));
    return std::make_unique<LogisticObjective>(std::move(data));
}

} // namespace igs
