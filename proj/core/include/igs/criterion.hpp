#pragma once

#include "igs/dataset.hpp"
#include "igs/groups.hpp"

#include <Eigen/Core>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

namespace igs {

enum class Family { gaussian, logistic };

std::string_view to_string(Family family);
/// Accepts "gaussian" or "logistic"; throws FormatError otherwise.
Family parse_family(std::string_view name);

struct NewtonOptions
{
    double gradient_tolerance = 1e-8;
    int max_iterations = 100;
    double armijo = 1e-4;
    int max_halvings = 60;
    /// Sup-norm bound on coefficients; reached only on (quasi-)separable samples.
    double coefficient_cap = 30.0;
    /// Ridge added to a failed Hessian factorization, relative to its trace.
    double ridge_scale = 1e-8;
};

struct RestrictedSolveReport
{
    Eigen::VectorXd w;
    IndexList support;
    int iterations = 0;
    double gradient_norm_on_support = 0.0;
    bool ridge_applied = false;
    bool converged = true;
    /// The coefficient cap stopped the solver before the gradient tolerance.
    bool capped = false;
};

/**
 * Smooth convex criterion Q(w) = (1/n) sum_i f_i(x_i'w) over a fixed dataset.
 *
 * Instances are immutable from the caller's point of view and safe to share
 * across threads; internal caches are synchronized.
 */
class Objective
{
public:
    explicit Objective(std::shared_ptr<const Dataset> data);
    virtual ~Objective() = default;

    Objective(const Objective&) = delete;
    Objective& operator=(const Objective&) = delete;

    virtual Family family() const = 0;

    const Dataset& data() const { return *data_; }
    std::shared_ptr<const Dataset> data_ptr() const { return data_; }
    int n() const { return data_->n(); }
    int p() const { return data_->p(); }

    virtual double value(const Eigen::VectorXd& w) const = 0;
    virtual Eigen::VectorXd gradient(const Eigen::VectorXd& w) const = 0;

    /// argmin of Q over vectors supported on `support`. Off-support entries are exactly zero.
    virtual RestrictedSolveReport restricted_minimize(const IndexList& support,
                                                      const Eigen::VectorXd* warm_start = nullptr) const = 0;

    /// Q(w) - min_alpha Q(w + E_g alpha) for each g in `groups`; clipped at 0.
    virtual std::vector<double> forward_gains(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                              const GroupPartition& partition) const = 0;

    double forward_gain(const Eigen::VectorXd& w, int g, const GroupPartition& partition) const;

    /// Q(w - E_g w_g) - Q(w) for each g in `groups` (no refit).
    virtual std::vector<double> removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                              const GroupPartition& partition) const;

    /// X w, skipping zero coefficients.
    Eigen::VectorXd linear_predictor(const Eigen::VectorXd& w) const;

protected:
    void check_dimension(const Eigen::VectorXd& w) const;

    std::shared_ptr<const Dataset> data_;
};

/// Q(w) = ||y - Xw||^2 / (2n).
class GaussianObjective final : public Objective
{
public:
    explicit GaussianObjective(std::shared_ptr<const Dataset> data);

    Family family() const override { return Family::gaussian; }
    double value(const Eigen::VectorXd& w) const override;
    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const override;
    RestrictedSolveReport restricted_minimize(const IndexList& support,
                                              const Eigen::VectorXd* warm_start = nullptr) const override;
    std::vector<double> forward_gains(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                      const GroupPartition& partition) const override;
    std::vector<double> removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                      const GroupPartition& partition) const override;

    /// (1/n) X_S' X_S for the given column indices.
    Eigen::MatrixXd gram_block(const IndexList& columns) const;

private:
    const Eigen::VectorXd& gram_column(int j) const;

    Eigen::VectorXd xty_;  // X'y / n
    mutable std::mutex cache_mutex_;
    mutable std::vector<Eigen::VectorXd> gram_columns_;
};

/// Q(w) = (1/n) sum_i log(1 + exp(-y_i x_i'w)), y_i in {-1, +1}.
class LogisticObjective final : public Objective
{
public:
    explicit LogisticObjective(std::shared_ptr<const Dataset> data, NewtonOptions options = {});

    Family family() const override { return Family::logistic; }
    double value(const Eigen::VectorXd& w) const override;
    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const override;
    RestrictedSolveReport restricted_minimize(const IndexList& support,
                                              const Eigen::VectorXd* warm_start = nullptr) const override;
    std::vector<double> forward_gains(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                      const GroupPartition& partition) const override;
    std::vector<double> removal_costs(const Eigen::VectorXd& w, const std::vector<int>& groups,
                                      const GroupPartition& partition) const override;

    const NewtonOptions& options() const { return options_; }

    /// Mean logistic loss for linear predictor eta.
    double value_at_margin(const Eigen::VectorXd& eta) const;

private:
    NewtonOptions options_;
};

std::unique_ptr<Objective> make_objective(Family family, std::shared_ptr<const Dataset> data);

/// log(1 + exp(z)) without overflow.
double softplus(double z);
/// 1 / (1 + exp(-z)) without overflow.
double logistic_sigmoid(double z);

} // namespace igs
