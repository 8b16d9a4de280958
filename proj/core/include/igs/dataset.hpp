#pragma once

#include <Eigen/Core>
#include <vector>

namespace igs {

/**
 * Design matrix (row = observation) and response.
 *
 * column_scales[j] is the divisor applied to raw column j; coefficients fit on
 * the scaled design map back to raw units as w_raw[j] = w[j] / column_scales[j].
 */
struct Dataset
{
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd column_scales;

    Dataset() = default;
    /// Throws DimensionError on shape mismatch or an empty design.
    Dataset(Eigen::MatrixXd X, Eigen::VectorXd y);

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

/// Rescales every column to Euclidean norm sqrt(n). Throws ZeroColumnError.
Dataset standardize(const Dataset& data);

/// Divides each column by `scales` (e.g. training-fold scales applied to validation rows).
Dataset apply_scales(const Dataset& data, const Eigen::VectorXd& scales);

/// Maps coefficients fit on a standardized design back to raw column units.
Eigen::VectorXd to_raw_coefficients(const Eigen::VectorXd& w, const Eigen::VectorXd& scales);

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows);

} // namespace igs
