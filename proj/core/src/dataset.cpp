#include "igs/dataset.hpp"

#include "igs/error.hpp"

#include <cmath>
#include <string>

namespace igs {

Dataset::Dataset(Eigen::MatrixXd X_, Eigen::VectorXd y_) : X(std::move(X_)), y(std::move(y_))
{
    if (X.rows() < 1 || X.cols() < 1) throw DimensionError("design must have n >= 1 and p >= 1");
    if (X.rows() != y.size()) {
        throw DimensionError("X has " + std::to_string(X.rows()) + " rows but y has " + std::to_string(y.size()));
    }
    column_scales = Eigen::VectorXd::Ones(X.cols());
}

Dataset standardize(const Dataset& data)
{
    const double target = std::sqrt(static_cast<double>(data.n()));
    Eigen::VectorXd scales(data.p());
    for (int j = 0; j < data.p(); ++j) {
        const double norm = data.X.col(j).norm();
        if (!(norm > 0.0)) throw ZeroColumnError("column " + std::to_string(j) + " is identically zero");
        scales[j] = norm / target;
    }
    return apply_scales(data, scales);
}

Dataset apply_scales(const Dataset& data, const Eigen::VectorXd& scales)
{
    if (scales.size() != data.p()) throw DimensionError("scale vector length does not match p");
    Dataset out;
    out.X = data.X * scales.cwiseInverse().asDiagonal();
    out.y = data.y;
    out.column_scales = data.column_scales.cwiseProduct(scales);
    return out;
}

Eigen::VectorXd to_raw_coefficients(const Eigen::VectorXd& w, const Eigen::VectorXd& scales)
{
    if (w.size() != scales.size()) throw DimensionError("coefficient length does not match scales");
    return w.cwiseQuotient(scales);
}

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows)
{
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), data.p());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= data.n()) throw RangeError("row index out of range");
        out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(r);
        out.y[static_cast<Eigen::Index>(i)] = data.y[r];
    }
    out.column_scales = data.column_scales;
    return out;
}

} // namespace igs
