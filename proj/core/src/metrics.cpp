#include "igs/metrics.hpp"

#include "igs/error.hpp"

#include <cmath>
#include <memory>

namespace igs {

double weak_signal_threshold(const SimInstance& instance)
{
    const auto& part = instance.partition;
    return std::sqrt((part.mean_group_size() + std::log(static_cast<double>(part.m()))) / instance.data.n());
}

EvalReport evaluate(const Eigen::VectorXd& estimate, const SimInstance& instance, Family family,
                    double zero_threshold)
{
    if (estimate.size() != instance.truth.size()) throw DimensionError("estimate and truth lengths differ");
    EvalReport r;
    r.l2_error = (estimate - instance.truth).norm();
    const auto selected = nonzero_groups(estimate, instance.partition, zero_threshold);
    for (int g : selected) {
        if (instance.relevant.contains(g)) {
            ++r.correct_groups;
        } else {
            ++r.incorrect_groups;
        }
    }
    const auto objective = make_objective(family, std::make_shared<const Dataset>(instance.data));
    r.prediction_loss = objective->value(estimate);
    r.weak_signal_count = weak_signal_count(instance.truth, instance.partition, weak_signal_threshold(instance));
    return r;
}

int weak_signal_count(const Eigen::VectorXd& coefficients, const GroupPartition& partition, double threshold)
{
    if (!(threshold >= 0.0)) throw RangeError("threshold must be non-negative");
    const auto norms = group_norms(coefficients, partition);
    int count = 0;
    for (int g = 0; g < partition.m(); ++g) {
        const double v = norms.per_group_l2[g];
        if (v > 0.0 && v <= threshold) ++count;
    }
    return count;
}

MetricSummary summarize_values(const std::vector<double>& values)
{
    const auto R = values.size();
    if (R < 2) throw RangeError("need at least two replications");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(R);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(R - 1));
    return {mean, sd / std::sqrt(static_cast<double>(R))};
}

ReplicationSummary summarize(const std::vector<EvalReport>& reports)
{
    if (reports.size() < 2) throw RangeError("need at least two replications");
    auto column = [&](auto field) {
        std::vector<double> v;
        v.reserve(reports.size());
        for (const auto& r : reports) v.push_back(static_cast<double>(r.*field));
        return summarize_values(v);
    };
    ReplicationSummary s;
    s.replications = static_cast<int>(reports.size());
    s.l2_error = column(&EvalReport::l2_error);
    s.correct_groups = column(&EvalReport::correct_groups);
    s.incorrect_groups = column(&EvalReport::incorrect_groups);
    s.prediction_loss = column(&EvalReport::prediction_loss);
    s.weak_signal_count = column(&EvalReport::weak_signal_count);
    return s;
}

} // namespace igs
