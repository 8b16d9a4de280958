#pragma once

#include "igs/criterion.hpp"
#include "igs/groups.hpp"
#include "igs/simgen.hpp"

#include <Eigen/Core>
#include <vector>

namespace igs {

struct EvalReport
{
    double l2_error = 0.0;
    int correct_groups = 0;
    int incorrect_groups = 0;
    /// Criterion value of the estimate on the instance's data.
    double prediction_loss = 0.0;
    /// Relevant groups whose true signal is at or below the weak-signal scale.
    int weak_signal_count = 0;
};

/// sqrt((q + log m) / n): the group-norm scale separating weak from strong signals.
double weak_signal_threshold(const SimInstance& instance);

/// Compares an estimate (raw units) with the instance truth. Groups count as
/// selected when their coefficient norm exceeds `zero_threshold`.
EvalReport evaluate(const Eigen::VectorXd& estimate, const SimInstance& instance, Family family,
                    double zero_threshold = 0.0);

/// Number of groups g with 0 < ||w_g|| <= threshold.
int weak_signal_count(const Eigen::VectorXd& coefficients, const GroupPartition& partition, double threshold);

struct MetricSummary
{
    double mean = 0.0;
    double standard_error = 0.0;
};

struct ReplicationSummary
{
    int replications = 0;
    MetricSummary l2_error;
    MetricSummary correct_groups;
    MetricSummary incorrect_groups;
    MetricSummary prediction_loss;
    MetricSummary weak_signal_count;
};

/// Mean and standard error (sample sd / sqrt(R)); requires R >= 2.
MetricSummary summarize_values(const std::vector<double>& values);
ReplicationSummary summarize(const std::vector<EvalReport>& reports);

} // namespace igs
