#pragma once

#include "igs/baselines.hpp"
#include "igs/dataset.hpp"
#include "igs/experiments.hpp"
#include "igs/groups.hpp"
#include "igs/iga.hpp"
#include "igs/modelselect.hpp"
#include "igs/simgen.hpp"
#include "igs/verify.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

namespace igs {

using Json = nlohmann::json;

// Numeric CSV. A first row containing any non-numeric field is treated as a header.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& M);
/// X as n x p, y as a single column. Throws FormatError / DimensionError.
Dataset read_dataset(const std::filesystem::path& x_path, const std::filesystem::path& y_path);

// Groups file: {"p": int, "groups": [[int, ...], ...]}, zero-based feature indices.
Json partition_to_json(const GroupPartition& partition);
GroupPartition partition_from_json(const Json& j);
GroupPartition read_partition(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
/// One-based group ids.
Json groups_to_json(const GroupSet& set);

// Group ids below are one-based on output.
Json event_to_json(const PathEvent& event);
Json path_to_json(const SelectionPath& path);
Json candidates_to_json(const std::vector<Candidate>& candidates);
Json model_to_json(const FittedModel& model);
Json config_to_json(const IgaConfig& config);

Json sim_spec_to_json(const SimSpec& spec);
/// truth.json: {"w_star", "relevant_groups", "spec", "seed"}.
Json truth_to_json(const SimInstance& instance);
/// Writes X.csv, y.csv, groups.json and truth.json into `dir` (created if absent).
void write_bundle(const std::filesystem::path& dir, const SimInstance& instance);

Json cv_report_to_json(const CvResult& result);
Json lasso_path_to_json(const LassoPathResult& path);
Json lasso_cv_to_json(const GroupLassoCvResult& result, const GroupPartition& partition);
Json bench_to_json(const BenchResult& result);
Json regularity_to_json(const RegularityReport& report);
Json logistic_regularity_to_json(const LogisticRegularity& report);
Json sandwich_to_json(const SandwichReport& report);
Json scaling_to_json(const ScalingReport& report);
/// Columns n, mean_error2, recovery_rate.
std::string scaling_to_csv(const ScalingReport& report);

} // namespace igs
