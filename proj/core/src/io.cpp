#include "igs/io.hpp"

#include "igs/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace igs {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(std::string field, double& out)
{
    const auto first = field.find_first_not_of(" \t\r\"");
    const auto last = field.find_last_not_of(" \t\r\"");
    if (first == std::string::npos) return false;
    field = field.substr(first, last - first + 1);
    errno = 0;
    char* end = nullptr;
    out = std::strtod(field.c_str(), &end);
    return end == field.c_str() + field.size() && errno != ERANGE;
}

std::ifstream open_in(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

Json one_based(const std::vector<int>& groups)
{
    Json out = Json::array();
    for (int g : groups) out.push_back(g + 1);
    return out;
}

Json summary_to_json(const MetricSummary& s)
{
    return {{"mean", s.mean}, {"se", s.standard_error}};
}

Json report_to_json(const EvalReport& r)
{
    return {{"l2_error", r.l2_error},
            {"correct_groups", r.correct_groups},
            {"incorrect_groups", r.incorrect_groups},
            {"prediction_loss", r.prediction_loss},
            {"weak_signal_count", r.weak_signal_count}};
}

} // namespace

Eigen::MatrixXd read_csv_matrix(const fs::path& path)
{
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size(); ++k) numeric = numeric && parse_double(fields[k], row[k]);
        if (!numeric) {
            if (rows.empty() && width == 0) {
                width = fields.size();  // header
                continue;
            }
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        if (width == 0) width = row.size();
        if (row.size() != width) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                              " fields, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError(path.string() + ": no data rows");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return M;
}

void write_csv_matrix(const fs::path& path, const Eigen::MatrixXd& M)
{
    auto out = open_out(path);
    char buf[32];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Dataset read_dataset(const fs::path& x_path, const fs::path& y_path)
{
    Eigen::MatrixXd X = read_csv_matrix(x_path);
    const Eigen::MatrixXd Y = read_csv_matrix(y_path);
    if (Y.cols() != 1) throw DimensionError(y_path.string() + " must have a single column");
    return Dataset(std::move(X), Y.col(0));
}

Json partition_to_json(const GroupPartition& partition)
{
    return {{"p", partition.p()}, {"groups", partition.groups()}};
}

GroupPartition partition_from_json(const Json& j)
{
    try {
        return GroupPartition(j.at("groups").get<std::vector<IndexList>>(), j.at("p").get<int>());
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed groups object: ") + e.what());
    }
}

GroupPartition read_partition(const fs::path& path)
{
    return partition_from_json(read_json(path));
}

Json read_json(const fs::path& path)
{
    auto in = open_in(path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

Json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const Json& j)
{
    try {
        const auto values = j.get<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } catch (const Json::exception& e) {
        throw FormatError(std::string("expected a numeric array: ") + e.what());
    }
}

Json groups_to_json(const GroupSet& set)
{
    return one_based(set.members());
}

Json event_to_json(const PathEvent& e)
{
    return {{"action", e.action == Action::add ? "add" : "remove"},
            {"group", e.group + 1},
            {"Q_after", e.Q_after},
            {"level_gain", e.level_gain},
            {"iteration", e.iteration}};
}

Json path_to_json(const SelectionPath& path)
{
    Json events = Json::array();
    for (const auto& e : path.events) events.push_back(event_to_json(e));
    Json snaps = Json::array();
    for (const auto& s : path.snapshots) {
        snaps.push_back({{"iteration", s.iteration},
                         {"active_groups", groups_to_json(s.active)},
                         {"coefficients", vector_to_json(s.coefficients)}});
    }
    return {{"Q_null", path.Q_null},
            {"signed_sequence", path.signed_sequence()},
            {"events", events},
            {"snapshots", snaps}};
}

Json candidates_to_json(const std::vector<Candidate>& candidates)
{
    Json out = Json::array();
    for (const auto& c : candidates) {
        out.push_back({{"group", c.group + 1}, {"score", c.score}, {"in_A_lambda", c.in_A_lambda}});
    }
    return out;
}

Json model_to_json(const FittedModel& model)
{
    return {{"coefficients", vector_to_json(model.coefficients)},
            {"active_groups", groups_to_json(model.active)},
            {"objective_value", model.objective_value},
            {"iteration", model.iteration},
            {"converged", model.converged}};
}

Json config_to_json(const IgaConfig& config)
{
    Json j = {{"lambda", config.lambda},
              {"scoring", to_string(config.scoring)},
              {"k_max", config.k_max},
              {"tie_tolerance", config.tie_tolerance},
              {"backward", config.backward}};
    j["delta_floor"] = config.delta_floor ? Json(*config.delta_floor) : Json(nullptr);
    return j;
}

Json sim_spec_to_json(const SimSpec& spec)
{
    return {{"case", to_string(spec.sim_case)},
            {"n", spec.n},
            {"p", spec.p},
            {"m", spec.m},
            {"q", spec.q},
            {"kbar", spec.kbar},
            {"beta", spec.beta},
            {"rho", spec.rho},
            {"noise_variance", spec.noise_variance},
            {"seed", spec.seed}};
}

Json truth_to_json(const SimInstance& instance)
{
    return {{"w_star", vector_to_json(instance.truth)},
            {"relevant_groups", groups_to_json(instance.relevant)},
            {"spec", sim_spec_to_json(instance.spec)},
            {"seed", instance.spec.seed}};
}

void write_bundle(const fs::path& dir, const SimInstance& instance)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
    write_csv_matrix(dir / "X.csv", instance.data.X);
    write_csv_matrix(dir / "y.csv", instance.data.y);
    write_json(dir / "groups.json", partition_to_json(instance.partition));
    write_json(dir / "truth.json", truth_to_json(instance));
}

Json cv_report_to_json(const CvResult& result)
{
    Json surface = Json::array();
    for (std::size_t l = 0; l < result.lambdas.size(); ++l) {
        surface.push_back({{"lambda", result.lambdas[l]}, {"mean_loss", result.mean_loss[l]}});
    }
    return {{"loss_surface", surface},
            {"best_lambda", result.best_lambda},
            {"best_iteration", result.best_iteration},
            {"best_loss", result.best_loss},
            {"model", model_to_json(result.model)},
            {"path", path_to_json(result.path)}};
}

Json lasso_path_to_json(const LassoPathResult& path)
{
    Json records = Json::array();
    for (std::size_t a = 0; a < path.alphas.size(); ++a) {
        records.push_back({{"alpha", path.alphas[a]},
                           {"active_groups", groups_to_json(path.active[a])},
                           {"coefficients", vector_to_json(path.coefficients[a])},
                           {"iterations", path.iterations[a]},
                           {"kkt_residual", path.kkt_residuals[a]},
                           {"converged", static_cast<bool>(path.converged[a])}});
    }
    // Entry and exit of groups between consecutive grid points, in path notation.
    Json events = Json::array();
    GroupSet prev;
    for (std::size_t a = 0; a < path.alphas.size(); ++a) {
        for (int g : path.active[a]) {
            if (!prev.contains(g)) events.push_back({{"action", "add"}, {"group", g + 1}, {"alpha", path.alphas[a]}});
        }
        for (int g : prev) {
            if (!path.active[a].contains(g)) {
                events.push_back({{"action", "remove"}, {"group", g + 1}, {"alpha", path.alphas[a]}});
            }
        }
        prev = path.active[a];
    }
    return {{"events", events}, {"alphas", records}};
}

Json lasso_cv_to_json(const GroupLassoCvResult& result, const GroupPartition& partition)
{
    return {{"alphas", result.alphas},
            {"mean_loss", result.mean_loss},
            {"best_alpha", result.best_alpha},
            {"best_index", result.best_index},
            {"coefficients", vector_to_json(result.coefficients)},
            {"active_groups", groups_to_json(nonzero_groups(result.coefficients, partition))},
            {"path", lasso_path_to_json(result.path)}};
}

Json bench_to_json(const BenchResult& result)
{
    Json rows = Json::array();
    for (const auto& row : result.rows) {
        Json reps = Json::array();
        for (const auto& r : row.reports) reps.push_back(report_to_json(r));
        Json entry = {{"method", to_string(row.method)}, {"replications", reps}};
        if (result.replications >= 2) {
            entry["summary"] = {{"l2_error", summary_to_json(row.summary.l2_error)},
                                {"correct_groups", summary_to_json(row.summary.correct_groups)},
                                {"incorrect_groups", summary_to_json(row.summary.incorrect_groups)},
                                {"prediction_loss", summary_to_json(row.summary.prediction_loss)},
                                {"weak_signal_count", summary_to_json(row.summary.weak_signal_count)}};
        }
        rows.push_back(std::move(entry));
    }
    return {{"table", result.table},
            {"cell", {{"beta", result.cell.beta}, {"kbar", result.cell.kbar}, {"n", result.cell.n}}},
            {"reps", result.replications},
            {"seed", result.seed},
            {"methods", rows}};
}

Json regularity_to_json(const RegularityReport& r)
{
    Json j = {{"t", r.t},
              {"phi_minus", r.phi_minus},
              {"phi_plus", r.phi_plus},
              {"argmin_set", groups_to_json(r.argmin_set)},
              {"argmax_set", groups_to_json(r.argmax_set)},
              {"exact", r.exact},
              {"subsets_evaluated", r.subsets_evaluated}};
    j["kappa"] = std::isfinite(r.kappa) ? Json(r.kappa) : Json("inf");
    return j;
}

Json logistic_regularity_to_json(const LogisticRegularity& r)
{
    return {{"U1", r.U1}, {"U2", r.U2}, {"U3", r.U3}};
}

Json sandwich_to_json(const SandwichReport& r)
{
    return {{"trials", r.trials},
            {"passed", r.passed},
            {"upper_skipped", r.upper_skipped},
            {"worst_violation", r.worst_violation},
            {"ok", r.ok()}};
}

Json scaling_to_json(const ScalingReport& r)
{
    Json points = Json::array();
    for (const auto& p : r.points) {
        points.push_back({{"n", p.n},
                          {"mean_error2", p.mean_squared_error},
                          {"recovery_rate", p.recovery_rate},
                          {"errors2", p.squared_errors}});
    }
    return {{"points", points}, {"slope", r.slope}, {"high_variance", r.high_variance}};
}

std::string scaling_to_csv(const ScalingReport& r)
{
    std::ostringstream out;
    out << "n,mean_error2,recovery_rate\n";
    char buf[96];
    for (const auto& p : r.points) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", p.n, p.mean_squared_error, p.recovery_rate);
        out << buf;
    }
    return out.str();
}

} // namespace igs
