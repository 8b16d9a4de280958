#include "igs/experiments.hpp"

#include "igs/error.hpp"
#include "igs/rng.hpp"

#include <cstdio>
#include <sstream>
#include <string>

namespace igs {

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::iga:
        return "IGA";
    case Method::iga_lambda:
        return "IGA-lambda";
    case Method::group_lasso:
        return "group lasso";
    case Method::foba:
        return "FoBa";
    }
    return "IGA";
}

Method parse_method(std::string_view name)
{
    if (name == "iga" || name == "IGA") return Method::iga;
    if (name == "iga-lambda" || name == "IGA-lambda") return Method::iga_lambda;
    if (name == "group-lasso" || name == "group lasso" || name == "glasso") return Method::group_lasso;
    if (name == "foba" || name == "FoBa") return Method::foba;
    throw FormatError("unknown method '" + std::string(name) + "'");
}

MethodFit fit_method(const SimInstance& instance, Family family, Method method, const HarnessOptions& options,
                     std::uint64_t seed)
{
    const auto loss = loss_for(family);
    MethodFit fit;
    fit.method = method;
    CvOptions cv_options{options.jobs, options.observer};

    switch (method) {
    case Method::iga:
    case Method::iga_lambda: {
        IgaConfig cfg;
        cfg.k_max = options.k_max;
        SelectionPolicy policy = SelectionPolicy::greedy();
        std::vector<double> grid{1.0};
        if (method == Method::iga_lambda) {
            fit.priority = make_priority_list(instance, seed);
            policy = SelectionPolicy::priority_list(fit.priority);
            grid = options.lambda_grid;
        }
        const auto plan = CvPlan::make(instance.data.n(), options.folds, seed, loss, grid);
        const auto cv = cv_select(instance.data, instance.partition, family, cfg, plan, policy, cv_options);
        fit.estimate = cv.model.coefficients;
        fit.lambda = cv.best_lambda;
        fit.iteration = cv.best_iteration;
        break;
    }
    case Method::foba: {
        const auto singletons = GroupPartition::singletons(instance.data.p());
        IgaConfig cfg;
        cfg.k_max = options.foba_k_max;
        const auto plan = CvPlan::make(instance.data.n(), options.folds, seed, loss, {1.0});
        const auto cv =
            cv_select(instance.data, singletons, family, cfg, plan, SelectionPolicy::greedy(), cv_options);
        fit.estimate = cv.model.coefficients;
        fit.iteration = cv.best_iteration;
        break;
    }
    case Method::group_lasso: {
        const auto plan = CvPlan::make(instance.data.n(), options.folds, seed, loss, {1.0});
        const auto cv = cv_group_lasso(instance.data, instance.partition, family, options.group_lasso, plan,
                                       options.jobs);
        fit.estimate = cv.coefficients;
        fit.alpha = cv.best_alpha;
        fit.zero_threshold = options.group_lasso.active_threshold;
        break;
    }
    }
    return fit;
}

CellSpec parse_cell(std::string_view text)
{
    CellSpec cell;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw FormatError("cell entry '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            if (key == "beta") {
                cell.beta = std::stod(value);
            } else if (key == "kbar") {
                cell.kbar = std::stoi(value);
            } else if (key == "n") {
                cell.n = std::stoi(value);
            } else {
                throw FormatError("unknown cell key '" + key + "'");
            }
        } catch (const std::logic_error&) {
            throw FormatError("bad value in cell entry '" + item + "'");
        }
    }
    return cell;
}

BenchResult bench_table(int table, const CellSpec& cell, int reps, std::uint64_t seed,
                        const std::vector<Method>& methods, const HarnessOptions& options)
{
    if (table != 2 && table != 3) throw RangeError("table must be 2 or 3");
    if (reps < 1) throw RangeError("reps must be positive");
    const Family family = table == 2 ? Family::gaussian : Family::logistic;

    BenchResult result;
    result.table = table;
    result.cell = cell;
    result.replications = reps;
    result.seed = seed;
    for (Method m : methods) result.rows.push_back({m, {}, {}});

    for (int r = 0; r < reps; ++r) {
        SimSpec spec;
        spec.sim_case = table == 2 ? SimCase::case1 : SimCase::case2;
        spec.n = cell.n;
        spec.kbar = cell.kbar;
        spec.beta = cell.beta;
        spec.seed = child_seed(seed, streams::replication * 1000003ULL + static_cast<std::uint64_t>(r));
        const auto instance = generate(spec);
        for (auto& row : result.rows) {
            const auto fit = fit_method(instance, family, row.method, options, spec.seed);
            row.reports.push_back(evaluate(fit.estimate, instance, family, fit.zero_threshold));
        }
    }
    if (reps >= 2) {
        for (auto& row : result.rows) row.summary = summarize(row.reports);
    }
    return result;
}

std::string format_bench_table(const BenchResult& result)
{
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "Table %d, %s, beta=%g, kbar=%d, n=%d, %d replications\n", result.table,
                  result.table == 2 ? "case 1" : "case 2", result.cell.beta, result.cell.kbar, result.cell.n,
                  result.replications);
    out << buf;
    struct Block
    {
        const char* title;
        MetricSummary ReplicationSummary::*field;
        bool with_se;
    };
    const Block blocks[] = {{"||w_hat - w*||", &ReplicationSummary::l2_error, true},
                            {"|G_hat & G_bar|", &ReplicationSummary::correct_groups, false},
                            {"|G_hat \\ G_bar|", &ReplicationSummary::incorrect_groups, false}};
    for (const auto& block : blocks) {
        out << block.title << '\n';
        for (const auto& row : result.rows) {
            const auto& s = row.summary.*block.field;
            if (block.with_se) {
                std::snprintf(buf, sizeof buf, "  %-12s %6.2f  (%.2f)\n", std::string(to_string(row.method)).c_str(),
                              s.mean, s.standard_error);
            } else {
                std::snprintf(buf, sizeof buf, "  %-12s %6.2f\n", std::string(to_string(row.method)).c_str(), s.mean);
            }
            out << buf;
        }
    }
    return out.str();
}

} // namespace igs
