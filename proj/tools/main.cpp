// igs: command-line front end for group-sparse selection.

#include "http_server.hpp"

#include "igs/baselines.hpp"
#include "igs/error.hpp"
#include "igs/experiments.hpp"
#include "igs/io.hpp"
#include "igs/modelselect.hpp"
#include "igs/session.hpp"
#include "igs/simgen.hpp"
#include "igs/verify.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using igs::Json;

struct DataFlags
{
    std::string x_path;
    std::string y_path;
    std::string groups_path;
    std::string family = "gaussian";

    void add(CLI::App* cmd)
    {
        cmd->add_option("--x", x_path, "Design matrix CSV (n rows, p columns)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--y", y_path, "Response CSV (single column)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--groups", groups_path, "Groups JSON {\"p\", \"groups\"}")->required()->check(CLI::ExistingFile);
        cmd->add_option("--family", family, "Criterion family")->check(CLI::IsMember({"gaussian", "logistic"}));
    }

    igs::Dataset dataset() const { return igs::read_dataset(x_path, y_path); }
    igs::GroupPartition partition() const { return igs::read_partition(groups_path); }
    igs::Family fam() const { return igs::parse_family(family); }
};

struct IgaFlags
{
    double lambda = 1.0;
    std::string scoring = "objective_reduction";
    int k_max = 0;
    bool forward_only = false;

    void add(CLI::App* cmd, bool with_lambda = true)
    {
        if (with_lambda) {
            cmd->add_option("--lambda", lambda, "Discount factor for A_lambda")->check(CLI::Range(0.0, 1.0));
        }
        cmd->add_option("--scoring", scoring, "Forward score")
            ->check(CLI::IsMember({"objective_reduction", "gradient_norm"}));
        cmd->add_option("--k-max", k_max, "Active-group cap (0 = min(m, n / q))")->check(CLI::NonNegativeNumber);
        cmd->add_flag("--forward-only", forward_only, "Disable the backward sweep");
    }

    igs::IgaConfig config() const
    {
        igs::IgaConfig cfg;
        cfg.lambda = lambda;
        cfg.scoring = igs::parse_scoring_mode(scoring);
        cfg.k_max = k_max;
        cfg.backward = !forward_only;
        return cfg;
    }
};

struct Output
{
    std::string out;
    std::string format = "json";

    void add(CLI::App* cmd)
    {
        cmd->add_option("--out", out, "Output file (default stdout)");
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    }

    void emit(const Json& j, const std::string& table) const
    {
        const std::string text = format == "table" ? table : j.dump(2) + "\n";
        if (out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(out);
        if (!f) throw igs::FormatError("cannot write " + out);
        f << text;
    }
};

igs::GroupSet one_based_set(const std::vector<int>& ids, int m)
{
    std::vector<int> zero;
    for (int g : ids) {
        if (g < 1 || g > m) throw igs::RangeError("group id " + std::to_string(g) + " outside 1.." + std::to_string(m));
        zero.push_back(g - 1);
    }
    return igs::GroupSet(std::move(zero));
}

std::string path_table(const igs::SelectionPath& path)
{
    std::ostringstream out;
    out << "path {";
    const auto seq = path.signed_sequence();
    for (std::size_t k = 0; k < seq.size(); ++k) out << (k ? ", " : "") << seq[k];
    out << "}\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-6s %-7s %6s %16s %16s\n", "iter", "action", "group", "Q_after", "level_gain");
    out << buf;
    for (const auto& e : path.events) {
        std::snprintf(buf, sizeof buf, "%-6d %-7s %6d %16.8g %16.8g\n", e.iteration,
                      e.action == igs::Action::add ? "add" : "remove", e.group + 1, e.Q_after, e.level_gain);
        out << buf;
    }
    return out.str();
}

std::string cv_table(const igs::CvResult& cv)
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "best lambda %g, iteration %d, loss %.8g\nactive groups:", cv.best_lambda,
                  cv.best_iteration, cv.best_loss);
    out << buf;
    for (int g : cv.model.active) out << ' ' << g + 1;
    out << '\n';
    for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
        std::snprintf(buf, sizeof buf, "lambda %-5g", cv.lambdas[l]);
        out << buf;
        for (double v : cv.mean_loss[l]) {
            std::snprintf(buf, sizeof buf, " %.4g", v);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

igs::SessionServer* g_server = nullptr;

void on_signal(int)
{
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Group-sparse selection: IGA / GIGA, group lasso and FoBa baselines"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    int jobs = 1;
    app.add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads for CV and bench")->check(CLI::PositiveNumber);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a simulated data bundle");
    igs::SimSpec spec;
    std::string sim_case = "1";
    std::string sim_out;
    sim->add_option("--case", sim_case, "1, 2 or heuristic")->check(CLI::IsMember({"1", "2", "heuristic", "case1", "case2"}));
    sim->add_option("--n", spec.n, "Sample size")->check(CLI::PositiveNumber);
    sim->add_option("--p", spec.p, "Feature count")->check(CLI::PositiveNumber);
    sim->add_option("--m", spec.m, "Group count")->check(CLI::PositiveNumber);
    sim->add_option("--q", spec.q, "Group size")->check(CLI::PositiveNumber);
    sim->add_option("--kbar", spec.kbar, "Relevant group count")->check(CLI::NonNegativeNumber);
    sim->add_option("--beta", spec.beta, "Coefficient half-width")->check(CLI::NonNegativeNumber);
    sim->add_option("--rho", spec.rho, "AR(1) correlation")->check(CLI::Range(-0.999, 0.999));
    sim->add_option("--noise-variance", spec.noise_variance, "Error variance (case 1)")->check(CLI::NonNegativeNumber);
    sim->add_option("--out", sim_out, "Bundle directory")->required();

    // path
    auto* path_cmd = app.add_subcommand("path", "Run one selection path on standardized data");
    DataFlags path_data;
    IgaFlags path_iga;
    Output path_out;
    std::vector<int> path_priority;
    path_data.add(path_cmd);
    path_iga.add(path_cmd);
    path_out.add(path_cmd);
    path_cmd->add_option("--priority", path_priority, "Priority groups (one-based, comma list)")->delimiter(',');

    // fit
    auto* fit = app.add_subcommand("fit", "Selection path with the stopping iteration chosen by CV");
    DataFlags fit_data;
    IgaFlags fit_iga;
    Output fit_out;
    int fit_folds = 10;
    fit_data.add(fit);
    fit_iga.add(fit);
    fit_out.add(fit);
    fit->add_option("--folds", fit_folds, "CV folds")->check(CLI::Range(2, 1000));

    // cv
    auto* cv = app.add_subcommand("cv", "Cross-validate (lambda, t) over a lambda grid");
    DataFlags cv_data;
    IgaFlags cv_iga;
    Output cv_out;
    int cv_folds = 10;
    std::vector<double> lambda_grid{0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<int> cv_priority;
    cv_data.add(cv);
    cv_iga.add(cv, false);
    cv_out.add(cv);
    cv->add_option("--folds", cv_folds, "CV folds")->check(CLI::Range(2, 1000));
    cv->add_option("--lambda-grid", lambda_grid, "Comma list of lambda values")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    cv->add_option("--priority", cv_priority, "Priority groups (one-based, comma list)")->delimiter(',');

    // baseline
    auto* base = app.add_subcommand("baseline", "Group lasso or FoBa with CV-tuned parameter");
    DataFlags base_data;
    Output base_out;
    std::string base_method = "group-lasso";
    int base_folds = 10;
    int base_k_max = 0;
    igs::GroupLassoConfig gl;
    base_data.add(base);
    base_out.add(base);
    base->add_option("--method", base_method, "Baseline")->check(CLI::IsMember({"group-lasso", "foba"}));
    base->add_option("--folds", base_folds, "CV folds")->check(CLI::Range(2, 1000));
    base->add_option("--k-max", base_k_max, "FoBa active-feature cap (0 = automatic)")->check(CLI::NonNegativeNumber);
    base->add_option("--grid-length", gl.grid_length, "Group lasso grid length")->check(CLI::PositiveNumber);
    base->add_option("--grid-ratio", gl.grid_ratio, "Smallest alpha / alpha_max")->check(CLI::Range(1e-12, 0.999999));

    // verify
    auto* verify = app.add_subcommand("verify", "Theory checks");
    verify->require_subcommand(1);
    auto* v_phi = verify->add_subcommand("phi", "Restricted eigenvalue bounds phi-(t), phi+(t)");
    DataFlags phi_data;
    Output phi_out;
    int phi_t = 1;
    phi_data.add(v_phi);
    phi_out.add(v_phi);
    v_phi->add_option("--t", phi_t, "Group sparsity order")->check(CLI::PositiveNumber);
    auto* v_sand = verify->add_subcommand("sandwich", "Forward-gain sandwich bounds at random points");
    DataFlags sand_data;
    Output sand_out;
    int sand_trials = 100;
    sand_data.add(v_sand);
    sand_out.add(v_sand);
    v_sand->add_option("--trials", sand_trials, "Random (w, g) draws")->check(CLI::PositiveNumber);
    auto* v_logit = verify->add_subcommand("logistic", "U1-U3 regularity constants of a simulated case 2 instance");
    Output logit_out;
    igs::SimSpec logit_spec;
    logit_spec.sim_case = igs::SimCase::case2;
    logit_out.add(v_logit);
    v_logit->add_option("--n", logit_spec.n, "Sample size")->check(CLI::PositiveNumber);
    v_logit->add_option("--kbar", logit_spec.kbar, "Relevant group count")->check(CLI::PositiveNumber);
    v_logit->add_option("--beta", logit_spec.beta, "Coefficient half-width")->check(CLI::PositiveNumber);
    auto* v_scale = verify->add_subcommand("scaling", "Error scaling of cross-validated IGA with n");
    Output scale_out;
    std::string scale_family = "gaussian";
    std::vector<int> n_grid{200, 400, 800, 1600};
    int scale_reps = 10;
    igs::ScalingOptions scale_opts;
    std::string scale_csv;
    scale_out.add(v_scale);
    v_scale->add_option("--family", scale_family)->check(CLI::IsMember({"gaussian", "logistic"}));
    v_scale->add_option("--n-grid", n_grid, "Comma list of sample sizes")->delimiter(',')->check(CLI::PositiveNumber);
    v_scale->add_option("--reps", scale_reps, "Replications per n")->check(CLI::PositiveNumber);
    v_scale->add_option("--kbar", scale_opts.kbar)->check(CLI::PositiveNumber);
    v_scale->add_option("--beta", scale_opts.beta)->check(CLI::PositiveNumber);
    v_scale->add_option("--folds", scale_opts.folds)->check(CLI::Range(2, 1000));
    v_scale->add_option("--k-max", scale_opts.k_max)->check(CLI::NonNegativeNumber);
    v_scale->add_option("--csv", scale_csv, "Also write (n, mean error^2, recovery rate) CSV here");

    // bench
    auto* bench = app.add_subcommand("bench", "Simulation table: generate, CV-fit each method, evaluate");
    int table = 2;
    std::string cell_text = "beta=1,kbar=5";
    int reps = 20;
    std::vector<std::string> method_names{"iga", "iga-lambda", "group-lasso", "foba"};
    Output bench_out;
    igs::HarnessOptions harness;
    bench_out.add(bench);
    bench->add_option("--table", table, "2 = case 1, 3 = case 2")->check(CLI::IsMember({2, 3}));
    bench->add_option("--cell", cell_text, "Cell, e.g. beta=1,kbar=5[,n=300]");
    bench->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
    bench->add_option("--methods", method_names, "Comma list of methods")
        ->delimiter(',')
        ->check(CLI::IsMember({"iga", "iga-lambda", "group-lasso", "foba"}));
    bench->add_option("--lambda-grid", harness.lambda_grid, "IGA-lambda grid")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    bench->add_option("--folds", harness.folds, "CV folds")->check(CLI::Range(2, 1000));
    bench->add_option("--k-max", harness.k_max, "IGA active-group cap (0 = automatic)")->check(CLI::NonNegativeNumber);
    bench->add_option("--foba-k-max", harness.foba_k_max, "FoBa active-feature cap (0 = automatic)")
        ->check(CLI::NonNegativeNumber);

    // serve
    auto* serve = app.add_subcommand("serve", "HTTP session service for interactive selection");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string persist;
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port (0 = any free port)")->check(CLI::Range(0, 65535));
    serve->add_option("--persist-dir", persist, "Write finished sessions as JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (sim->parsed()) {
            spec.sim_case = igs::parse_sim_case(sim_case);
            spec.seed = seed;
            const auto instance = spec.sim_case == igs::SimCase::heuristic ? igs::gen_heuristic(spec.n, seed)
                                                                           : igs::generate(spec);
            igs::write_bundle(sim_out, instance);
            return 0;
        }

        if (path_cmd->parsed()) {
            const auto data = std::make_shared<const igs::Dataset>(igs::standardize(path_data.dataset()));
            const auto partition = path_data.partition();
            const auto objective = igs::make_objective(path_data.fam(), data);
            auto policy = path_priority.empty()
                              ? igs::SelectionPolicy::greedy()
                              : igs::SelectionPolicy::priority_list(one_based_set(path_priority, partition.m()));
            const auto path = igs::run_path(*objective, partition, path_iga.config(), policy);
            Json j = igs::path_to_json(path);
            j["config"] = igs::config_to_json(path_iga.config());
            path_out.emit(j, path_table(path));
            return 0;
        }

        if (fit->parsed() || cv->parsed()) {
            const bool is_fit = fit->parsed();
            const DataFlags& df = is_fit ? fit_data : cv_data;
            const IgaFlags& flags = is_fit ? fit_iga : cv_iga;
            const auto data = df.dataset();
            const auto partition = df.partition();
            const auto family = df.fam();
            auto grid = is_fit ? std::vector<double>{fit_iga.lambda} : lambda_grid;
            const auto plan = igs::CvPlan::make(data.n(), is_fit ? fit_folds : cv_folds, seed, igs::loss_for(family),
                                                grid);
            auto policy = (!is_fit && !cv_priority.empty())
                              ? igs::SelectionPolicy::priority_list(one_based_set(cv_priority, partition.m()))
                              : igs::SelectionPolicy::greedy();
            const auto result =
                igs::cv_select(data, partition, family, flags.config(), plan, policy, igs::CvOptions{jobs, {}});
            (is_fit ? fit_out : cv_out).emit(igs::cv_report_to_json(result), cv_table(result));
            return 0;
        }

        if (base->parsed()) {
            const auto data = base_data.dataset();
            const auto partition = base_data.partition();
            const auto family = base_data.fam();
            const auto plan = igs::CvPlan::make(data.n(), base_folds, seed, igs::loss_for(family), {1.0});
            if (base_method == "group-lasso") {
                const auto res = igs::cv_group_lasso(data, partition, family, gl, plan, jobs);
                std::ostringstream t;
                t << "best alpha " << res.best_alpha << " (grid index " << res.best_index << ")\nactive groups:";
                for (int g : igs::nonzero_groups(res.coefficients, partition)) t << ' ' << g + 1;
                t << '\n';
                base_out.emit(igs::lasso_cv_to_json(res, partition), t.str());
            } else {
                igs::IgaConfig cfg;
                cfg.k_max = base_k_max;
                const auto singletons = igs::GroupPartition::singletons(data.p());
                const auto res = igs::cv_select(data, singletons, family, cfg, plan, igs::SelectionPolicy::greedy(),
                                                igs::CvOptions{jobs, {}});
                base_out.emit(igs::cv_report_to_json(res), cv_table(res));
            }
            return 0;
        }

        if (v_phi->parsed() || v_sand->parsed()) {
            const bool phi = v_phi->parsed();
            const DataFlags& df = phi ? phi_data : sand_data;
            const auto data = std::make_shared<const igs::Dataset>(df.dataset());
            const auto partition = df.partition();
            const auto objective = igs::make_objective(df.fam(), data);
            if (phi) {
                const auto rep = igs::phi_bounds(*objective, partition, phi_t);
                std::ostringstream t;
                t << "phi-(" << rep.t << ") = " << rep.phi_minus << "\nphi+(" << rep.t << ") = " << rep.phi_plus
                  << "\nkappa = " << rep.kappa << '\n';
                phi_out.emit(igs::regularity_to_json(rep), t.str());
            } else {
                const auto rep = igs::gain_sandwich_check(*objective, partition, sand_trials, seed);
                std::ostringstream t;
                t << rep.passed << "/" << rep.trials << " passed, worst violation " << rep.worst_violation << '\n';
                sand_out.emit(igs::sandwich_to_json(rep), t.str());
            }
            return 0;
        }

        if (v_logit->parsed()) {
            logit_spec.seed = seed;
            const auto rep = igs::logistic_regularity(igs::generate(logit_spec));
            std::ostringstream t;
            t << "U1 = " << rep.U1 << "\nU2 = " << rep.U2 << "\nU3 = " << rep.U3 << '\n';
            logit_out.emit(igs::logistic_regularity_to_json(rep), t.str());
            return 0;
        }

        if (v_scale->parsed()) {
            scale_opts.jobs = jobs;
            const auto rep = igs::scaling_experiment(igs::parse_family(scale_family), n_grid, scale_reps, seed, scale_opts);
            if (!scale_csv.empty()) {
                std::ofstream f(scale_csv);
                if (!f) throw igs::FormatError("cannot write " + scale_csv);
                f << igs::scaling_to_csv(rep);
            }
            std::ostringstream t;
            t << igs::scaling_to_csv(rep) << "slope " << rep.slope << '\n';
            scale_out.emit(igs::scaling_to_json(rep), t.str());
            return 0;
        }

        if (bench->parsed()) {
            harness.jobs = jobs;
            std::vector<igs::Method> methods;
            for (const auto& name : method_names) methods.push_back(igs::parse_method(name));
            const auto result = igs::bench_table(table, igs::parse_cell(cell_text), reps, seed, methods, harness);
            bench_out.emit(igs::bench_to_json(result), igs::format_bench_table(result));
            return 0;
        }

        if (serve->parsed()) {
            std::optional<std::filesystem::path> dir;
            if (!persist.empty()) dir = persist;
            igs::SessionManager manager(dir);
            igs::SessionServer server(manager);
            const int bound = server.bind(host, port);
            if (bound < 0) throw igs::Error("cannot bind " + host + ":" + std::to_string(port));
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on http://" << host << ":" << bound << '\n';
            server.listen();
            g_server = nullptr;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
