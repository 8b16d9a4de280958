// End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [--report FILE] [criterion ...]
//
// With no criterion numbers every criterion (1-9) runs. The exit status is 0
// once every selected criterion has been evaluated; --strict makes it the
// number of failed criteria instead.

#include "igs/baselines.hpp"
#include "igs/experiments.hpp"
#include "igs/iga.hpp"
#include "igs/modelselect.hpp"
#include "igs/simgen.hpp"
#include "igs/verify.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace igs;
using namespace igs::test_util;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// Checks every recorded step of every observed path.
class InvariantAuditor
{
public:
    void observe(const SelectionPath& path, const Objective& objective, const GroupPartition& partition,
                 const IgaConfig& config)
    {
        std::string problem = audit(path, objective, partition, config);
        std::lock_guard lock(mutex_);
        ++paths_;
        steps_ += static_cast<long>(path.snapshots.size());
        if (!problem.empty()) {
            ++violations_;
            if (first_.empty()) first_ = std::move(problem);
        }
    }

    PathObserver observer()
    {
        return [this](const SelectionPath& p, const Objective& o, const GroupPartition& g, const IgaConfig& c) {
            observe(p, o, g, c);
        };
    }

    long paths() const { return paths_; }
    long steps() const { return steps_; }
    long violations() const { return violations_; }
    const std::string& first_violation() const { return first_; }

private:
    static std::string audit(const SelectionPath& path, const Objective& objective, const GroupPartition& partition,
                             const IgaConfig& config)
    {
        const double floor = config.delta_floor.value_or(1e-10 * path.Q_null);
        std::vector<double> stack;
        GroupSet active;
        std::size_t e = 0;
        for (const auto& snap : path.snapshots) {
            if (e >= path.events.size() || path.events[e].action != Action::add) return "snapshot without an add";
            const auto& add = path.events[e++];
            if (!(add.level_gain >= config.lambda * floor)) {
                return fmt("forward gain %.3g below lambda * floor %.3g", add.level_gain, config.lambda * floor);
            }
            stack.push_back(add.level_gain);
            active.insert(add.group);
            while (e < path.events.size() && path.events[e].action == Action::remove) {
                if (stack.empty() || !active.erase(path.events[e].group)) return "removal of an inactive group";
                stack.pop_back();
                ++e;
            }
            if (!(active == snap.active)) return "event history does not replay to the snapshot";

            std::vector<bool> on(static_cast<std::size_t>(objective.p()), false);
            for (int j : feature_set(partition, snap.active)) on[static_cast<std::size_t>(j)] = true;
            for (int j = 0; j < objective.p(); ++j) {
                if (!on[static_cast<std::size_t>(j)] && snap.coefficients[j] != 0.0) {
                    return fmt("off-support coefficient %d is %.3g", j, snap.coefficients[j]);
                }
            }
            if (config.backward && !snap.active.empty()) {
                const auto costs = objective.removal_costs(snap.coefficients, snap.active.members(), partition);
                const double least = *std::min_element(costs.begin(), costs.end());
                if (!(least >= stack.back() / 2.0)) {
                    return fmt("sweep exited with removal cost %.6g < delta / 2 = %.6g", least, stack.back() / 2.0);
                }
            }
        }
        if (e != path.events.size()) return "events after the last snapshot";

        // Replay the recorded picks on a fresh engine: bit-identical history expected.
        IgaEngine replay(objective, partition, config);
        for (const auto& ev : path.events) {
            if (ev.action == Action::add) replay.advance(ev.group);
        }
        const auto& again = replay.path();
        if (again.events.size() != path.events.size()) return "replay changed the event count";
        for (std::size_t k = 0; k < path.events.size(); ++k) {
            const auto& a = again.events[k];
            const auto& b = path.events[k];
            if (a.action != b.action || a.group != b.group || a.Q_after != b.Q_after || a.level_gain != b.level_gain) {
                return fmt("replay diverged at event %zu", k);
            }
        }
        for (std::size_t k = 0; k < path.snapshots.size(); ++k) {
            if (again.snapshots[k].coefficients != path.snapshots[k].coefficients) {
                return fmt("replay coefficients differ at iteration %zu", k + 1);
            }
        }
        if (!replay.finished()) return "replayed engine did not terminate where the path did";
        return {};
    }

    std::mutex mutex_;
    long paths_ = 0;
    long steps_ = 0;
    long violations_ = 0;
    std::string first_;
};

bool in_band(double v, double lo, double hi)
{
    return v >= lo && v <= hi;
}

// ---------------------------------------------------------------------------

Outcome heuristic_correction(InvariantAuditor& auditor)
{
    constexpr int seeds = 100;
    Stopwatch clock;
    int forward_first = 0;
    int removal = 0;
    int cv_exact = 0;
    int both = 0;
    CvOptions cv_options;
    cv_options.observer = auditor.observer();
    for (int seed = 0; seed < seeds; ++seed) {
        const auto inst = gen_heuristic(400, static_cast<std::uint64_t>(seed));
        GaussianObjective obj(std::make_shared<const Dataset>(standardize(inst.data)));

        IgaConfig forward_only;
        forward_only.backward = false;
        const auto fo = run_path(obj, inst.partition, forward_only, SelectionPolicy::greedy());
        auditor.observe(fo, obj, inst.partition, forward_only);
        if (!fo.events.empty() && fo.events.front().group == 2) ++forward_first;

        const auto full = run_path(obj, inst.partition, IgaConfig{}, SelectionPolicy::greedy());
        auditor.observe(full, obj, inst.partition, IgaConfig{});
        const bool removed = std::any_of(full.events.begin(), full.events.end(), [](const PathEvent& e) {
            return e.action == Action::remove && e.group == 2;
        });

        const auto plan = CvPlan::make(400, 10, static_cast<std::uint64_t>(seed), LossKind::mse, {1.0});
        const auto cv = cv_select(inst.data, inst.partition, Family::gaussian, IgaConfig{}, plan,
                                  SelectionPolicy::greedy(), cv_options);
        const bool exact = cv.model.active == GroupSet({0, 1});
        removal += removed ? 1 : 0;
        cv_exact += exact ? 1 : 0;
        both += removed && exact ? 1 : 0;
    }
    const double secs = clock.seconds();
    Outcome out;
    out.pass = forward_first >= 80 && both >= 85 && secs <= 120.0;
    out.detail = fmt("forward-only picks group 3 first in %d/%d (>= 80); removal of 3 in %d, CV selects {1,2} in %d, "
                     "both in %d/%d (>= 85); %.1f s (<= 120)",
                     forward_first, seeds, removal, cv_exact, both, seeds, secs);
    return out;
}

HarnessOptions harness_with(InvariantAuditor& auditor)
{
    HarnessOptions h;
    h.observer = auditor.observer();
    return h;
}

const BenchRow& row_for(const BenchResult& result, Method m)
{
    for (const auto& row : result.rows) {
        if (row.method == m) return row;
    }
    throw std::logic_error("method missing from bench result");
}

Outcome table2_slice(InvariantAuditor& auditor)
{
    Stopwatch clock;
    const auto result = bench_table(2, CellSpec{1.0, 5, 300}, 20, 2,
                                    {Method::iga, Method::group_lasso, Method::foba}, harness_with(auditor));
    const double secs = clock.seconds();
    const auto& iga = row_for(result, Method::iga).summary;
    const auto& gl = row_for(result, Method::group_lasso).summary;
    const auto& foba = row_for(result, Method::foba).summary;
    const double e_iga = iga.l2_error.mean;
    const double e_gl = gl.l2_error.mean;
    const double e_foba = foba.l2_error.mean;

    Outcome out;
    out.pass = in_band(e_iga, 0.95, 1.40) && in_band(e_gl, 1.45, 2.10) && e_foba >= 2.0 && e_iga < e_gl &&
               e_gl < e_foba && iga.correct_groups.mean >= 4.9 && iga.incorrect_groups.mean <= 4.0 && secs <= 1800.0;
    out.detail = fmt("error IGA %.3f (se %.3f) in [0.95, 1.40]: %s; group lasso %.3f in [1.45, 2.10]: %s; "
                     "FoBa %.3f >= 2.0: %s; ordering: %s; IGA correct %.2f >= 4.9, incorrect %.2f <= 4; %.0f s (<= 1800)",
                     e_iga, iga.l2_error.standard_error, in_band(e_iga, 0.95, 1.40) ? "yes" : "no", e_gl,
                     in_band(e_gl, 1.45, 2.10) ? "yes" : "no", e_foba, e_foba >= 2.0 ? "yes" : "no",
                     e_iga < e_gl && e_gl < e_foba ? "yes" : "no", iga.correct_groups.mean,
                     iga.incorrect_groups.mean, secs);
    return out;
}

Outcome table3_slice(InvariantAuditor& auditor)
{
    Stopwatch clock;
    const auto result =
        bench_table(3, CellSpec{1.0, 5, 300}, 10, 3, {Method::iga, Method::group_lasso}, harness_with(auditor));
    const double secs = clock.seconds();
    const double e_iga = row_for(result, Method::iga).summary.l2_error.mean;
    const double e_gl = row_for(result, Method::group_lasso).summary.l2_error.mean;
    Outcome out;
    out.pass = in_band(e_iga, 1.8, 2.8) && e_iga < e_gl && secs <= 1800.0;
    out.detail = fmt("error IGA %.3f in [1.8, 2.8]: %s; group lasso %.3f; IGA below group lasso: %s; %.0f s (<= 1800)",
                     e_iga, in_band(e_iga, 1.8, 2.8) ? "yes" : "no", e_gl, e_iga < e_gl ? "yes" : "no", secs);
    return out;
}

Outcome error_scaling(InvariantAuditor& auditor)
{
    ScalingOptions opt;
    opt.kbar = 5;
    opt.beta = 1.0;
    opt.folds = 10;
    opt.observer = auditor.observer();
    const auto rep = scaling_experiment(Family::gaussian, {200, 400, 800, 1600}, 10, 4, opt);
    const double r_lo = rep.points.front().recovery_rate;
    const double r_hi = rep.points.back().recovery_rate;
    Outcome out;
    out.pass = in_band(rep.slope, -1.3, -0.7) && r_hi >= r_lo;
    std::ostringstream pts;
    for (const auto& p : rep.points) pts << fmt(" n=%d: %.4f", p.n, p.mean_squared_error);
    out.detail = fmt("slope %.3f in [-1.3, -0.7]; exact recovery %.1f at n=1600 vs %.1f at n=200; mean error^2", rep.slope,
                     r_hi, r_lo) +
                 pts.str();
    return out;
}

Outcome phi_oracle()
{
    std::mt19937_64 rng(5);
    double worst = 0.0;
    int instances = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2 + trial % 5;          // 2..6
        const int q = 1 + (trial / 5) % 2;    // 1..2
        const int t = 1 + trial % 3;          // 1..3
        const int n = trial % 4 == 0 ? m * q - 1 : 8 + 3 * trial;
        const int p = m * q;
        const Eigen::MatrixXd X = random_matrix(std::max(n, 1), p, rng);
        GaussianObjective obj(std::make_shared<const Dataset>(X, random_vector(std::max(n, 1), rng)));
        const auto part = GroupPartition::contiguous(p, q);
        const auto rep = phi_bounds(obj, part, t);

        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int mask = 1; mask < (1 << m); ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) > t) continue;
            std::vector<int> cols;
            for (int g = 0; g < m; ++g) {
                if (mask & (1 << g)) {
                    for (int j = g * q; j < (g + 1) * q; ++j) cols.push_back(j);
                }
            }
            Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) Xs.col(static_cast<Eigen::Index>(k)) = X.col(cols[k]);
            const Eigen::MatrixXd G = Xs.transpose() * Xs / static_cast<double>(X.rows());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
            lo = std::min(lo, eig.eigenvalues().minCoeff());
            hi = std::max(hi, eig.eigenvalues().maxCoeff());
        }
        worst = std::max({worst, std::abs(rep.phi_minus - lo), std::abs(rep.phi_plus - hi)});
        ++instances;
    }
    Outcome out;
    out.pass = worst <= 1e-10;
    out.detail = fmt("%d instances (m <= 6, q <= 2, t <= 3); largest deviation from brute force %.2e (<= 1e-10)",
                     instances, worst);
    return out;
}

Outcome group_lasso_checks()
{
    std::mt19937_64 rng(6);
    double worst_kkt = 0.0;
    int grid_points = 0;
    int zero_ok = 0;
    double worst_closed = 0.0;
    constexpr int instances = 20;
    for (int trial = 0; trial < instances; ++trial) {
        const bool logistic = trial % 4 == 3;
        const int q = 2 + trial % 3;
        const int m = 5 + trial % 7;
        const int p = m * q;
        const int n = 20 + 7 * trial;
        auto data = logistic ? logistic_data(n, p, rng) : gaussian_data(n, p, rng, 1.0);
        const auto obj = make_objective(logistic ? Family::logistic : Family::gaussian, data);
        const auto part = GroupPartition::contiguous(p, q);

        const auto path = group_lasso_path(*obj, part, GroupLassoConfig{});
        for (std::size_t k = 0; k < path.alphas.size(); ++k) {
            worst_kkt = std::max(worst_kkt, kkt_residual(*obj, part, path.coefficients[k], path.alphas[k]));
            ++grid_points;
        }

        const double amax = alpha_max(*obj, part);
        const auto above = group_lasso_fit(*obj, part, amax * 1.001, nullptr, GroupLassoConfig{});
        const auto below = group_lasso_fit(*obj, part, amax * 0.999, nullptr, GroupLassoConfig{});
        if (above.w.isZero(0.0) && !below.w.isZero(0.0)) ++zero_ok;

        const Eigen::MatrixXd Xo = orthonormal_design(n + p, p, rng);
        const Eigen::VectorXd yo = random_vector(n + p, rng);
        GaussianObjective ortho(std::make_shared<const Dataset>(Xo, yo));
        const double alpha = (0.1 + 0.04 * trial) * alpha_max(ortho, part);
        GroupLassoConfig tight;
        tight.kkt_tolerance = 1e-9;
        const auto fit = group_lasso_fit(ortho, part, alpha, nullptr, tight);
        const Eigen::VectorXd closed =
            prox_group(Xo.transpose() * yo / static_cast<double>(n + p), alpha, part);
        worst_closed = std::max(worst_closed, (fit.w - closed).norm());
    }
    Outcome out;
    out.pass = worst_kkt <= 1e-6 && zero_ok == instances && worst_closed <= 1e-8;
    out.detail = fmt("max KKT residual %.2e over %d grid points of %d paths (<= 1e-6); zero iff alpha >= alpha_max at "
                     "+-0.1%%: %d/%d; orthonormal closed-form distance %.2e (<= 1e-8)",
                     worst_kkt, grid_points, instances, zero_ok, instances, worst_closed);
    return out;
}

Outcome engine_invariants(const InvariantAuditor& auditor, const std::string& sources)
{
    Outcome out;
    out.pass = auditor.paths() > 0 && auditor.violations() == 0;
    out.detail = fmt("%ld paths, %ld recorded iterations from criteria %s; %ld violating paths", auditor.paths(),
                     auditor.steps(), sources.c_str(), auditor.violations());
    if (!auditor.first_violation().empty()) out.detail += "; first: " + auditor.first_violation();
    if (auditor.paths() == 0) out.detail += " (no runs observed; select at least one of criteria 1-4)";
    return out;
}

Outcome gradient_checks()
{
    std::mt19937_64 rng(8);
    int fd_pass[2] = {0, 0};
    double fd_worst[2] = {0.0, 0.0};
    for (int family = 0; family < 2; ++family) {
        for (int k = 0; k < 50; ++k) {
            const int n = 30 + k;
            const int p = 5 + k % 11;
            auto data = family == 0 ? gaussian_data(n, p, rng) : logistic_data(n, p, rng);
            const auto obj = make_objective(family == 0 ? Family::gaussian : Family::logistic, data);
            const Eigen::VectorXd w = random_vector(p, rng, 0.5);
            const Eigen::VectorXd g = obj->gradient(w);
            Eigen::VectorXd fd(p);
            for (int j = 0; j < p; ++j) {
                const double h = 1e-5 * std::max(1.0, std::abs(w[j]));
                Eigen::VectorXd a = w;
                Eigen::VectorXd b = w;
                a[j] += h;
                b[j] -= h;
                fd[j] = (obj->value(a) - obj->value(b)) / (2.0 * h);
            }
            const double rel = (fd - g).norm() / std::max(g.norm(), 1e-12);
            fd_worst[family] = std::max(fd_worst[family], rel);
            if (rel <= 1e-5) ++fd_pass[family];
        }
    }

    int sandwich_ok = 0;
    for (int k = 0; k < 100; ++k) {
        const int q = 1 + k % 4;
        const int m = 3 + k % 5;
        const int n = 10 + 3 * k;
        GaussianObjective obj(gaussian_data(n, m * q, rng));
        const auto rep = gain_sandwich_check(obj, GroupPartition::contiguous(m * q, q), 20, static_cast<std::uint64_t>(k));
        if (rep.ok()) ++sandwich_ok;
    }
    Outcome out;
    out.pass = fd_pass[0] == 50 && fd_pass[1] == 50 && sandwich_ok == 100;
    out.detail = fmt("finite differences: gaussian %d/50 (worst %.1e), logistic %d/50 (worst %.1e), bound 1e-5; "
                     "gain sandwich %d/100 instances",
                     fd_pass[0], fd_worst[0], fd_pass[1], fd_worst[1], sandwich_ok);
    return out;
}

Outcome giga_agreement()
{
    std::mt19937_64 rng(9);
    int agree = 0;
    for (int k = 0; k < 50; ++k) {
        const int q = 1 + k % 3;
        const int m = 4 + k % 9;
        const int p = m * q;
        const int n = p + 5 + k;
        const Eigen::MatrixXd X = orthonormal_design(n, p, rng);
        GaussianObjective obj(std::make_shared<const Dataset>(X, random_vector(n, rng)));
        const auto part = GroupPartition::contiguous(p, q);
        IgaConfig iga;
        IgaConfig giga;
        giga.scoring = ScoringMode::gradient_norm;
        IgaEngine a(obj, part, iga);
        IgaEngine b(obj, part, giga);
        a.step(SelectionPolicy::greedy());
        b.step(SelectionPolicy::greedy());
        if (!a.path().events.empty() && !b.path().events.empty() &&
            a.path().events.front().group == b.path().events.front().group) {
            ++agree;
        }
    }
    Outcome out;
    out.pass = agree == 50;
    out.detail = fmt("first selected group identical on %d/50 orthonormal instances", agree);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    std::string report_path;
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--strict") {
            strict = true;
        } else if (arg == "--report" && i + 1 < argc) {
            report_path = argv[++i];
        } else {
            char* end = nullptr;
            const long c = std::strtol(arg.c_str(), &end, 10);
            if (*end != '\0' || c < 1 || c > 9) {
                std::cerr << "usage: acceptance [--strict] [--report FILE] [criterion 1-9 ...]\n";
                return 2;
            }
            selected.insert(static_cast<int>(c));
        }
    }
    if (selected.empty()) {
        for (int c = 1; c <= 9; ++c) selected.insert(c);
    }

    std::ofstream report;
    if (!report_path.empty()) report.open(report_path);
    InvariantAuditor auditor;
    std::string audited;
    int failed = 0;
    auto emit = [&](int id, const char* title, const Outcome& o) {
        const std::string line =
            fmt("criterion %d %s: %s", id, o.pass ? "PASS" : "FAIL", title) + " | " + o.detail;
        std::cout << line << std::endl;
        if (report) report << line << '\n' << std::flush;
        failed += o.pass ? 0 : 1;
    };
    auto run = [&](int id, const char* title, auto&& body) {
        if (!selected.count(id)) return;
        try {
            emit(id, title, body());
        } catch (const std::exception& e) {
            emit(id, title, Outcome{false, std::string("error: ") + e.what()});
        }
    };
    auto note = [&audited](int id) { audited += (audited.empty() ? "" : ",") + std::to_string(id); };

    run(1, "heuristic correction scenario", [&] { note(1); return heuristic_correction(auditor); });
    run(2, "case 1 table slice", [&] { note(2); return table2_slice(auditor); });
    run(3, "case 2 table slice", [&] { note(3); return table3_slice(auditor); });
    run(4, "error scaling with n", [&] { note(4); return error_scaling(auditor); });
    run(5, "phi bounds vs brute force", [] { return phi_oracle(); });
    run(6, "group lasso correctness", [] { return group_lasso_checks(); });
    run(7, "engine invariants on criteria 1-4", [&] { return engine_invariants(auditor, audited.empty() ? "none" : audited); });
    run(8, "gradient and gain sandwich checks", [] { return gradient_checks(); });
    run(9, "GIGA / IGA agreement on orthonormal designs", [] { return giga_agreement(); });

    std::cout << fmt("%zu criteria evaluated, %d failed", selected.size(), failed) << std::endl;
    if (report) report << fmt("%zu criteria evaluated, %d failed", selected.size(), failed) << '\n';
    return strict ? failed : 0;
}
