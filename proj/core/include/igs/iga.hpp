#pragma once

#include "igs/criterion.hpp"
#include "igs/groups.hpp"

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace igs {

enum class ScoringMode {
    /// Q(w) - min_alpha Q(w + E_g alpha) (IGA).
    objective_reduction,
    /// ||grad_g Q(w)|| (GIGA).
    gradient_norm,
};

std::string_view to_string(ScoringMode mode);
ScoringMode parse_scoring_mode(std::string_view name);

struct IgaConfig
{
    /// Discount factor in (0, 1]; candidates scoring >= lambda * best form A_lambda.
    double lambda = 1.0;
    ScoringMode scoring = ScoringMode::objective_reduction;
    /// Maximum number of active groups; 0 selects min(m, floor(n / mean group size)).
    int k_max = 0;
    /// Termination threshold on the best score; unset selects 1e-10 * Q(0).
    std::optional<double> delta_floor;
    double tie_tolerance = 1e-12;
    /// false gives the forward-only (stepwise) variant.
    bool backward = true;

    /// Throws RangeError for lambda outside (0, 1], negative thresholds or k_max < 0.
    void validate() const;
};

struct Candidate
{
    int group = 0;
    double score = 0.0;
    bool in_A_lambda = false;
};

enum class Action { add, remove };

struct PathEvent
{
    Action action = Action::add;
    int group = 0;
    double Q_after = 0.0;
    /// Gain of the level entered (add) or left (remove).
    double level_gain = 0.0;
    int iteration = 0;
};

struct Snapshot
{
    int iteration = 0;
    GroupSet active;
    Eigen::VectorXd coefficients;
};

struct SelectionPath
{
    std::vector<PathEvent> events;
    /// One entry per completed forward + backward iteration, iteration = 1, 2, ...
    std::vector<Snapshot> snapshots;
    double Q_null = 0.0;

    /// One-based signed group sequence, removals negative, e.g. {3, 2, 1, -3}.
    std::vector<int> signed_sequence() const;
};

/**
 * Chooses g^(k) from the scored candidates.
 *
 * greedy: highest score, ties to the smallest index.
 * priority_list: highest-scoring member of A_I within A_lambda, else greedy.
 * interactive: delegates to `chooser`; the choice must lie in A_lambda.
 */
struct SelectionPolicy
{
    enum class Kind { greedy, priority_list, interactive };

    Kind kind = Kind::greedy;
    GroupSet priority;
    std::function<int(const std::vector<Candidate>&)> chooser;

    static SelectionPolicy greedy();
    static SelectionPolicy priority_list(GroupSet priority);
    static SelectionPolicy interactive(std::function<int(const std::vector<Candidate>&)> chooser);

    int choose(const std::vector<Candidate>& candidates) const;
};

/**
 * Scores every group outside `active` and flags membership of A_lambda.
 * Sorted by score descending, ties by group index. Throws NoCandidates when
 * every group is active.
 */
std::vector<Candidate> candidate_set(const Objective& objective, const Eigen::VectorXd& w, const GroupSet& active,
                                     const IgaConfig& config, const GroupPartition& partition);

/**
 * Forward-backward group selection state machine.
 *
 * Each iteration adds one group from A_lambda, refits on the enlarged support
 * and then removes groups whose removal cost falls below half the gain of the
 * current level. The engine is single-writer; candidate scores for the current
 * state are computed once and cached.
 */
class IgaEngine
{
public:
    IgaEngine(const Objective& objective, const GroupPartition& partition, IgaConfig config);

    bool finished() const;
    /// Scored candidates for the current state; empty once finished.
    const std::vector<Candidate>& candidates() const;

    /// Adds group g (must be in A_lambda), then runs the backward sweep and
    /// records a snapshot. Throws PolicyError with the state unchanged otherwise.
    void advance(int g);
    /// One iteration using `policy`; false when the path has terminated.
    bool step(const SelectionPolicy& policy);
    /// Runs until termination.
    void run(const SelectionPolicy& policy);

    const GroupSet& active() const { return active_; }
    const Eigen::VectorXd& coefficients() const { return w_; }
    double objective_value() const { return q_; }
    int iteration() const { return iteration_; }
    int k_max() const { return k_max_; }
    double delta_floor() const { return delta_floor_; }
    const IgaConfig& config() const { return config_; }
    /// level_gains()[k-1] is the gain recorded when level k was entered.
    const std::vector<double>& level_gains() const { return level_gains_; }
    const SelectionPath& path() const { return path_; }
    long forward_evaluations() const { return forward_evaluations_; }

private:
    void refresh_candidates() const;
    PathEvent forward(int g);
    void backward_sweep();
    void refit(const IndexList& support);

    const Objective& objective_;
    const GroupPartition& partition_;
    IgaConfig config_;
    int k_max_ = 0;
    double delta_floor_ = 0.0;
    long evaluation_budget_ = 0;

    GroupSet active_;
    Eigen::VectorXd w_;
    double q_ = 0.0;
    int iteration_ = 0;
    std::vector<double> level_gains_;
    SelectionPath path_;
    mutable long forward_evaluations_ = 0;

    mutable bool candidates_valid_ = false;
    mutable bool finished_ = false;
    mutable std::vector<Candidate> candidates_;
};

/// Runs the engine to termination and returns the recorded path.
SelectionPath run_path(const Objective& objective, const GroupPartition& partition, const IgaConfig& config,
                       const SelectionPolicy& policy);

struct FittedModel
{
    Eigen::VectorXd coefficients;
    GroupSet active;
    double objective_value = 0.0;
    int iteration = 0;
    bool converged = true;
};

/// Active set after iteration t refit on `objective`'s data; t = 0 is the null model.
FittedModel state_at_iteration(const SelectionPath& path, int t, const Objective& objective,
                               const GroupPartition& partition);

} // namespace igs
