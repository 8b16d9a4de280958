#include "igs/iga.hpp"

#include "igs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace igs {

std::string_view to_string(ScoringMode mode)
{
    return mode == ScoringMode::objective_reduction ? "objective_reduction" : "gradient_norm";
}

ScoringMode parse_scoring_mode(std::string_view name)
{
    if (name == "objective_reduction" || name == "objective") return ScoringMode::objective_reduction;
    if (name == "gradient_norm" || name == "gradient") return ScoringMode::gradient_norm;
    throw FormatError("unknown scoring mode '" + std::string(name) + "'");
}

void IgaConfig::validate() const
{
    if (!(lambda > 0.0 && lambda <= 1.0)) throw RangeError("lambda must lie in (0, 1]");
    if (k_max < 0) throw RangeError("k_max must be non-negative (0 = automatic)");
    if (delta_floor && !(*delta_floor >= 0.0)) throw RangeError("delta_floor must be non-negative");
    if (!(tie_tolerance >= 0.0 && tie_tolerance < 1.0)) throw RangeError("tie_tolerance must lie in [0, 1)");
}

std::vector<int> SelectionPath::signed_sequence() const
{
    std::vector<int> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.action == Action::add ? e.group + 1 : -(e.group + 1));
    return out;
}

SelectionPolicy SelectionPolicy::greedy()
{
    return {};
}

SelectionPolicy SelectionPolicy::priority_list(GroupSet priority)
{
    SelectionPolicy policy;
    policy.kind = Kind::priority_list;
    policy.priority = std::move(priority);
    return policy;
}

SelectionPolicy SelectionPolicy::interactive(std::function<int(const std::vector<Candidate>&)> chooser)
{
    SelectionPolicy policy;
    policy.kind = Kind::interactive;
    policy.chooser = std::move(chooser);
    return policy;
}

int SelectionPolicy::choose(const std::vector<Candidate>& candidates) const
{
    if (candidates.empty()) throw NoCandidates("no candidate groups to choose from");
    switch (kind) {
    case Kind::greedy:
        return candidates.front().group;
    case Kind::priority_list:
        for (const auto& c : candidates) {
            if (c.in_A_lambda && priority.contains(c.group)) return c.group;
        }
        return candidates.front().group;
    case Kind::interactive:
        if (!chooser) throw PolicyError("interactive policy has no chooser");
        return chooser(candidates);
    }
    return candidates.front().group;
}

std::vector<Candidate> candidate_set(const Objective& objective, const Eigen::VectorXd& w, const GroupSet& active,
                                     const IgaConfig& config, const GroupPartition& partition)
{
    std::vector<int> outside;
    for (int g = 0; g < partition.m(); ++g) {
        if (!active.contains(g)) outside.push_back(g);
    }
    if (outside.empty()) throw NoCandidates("every group is already active");

    std::vector<double> scores;
    if (config.scoring == ScoringMode::objective_reduction) {
        scores = objective.forward_gains(w, outside, partition);
    } else {
        const Eigen::VectorXd grad = objective.gradient(w);
        scores.reserve(outside.size());
        for (int g : outside) scores.push_back(restrict_to(partition, g, grad).norm());
    }

    std::vector<Candidate> out(outside.size());
    for (std::size_t k = 0; k < outside.size(); ++k) out[k] = {outside[k], scores[k], false};
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.group < b.group;
    });
    const double cutoff = config.lambda * out.front().score * (1.0 - config.tie_tolerance);
    for (auto& c : out) c.in_A_lambda = c.score >= cutoff;
    return out;
}

// ---------------------------------------------------------------------------

IgaEngine::IgaEngine(const Objective& objective, const GroupPartition& partition, IgaConfig config)
    : objective_(objective), partition_(partition), config_(std::move(config))
{
    config_.validate();
    if (partition_.p() != objective_.p()) throw DimensionError("partition and dataset disagree on p");
    const int m = partition_.m();
    const int by_samples =
        std::max(1, static_cast<int>(std::floor(objective_.n() / partition_.mean_group_size())));
    k_max_ = config_.k_max > 0 ? std::min(config_.k_max, m) : std::min(m, by_samples);

    w_ = Eigen::VectorXd::Zero(objective_.p());
    q_ = objective_.value(w_);
    path_.Q_null = q_;
    delta_floor_ = config_.delta_floor ? *config_.delta_floor : 1e-10 * q_;
    evaluation_budget_ = 2L * k_max_ * m;
}

bool IgaEngine::finished() const
{
    refresh_candidates();
    return finished_;
}

const std::vector<Candidate>& IgaEngine::candidates() const
{
    refresh_candidates();
    return candidates_;
}

void IgaEngine::refresh_candidates() const
{
    if (candidates_valid_) return;
    candidates_valid_ = true;
    candidates_.clear();
    const auto outside = partition_.m() - static_cast<long>(active_.size());
    if (static_cast<int>(active_.size()) >= k_max_ || outside == 0 ||
        forward_evaluations_ + outside > evaluation_budget_) {
        finished_ = true;
        return;
    }
    auto scored = candidate_set(objective_, w_, active_, config_, partition_);
    forward_evaluations_ += outside;
    const double best = scored.front().score;
    if (!(best > 0.0) || best < delta_floor_) {
        finished_ = true;
        return;
    }
    finished_ = false;
    candidates_ = std::move(scored);
}

void IgaEngine::advance(int g)
{
    refresh_candidates();
    if (finished_) throw PolicyError("the selection path has terminated");
    const auto it = std::find_if(candidates_.begin(), candidates_.end(),
                                 [g](const Candidate& c) { return c.group == g; });
    if (it == candidates_.end()) throw PolicyError("group " + std::to_string(g) + " is not a candidate");
    if (!it->in_A_lambda) throw PolicyError("group " + std::to_string(g) + " is outside A_lambda");

    ++iteration_;
    forward(g);
    if (config_.backward) backward_sweep();
    path_.snapshots.push_back({iteration_, active_, w_});
    candidates_valid_ = false;
}

bool IgaEngine::step(const SelectionPolicy& policy)
{
    if (finished()) return false;
    advance(policy.choose(candidates_));
    return true;
}

void IgaEngine::run(const SelectionPolicy& policy)
{
    while (step(policy)) {
    }
}

void IgaEngine::refit(const IndexList& support)
{
    const auto rep = objective_.restricted_minimize(support, &w_);
    w_ = rep.w;
    q_ = objective_.value(w_);
}

PathEvent IgaEngine::forward(int g)
{
    const double before = q_;
    active_.insert(g);
    refit(feature_set(partition_, active_));
    const double gain = before - q_;
    level_gains_.push_back(gain);
    PathEvent event{Action::add, g, q_, gain, iteration_};
    path_.events.push_back(event);
    return event;
}

void IgaEngine::backward_sweep()
{
    while (!active_.empty()) {
        const std::vector<int> members = active_.members();
        const auto costs = objective_.removal_costs(w_, members, partition_);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < costs.size(); ++k) {
            if (costs[k] < costs[arg]) arg = k;
        }
        const double level_gain = level_gains_.back();
        if (costs[arg] >= level_gain / 2.0) break;

        const int g = members[arg];
        active_.erase(g);
        level_gains_.pop_back();
        for (int j : partition_.group(g)) w_[j] = 0.0;
        refit(feature_set(partition_, active_));
        path_.events.push_back({Action::remove, g, q_, level_gain, iteration_});
    }
}

SelectionPath run_path(const Objective& objective, const GroupPartition& partition, const IgaConfig& config,
                       const SelectionPolicy& policy)
{
    IgaEngine engine(objective, partition, config);
    engine.run(policy);
    return engine.path();
}

FittedModel state_at_iteration(const SelectionPath& path, int t, const Objective& objective,
                               const GroupPartition& partition)
{
    if (t < 0 || t > static_cast<int>(path.snapshots.size())) {
        throw RangeError("iteration " + std::to_string(t) + " outside [0, " +
                         std::to_string(path.snapshots.size()) + "]");
    }
    FittedModel model;
    model.iteration = t;
    if (t == 0) {
        model.coefficients = Eigen::VectorXd::Zero(objective.p());
        model.objective_value = objective.value(model.coefficients);
        return model;
    }
    const auto& snap = path.snapshots[static_cast<std::size_t>(t - 1)];
    model.active = snap.active;
    const Eigen::VectorXd* warm = snap.coefficients.size() == objective.p() ? &snap.coefficients : nullptr;
    const auto rep = objective.restricted_minimize(feature_set(partition, snap.active), warm);
    model.coefficients = rep.w;
    model.converged = rep.converged;
    model.objective_value = objective.value(rep.w);
    return model;
}

} // namespace igs
