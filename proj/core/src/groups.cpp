#include "igs/groups.hpp"

#include "igs/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace igs {

GroupSet::GroupSet(std::vector<int> members) : members_(std::move(members))
{
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool GroupSet::contains(int g) const
{
    return std::binary_search(members_.begin(), members_.end(), g);
}

bool GroupSet::insert(int g)
{
    auto it = std::lower_bound(members_.begin(), members_.end(), g);
    if (it != members_.end() && *it == g) return false;
    members_.insert(it, g);
    return true;
}

bool GroupSet::erase(int g)
{
    auto it = std::lower_bound(members_.begin(), members_.end(), g);
    if (it == members_.end() || *it != g) return false;
    members_.erase(it);
    return true;
}

GroupPartition::GroupPartition(std::vector<IndexList> raw_groups, int p)
    : p_(p), groups_(std::move(raw_groups)), owner_(static_cast<std::size_t>(std::max(p, 0)), -1)
{
    if (p <= 0) throw RangeError("feature count must be positive, got " + std::to_string(p));
    if (groups_.empty()) throw RangeError("partition needs at least one group");
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        auto& idx = groups_[g];
        if (idx.empty()) throw RangeError("group " + std::to_string(g) + " is empty");
        std::sort(idx.begin(), idx.end());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const int j = idx[k];
            if (j < 0 || j >= p) {
                throw RangeError("index " + std::to_string(j) + " outside [0, " + std::to_string(p) + ")");
            }
            if (k > 0 && idx[k - 1] == j) {
                throw OverlapError("index " + std::to_string(j) + " repeated in group " + std::to_string(g));
            }
            auto& own = owner_[static_cast<std::size_t>(j)];
            if (own != -1) {
                throw OverlapError("groups overlap: index " + std::to_string(j) + " in groups " +
                                   std::to_string(own) + " and " + std::to_string(g));
            }
            own = static_cast<int>(g);
        }
    }
    for (int j = 0; j < p; ++j) {
        if (owner_[static_cast<std::size_t>(j)] == -1) {
            throw CoverageError("index " + std::to_string(j) + " is not assigned to any group");
        }
    }
}

GroupPartition GroupPartition::singletons(int p)
{
    std::vector<IndexList> groups(static_cast<std::size_t>(std::max(p, 0)));
    for (int j = 0; j < p; ++j) groups[static_cast<std::size_t>(j)] = {j};
    return GroupPartition(std::move(groups), p);
}

GroupPartition GroupPartition::contiguous(int p, int q)
{
    if (q <= 0 || p % q != 0) throw RangeError("p must be a positive multiple of q");
    std::vector<IndexList> groups(static_cast<std::size_t>(p / q));
    for (int g = 0; g < p / q; ++g) {
        auto& idx = groups[static_cast<std::size_t>(g)];
        idx.resize(static_cast<std::size_t>(q));
        std::iota(idx.begin(), idx.end(), g * q);
    }
    return GroupPartition(std::move(groups), p);
}

int GroupPartition::max_group_size() const
{
    int q = 0;
    for (const auto& idx : groups_) q = std::max(q, static_cast<int>(idx.size()));
    return q;
}

double GroupPartition::mean_group_size() const
{
    return static_cast<double>(p_) / static_cast<double>(m());
}

int GroupPartition::max_support_size(int s) const
{
    std::vector<int> sizes;
    sizes.reserve(groups_.size());
    for (const auto& idx : groups_) sizes.push_back(static_cast<int>(idx.size()));
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    const auto take = static_cast<std::size_t>(std::clamp(s, 0, m()));
    return std::accumulate(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(take), 0);
}

IndexList feature_set(const GroupPartition& partition, const GroupSet& set)
{
    IndexList out;
    for (int g : set) {
        const auto& idx = partition.group(g);
        out.insert(out.end(), idx.begin(), idx.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

GroupNorms group_norms(const Eigen::Ref<const Eigen::VectorXd>& w, const GroupPartition& partition)
{
    if (w.size() != partition.p()) throw DimensionError("vector length does not match partition");
    GroupNorms out;
    out.per_group_l2.resize(partition.m());
    for (int g = 0; g < partition.m(); ++g) {
        double sq = 0.0;
        for (int j : partition.group(g)) sq += w[j] * w[j];
        const double norm = std::sqrt(sq);
        out.per_group_l2[g] = norm;
        out.l2_inf = std::max(out.l2_inf, norm);
        out.l2_1 += norm;
        if (norm > 0.0) ++out.group_l0;
    }
    return out;
}

Eigen::VectorXd embed(const GroupPartition& partition, int g, const Eigen::Ref<const Eigen::VectorXd>& alpha)
{
    const auto& idx = partition.group(g);
    if (alpha.size() != static_cast<Eigen::Index>(idx.size())) {
        throw DimensionError("alpha length does not match group size");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(partition.p());
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = alpha[static_cast<Eigen::Index>(k)];
    return out;
}

Eigen::VectorXd restrict_to(const GroupPartition& partition, int g, const Eigen::Ref<const Eigen::VectorXd>& w)
{
    return gather(w, partition.group(g));
}

Eigen::VectorXd gather(const Eigen::Ref<const Eigen::VectorXd>& w, const IndexList& idx)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = w[idx[k]];
    return out;
}

GroupSet nonzero_groups(const Eigen::Ref<const Eigen::VectorXd>& w, const GroupPartition& partition, double threshold)
{
    const auto norms = group_norms(w, partition);
    std::vector<int> members;
    for (int g = 0; g < partition.m(); ++g) {
        if (norms.per_group_l2[g] > threshold) members.push_back(g);
    }
    return GroupSet(std::move(members));
}

} // namespace igs
