#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace igs {

using IndexList = std::vector<int>;

/**
 * Set of group indices, kept sorted and duplicate-free.
 */
class GroupSet
{
public:
    GroupSet() = default;
    explicit GroupSet(std::vector<int> members);

    bool contains(int g) const;
    /// Returns false when g was already present.
    bool insert(int g);
    /// Returns false when g was absent.
    bool erase(int g);

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<int>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const GroupSet&, const GroupSet&) = default;

private:
    std::vector<int> members_;
};

/**
 * Known non-overlapping partition of the feature indices {0, ..., p-1}
 * into m groups. Immutable after construction.
 */
class GroupPartition
{
public:
    /// Validates and normalizes `raw_groups`. Throws RangeError,
    /// OverlapError or CoverageError.
    GroupPartition(std::vector<IndexList> raw_groups, int p);

    /// Every feature in its own group.
    static GroupPartition singletons(int p);
    /// Contiguous groups of equal size q; requires p % q == 0.
    static GroupPartition contiguous(int p, int q);

    int p() const { return p_; }
    int m() const { return static_cast<int>(groups_.size()); }
    const IndexList& group(int g) const { return groups_.at(static_cast<std::size_t>(g)); }
    int group_size(int g) const { return static_cast<int>(group(g).size()); }
    const std::vector<IndexList>& groups() const { return groups_; }
    /// Group that owns feature j.
    int owner(int j) const { return owner_.at(static_cast<std::size_t>(j)); }

    /// Largest group size (q in the uniform case).
    int max_group_size() const;
    double mean_group_size() const;
    /// k_s: largest |F_S| over |S| <= s, i.e. the sum of the s largest groups.
    int max_support_size(int s) const;

private:
    int p_ = 0;
    std::vector<IndexList> groups_;
    std::vector<int> owner_;
};

/// Union of the member groups' features, sorted.
IndexList feature_set(const GroupPartition& partition, const GroupSet& set);

struct GroupNorms
{
    Eigen::VectorXd per_group_l2;
    double l2_inf = 0.0;
    double l2_1 = 0.0;
    int group_l0 = 0;
};

GroupNorms group_norms(const Eigen::Ref<const Eigen::VectorXd>& w, const GroupPartition& partition);

/// p-vector with alpha scattered to the positions of group g.
Eigen::VectorXd embed(const GroupPartition& partition, int g, const Eigen::Ref<const Eigen::VectorXd>& alpha);

/// Gathers the coordinates of w belonging to group g.
Eigen::VectorXd restrict_to(const GroupPartition& partition, int g, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Gathers coordinates of w at the given indices.
Eigen::VectorXd gather(const Eigen::Ref<const Eigen::VectorXd>& w, const IndexList& idx);

/// Groups whose coefficient block has Euclidean norm strictly above `threshold`.
GroupSet nonzero_groups(const Eigen::Ref<const Eigen::VectorXd>& w, const GroupPartition& partition,
                        double threshold = 0.0);

} // namespace igs
