#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <gso/error.hpp>

namespace gso {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Penalty exponent p. Only p = 2 and p = inf have closed-form per-group projections.
enum class Exponent { two, infinity };

/// p together with its conjugate q (1/p + 1/q = 1).
struct ExponentPair
{
    double p;
    double q;

    static constexpr ExponentPair of(Exponent e) noexcept
    {
        return e == Exponent::two ? ExponentPair{2.0, 2.0}
                                  : ExponentPair{gso::infinity, 1.0};
    }
};

inline double conjugate_exponent(Exponent e) noexcept { return ExponentPair::of(e).q; }

inline Exponent parse_exponent(const std::string& s)
{
    if (s == "2") return Exponent::two;
    if (s == "inf" || s == "infinity") return Exponent::infinity;
    throw input_error("unsupported penalty exponent '" + s + "' (expected 2 or inf)");
}

inline std::string to_string(Exponent e) { return e == Exponent::two ? "2" : "inf"; }

enum class Coverage {
    required,  ///< union of groups must be {0..d-1}
    partial    ///< uncovered coordinates are allowed and are forced to zero by the penalty
};

namespace detail {

/// (sum_{j in group} |x_j|^q)^{1/q}, or max |x_j| when q is infinite. No validation.
template <class VecType>
inline double group_norm_unchecked(const VecType& x, std::span<const Index> group, double q)
{
    if (q == 2.0) {
        double s = 0;
        for (auto j : group) s += x[j] * x[j];
        return std::sqrt(s);
    }
    if (q == 1.0) {
        double s = 0;
        for (auto j : group) s += std::abs(x[j]);
        return s;
    }
    if (std::isinf(q)) {
        double m = 0;
        for (auto j : group) m = std::max(m, std::abs(x[j]));
        return m;
    }
    double s = 0;
    for (auto j : group) s += std::pow(std::abs(x[j]), q);
    return std::pow(s, 1.0 / q);
}

} // namespace detail

/**
 * Family of (possibly overlapping) index groups over {0..d-1}.
 *
 * Groups are stored sorted, 0-based. The latent (replicated) space lays the
 * groups out back to back, so group r occupies [offset(r), offset(r) + |G_r|).
 * The coordinate -> groups map and the group overlap graph are built once.
 */
class GroupStructure
{
public:
    GroupStructure() = default;

    GroupStructure(Index dim, std::vector<std::vector<Index>> groups,
                   Coverage coverage = Coverage::required)
        : dim_(dim), groups_(std::move(groups))
    {
        if (dim_ < 1) throw input_error("group structure: dimension must be >= 1");
        if (groups_.empty()) throw input_error("group structure: no groups given");

        offsets_.assign(groups_.size() + 1, 0);
        std::vector<Index> count(dim_, 0);
        for (std::size_t r = 0; r < groups_.size(); ++r) {
            auto& g = groups_[r];
            if (g.empty()) {
                throw input_error("group " + std::to_string(r) + " is empty");
            }
            std::sort(g.begin(), g.end());
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (g[k] < 0 || g[k] >= dim_) {
                    throw input_error("group " + std::to_string(r) + ": index " +
                                      std::to_string(g[k]) + " out of range [0, " +
                                      std::to_string(dim_) + ")");
                }
                if (k > 0 && g[k] == g[k - 1]) {
                    throw input_error("group " + std::to_string(r) + ": duplicate index " +
                                      std::to_string(g[k]));
                }
                ++count[g[k]];
            }
            offsets_[r + 1] = offsets_[r] + static_cast<Index>(g.size());
        }

        // coordinate -> containing groups (CSR)
        coord_offsets_.assign(dim_ + 1, 0);
        for (Index j = 0; j < dim_; ++j) coord_offsets_[j + 1] = coord_offsets_[j] + count[j];
        coord_groups_.resize(coord_offsets_[dim_]);
        std::vector<Index> fill(coord_offsets_.begin(), coord_offsets_.end() - 1);
        for (std::size_t r = 0; r < groups_.size(); ++r) {
            for (auto j : groups_[r]) coord_groups_[fill[j]++] = static_cast<Index>(r);
        }

        covered_ = 0;
        for (Index j = 0; j < dim_; ++j) {
            if (count[j] > 0) {
                ++covered_;
            } else if (coverage == Coverage::required) {
                throw input_error("coordinate " + std::to_string(j) +
                                  " is not covered by any group");
            }
        }

        build_overlap_graph();
    }

    Index dim() const noexcept { return dim_; }
    Index num_groups() const noexcept { return static_cast<Index>(groups_.size()); }
    Index replicated_dim() const noexcept { return offsets_.back(); }
    Index covered_count() const noexcept { return covered_; }
    bool fully_covered() const noexcept { return covered_ == dim_; }

    std::span<const Index> group(Index r) const { return groups_[r]; }
    Index group_size(Index r) const { return static_cast<Index>(groups_[r].size()); }
    Index offset(Index r) const { return offsets_[r]; }

    /// Groups containing coordinate j, ascending.
    std::span<const Index> groups_of(Index j) const
    {
        return {coord_groups_.data() + coord_offsets_[j],
                static_cast<std::size_t>(coord_offsets_[j + 1] - coord_offsets_[j])};
    }
    Index multiplicity(Index j) const { return coord_offsets_[j + 1] - coord_offsets_[j]; }

    /// Groups sharing at least one coordinate with group r (r excluded), ascending.
    std::span<const Index> neighbors(Index r) const { return overlap_[r]; }

    const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }

private:
    void build_overlap_graph()
    {
        overlap_.assign(groups_.size(), {});
        std::vector<Index> mark(groups_.size(), -1);
        for (std::size_t r = 0; r < groups_.size(); ++r) {
            for (auto j : groups_[r]) {
                for (auto s : groups_of(j)) {
                    if (s != static_cast<Index>(r) && mark[s] != static_cast<Index>(r)) {
                        mark[s] = static_cast<Index>(r);
                        overlap_[r].push_back(s);
                    }
                }
            }
            std::sort(overlap_[r].begin(), overlap_[r].end());
        }
    }

    Index dim_ = 0;
    Index covered_ = 0;
    std::vector<std::vector<Index>> groups_;
    std::vector<Index> offsets_;
    std::vector<Index> coord_offsets_;
    std::vector<Index> coord_groups_;
    std::vector<std::vector<Index>> overlap_;
};

/// l_q norm of x restricted to the indices in group.
inline double group_norm(const Vector& x, std::span<const Index> group, double q)
{
    if (group.empty()) throw input_error("group_norm: empty group");
    for (auto j : group) {
        if (j < 0 || j >= x.size()) {
            throw input_error("group_norm: index " + std::to_string(j) + " out of range");
        }
    }
    if (!(q >= 1.0)) throw input_error("group_norm: exponent must be >= 1");
    return detail::group_norm_unchecked(x, group, q);
}

/**
 * Subset of groups taking part in a projection, with the coordinate -> active
 * group indicator used by the dual problem. Positions 0..num_active()-1 refer
 * to members() in ascending group-id order.
 */
class ActiveSet
{
public:
    ActiveSet() = default;

    ActiveSet(const GroupStructure& gs, std::vector<Index> members)
        : members_(std::move(members)), flags_(gs.num_groups(), 0)
    {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        for (auto r : members_) {
            if (r < 0 || r >= gs.num_groups()) {
                throw input_error("active set: group id " + std::to_string(r) + " out of range");
            }
            flags_[r] = 1;
        }
        position_.assign(gs.num_groups(), -1);
        for (std::size_t k = 0; k < members_.size(); ++k) position_[members_[k]] = static_cast<Index>(k);

        const Index d = gs.dim();
        coord_offsets_.assign(d + 1, 0);
        for (Index j = 0; j < d; ++j) {
            Index c = 0;
            for (auto r : gs.groups_of(j)) c += flags_[r];
            coord_offsets_[j + 1] = coord_offsets_[j] + c;
        }
        coord_entries_.resize(coord_offsets_[d]);
        for (Index j = 0; j < d; ++j) {
            Index k = coord_offsets_[j];
            for (auto r : gs.groups_of(j)) {
                if (flags_[r]) coord_entries_[k++] = position_[r];
            }
        }
        group_offsets_.assign(members_.size() + 1, 0);
        for (std::size_t k = 0; k < members_.size(); ++k) {
            group_offsets_[k + 1] = group_offsets_[k] + gs.group_size(members_[k]);
        }
        group_entries_.reserve(group_offsets_.back());
        for (auto r : members_) {
            auto g = gs.group(r);
            group_entries_.insert(group_entries_.end(), g.begin(), g.end());
        }
    }

    Index num_active() const noexcept { return static_cast<Index>(members_.size()); }
    bool empty() const noexcept { return members_.empty(); }
    const std::vector<Index>& members() const noexcept { return members_; }
    bool contains(Index group_id) const { return flags_[group_id] != 0; }
    const std::vector<char>& member_flags() const noexcept { return flags_; }

    /// Position of group_id among members(), or -1.
    Index position(Index group_id) const { return position_[group_id]; }
    Index dim() const noexcept { return static_cast<Index>(coord_offsets_.size()) - 1; }

    /// Active positions whose group contains coordinate j.
    std::span<const Index> groups_at(Index j) const
    {
        return {coord_entries_.data() + coord_offsets_[j],
                static_cast<std::size_t>(coord_offsets_[j + 1] - coord_offsets_[j])};
    }

    /// Coordinates of the active group at position k.
    std::span<const Index> coords(Index k) const
    {
        return {group_entries_.data() + group_offsets_[k],
                static_cast<std::size_t>(group_offsets_[k + 1] - group_offsets_[k])};
    }

private:
    std::vector<Index> members_;
    std::vector<char> flags_;
    std::vector<Index> position_;
    std::vector<Index> coord_offsets_;
    std::vector<Index> coord_entries_;
    std::vector<Index> group_offsets_;
    std::vector<Index> group_entries_;
};

/// Groups whose q-norm at x strictly exceeds level.
inline ActiveSet active_groups(const Vector& x, double level, const GroupStructure& gs, double q)
{
    if (!(level > 0)) throw input_error("active_groups: level must be > 0");
    if (x.size() != gs.dim()) throw input_error("active_groups: dimension mismatch");
    std::vector<Index> members;
    for (Index r = 0; r < gs.num_groups(); ++r) {
        if (detail::group_norm_unchecked(x, gs.group(r), q) > level) members.push_back(r);
    }
    return ActiveSet(gs, std::move(members));
}

/// P x: copy every coordinate into each latent slot of a group containing it.
inline Vector replicate(const GroupStructure& gs, const Vector& x)
{
    if (x.size() != gs.dim()) throw input_error("replicate: dimension mismatch");
    Vector v(gs.replicated_dim());
    for (Index r = 0; r < gs.num_groups(); ++r) {
        Index k = gs.offset(r);
        for (auto j : gs.group(r)) v[k++] = x[j];
    }
    return v;
}

/// P* v: each coordinate receives the sum of its latent copies.
inline Vector adjoint_sum(const GroupStructure& gs, const Vector& v)
{
    if (v.size() != gs.replicated_dim()) throw input_error("adjoint_sum: dimension mismatch");
    Vector x = Vector::Zero(gs.dim());
    for (Index r = 0; r < gs.num_groups(); ++r) {
        Index k = gs.offset(r);
        for (auto j : gs.group(r)) x[j] += v[k++];
    }
    return x;
}

} // namespace gso
