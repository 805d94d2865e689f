#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gradridge {

/// A multi-index in N^dim: nonnegative exponents, one per dimension.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);

/// Lexicographic comparison (first differing component decides).
bool lex_less(const MultiIndex& a, const MultiIndex& b);

/// Ordered set of multi-indices with O(log) membership lookup.
/// Insertion order is preserved; it is the serialization order and the
/// order in which coefficient rows are laid out by callers.
class MultiIndexSet {
public:
    MultiIndexSet() = default;
    explicit MultiIndexSet(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }

    const MultiIndex& operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    bool contains(const MultiIndex& alpha) const { return position_.count(alpha) > 0; }

    /// Index of alpha in insertion order, or -1.
    int position_of(const MultiIndex& alpha) const;

    /// Appends alpha; returns false (and leaves the set unchanged) if it is
    /// already present or has the wrong dimension.
    bool insert(const MultiIndex& alpha);

    /// Largest exponent appearing in any dimension (0 for empty sets).
    int max_degree() const;

    bool is_downward_closed() const;

    /// Reduced margin: indices outside the set whose every backward
    /// neighbour lies inside. Requires a nonempty downward-closed set;
    /// result is in lexicographic order.
    MultiIndexSet reduced_margin() const;

    /// All alpha with min_degree <= |alpha| <= degree, lexicographic order.
    static MultiIndexSet total_degree_set(int dim, int degree, int min_degree);

    std::string to_string() const;

private:
    int dim_ = 0;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, int> position_;
};

/// Bulk-chasing selection: the smallest batch of indices, taken in
/// descending squared-score order (ties broken lexicographically), whose
/// cumulative squared score reaches theta times the total. When every
/// score is zero the lexicographically smallest index is returned so the
/// enrichment loop keeps making progress.
std::vector<MultiIndex> bulk_select(const std::vector<std::pair<MultiIndex, double>>& scores,
                                    double theta);

}  // namespace gradridge
