#include "gradridge/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gradridge {

int total_degree(const MultiIndex& alpha) {
    int s = 0;
    for (int a : alpha) s += a;
    return s;
}

bool lex_less(const MultiIndex& a, const MultiIndex& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

int MultiIndexSet::position_of(const MultiIndex& alpha) const {
    auto it = position_.find(alpha);
    return it == position_.end() ? -1 : it->second;
}

bool MultiIndexSet::insert(const MultiIndex& alpha) {
    if (static_cast<int>(alpha.size()) != dim_) return false;
    if (position_.count(alpha)) return false;
    position_[alpha] = static_cast<int>(indices_.size());
    indices_.push_back(alpha);
    return true;
}

int MultiIndexSet::max_degree() const {
    int md = 0;
    for (const auto& alpha : indices_)
        for (int a : alpha) md = std::max(md, a);
    return md;
}

bool MultiIndexSet::is_downward_closed() const {
    for (const auto& alpha : indices_) {
        MultiIndex below = alpha;
        for (int i = 0; i < dim_; ++i) {
            if (alpha[static_cast<std::size_t>(i)] == 0) continue;
            below[static_cast<std::size_t>(i)] -= 1;
            if (!contains(below)) return false;
            below[static_cast<std::size_t>(i)] += 1;
        }
    }
    return true;
}

MultiIndexSet MultiIndexSet::reduced_margin() const {
    if (empty()) throw std::invalid_argument("reduced_margin: empty set");
    if (!is_downward_closed()) throw std::invalid_argument("reduced_margin: set is not downward-closed");

    std::vector<MultiIndex> candidates;
    for (const auto& alpha : indices_) {
        MultiIndex up = alpha;
        for (int i = 0; i < dim_; ++i) {
            up[static_cast<std::size_t>(i)] += 1;
            if (!contains(up)) candidates.push_back(up);
            up[static_cast<std::size_t>(i)] -= 1;
        }
    }
    std::sort(candidates.begin(), candidates.end(), lex_less);
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    MultiIndexSet margin(dim_);
    for (const auto& alpha : candidates) {
        bool all_below_in = true;
        MultiIndex below = alpha;
        for (int i = 0; i < dim_ && all_below_in; ++i) {
            if (alpha[static_cast<std::size_t>(i)] == 0) continue;
            below[static_cast<std::size_t>(i)] -= 1;
            all_below_in = contains(below);
            below[static_cast<std::size_t>(i)] += 1;
        }
        if (all_below_in) margin.insert(alpha);
    }
    return margin;
}

namespace {

void enumerate_rec(int dim, int pos, int remaining_max, MultiIndex& current,
                   int min_degree, std::vector<MultiIndex>& out) {
    if (pos == dim) {
        if (total_degree(current) >= min_degree) out.push_back(current);
        return;
    }
    for (int a = 0; a <= remaining_max; ++a) {
        current[static_cast<std::size_t>(pos)] = a;
        enumerate_rec(dim, pos + 1, remaining_max - a, current, min_degree, out);
    }
    current[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace

MultiIndexSet MultiIndexSet::total_degree_set(int dim, int degree, int min_degree) {
    if (dim <= 0 || degree < min_degree || min_degree < 0)
        throw std::invalid_argument("total_degree_set: need dim > 0 and degree >= min_degree >= 0");
    std::vector<MultiIndex> all;
    MultiIndex current(static_cast<std::size_t>(dim), 0);
    enumerate_rec(dim, 0, degree, current, min_degree, all);
    std::sort(all.begin(), all.end(), lex_less);
    MultiIndexSet set(dim);
    for (const auto& alpha : all) set.insert(alpha);
    return set;
}

std::string MultiIndexSet::to_string() const {
    std::ostringstream os;
    os << "{";
    for (int i = 0; i < size(); ++i) {
        if (i) os << ", ";
        os << "(";
        for (int j = 0; j < dim_; ++j) {
            if (j) os << ",";
            os << indices_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        os << ")";
    }
    os << "}";
    return os.str();
}

std::vector<MultiIndex> bulk_select(const std::vector<std::pair<MultiIndex, double>>& scores,
                                    double theta) {
    if (scores.empty()) throw std::invalid_argument("bulk_select: no candidates");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("bulk_select: theta must be in (0,1]");

    std::vector<std::pair<MultiIndex, double>> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        const double sa = a.second * a.second, sb = b.second * b.second;
        if (sa != sb) return sa > sb;
        return lex_less(a.first, b.first);
    });

    double total = 0.0;
    for (const auto& [alpha, s] : sorted) {
        if (!std::isfinite(s) || s < 0.0)
            throw std::invalid_argument("bulk_select: scores must be finite and nonnegative");
        total += s * s;
    }

    std::vector<MultiIndex> selected;
    if (total == 0.0) {
        // Stalled margin: activate the lexicographically smallest index.
        const MultiIndex* best = &sorted.front().first;
        for (const auto& [alpha, s] : sorted)
            if (lex_less(alpha, *best)) best = &alpha;
        selected.push_back(*best);
        return selected;
    }

    double cumulative = 0.0;
    for (const auto& [alpha, s] : sorted) {
        if (s == 0.0) break;
        selected.push_back(alpha);
        cumulative += s * s;
        if (cumulative >= theta * total) break;
    }
    return selected;
}

}  // namespace gradridge
