#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "structhash/matrix.hpp"
#include "structhash/rng.hpp"
#include "structhash/transforms.hpp"

namespace structhash {

// ---------------------------------------------------------------------------
// Dependency graph of a row pair
// ---------------------------------------------------------------------------

// Vertices are unordered column pairs {j1, j2}, j1 != j2, such that some pool
// variable appears in S(k1, j1) and S(k2, j2) (in either orientation). Two
// vertices are adjacent iff they share a column index.
class DependencyGraph {
public:
    DependencyGraph() = default;

    DependencyGraph(std::vector<std::pair<std::uint32_t, std::uint32_t>> vertices)
        : vertices_(std::move(vertices)) {
        for (auto& v : vertices_)
            if (v.first > v.second) std::swap(v.first, v.second);
        std::sort(vertices_.begin(), vertices_.end());
        vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
        build_adjacency();
    }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& vertices() const {
        return vertices_;
    }
    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {adj_.data() + adj_offsets_[v],
                static_cast<std::size_t>(adj_offsets_[v + 1] - adj_offsets_[v])};
    }
    std::size_t degree(std::size_t v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }

private:
    void build_adjacency() {
        // Vertices containing a common column form a clique; bucket by column
        // and expand.
        const std::size_t m = vertices_.size();
        std::vector<std::vector<std::uint32_t>> by_column;
        auto bucket = [&](std::uint32_t col) -> std::vector<std::uint32_t>& {
            if (col >= by_column.size()) by_column.resize(col + 1);
            return by_column[col];
        };
        for (std::size_t v = 0; v < m; ++v) {
            bucket(vertices_[v].first).push_back(static_cast<std::uint32_t>(v));
            bucket(vertices_[v].second).push_back(static_cast<std::uint32_t>(v));
        }
        std::vector<std::vector<std::uint32_t>> adj(m);
        for (const auto& members : by_column) {
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    adj[members[a]].push_back(members[b]);
                    adj[members[b]].push_back(members[a]);
                }
        }
        adj_offsets_.assign(m + 1, 0);
        adj_.clear();
        edge_count_ = 0;
        for (std::size_t v = 0; v < m; ++v) {
            auto& nb = adj[v];
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            adj_.insert(adj_.end(), nb.begin(), nb.end());
            adj_offsets_[v + 1] = adj_.size();
            edge_count_ += nb.size();
        }
        edge_count_ /= 2;
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> vertices_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::size_t> adj_offsets_ = {0};
    std::size_t edge_count_ = 0;
};

// Dependency graph of rows k1 < k2 (0-based).
inline DependencyGraph build_graph(const IndexSetMatrix& m, std::size_t k1, std::size_t k2) {
    if (k1 >= k2 || k2 >= m.k())
        throw std::invalid_argument("build_graph: need row indices k1 < k2 < k");
    // Column of each pool variable within a row (unique by disjointness).
    auto column_map = [&](std::size_t row) {
        std::vector<std::int64_t> col_of(m.t(), -1);
        for (std::size_t j = 0; j < m.n(); ++j)
            for (auto idx : m.set(row, j)) col_of[idx] = static_cast<std::int64_t>(j);
        return col_of;
    };
    const auto col1 = column_map(k1);
    const auto col2 = column_map(k2);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> vertices;
    for (std::size_t l = 0; l < m.t(); ++l) {
        if (col1[l] < 0 || col2[l] < 0) continue;
        if (col1[l] == col2[l]) continue;
        vertices.emplace_back(static_cast<std::uint32_t>(col1[l]),
                              static_cast<std::uint32_t>(col2[l]));
    }
    return DependencyGraph(std::move(vertices));
}

// ---------------------------------------------------------------------------
// Chromatic numbers
// ---------------------------------------------------------------------------

struct ChromaticBounds {
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::optional<std::size_t> exact;
};

namespace detail {

// Greedy coloring in largest-degree-first order; returns the color count.
inline std::size_t greedy_coloring(const DependencyGraph& g) {
    const std::size_t m = g.vertex_count();
    std::vector<std::uint32_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return g.degree(a) > g.degree(b); });
    std::vector<std::int64_t> color(m, -1);
    std::size_t used = 0;
    std::vector<bool> taken;
    for (auto v : order) {
        taken.assign(used + 1, false);
        for (auto u : g.neighbors(v))
            if (color[u] >= 0 && static_cast<std::size_t>(color[u]) <= used)
                taken[color[u]] = true;
        std::size_t c = 0;
        while (taken[c]) ++c;
        color[v] = static_cast<std::int64_t>(c);
        used = std::max(used, c + 1);
    }
    return used;
}

// Greedy clique around the highest-degree vertices; a lower bound on chi.
inline std::size_t clique_heuristic(const DependencyGraph& g) {
    const std::size_t m = g.vertex_count();
    if (m == 0) return 0;
    std::vector<std::uint32_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return g.degree(a) > g.degree(b); });
    std::size_t best = 1;
    const std::size_t tries = std::min<std::size_t>(m, 16);
    for (std::size_t s = 0; s < tries; ++s) {
        std::vector<std::uint32_t> clique = {order[s]};
        std::vector<std::uint32_t> cand(g.neighbors(order[s]).begin(),
                                        g.neighbors(order[s]).end());
        while (!cand.empty()) {
            std::uint32_t pick = cand[0];
            std::size_t best_deg = 0;
            for (auto c : cand)
                if (g.degree(c) >= best_deg) { best_deg = g.degree(c); pick = c; }
            clique.push_back(pick);
            std::vector<std::uint32_t> next;
            auto nb = g.neighbors(pick);
            for (auto c : cand)
                if (c != pick && std::binary_search(nb.begin(), nb.end(), c)) next.push_back(c);
            cand = std::move(next);
        }
        best = std::max(best, clique.size());
    }
    return best;
}

// DSATUR-ordered branch and bound; exact chromatic number.
class ExactColoring {
public:
    explicit ExactColoring(const DependencyGraph& g) : g_(g), m_(g.vertex_count()) {}

    std::size_t solve(std::size_t initial_upper, std::size_t lower) {
        best_ = initial_upper;
        lower_ = std::max<std::size_t>(lower, 1);
        color_.assign(m_, -1);
        branch(0);
        return best_;
    }

private:
    void branch(std::size_t colored) {
        if (best_ == lower_) return;  // cannot improve
        if (colored == m_) {
            std::size_t used = 0;
            for (auto c : color_) used = std::max(used, static_cast<std::size_t>(c) + 1);
            best_ = std::min(best_, used);
            return;
        }
        // Pick the uncolored vertex with maximum saturation, ties by degree.
        std::size_t pick = m_;
        std::size_t pick_sat = 0, pick_deg = 0;
        std::vector<bool> sat;
        for (std::size_t v = 0; v < m_; ++v) {
            if (color_[v] >= 0) continue;
            sat.assign(best_, false);
            std::size_t s = 0;
            for (auto u : g_.neighbors(v))
                if (color_[u] >= 0 && !sat[color_[u]]) { sat[color_[u]] = true; ++s; }
            if (pick == m_ || s > pick_sat || (s == pick_sat && g_.degree(v) > pick_deg)) {
                pick = v;
                pick_sat = s;
                pick_deg = g_.degree(v);
            }
        }
        std::size_t max_used = 0;
        for (auto c : color_)
            if (c >= 0) max_used = std::max(max_used, static_cast<std::size_t>(c) + 1);
        std::vector<bool> forbidden(best_, false);
        for (auto u : g_.neighbors(pick))
            if (color_[u] >= 0) forbidden[color_[u]] = true;
        const std::size_t limit = std::min(best_ - 1, max_used);  // at most one new color
        for (std::size_t c = 0; c <= limit && c < best_; ++c) {
            if (forbidden[c]) continue;
            if (c + 1 >= best_) break;  // would not beat the incumbent
            color_[pick] = static_cast<std::int64_t>(c);
            branch(colored + 1);
            color_[pick] = -1;
            if (best_ == lower_) return;
        }
    }

    const DependencyGraph& g_;
    std::size_t m_;
    std::size_t best_ = 0;
    std::size_t lower_ = 1;
    std::vector<std::int64_t> color_;
};

}  // namespace detail

// Chromatic number bounds; exact by branch and bound when the vertex count is
// within exact_vertex_limit. Convention: 0 for the empty graph, 1 for a
// nonempty edgeless graph.
inline ChromaticBounds chromatic_number(const DependencyGraph& g,
                                        std::size_t exact_vertex_limit = 30) {
    ChromaticBounds out;
    if (g.vertex_count() == 0) {
        out.lower = out.upper = 0;
        out.exact = 0;
        return out;
    }
    if (g.edge_count() == 0) {
        out.lower = out.upper = 1;
        out.exact = 1;
        return out;
    }
    out.upper = detail::greedy_coloring(g);
    out.lower = std::max<std::size_t>(2, detail::clique_heuristic(g));
    if (out.lower == out.upper) {
        out.exact = out.lower;
    } else if (g.vertex_count() <= exact_vertex_limit) {
        detail::ExactColoring solver(g);
        const std::size_t chi = solver.solve(out.upper, out.lower);
        out.exact = chi;
        out.lower = out.upper = chi;
    }
    return out;
}

struct PChromaticResult {
    std::size_t value = 0;
    bool all_exact = true;
};

// Maximum chromatic number over all row pairs (exact values where computed,
// greedy upper bounds elsewhere).
inline PChromaticResult p_chromatic(const IndexSetMatrix& m,
                                    std::size_t exact_vertex_limit = 30) {
    if (m.k() < 2) throw std::invalid_argument("p_chromatic: need at least two rows");
    PChromaticResult result;
    for (std::size_t k1 = 0; k1 + 1 < m.k(); ++k1) {
        for (std::size_t k2 = k1 + 1; k2 < m.k(); ++k2) {
            const auto bounds = chromatic_number(build_graph(m, k1, k2), exact_vertex_limit);
            result.value = std::max(result.value, bounds.exact ? *bounds.exact : bounds.upper);
            if (!bounds.exact) result.all_exact = false;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Hadamard balancedness
// ---------------------------------------------------------------------------

struct BalancednessReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double f_n = 0.0;       // f(n) = sqrt(2 ln(2 n trials / delta))
    double threshold = 0.0; // f(n) / sqrt(n)
    double max_coordinate = 0.0;
};

// Empirical check that H*R spreads unit vectors out: draws random unit
// vectors, applies a fresh sign diagonal followed by the normalized
// Walsh-Hadamard transform, and counts trials whose max |coordinate| exceeds
// f(n)/sqrt(n). By Hoeffding plus a union bound over all n*trials
// coordinates, the expected number of violating trials is at most delta.
inline BalancednessReport balancedness_check(std::size_t n, std::size_t trials, double delta,
                                             std::uint64_t seed) {
    if (!detail::is_power_of_two(n))
        throw std::invalid_argument("balancedness_check: n must be a power of two");
    if (trials == 0) throw std::invalid_argument("balancedness_check: trials must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("balancedness_check: delta must be positive");

    BalancednessReport report;
    report.trials = trials;
    report.f_n = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(n) *
                                          static_cast<double>(trials) / delta));
    report.threshold = report.f_n / std::sqrt(static_cast<double>(n));

    std::vector<double> u(n);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        rng::GaussianStream gs(rng::derive_stream(seed, 2 * trial));
        double norm = 0.0;
        for (auto& v : u) {
            v = gs.next();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : u) v /= norm;
        const auto diag =
            SignDiagonal::generate(n, rng::derive_stream(seed, 2 * trial + 1));
        apply_diagonal_inplace(diag, u);
        fwht_normalized_inplace(u);
        double max_abs = 0.0;
        for (auto v : u) max_abs = std::max(max_abs, std::abs(v));
        report.max_coordinate = std::max(report.max_coordinate, max_abs);
        if (max_abs > report.threshold) ++report.violations;
    }
    return report;
}

}  // namespace structhash
