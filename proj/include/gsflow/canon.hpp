#pragma once

// Canonical labelling of small vertex-coloured graphs with integer edge codes.
// Colour refinement followed by an individualisation search; the smallest
// leaf code wins. Fine for the few dozen nodes that show up here.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace gsflow::detail {

struct ColoredGraph {
    int n = 0;
    std::vector<int> color;
    std::vector<int> adj;  // n*n, symmetric, 0 means "no edge"

    explicit ColoredGraph(int nodes = 0)
        : n(nodes), color(static_cast<std::size_t>(nodes), 0),
          adj(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), 0) {}

    int& at(int u, int v) { return adj[static_cast<std::size_t>(u) * n + v]; }
    int at(int u, int v) const { return adj[static_cast<std::size_t>(u) * n + v]; }

    void add(int u, int v, int code) {
        at(u, v) += code;
        if (u != v) at(v, u) += code;
    }
};

struct CanonicalLabel {
    std::vector<int> order;  // order[i] = original node placed at position i
    std::vector<int> code;   // certificate, equal iff isomorphic
};

namespace canon_impl {

inline int rank_cells(std::vector<std::vector<int>>& sig, std::vector<int>& cells) {
    const int n = static_cast<int>(sig.size());
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sig[a] < sig[b]; });
    int r = -1;
    for (int i = 0; i < n; ++i) {
        if (i == 0 || sig[idx[i]] != sig[idx[i - 1]]) ++r;
        cells[idx[i]] = r;
    }
    return r + 1;
}

inline int count_cells(const std::vector<int>& cells) {
    if (cells.empty()) return 0;
    return *std::max_element(cells.begin(), cells.end()) + 1;
}

inline void refine(const ColoredGraph& g, std::vector<int>& cells) {
    int classes = count_cells(cells);
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(g.n));
    while (true) {
        for (int u = 0; u < g.n; ++u) {
            auto& s = sig[u];
            s.clear();
            s.push_back(cells[u]);
            std::vector<std::pair<int, int>> nb;
            for (int v = 0; v < g.n; ++v) {
                int c = g.at(u, v);
                if (c != 0) nb.emplace_back(v == u ? -1 : cells[v], c);
            }
            std::sort(nb.begin(), nb.end());
            for (auto [a, b] : nb) {
                s.push_back(a);
                s.push_back(b);
            }
        }
        int next = rank_cells(sig, cells);
        if (next == classes) return;
        classes = next;
    }
}

inline std::vector<int> leaf_code(const ColoredGraph& g, const std::vector<int>& order) {
    std::vector<int> code;
    code.reserve(static_cast<std::size_t>(g.n) * (g.n + 3) / 2 + 1);
    code.push_back(g.n);
    for (int i = 0; i < g.n; ++i) code.push_back(g.color[order[i]]);
    for (int i = 0; i < g.n; ++i)
        for (int j = i; j < g.n; ++j) code.push_back(g.at(order[i], order[j]));
    return code;
}

struct Search {
    const ColoredGraph& g;
    CanonicalLabel best;
    bool have = false;

    void run(std::vector<int> cells) {
        refine(g, cells);
        int classes = count_cells(cells);
        if (classes == g.n) {
            std::vector<int> order(static_cast<std::size_t>(g.n));
            for (int u = 0; u < g.n; ++u) order[cells[u]] = u;
            auto code = leaf_code(g, order);
            if (!have || code < best.code) {
                best.code = std::move(code);
                best.order = std::move(order);
                have = true;
            }
            return;
        }
        // first non-singleton cell, by cell index
        std::vector<int> size(static_cast<std::size_t>(classes), 0);
        for (int c : cells) ++size[c];
        int target = 0;
        while (size[target] < 2) ++target;
        for (int v = 0; v < g.n; ++v) {
            if (cells[v] != target) continue;
            std::vector<int> next(cells.size());
            for (int u = 0; u < g.n; ++u) next[u] = 2 * cells[u] + 1;
            next[v] = 2 * cells[v];
            std::vector<std::vector<int>> sig(next.size());
            for (std::size_t u = 0; u < next.size(); ++u) sig[u] = {next[u]};
            rank_cells(sig, next);
            run(std::move(next));
        }
    }
};

}  // namespace canon_impl

inline CanonicalLabel canonical_label(const ColoredGraph& g) {
    if (g.n == 0) return {{}, {0}};
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(g.n));
    for (int u = 0; u < g.n; ++u) sig[u] = {g.color[u]};
    std::vector<int> cells(static_cast<std::size_t>(g.n));
    canon_impl::rank_cells(sig, cells);
    canon_impl::Search s{g, {}, false};
    s.run(std::move(cells));
    return s.best;
}

}  // namespace gsflow::detail
