#pragma once

// Combinatorial isolating blocks. The entering set N+ and the exiting set N-
// are graphs whose vertices are marked points (hits of stable/unstable
// branches, passageway branch points). A strip is a band of regular orbits
// running from an arc of N+ to an arc of N-; its ends correspond pointwise.
// Arcs of N+ that never leave (attractor basins) and arcs of N- that never
// arrive (repeller basins) are kept separately as fixed arcs.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "branched.hpp"
#include "canon.hpp"

namespace gsflow {

struct Strip {
    std::array<int, 2> plus;   // endpoints on N+
    std::array<int, 2> minus;  // matching endpoints on N-
};

struct Block {
    std::array<int, 2> nv{0, 0};  // [0] = N+, [1] = N-
    std::vector<Strip> strips;
    std::array<std::vector<std::pair<int, int>>, 2> fixed;

    int add_point(int side) { return nv[side]++; }
};

struct SideForms {
    std::vector<std::string> forms;  // sorted canonical forms, one per component
    std::vector<int> weights;        // aligned with forms
};

struct BoundaryPair {
    SideForms plus, minus;

    int e_plus() const { return static_cast<int>(plus.forms.size()); }
    int e_minus() const { return static_cast<int>(minus.forms.size()); }
    std::string str() const;
};

namespace detail {

inline std::string join_forms(const std::vector<std::string>& fs) {
    std::string s;
    for (const auto& f : fs) {
        if (!s.empty()) s += '|';
        s += f;
    }
    return s.empty() ? "-" : s;
}

inline ArcGraph side_graph(const Block& b, int side) {
    ArcGraph g;
    g.nv = b.nv[side];
    for (const auto& s : b.strips) {
        const auto& ends = side == 0 ? s.plus : s.minus;
        g.arcs.emplace_back(ends[0], ends[1]);
    }
    for (auto e : b.fixed[side]) g.arcs.push_back(e);
    g.strand = default_strands(g.nv, g.arcs);
    return g;
}

}  // namespace detail

inline std::string BoundaryPair::str() const {
    return detail::join_forms(plus.forms) + " / " + detail::join_forms(minus.forms);
}

inline Block reversed(const Block& b) {
    Block r;
    r.nv = {b.nv[1], b.nv[0]};
    for (const auto& s : b.strips) r.strips.push_back({s.minus, s.plus});
    r.fixed = {b.fixed[1], b.fixed[0]};
    return r;
}

inline Block disjoint_union(const Block& x, const Block& y) {
    Block u = x;
    for (const auto& s : y.strips)
        u.strips.push_back({{s.plus[0] + x.nv[0], s.plus[1] + x.nv[0]},
                            {s.minus[0] + x.nv[1], s.minus[1] + x.nv[1]}});
    for (int side : {0, 1})
        for (auto [a, b] : y.fixed[side]) u.fixed[side].emplace_back(a + x.nv[side], b + x.nv[side]);
    u.nv = {x.nv[0] + y.nv[0], x.nv[1] + y.nv[1]};
    return u;
}

// Glue point `drop` onto point `keep` on one side; the last point is renumbered
// into the hole so ids stay dense.
inline void merge_points(Block& b, int side, int keep, int drop) {
    if (keep == drop) return;
    auto relabel = [&](int& v) {
        if (v == drop) v = keep;
    };
    for (auto& s : b.strips) {
        auto& ends = side == 0 ? s.plus : s.minus;
        relabel(ends[0]);
        relabel(ends[1]);
    }
    for (auto& e : b.fixed[side]) relabel(e.first), relabel(e.second);
    int last = b.nv[side] - 1;
    if (drop != last) {
        auto move = [&](int& v) {
            if (v == last) v = drop;
        };
        for (auto& s : b.strips) {
            auto& ends = side == 0 ? s.plus : s.minus;
            move(ends[0]);
            move(ends[1]);
        }
        for (auto& e : b.fixed[side]) move(e.first), move(e.second);
    }
    --b.nv[side];
}

inline SideForms side_forms(const Block& b, int side) {
    SideForms sf;
    if (b.nv[side] == 0) return sf;
    auto comps = detail::smooth(detail::side_graph(b, side));
    for (const auto& c : comps) sf.forms.push_back(canonical_form(c));
    std::sort(sf.forms.begin(), sf.forms.end());
    for (const auto& f : sf.forms) sf.weights.push_back(weight_of_form(f));
    return sf;
}

inline BoundaryPair boundary(const Block& b) { return {side_forms(b, 0), side_forms(b, 1)}; }

// Component index of every point on one side (union of strips and fixed arcs).
inline std::vector<int> side_components(const Block& b, int side, int* count = nullptr) {
    std::vector<int> parent(static_cast<std::size_t>(b.nv[side]));
    for (int i = 0; i < b.nv[side]; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& s : b.strips) {
        const auto& e = side == 0 ? s.plus : s.minus;
        parent[find(e[0])] = find(e[1]);
    }
    for (auto [x, y] : b.fixed[side]) parent[find(x)] = find(y);
    std::map<int, int> id;
    std::vector<int> out(static_cast<std::size_t>(b.nv[side]));
    for (int v = 0; v < b.nv[side]; ++v) {
        auto [it, fresh] = id.emplace(find(v), static_cast<int>(id.size()));
        out[v] = it->second;
    }
    if (count) *count = static_cast<int>(id.size());
    return out;
}

// Pairs (N+ component, N- component) joined by at least one strip.
inline std::set<std::pair<int, int>> routing(const Block& b) {
    auto cp = side_components(b, 0);
    auto cm = side_components(b, 1);
    std::set<std::pair<int, int>> r;
    for (const auto& s : b.strips) r.emplace(cp[s.plus[0]], cm[s.minus[0]]);
    return r;
}

// Identify one regular orbit through strip i with one through strip j
// (i == j: two distinct orbits of the same strip). This is a passageway.
inline Block passageway(const Block& b, int i, int j) {
    Block out = b;
    if (i > j) std::swap(i, j);
    int wp = out.add_point(0);
    int wm = out.add_point(1);
    const Strip si = b.strips[i];
    if (i == j) {
        out.strips[i] = {{si.plus[0], wp}, {si.minus[0], wm}};
        out.strips.push_back({{wp, wp}, {wm, wm}});
        out.strips.push_back({{wp, si.plus[1]}, {wm, si.minus[1]}});
        return out;
    }
    const Strip sj = b.strips[j];
    out.strips[i] = {{si.plus[0], wp}, {si.minus[0], wm}};
    out.strips[j] = {{sj.plus[0], wp}, {sj.minus[0], wm}};
    out.strips.push_back({{wp, si.plus[1]}, {wm, si.minus[1]}});
    out.strips.push_back({{wp, sj.plus[1]}, {wm, sj.minus[1]}});
    return out;
}

// Isomorphism-invariant key of a block (strip orientation is forgotten).
inline std::vector<int> block_key(const Block& b) {
    const int P = b.nv[0], M = b.nv[1], S = static_cast<int>(b.strips.size());
    const int F0 = static_cast<int>(b.fixed[0].size()), F1 = static_cast<int>(b.fixed[1].size());
    const int n = P + M + 3 * S + F0 + F1;
    detail::ColoredGraph g(n);
    for (int v = 0; v < P; ++v) g.color[v] = 0;
    for (int v = 0; v < M; ++v) g.color[P + v] = 1;
    int next = P + M;
    for (const auto& s : b.strips) {
        int body = next++, e0 = next++, e1 = next++;
        g.color[body] = 2;
        g.color[e0] = g.color[e1] = 3;
        g.add(body, e0, 1);
        g.add(body, e1, 1);
        g.add(e0, s.plus[0], 2);
        g.add(e1, s.plus[1], 2);
        g.add(e0, P + s.minus[0], 3);
        g.add(e1, P + s.minus[1], 3);
    }
    for (int side : {0, 1}) {
        int off = side == 0 ? 0 : P;
        for (auto [x, y] : b.fixed[side]) {
            int node = next++;
            g.color[node] = 4 + side;
            g.add(node, off + x, 5);
            g.add(node, off + y, 5);
        }
    }
    return detail::canonical_label(g).code;
}

// ---------------------------------------------------------------------------
// handle builders

// A single saddle handle has points s_top = 2h, s_bot = 2h+1 on N+ and
// u_left = 2h, u_right = 2h+1 on N-. Each handle drops two exit arcs onto N-
// (left: through u_left, right: through u_right); `circles` lists, for every
// N- circle, the exit arcs met going once around it.
struct ExitArc {
    int handle = 0;
    int side = 0;  // 0 = left, 1 = right
    bool reversed = false;
};

inline Block saddle_handles(int handles, const std::vector<std::vector<ExitArc>>& circles) {
    Block b;
    const int H = handles;
    // corners TL, TR, BL, BR of handle h live at 2H + 4h + k on both sides
    b.nv = {6 * H, 6 * H};
    auto corner = [&](int h, int k) { return 2 * H + 4 * h + k; };
    enum { TL = 0, TR = 1, BL = 2, BR = 3 };
    for (int h = 0; h < H; ++h) {
        int st = 2 * h, sb = 2 * h + 1, ul = 2 * h, ur = 2 * h + 1;
        b.strips.push_back({{corner(h, TL), st}, {corner(h, TL), ul}});
        b.strips.push_back({{st, corner(h, TR)}, {ur, corner(h, TR)}});
        b.strips.push_back({{corner(h, BL), sb}, {corner(h, BL), ul}});
        b.strips.push_back({{sb, corner(h, BR)}, {ur, corner(h, BR)}});
    }
    std::vector<int> placed(static_cast<std::size_t>(2 * H), 0);
    for (const auto& circ : circles) {
        if (circ.empty()) throw branched_error("exit circle without an attaching arc");
        const int m = static_cast<int>(circ.size());
        auto ends = [&](const ExitArc& x) {
            int a = corner(x.handle, x.side == 0 ? TL : TR);
            int z = corner(x.handle, x.side == 0 ? BL : BR);
            return x.reversed ? std::pair{z, a} : std::pair{a, z};
        };
        for (int i = 0; i < m; ++i) {
            ++placed[2 * circ[i].handle + circ[i].side];
            int from = ends(circ[i]).second;
            int to = ends(circ[(i + 1) % m]).first;
            b.strips.push_back({{from, to}, {from, to}});
        }
    }
    for (int k : placed)
        if (k != 1) throw branched_error("every exit arc must be placed exactly once");

    // smooth the corners away: each corner joins exactly two strips, the
    // same two on both sides
    for (int c = 6 * H - 1; c >= 2 * H; --c) {
        std::vector<std::pair<int, int>> hits;  // (strip, end)
        for (int s = 0; s < static_cast<int>(b.strips.size()); ++s)
            for (int e : {0, 1})
                if (b.strips[s].plus[e] == c) hits.emplace_back(s, e);
        if (hits.size() != 2) throw branched_error("corner is not a degree-2 point");
        auto [s1, e1] = hits[0];
        auto [s2, e2] = hits[1];
        if (s1 == s2) throw branched_error("corner closes a strip on itself");
        if (b.strips[s1].minus[e1] != c || b.strips[s2].minus[e2] != c)
            throw branched_error("corner correspondence broken");
        // new strip runs from the far end of s1 to the far end of s2
        Strip joined{{b.strips[s1].plus[1 - e1], b.strips[s2].plus[1 - e2]},
                     {b.strips[s1].minus[1 - e1], b.strips[s2].minus[1 - e2]}};
        b.strips[s1] = joined;
        b.strips.erase(b.strips.begin() + s2);
        // corner ids are the highest, so dropping them keeps the rest dense
        b.nv[0] = c;
        b.nv[1] = c;
    }
    return b;
}

// Attractor: a circle of N+ with `marks` marked points and no exit.
inline Block attractor_circle(int marks) {
    Block b;
    b.nv = {std::max(marks, 1), 0};
    if (marks <= 1) {
        b.fixed[0].emplace_back(0, 0);
        return b;
    }
    for (int i = 0; i < marks; ++i) b.fixed[0].emplace_back(i, (i + 1) % marks);
    return b;
}

// Quadrant layouts of one regular saddle against N-.
inline Block pants_out() {  // one circle in, two out
    return saddle_handles(1, {{{0, 0, false}}, {{0, 1, false}}});
}
inline Block twisted_saddle() {  // one in, one out
    return saddle_handles(1, {{{0, 0, false}, {0, 1, false}}});
}
inline Block pants_in() {  // two in, one out
    return saddle_handles(1, {{{0, 0, false}, {0, 1, true}}});
}

}  // namespace gsflow
