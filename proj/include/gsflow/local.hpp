#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "block.hpp"
#include "branched.hpp"
#include "model.hpp"

namespace gsflow {

// ---------------------------------------------------------------------------
// shapes of admissible semi-graphs

struct ShapeEntry {
    VertexLabel label;
    int e_plus = 0;
    int e_minus = 0;
    int offset = 0;  // B+ = B- + offset
    std::string relation;

    bool holds(const SemiGraph& sg) const {
        return sg.e_plus() == e_plus && sg.e_minus() == e_minus &&
               sg.B_plus() - sg.B_minus() == offset;
    }
};

namespace detail {

inline std::string relation_text(int e_plus, int e_minus, int offset, bool reversed_side) {
    (void)e_plus;
    const char* hi = reversed_side ? "B-" : "B+";
    const char* lo = reversed_side ? "B+" : "B-";
    if (e_minus == 0) return std::string(hi) + " = " + std::to_string(offset);
    if (offset == 0) return std::string(hi) + " = " + lo;
    return std::string(hi) + " = " + lo + (offset > 0 ? " + " : " - ") + std::to_string(std::abs(offset));
}

struct TableRow {
    SingularityType t;
    Nature n;
    int e_plus, e_minus, offset;
};

// Rows of the published table, in print order (two D ss_s shapes appear twice).
inline const std::vector<TableRow>& table_rows() {
    using enum Nature;
    using S = SingularityType;
    static const std::vector<TableRow> rows{
        {S::R, a, 1, 0, 1},    {S::R, s, 1, 1, 0},    {S::R, s, 1, 2, -1},
        {S::C, a, 2, 0, 2},    {S::C, s, 1, 1, 0},    {S::C, s, 2, 2, 0},
        {S::W, a, 1, 0, 2},    {S::W, s_s, 1, 1, 1},  {S::W, s_s, 1, 2, 0},
        {S::D, a, 1, 0, 3},    {S::D, sa, 1, 1, 2},   {S::D, sa, 1, 2, 1},
        {S::D, ss_s, 1, 1, 2}, {S::D, ss_s, 2, 1, 3}, {S::D, ss_s, 1, 2, 1},
        {S::D, ss_s, 2, 2, 2}, {S::D, ss_s, 1, 3, 0}, {S::D, ss_s, 1, 2, 1},
        {S::D, ss_s, 1, 4, -1}, {S::D, ss_s, 1, 3, 0},
        {S::T, a, 1, 0, 7},    {S::T, ssa, 1, 1, 2},  {S::T, ssa, 1, 2, 1},
    };
    return rows;
}

}  // namespace detail

// The printed table as 23 (label, e+, e-, relation) rows, duplicates kept.
inline std::vector<ShapeEntry> table_one() {
    std::vector<ShapeEntry> out;
    for (const auto& r : detail::table_rows())
        out.push_back({{r.t, r.n}, r.e_plus, r.e_minus, r.offset,
                       detail::relation_text(r.e_plus, r.e_minus, r.offset, false)});
    return out;
}

// Distinct shapes, each row plus its flow reversal.
inline std::vector<ShapeEntry> shape_catalog() {
    std::vector<ShapeEntry> out;
    std::set<std::tuple<VertexLabel, int, int>> seen;
    auto push = [&](ShapeEntry e) {
        if (seen.emplace(e.label, e.e_plus, e.e_minus).second) out.push_back(std::move(e));
    };
    for (const auto& r : detail::table_rows()) {
        VertexLabel l{r.t, r.n};
        push({l, r.e_plus, r.e_minus, r.offset,
              detail::relation_text(r.e_plus, r.e_minus, r.offset, false)});
        push({l.reversed(), r.e_minus, r.e_plus, -r.offset,
              detail::relation_text(r.e_plus, r.e_minus, r.offset, true)});
    }
    return out;
}

inline std::optional<ShapeEntry> find_shape(VertexLabel l, int e_plus, int e_minus) {
    static const auto shapes = shape_catalog();
    for (const auto& s : shapes)
        if (s.label == l && s.e_plus == e_plus && s.e_minus == e_minus) return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// minimal block catalog

struct BlockVariant {
    Block block;
    BoundaryPair boundary;
    std::set<std::pair<int, int>> routing;
};

struct CatalogEntry {
    VertexLabel label;
    int e_plus = 0;
    int e_minus = 0;
    std::string plus_form;  // the entering set shared by all variants
    std::vector<BlockVariant> variants;
    int beta_in = 0;   // branch points on N+
    int beta_out = 0;  // branch points on N-

    std::vector<BoundaryPair> boundary_pairs() const {
        std::vector<BoundaryPair> out;
        std::set<std::string> seen;
        for (const auto& v : variants)
            if (seen.insert(v.boundary.str()).second) out.push_back(v.boundary);
        return out;
    }
};

namespace detail {

inline bool primary_nature(Nature n) {
    using enum Nature;
    return n == a || n == s || n == s_s || n == sa || n == ss_s || n == ssa;
}

// every way of dropping the exit arcs of `handles` saddles onto exit circles
inline std::vector<std::vector<std::vector<ExitArc>>> exit_layouts(int handles) {
    std::vector<ExitArc> arcs;
    for (int h = 0; h < handles; ++h) arcs.push_back({h, 0, false}), arcs.push_back({h, 1, false});
    const int A = static_cast<int>(arcs.size());
    std::vector<std::vector<std::vector<ExitArc>>> out;
    std::vector<int> lab(static_cast<std::size_t>(A));
    std::function<void(int, int)> part = [&](int i, int used) {
        if (i == A) {
            std::vector<std::vector<int>> groups(static_cast<std::size_t>(used));
            for (int k = 0; k < A; ++k) groups[lab[k]].push_back(k);
            std::function<void(int, std::vector<std::vector<ExitArc>>&)> orders =
                [&](int g, std::vector<std::vector<ExitArc>>& cur) {
                    if (g == used) {
                        out.push_back(cur);
                        return;
                    }
                    auto grp = groups[g];
                    std::sort(grp.begin() + 1, grp.end());
                    do {
                        const int m = static_cast<int>(grp.size());
                        for (int mask = 0; mask < (1 << m); ++mask) {
                            std::vector<ExitArc> c;
                            for (int t = 0; t < m; ++t) {
                                ExitArc x = arcs[grp[t]];
                                x.reversed = (mask >> t) & 1;
                                c.push_back(x);
                            }
                            cur.push_back(std::move(c));
                            orders(g + 1, cur);
                            cur.pop_back();
                        }
                    } while (std::next_permutation(grp.begin() + 1, grp.end()));
                };
            std::vector<std::vector<ExitArc>> cur;
            orders(0, cur);
            return;
        }
        for (int l = 0; l <= used && l < 4; ++l) {
            lab[i] = l;
            part(i + 1, std::max(used, l + 1));
        }
    };
    part(0, 0);
    return out;
}

// merge the points listed in `marks` (ids above everything else, in order)
// onto `hits`, highest first so ids stay valid
inline void glue(Block& b, int side, const std::vector<int>& hits, int first_mark) {
    for (int k = static_cast<int>(hits.size()) - 1; k >= 0; --k)
        merge_points(b, side, hits[k], first_mark + k);
}

inline std::vector<Block> raw_blocks(VertexLabel l) {
    using enum Nature;
    using S = SingularityType;
    std::vector<Block> out;
    auto single = exit_layouts(1);
    switch (l.type) {
        case S::R:
            if (l.nature == a) out.push_back(attractor_circle(1));
            else
                for (const auto& lay : single) out.push_back(saddle_handles(1, lay));
            break;
        case S::C:
            if (l.nature == a) {
                out.push_back(disjoint_union(attractor_circle(1), attractor_circle(1)));
            } else {
                // two sheets through the cone point, each a band from N+ to N-
                Block two;
                two.nv = {2, 2};
                two.strips = {{{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}};
                out.push_back(two);
                Block one;
                one.nv = {2, 2};
                one.strips = {{{0, 1}, {0, 1}}, {{1, 0}, {1, 0}}};
                out.push_back(one);
            }
            break;
        case S::W:
            if (l.nature == a) {
                Block b = attractor_circle(2);
                merge_points(b, 0, 0, 1);
                out.push_back(b);
            } else {
                for (const auto& lay : single) {
                    Block b = saddle_handles(1, lay);
                    merge_points(b, 0, 0, 1);
                    out.push_back(b);
                }
            }
            break;
        case S::D:
            if (l.nature == a) {
                Block b = disjoint_union(attractor_circle(2), attractor_circle(2));
                glue(b, 0, {0, 1}, 2);
                out.push_back(b);
            } else if (l.nature == sa) {
                for (const auto& lay : single)
                    for (int flip : {0, 1}) {
                        Block b = disjoint_union(saddle_handles(1, lay), attractor_circle(2));
                        glue(b, 0, flip ? std::vector<int>{1, 0} : std::vector<int>{0, 1}, 2);
                        out.push_back(b);
                    }
            } else {
                for (const auto& lay : exit_layouts(2))
                    for (int flip : {0, 1}) {
                        Block b = saddle_handles(2, lay);
                        // stable hits 0,1 of the first saddle meet 2,3 of the second
                        glue(b, 0, flip ? std::vector<int>{1, 0} : std::vector<int>{0, 1}, 2);
                        out.push_back(b);
                    }
            }
            break;
        case S::T:
            if (l.nature == a) {
                Block b = disjoint_union(disjoint_union(attractor_circle(4), attractor_circle(4)),
                                         attractor_circle(4));
                // circle k has marks 4k..4k+3; crossings alternate on every circle
                // c1: x12 x13 y12 y13, c2: x12 x23 y12 y23, c3: x13 x23 y13 y23
                std::vector<std::pair<int, int>> same{{0, 4}, {2, 6}, {1, 8}, {3, 10}, {5, 9}, {7, 11}};
                std::vector<int> id(12);
                std::iota(id.begin(), id.end(), 0);
                // merge from the top so that lower ids never move
                std::sort(same.begin(), same.end(),
                          [](auto x, auto y) { return x.second > y.second; });
                for (auto [keep, drop] : same) merge_points(b, 0, keep, drop);
                out.push_back(b);
            } else {
                std::map<std::vector<int>, Block> dss;
                for (const auto& b : raw_blocks({S::D, ss_s})) dss.emplace(block_key(b), b);
                for (const auto& [key, b] : dss) {
                    Block r = reversed(b);  // four stable hits 0..3 on N+
                    std::vector<int> perm{0, 1, 2, 3};
                    do {
                        Block t = disjoint_union(r, attractor_circle(4));
                        glue(t, 0, perm, 4);
                        out.push_back(t);
                    } while (std::next_permutation(perm.begin(), perm.end()));
                }
            }
            break;
    }
    return out;
}

inline std::vector<CatalogEntry> build_catalog() {
    std::vector<CatalogEntry> out;
    for (auto t : all_types)
        for (auto n : all_natures) {
            if (!admissible(t, n) || !primary_nature(n)) continue;
            VertexLabel l{t, n};
            std::set<std::vector<int>> keys;
            std::map<std::tuple<int, int, std::string>, CatalogEntry> groups;
            for (auto& b : raw_blocks(l)) {
                auto key = block_key(b);
                if (!keys.insert(key).second) continue;
                BoundaryPair bp = boundary(b);
                int ep = bp.e_plus(), em = bp.e_minus();
                // self-reverse natures: count a block and its reversal once
                if (reverse_nature(n) == n && ep > em) continue;
                if (reverse_nature(n) == n && ep == em && keys.count(block_key(reversed(b))) &&
                    block_key(reversed(b)) < key)
                    continue;
                std::string pf = join_forms(bp.plus.forms);
                auto& e = groups[{ep, em, pf}];
                e.label = l;
                e.e_plus = ep;
                e.e_minus = em;
                e.plus_form = pf;
                e.beta_in = std::accumulate(bp.plus.weights.begin(), bp.plus.weights.end(), 0) - ep;
                e.beta_out = std::accumulate(bp.minus.weights.begin(), bp.minus.weights.end(), 0) - em;
                e.variants.push_back({b, bp, routing(b)});
            }
            for (auto& [k, e] : groups) out.push_back(std::move(e));
        }
    return out;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& minimal_block_catalog() {
    static const std::vector<CatalogEntry> cat = detail::build_catalog();
    return cat;
}

inline std::array<int, 5> catalog_counts() {
    std::array<int, 5> c{};
    for (const auto& e : minimal_block_catalog()) ++c[static_cast<int>(e.label.type)];
    return c;
}

// All minimal blocks realising a label, including flow reversals.
inline const std::vector<Block>& blocks_for(VertexLabel l) {
    static std::mutex mu;
    static std::map<VertexLabel, std::vector<Block>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(l);
    if (it != cache.end()) return it->second;
    std::vector<Block> out;
    std::set<std::vector<int>> keys;
    auto add = [&](const Block& b) {
        if (keys.insert(block_key(b)).second) out.push_back(b);
    };
    for (const auto& e : minimal_block_catalog()) {
        for (const auto& v : e.variants) {
            if (e.label == l) add(v.block);
            if (e.label.reversed() == l) add(reversed(v.block));
        }
    }
    return cache.emplace(l, std::move(out)).first->second;
}

struct MinimalWeights {
    std::vector<int> in, out;
};

namespace detail {
inline MinimalWeights compute_minimal_weights(VertexLabel l, int e_plus, int e_minus) {
    std::optional<MinimalWeights> best;
    for (const auto& b : blocks_for(l)) {
        auto bp = boundary(b);
        if (bp.e_plus() != e_plus || bp.e_minus() != e_minus) continue;
        MinimalWeights w{bp.plus.weights, bp.minus.weights};
        std::sort(w.in.rbegin(), w.in.rend());
        std::sort(w.out.rbegin(), w.out.rend());
        if (best && (best->in != w.in || best->out != w.out))
            throw model_error("minimal weights are not unique for " + l.str());
        best = w;
    }
    if (!best)
        throw model_error("no shape " + l.str() + " (" + std::to_string(e_plus) + "," +
                          std::to_string(e_minus) + ")");
    return *best;
}
}  // namespace detail

inline MinimalWeights minimal_weights(VertexLabel l, int e_plus, int e_minus) {
    static std::mutex mu;
    static std::map<std::tuple<VertexLabel, int, int>, MinimalWeights> cache;
    {
        std::lock_guard lock(mu);
        auto it = cache.find({l, e_plus, e_minus});
        if (it != cache.end()) return it->second;
    }
    auto w = detail::compute_minimal_weights(l, e_plus, e_minus);
    std::lock_guard lock(mu);
    cache.emplace(std::tuple{l, e_plus, e_minus}, w);
    return w;
}

// ---------------------------------------------------------------------------
// weight-level reachability: only component weights and which N+ component
// reaches which N- component matter for the weights a passageway can produce

namespace detail {

struct WeightState {
    std::vector<int> wp, wm;
    std::vector<std::pair<int, int>> rel;  // sorted
};

inline std::vector<int> weight_state_key(const WeightState& s) {
    // smallest encoding over relabellings of both sides
    const int P = static_cast<int>(s.wp.size()), M = static_cast<int>(s.wm.size());
    std::vector<int> pp(static_cast<std::size_t>(P)), pm(static_cast<std::size_t>(M));
    std::iota(pp.begin(), pp.end(), 0);
    std::vector<int> best;
    do {
        std::iota(pm.begin(), pm.end(), 0);
        do {
            std::vector<int> code{P, M};
            for (int i = 0; i < P; ++i) code.push_back(s.wp[pp[i]]);
            for (int i = 0; i < M; ++i) code.push_back(s.wm[pm[i]]);
            std::vector<int> inv_p(static_cast<std::size_t>(P)), inv_m(static_cast<std::size_t>(M));
            for (int i = 0; i < P; ++i) inv_p[pp[i]] = i;
            for (int i = 0; i < M; ++i) inv_m[pm[i]] = i;
            std::vector<std::pair<int, int>> r;
            for (auto [a, b] : s.rel) r.emplace_back(inv_p[a], inv_m[b]);
            std::sort(r.begin(), r.end());
            for (auto [a, b] : r) code.push_back(a), code.push_back(b);
            if (best.empty() || code < best) best = std::move(code);
        } while (std::next_permutation(pm.begin(), pm.end()));
    } while (std::next_permutation(pp.begin(), pp.end()));
    return best;
}

inline WeightState weight_state(const Block& b) {
    WeightState s;
    auto bp = boundary(b);
    int np = 0, nm = 0;
    auto cp = side_components(b, 0, &np);
    auto cm = side_components(b, 1, &nm);
    // component weights straight from the graph: arcs - points + 1 after smoothing
    auto side_weights = [&](int side, const std::vector<int>& comp, int count) {
        std::vector<int> arcs(static_cast<std::size_t>(count), 0), pts(static_cast<std::size_t>(count), 0);
        for (int v = 0; v < b.nv[side]; ++v) ++pts[comp[v]];
        for (const auto& st : b.strips) ++arcs[comp[(side == 0 ? st.plus : st.minus)[0]]];
        for (auto [x, y] : b.fixed[side]) ++arcs[comp[x]];
        std::vector<int> w(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) w[i] = arcs[i] - pts[i] + 1;
        return w;
    };
    s.wp = side_weights(0, cp, np);
    s.wm = side_weights(1, cm, nm);
    for (auto r : routing(b)) s.rel.push_back(r);
    (void)bp;
    return s;
}

inline WeightState apply_move(const WeightState& s, std::pair<int, int> x, std::pair<int, int> y) {
    WeightState t = s;
    std::vector<int> mp(s.wp.size()), mm(s.wm.size());
    std::iota(mp.begin(), mp.end(), 0);
    std::iota(mm.begin(), mm.end(), 0);
    auto fold = [](std::vector<int>& w, std::vector<int>& map, int a, int b) {
        if (a == b) {
            ++w[a];
            return;
        }
        if (a > b) std::swap(a, b);
        w[a] += w[b];
        w.erase(w.begin() + b);
        for (auto& m : map) {
            if (m == b) m = a;
            else if (m > b) --m;
        }
    };
    fold(t.wp, mp, x.first, y.first);
    fold(t.wm, mm, x.second, y.second);
    std::set<std::pair<int, int>> rel;
    for (auto [a, b] : s.rel) rel.emplace(mp[a], mm[b]);
    t.rel.assign(rel.begin(), rel.end());
    return t;
}

inline int moves_left(const std::vector<int>& have, const std::vector<int>& want) {
    int bh = std::accumulate(have.begin(), have.end(), 0);
    int bw = std::accumulate(want.begin(), want.end(), 0);
    return (bw - bh) + static_cast<int>(have.size() - want.size());
}

inline std::vector<int> sorted_copy(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

inline bool weights_reachable(const WeightState& start, const std::vector<int>& want_p,
                              const std::vector<int>& want_m) {
    auto tp = sorted_copy(want_p), tm = sorted_copy(want_m);
    int m = moves_left(start.wp, tp);
    if (m < 0 || m != moves_left(start.wm, tm)) return false;
    std::set<std::vector<int>> seen;
    std::vector<WeightState> frontier{start};
    for (int depth = 0; depth <= m; ++depth) {
        std::vector<WeightState> next;
        for (const auto& s : frontier) {
            if (depth == m) {
                if (sorted_copy(s.wp) == tp && sorted_copy(s.wm) == tm) return true;
                continue;
            }
            if (s.wp.size() < tp.size() || s.wm.size() < tm.size()) continue;
            const int R = static_cast<int>(s.rel.size());
            for (int i = 0; i < R; ++i)
                for (int j = i; j < R; ++j) {
                    auto t = apply_move(s, s.rel[i], s.rel[j]);
                    if (t.wp.size() < tp.size() || t.wm.size() < tm.size()) continue;
                    if (*std::max_element(t.wp.begin(), t.wp.end()) > tp.back()) continue;
                    if (*std::max_element(t.wm.begin(), t.wm.end()) > tm.back()) continue;
                    if (seen.insert(weight_state_key(t)).second) next.push_back(std::move(t));
                }
        }
        frontier = std::move(next);
    }
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// local verdicts

enum class Reason {
    PH_violated,
    degree_bound,
    shape_absent,
    Thm4_exclusion,
    Thm5_ii,
    Thm5_iii,
    Thm5_iv,
    Thm2_b,
    Thm2_c,
};

inline std::string_view to_string(Reason r) {
    switch (r) {
        case Reason::PH_violated: return "PH-violated";
        case Reason::degree_bound: return "degree-bound";
        case Reason::shape_absent: return "shape-absent";
        case Reason::Thm4_exclusion: return "Thm4-exclusion";
        case Reason::Thm5_ii: return "Thm5-ii";
        case Reason::Thm5_iii: return "Thm5-iii";
        case Reason::Thm5_iv: return "Thm5-iv";
        case Reason::Thm2_b: return "Thm2-b";
        case Reason::Thm2_c: return "Thm2-c";
    }
    return "?";
}

struct LocalVerdict {
    enum class Kind { YesMinimal, YesWithPassageways, No };
    Kind kind = Kind::No;
    int passageways = 0;
    Reason reason = Reason::shape_absent;

    bool yes() const { return kind != Kind::No; }
    std::string str() const {
        switch (kind) {
            case Kind::YesMinimal: return "YesMinimal";
            case Kind::YesWithPassageways:
                return "YesWithPassageways(" + std::to_string(passageways) + ")";
            case Kind::No: return "No(" + std::string(to_string(reason)) + ")";
        }
        return "?";
    }
    static LocalVerdict no(Reason r) { return {Kind::No, 0, r}; }
};

namespace detail {

inline bool all_equal(const std::vector<int>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// The five excluded shapes, stated for ss_s / ssa and mirrored under reversal.
inline bool excluded_shape(const SemiGraph& sg) {
    using enum Nature;
    const auto& l = sg.label;
    auto check = [](Nature n, SingularityType t, const std::vector<int>& in,
                    const std::vector<int>& out, int min_total_in) {
        const int ep = static_cast<int>(in.size()), em = static_cast<int>(out.size());
        if (t == SingularityType::D && n == ss_s && ep == 2) {
            if (em == 4 || em == 3) return true;
            if (em == 1 && out[0] == 1 && in[0] != in[1]) return true;
            if (em == 2 && out[0] == 1 && out[1] == 1 && in[0] != in[1]) return true;
        }
        if (t == SingularityType::T && n == ssa && ep == 1 && em == 2 && out[0] != out[1] &&
            in[0] == min_total_in)
            return true;
        return false;
    };
    if (check(l.nature, l.type, sg.in_weights, sg.out_weights, 5)) return true;
    if (check(reverse_nature(l.nature), l.type, sg.out_weights, sg.in_weights, 5)) return true;
    return false;
}

}  // namespace detail

inline LocalVerdict local_realizable(const SemiGraph& sg) {
    using K = LocalVerdict::Kind;
    if (!sg.label.admissible()) return LocalVerdict::no(Reason::shape_absent);
    if (ph_residual(sg) != 0) return LocalVerdict::no(Reason::PH_violated);
    if (!degree_bounds_ok(sg)) return LocalVerdict::no(Reason::degree_bound);
    if (detail::excluded_shape(sg)) return LocalVerdict::no(Reason::Thm4_exclusion);
    if (!find_shape(sg.label, sg.e_plus(), sg.e_minus()))
        return LocalVerdict::no(Reason::shape_absent);
    for (int w : sg.in_weights)
        if (w < 1) return LocalVerdict::no(Reason::PH_violated);
    for (int w : sg.out_weights)
        if (w < 1) return LocalVerdict::no(Reason::PH_violated);

    auto mw = minimal_weights(sg.label, sg.e_plus(), sg.e_minus());
    const int k = sg.B_plus() - std::accumulate(mw.in.begin(), mw.in.end(), 0);

    bool reach = false;
    for (const auto& b : blocks_for(sg.label)) {
        if (detail::weights_reachable(detail::weight_state(b), sg.in_weights, sg.out_weights)) {
            reach = true;
            break;
        }
    }
    if (reach) {
        if (k == 0) return {K::YesMinimal, 0, Reason::shape_absent};
        return {K::YesWithPassageways, k, Reason::shape_absent};
    }
    switch (sg.label.type) {
        case SingularityType::C: return LocalVerdict::no(Reason::Thm5_ii);
        case SingularityType::D:
            return LocalVerdict::no(k <= 0 ? Reason::Thm2_b : Reason::Thm5_iii);
        case SingularityType::T:
            return LocalVerdict::no(k <= 0 ? Reason::Thm2_c : Reason::Thm5_iv);
        default: return LocalVerdict::no(Reason::shape_absent);
    }
}

// ---------------------------------------------------------------------------
// form-level passageway closure

struct ClosureResult {
    std::vector<BoundaryPair> pairs;  // distinct, sorted by text
    bool complete = true;
};

namespace detail {

inline std::size_t state_budget() { return 400000; }

inline void sort_pairs(std::vector<BoundaryPair>& v) {
    std::sort(v.begin(), v.end(),
              [](const BoundaryPair& x, const BoundaryPair& y) { return x.str() < y.str(); });
}

}  // namespace detail

// Every boundary pair reachable from the minimal blocks of `l` with the given
// component weights (as multisets).
inline ClosureResult achievable_boundaries(VertexLabel l, std::vector<int> in_w,
                                           std::vector<int> out_w) {
    std::sort(in_w.begin(), in_w.end());
    std::sort(out_w.begin(), out_w.end());
    using Key = std::tuple<VertexLabel, std::vector<int>, std::vector<int>>;
    static std::mutex mu;
    static std::map<Key, ClosureResult> cache;
    {
        std::lock_guard lock(mu);
        auto it = cache.find({l, in_w, out_w});
        if (it != cache.end()) return it->second;
    }
    ClosureResult res;
    std::map<std::string, BoundaryPair> found;
    std::map<std::vector<int>, bool> weight_ok;  // memo keyed by weight-state key
    std::size_t budget = detail::state_budget();
    auto feasible = [&](const Block& b) {
        auto ws = detail::weight_state(b);
        auto key = detail::weight_state_key(ws);
        auto it = weight_ok.find(key);
        if (it != weight_ok.end()) return it->second;
        bool ok = detail::weights_reachable(ws, in_w, out_w);
        weight_ok.emplace(key, ok);
        return ok;
    };
    for (const auto& start : blocks_for(l)) {
        if (!feasible(start)) continue;
        auto ws = detail::weight_state(start);
        const int m = detail::moves_left(ws.wp, in_w);
        std::set<std::vector<int>> seen;
        std::vector<Block> frontier{start};
        for (int depth = 0; depth < m && res.complete; ++depth) {
            std::vector<Block> next;
            for (const auto& b : frontier) {
                const int S = static_cast<int>(b.strips.size());
                for (int i = 0; i < S && res.complete; ++i)
                    for (int j = i; j < S; ++j) {
                        Block c = passageway(b, i, j);
                        if (!feasible(c)) continue;
                        if (!seen.insert(block_key(c)).second) continue;
                        next.push_back(std::move(c));
                        if (seen.size() > budget) {
                            res.complete = false;
                            break;
                        }
                    }
            }
            frontier = std::move(next);
        }
        for (const auto& b : frontier) {
            auto bp = boundary(b);
            auto wp = bp.plus.weights, wm = bp.minus.weights;
            std::sort(wp.begin(), wp.end());
            std::sort(wm.begin(), wm.end());
            if (wp == in_w && wm == out_w) found.emplace(bp.str(), bp);
        }
    }
    for (auto& [s, bp] : found) res.pairs.push_back(bp);
    std::lock_guard lock(mu);
    cache.emplace(Key{l, in_w, out_w}, res);
    return res;
}

inline bool closure_contains(VertexLabel l, const std::vector<std::string>& plus_forms,
                             const std::vector<std::string>& minus_forms) {
    std::vector<int> wi, wo;
    for (const auto& f : plus_forms) wi.push_back(weight_of_form(f));
    for (const auto& f : minus_forms) wo.push_back(weight_of_form(f));
    auto p = plus_forms, m = minus_forms;
    std::sort(p.begin(), p.end());
    std::sort(m.begin(), m.end());
    for (const auto& bp : achievable_boundaries(l, wi, wo).pairs)
        if (bp.plus.forms == p && bp.minus.forms == m) return true;
    return false;
}

// Breadth-first closure of one catalog entry under passageways, keeping every
// pair whose combined weight stays within the bound.
inline ClosureResult passageway_closure(const CatalogEntry& entry, int max_total_weight = 12) {
    ClosureResult res;
    std::map<std::string, BoundaryPair> found;
    std::set<std::vector<int>> seen;
    std::deque<Block> queue;
    auto total = [](const BoundaryPair& bp) {
        return std::accumulate(bp.plus.weights.begin(), bp.plus.weights.end(), 0) +
               std::accumulate(bp.minus.weights.begin(), bp.minus.weights.end(), 0);
    };
    for (const auto& v : entry.variants) {
        if (total(v.boundary) > max_total_weight) continue;
        if (seen.insert(block_key(v.block)).second) queue.push_back(v.block);
    }
    while (!queue.empty()) {
        Block b = std::move(queue.front());
        queue.pop_front();
        auto bp = boundary(b);
        found.emplace(bp.str(), bp);
        const int S = static_cast<int>(b.strips.size());
        for (int i = 0; i < S; ++i)
            for (int j = i; j < S; ++j) {
                Block c = passageway(b, i, j);
                if (total(boundary(c)) > max_total_weight) continue;
                if (!seen.insert(block_key(c)).second) continue;
                if (seen.size() > detail::state_budget()) {
                    res.complete = false;
                    queue.clear();
                    break;
                }
                queue.push_back(std::move(c));
            }
    }
    for (auto& [s, bp] : found) res.pairs.push_back(bp);
    return res;
}

}  // namespace gsflow
