#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "branched.hpp"
#include "local.hpp"
#include "model.hpp"

namespace gsflow {

enum class TheoremId { Thm6, Thm7, Thm8, Thm9, Thm10_i, Thm10_ii, Search };

inline std::string_view to_string(TheoremId t) {
    switch (t) {
        case TheoremId::Thm6: return "Thm6";
        case TheoremId::Thm7: return "Thm7";
        case TheoremId::Thm8: return "Thm8";
        case TheoremId::Thm9: return "Thm9";
        case TheoremId::Thm10_i: return "Thm10-i";
        case TheoremId::Thm10_ii: return "Thm10-ii";
        case TheoremId::Search: return "Search";
    }
    return "?";
}

// edge index -> canonical form of the boundary glued along that edge
using Certificate = std::map<std::size_t, std::string>;

// Forms seen from each end of every edge. A certificate is the special case
// where both ends agree.
struct EndpointAssignment {
    std::map<std::size_t, std::string> at_source, at_target;
};

struct RealizationVerdict {
    enum class Status { RealizableBy, NotRealizable, Unknown };
    Status status = Status::Unknown;
    std::optional<TheoremId> theorem;
    Certificate certificate;
    std::vector<std::string> witness_vertices;
    std::vector<std::size_t> witness_edges;
    std::string reason;
    int searched_bound = 0;
    std::vector<std::string> notes;

    bool realizable() const { return status == Status::RealizableBy; }
};

inline std::string_view to_string(RealizationVerdict::Status s) {
    switch (s) {
        case RealizationVerdict::Status::RealizableBy: return "realizable";
        case RealizationVerdict::Status::NotRealizable: return "not-realizable";
        case RealizationVerdict::Status::Unknown: return "unknown";
    }
    return "?";
}

struct GSGraphStatus {
    bool is_gs = false;
    bool is_minimal_gs = false;
    std::vector<LocalVerdict> verdicts;  // aligned with g.vertices()
};

inline GSGraphStatus classify_graph(const LyapunovGraph& g) {
    GSGraphStatus st;
    st.is_gs = true;
    st.is_minimal_gs = true;
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        LocalVerdict lv = LocalVerdict::no(Reason::shape_absent);
        try {
            lv = local_realizable(semigraph(g, v));
        } catch (const model_error&) {
        }
        if (!lv.yes()) st.is_gs = false;
        if (lv.kind != LocalVerdict::Kind::YesMinimal) st.is_minimal_gs = false;
        st.verdicts.push_back(lv);
    }
    return st;
}

// ---------------------------------------------------------------------------
// certificate checking

inline EndpointAssignment both_ends(const Certificate& c) { return {c, c}; }

inline bool verify_assignment(const LyapunovGraph& g, const EndpointAssignment& a) {
    const auto& E = g.edges();
    for (std::size_t e = 0; e < E.size(); ++e) {
        if (E[e].source && !a.at_source.count(e))
            throw model_error("missing edge assignment for edge " + std::to_string(e));
        if (E[e].target && !a.at_target.count(e))
            throw model_error("missing edge assignment for edge " + std::to_string(e));
        if (E[e].source && E[e].target && a.at_source.at(e) != a.at_target.at(e)) return false;
        for (const auto* side : {&a.at_source, &a.at_target}) {
            auto it = side->find(e);
            if (it == side->end()) continue;
            try {
                if (weight_of_form(it->second) != E[e].weight) return false;
            } catch (const branched_error&) {
                return false;
            }
        }
    }
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        std::vector<std::string> plus, minus;
        for (auto e : g.in_edges(v)) plus.push_back(a.at_target.at(e));
        for (auto e : g.out_edges(v)) minus.push_back(a.at_source.at(e));
        if (!closure_contains(g.vertices()[v].label, plus, minus)) return false;
    }
    return true;
}

inline bool verify_certificate(const LyapunovGraph& g, const Certificate& c) {
    return verify_assignment(g, both_ends(c));
}

// ---------------------------------------------------------------------------
// family predicates

namespace detail {

inline bool is_multiset(std::vector<int> have, std::vector<int> want) {
    std::sort(have.begin(), have.end());
    std::sort(want.begin(), want.end());
    return have == want;
}

inline bool all_odd(const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [](int x) { return x % 2 != 0; });
}

inline int count_ones(const std::vector<int>& v) {
    return static_cast<int>(std::count(v.begin(), v.end(), 1));
}

inline bool no_T(const LyapunovGraph& g) {
    for (const auto& v : g.vertices())
        if (v.label.type == SingularityType::T) return false;
    return true;
}

inline bool gs_closed_balanced(const LyapunovGraph& g, const GSGraphStatus& st) {
    return st.is_gs && g.closed() && fold_balance(g);
}

inline Certificate assign_family(const LyapunovGraph& g,
                                 const std::function<Branched1Manifold(int)>& fam) {
    Certificate c;
    std::map<int, std::string> memo;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        int w = g.edges()[e].weight;
        auto it = memo.find(w);
        if (it == memo.end()) it = memo.emplace(w, canonical_form(fam(w))).first;
        c[e] = it->second;
    }
    return c;
}

inline bool in_shape_set(const SemiGraph& sg) {
    return find_shape(sg.label, sg.e_plus(), sg.e_minus()).has_value();
}

}  // namespace detail

inline bool lemma_firstfamily_ok(const SemiGraph& sg) {
    using enum Nature;
    const auto t = sg.label.type;
    const auto n = sg.label.nature;
    if (t == SingularityType::T) return false;
    const int deg = sg.degree();
    if (deg == 1) {
        int w = sg.e_plus() ? sg.in_weights[0] : sg.out_weights[0];
        if (w != 1 && w != 2) return false;
    }
    if (t == SingularityType::D && (n == sa || n == sr) && deg != 2) return false;
    if (deg > 4) return false;
    if (t == SingularityType::D && n == ss_s && sg.e_plus() == 1 && sg.e_minus() == 2 &&
        !detail::is_multiset(sg.out_weights, {1, sg.B_plus() - 2}))
        return false;
    if (t == SingularityType::D && n == ss_u && sg.e_plus() == 2 && sg.e_minus() == 1 &&
        !detail::is_multiset(sg.in_weights, {1, sg.B_minus() - 2}))
        return false;
    if (sg.e_minus() == 3 && !detail::is_multiset(sg.out_weights, {1, 1, sg.B_minus() - 2}))
        return false;
    if (sg.e_plus() == 3 && !detail::is_multiset(sg.in_weights, {1, 1, sg.B_plus() - 2}))
        return false;
    return true;
}

inline bool lemma_familyB_ok(const SemiGraph& sg) {
    const auto t = sg.label.type;
    if (t == SingularityType::T) return false;
    // the conditions are symmetric under reversal; check both orientations
    for (int flip = 0; flip < 2; ++flip) {
        const auto& one = flip ? sg.out_weights : sg.in_weights;   // the "±" side
        const auto& other = flip ? sg.in_weights : sg.out_weights;  // the "∓" side
        const int B1 = flip ? sg.B_minus() : sg.B_plus();
        const int B2 = flip ? sg.B_plus() : sg.B_minus();
        const int e1 = static_cast<int>(one.size()), e2 = static_cast<int>(other.size());

        if ((t == SingularityType::R || t == SingularityType::D) && e1 == 1 && e2 == 2 &&
            std::abs(B1 - B2) == 1 && B1 % 2 != 0 && !detail::all_odd(other))
            return false;
        if (t == SingularityType::W && e1 == 1 && e2 == 2 &&
            (B1 % 2 != 0 || !detail::is_multiset(other, {1, B1 - 1})))
            return false;
        if (t == SingularityType::D && e1 == 2 && e2 == 2 && B1 > B2) {
            if (one[0] % 2 != 0 || one[1] % 2 != 0) return false;
            if (!detail::is_multiset(other, {1, B1 - 3}) &&
                !detail::is_multiset(other, {one[0] - 1, one[1] - 1}))
                return false;
        }
        if (t == SingularityType::D && e2 == 3) {
            if (detail::count_ones(other) < 1) return false;
            if (B1 % 2 != 0 && !detail::all_odd(other)) return false;
        }
        if (t == SingularityType::D && e2 == 4) {
            if (detail::count_ones(other) < 2) return false;
            if (B1 % 2 != 0 && !detail::all_odd(other)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// sufficient conditions

inline std::optional<Certificate> check_minimal_case(const LyapunovGraph& g,
                                                     const GSGraphStatus& st) {
    if (!st.is_minimal_gs || !g.closed() || !fold_balance(g)) return std::nullopt;
    for (const auto& e : g.edges()) {
        int w = e.weight;
        if (w != 1 && w != 2 && w != 3 && w != 5 && w != 7) return std::nullopt;
    }
    return detail::assign_family(g, family_minimal);
}

inline std::optional<Certificate> check_linear(const LyapunovGraph& g, const GSGraphStatus& st) {
    if (!detail::gs_closed_balanced(g, st) || !detail::no_T(g)) return std::nullopt;
    for (std::size_t v = 0; v < g.vertices().size(); ++v)
        if (g.in_edges(v).size() + g.out_edges(v).size() > 2) return std::nullopt;
    return detail::assign_family(g, family_B);
}

inline std::optional<Certificate> check_blend(const LyapunovGraph& g, const GSGraphStatus& st) {
    if (!detail::gs_closed_balanced(g, st) || !detail::no_T(g)) return std::nullopt;
    const auto& E = g.edges();
    std::vector<char> star(E.size(), 0);
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        auto in = g.in_edges(v), out = g.out_edges(v);
        if (in.size() + out.size() < 3) continue;
        if (st.verdicts[v].kind != LocalVerdict::Kind::YesMinimal) return std::nullopt;
        for (auto e : in) star[e] = 1;
        for (auto e : out) star[e] = 1;
    }
    Certificate c;
    for (std::size_t e = 0; e < E.size(); ++e)
        c[e] = canonical_form(star[e] ? family_minimal(E[e].weight) : family_B(E[e].weight));
    return c;
}

inline std::optional<Certificate> check_rcw(const LyapunovGraph& g, const GSGraphStatus& st) {
    if (!detail::gs_closed_balanced(g, st)) return std::nullopt;
    for (const auto& v : g.vertices()) {
        auto t = v.label.type;
        if (t != SingularityType::R && t != SingularityType::C && t != SingularityType::W)
            return std::nullopt;
    }
    return detail::assign_family(g, family_A);
}

struct FamilyCertificate {
    TheoremId theorem;
    Certificate certificate;
};

inline std::optional<FamilyCertificate> check_families(const LyapunovGraph& g,
                                                       const GSGraphStatus& st) {
    if (!detail::gs_closed_balanced(g, st) || !detail::no_T(g)) return std::nullopt;
    bool first = true, second = true;
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        auto sg = semigraph(g, v);
        if (!detail::in_shape_set(sg)) return std::nullopt;
        first = first && lemma_firstfamily_ok(sg);
        second = second && lemma_familyB_ok(sg);
    }
    if (first) return FamilyCertificate{TheoremId::Thm10_i, detail::assign_family(g, family_A)};
    if (second) return FamilyCertificate{TheoremId::Thm10_ii, detail::assign_family(g, family_B)};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// bounded search

struct SearchOptions {
    int bound = 0;
    unsigned threads = 1;
    std::size_t node_budget = 5'000'000;
};

struct SearchResult {
    enum class Outcome { Found, Exhausted, BudgetHit } outcome = Outcome::Exhausted;
    EndpointAssignment assignment;
    std::vector<std::string> witness_vertices;
};

namespace detail {

// one option for a vertex: a form for each incident edge, in_edges then out_edges
using LocalChoice = std::vector<std::string>;

inline void spread(const std::vector<std::size_t>& edges, const LyapunovGraph& g,
                   const std::vector<std::string>& forms, std::vector<std::string>& cur,
                   std::vector<char>& used, std::vector<LocalChoice>& out, std::size_t at,
                   const LocalChoice& prefix) {
    if (at == edges.size()) {
        LocalChoice c = prefix;
        c.insert(c.end(), cur.begin(), cur.end());
        out.push_back(std::move(c));
        return;
    }
    const int w = g.edges()[edges[at]].weight;
    std::set<std::string> tried;
    for (std::size_t k = 0; k < forms.size(); ++k) {
        if (used[k] || weight_of_form(forms[k]) != w || !tried.insert(forms[k]).second) continue;
        used[k] = 1;
        cur.push_back(forms[k]);
        spread(edges, g, forms, cur, used, out, at + 1, prefix);
        cur.pop_back();
        used[k] = 0;
    }
}

struct VertexDomain {
    std::vector<std::size_t> edges;  // in_edges then out_edges
    std::size_t n_in = 0;
    std::vector<LocalChoice> choices;
};

inline std::optional<VertexDomain> vertex_domain(const LyapunovGraph& g, std::size_t v) {
    VertexDomain d;
    auto in = g.in_edges(v), out = g.out_edges(v);
    d.edges = in;
    d.n_in = in.size();
    d.edges.insert(d.edges.end(), out.begin(), out.end());
    std::vector<int> wi, wo;
    for (auto e : in) wi.push_back(g.edges()[e].weight);
    for (auto e : out) wo.push_back(g.edges()[e].weight);
    auto res = achievable_boundaries(g.vertices()[v].label, wi, wo);
    if (!res.complete) return std::nullopt;
    std::set<LocalChoice> all;
    for (const auto& bp : res.pairs) {
        std::vector<LocalChoice> ins, outs;
        std::vector<std::string> cur;
        std::vector<char> used(bp.plus.forms.size(), 0);
        spread(in, g, bp.plus.forms, cur, used, ins, 0, {});
        for (const auto& pre : ins) {
            std::vector<char> used2(bp.minus.forms.size(), 0);
            std::vector<LocalChoice> full;
            spread(out, g, bp.minus.forms, cur, used2, full, 0, pre);
            for (auto& c : full) all.insert(std::move(c));
        }
    }
    d.choices.assign(all.begin(), all.end());
    return d;
}

struct Csp {
    const LyapunovGraph& g;
    std::vector<VertexDomain> dom;
    std::vector<std::size_t> order;
    std::atomic<std::size_t>& nodes;
    std::size_t budget;
    std::size_t deepest = 0;
    std::size_t deepest_vertex = 0;

    bool consistent(std::size_t v, const LocalChoice& c, const std::vector<std::string>& form) {
        for (std::size_t k = 0; k < dom[v].edges.size(); ++k) {
            const auto& f = form[dom[v].edges[k]];
            if (!f.empty() && f != c[k]) return false;
        }
        return true;
    }

    // returns 1 found, 0 exhausted, -1 budget
    int run(std::size_t depth, std::vector<std::string>& form) {
        if (depth == order.size()) return 1;
        if (nodes.fetch_add(1, std::memory_order_relaxed) > budget) return -1;
        const std::size_t v = order[depth];
        if (depth >= deepest) deepest = depth, deepest_vertex = v;
        for (const auto& c : dom[v].choices) {
            if (!consistent(v, c, form)) continue;
            std::vector<std::size_t> set_here;
            for (std::size_t k = 0; k < dom[v].edges.size(); ++k) {
                auto e = dom[v].edges[k];
                if (form[e].empty()) form[e] = c[k], set_here.push_back(e);
            }
            int r = run(depth + 1, form);
            if (r != 0) return r;
            for (auto e : set_here) form[e].clear();
        }
        return 0;
    }
};

}  // namespace detail

inline SearchResult search_assignment(const LyapunovGraph& g, const SearchOptions& opt) {
    using O = SearchResult::Outcome;
    SearchResult res;
    const std::size_t V = g.vertices().size();
    std::vector<detail::VertexDomain> dom;
    for (std::size_t v = 0; v < V; ++v) {
        auto d = detail::vertex_domain(g, v);
        if (!d) {
            res.outcome = O::BudgetHit;
            return res;
        }
        if (d->choices.empty()) {
            res.outcome = O::Exhausted;
            res.witness_vertices.push_back(g.vertices()[v].id);
            return res;
        }
        dom.push_back(std::move(*d));
    }
    // most constrained first, then breadth-first from it so neighbours follow
    std::vector<std::size_t> order;
    std::vector<char> placed(V, 0);
    while (order.size() < V) {
        std::size_t seed = V;
        for (std::size_t v = 0; v < V; ++v)
            if (!placed[v] && (seed == V || dom[v].choices.size() < dom[seed].choices.size()))
                seed = v;
        std::vector<std::size_t> queue{seed};
        placed[seed] = 1;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            auto v = queue[qi];
            order.push_back(v);
            std::vector<std::size_t> nb;
            for (auto e : dom[v].edges) {
                const auto& E = g.edges()[e];
                for (auto u : {E.source, E.target})
                    if (u && !placed[*u]) nb.push_back(*u);
            }
            std::sort(nb.begin(), nb.end(), [&](auto x, auto y) {
                return std::pair(dom[x].choices.size(), x) < std::pair(dom[y].choices.size(), y);
            });
            for (auto u : nb)
                if (!placed[u]) placed[u] = 1, queue.push_back(u);
        }
    }

    const std::size_t E = g.edges().size();
    const auto& first = dom[order[0]];
    std::atomic<std::size_t> nodes{0};
    std::atomic<std::size_t> next{0};
    struct Branch {
        int result = 0;
        std::vector<std::string> form;
        std::size_t deepest = 0, deepest_vertex = 0;
    };
    std::vector<Branch> branches(first.choices.size());
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < branches.size();) {
            detail::Csp csp{g, dom, order, nodes, opt.node_budget};
            std::vector<std::string> form(E);
            const auto& c = first.choices[i];
            for (std::size_t k = 0; k < first.edges.size(); ++k) {
                auto& f = form[first.edges[k]];
                if (!f.empty() && f != c[k]) {  // loop edge seen twice
                    branches[i].result = 0;
                    goto done;
                }
                f = c[k];
            }
            branches[i].result = csp.run(1, form);
            branches[i].form = std::move(form);
            branches[i].deepest = csp.deepest;
            branches[i].deepest_vertex = csp.deepest_vertex;
        done:;
        }
    };
    const unsigned T = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(branches.size())));
    if (T == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < T; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // the first branch in canonical order decides, whatever the schedule
    bool budget_hit = false;
    for (auto& b : branches) {
        if (b.result == 1) {
            res.outcome = O::Found;
            for (std::size_t e = 0; e < E; ++e) {
                if (g.edges()[e].source) res.assignment.at_source[e] = b.form[e];
                if (g.edges()[e].target) res.assignment.at_target[e] = b.form[e];
            }
            return res;
        }
        if (b.result == -1) budget_hit = true;
    }
    if (budget_hit) {
        res.outcome = O::BudgetHit;
        return res;
    }
    res.outcome = O::Exhausted;
    std::set<std::string> wit;
    std::size_t best = 0;
    for (const auto& b : branches) best = std::max(best, b.deepest);
    for (const auto& b : branches)
        if (b.deepest == best) wit.insert(g.vertices()[b.deepest_vertex].id);
    wit.insert(g.vertices()[order[0]].id);
    res.witness_vertices.assign(wit.begin(), wit.end());
    return res;
}

// ---------------------------------------------------------------------------

struct RealizeOptions {
    std::optional<int> search_bound;
    unsigned threads = 1;
};

inline RealizationVerdict realize(const LyapunovGraph& g, const RealizeOptions& opt = {}) {
    using S = RealizationVerdict::Status;
    RealizationVerdict out;

    auto problems = validate_graph(g);
    if (!problems.empty()) {
        out.status = S::NotRealizable;
        out.reason = "invalid graph: " + problems.front().kind + " (" + problems.front().detail + ")";
        return out;
    }
    auto st = classify_graph(g);
    for (std::size_t v = 0; v < st.verdicts.size(); ++v)
        if (!st.verdicts[v].yes()) out.witness_vertices.push_back(g.vertices()[v].id);
    if (!out.witness_vertices.empty()) {
        out.status = S::NotRealizable;
        std::string r = "local: ";
        for (std::size_t v = 0; v < st.verdicts.size(); ++v)
            if (!st.verdicts[v].yes()) {
                r += g.vertices()[v].id + " " + st.verdicts[v].str();
                break;
            }
        out.reason = r;
        return out;
    }
    if (g.closed()) {
        if (!fold_balance(g)) {
            out.status = S::NotRealizable;
            out.reason = "fold balance fails";
            return out;
        }
        if (!euler_gs(g).is_integer()) {
            out.status = S::NotRealizable;
            out.reason = "euler characteristic " + euler_gs(g).str() + " is not an integer";
            return out;
        }

        auto accept = [&](TheoremId id, const std::optional<Certificate>& c) {
            if (!c) return false;
            if (!verify_certificate(g, *c)) {
                out.notes.push_back(std::string(to_string(id)) +
                                    " certificate rejected by the routing model");
                return false;
            }
            out.status = S::RealizableBy;
            out.theorem = id;
            out.certificate = *c;
            return true;
        };
        if (accept(TheoremId::Thm6, check_minimal_case(g, st))) return out;
        if (accept(TheoremId::Thm7, check_linear(g, st))) return out;
        if (accept(TheoremId::Thm8, check_blend(g, st))) return out;
        if (accept(TheoremId::Thm9, check_rcw(g, st))) return out;
        if (auto fc = check_families(g, st); fc && accept(fc->theorem, fc->certificate)) return out;
    }

    if (!opt.search_bound) {
        out.status = S::Unknown;
        out.reason = "no sufficient condition applies";
        return out;
    }
    const int bound = *opt.search_bound;
    out.searched_bound = bound;
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].weight > bound) {
            out.status = S::Unknown;
            out.reason = "edge weight above search bound";
            out.witness_edges.push_back(e);
            return out;
        }
    auto sr = search_assignment(g, {bound, opt.threads, 5'000'000});
    out.notes.push_back("search is relative to the passageway routing model");
    switch (sr.outcome) {
        case SearchResult::Outcome::Found: {
            Certificate c;
            for (auto& [e, f] : sr.assignment.at_source) c[e] = f;
            for (auto& [e, f] : sr.assignment.at_target) c[e] = f;
            out.status = S::RealizableBy;
            out.theorem = TheoremId::Search;
            out.certificate = std::move(c);
            return out;
        }
        case SearchResult::Outcome::Exhausted:
            out.status = S::NotRealizable;
            out.reason = "no boundary assignment agrees at every vertex";
            out.witness_vertices = sr.witness_vertices;
            return out;
        case SearchResult::Outcome::BudgetHit:
            out.status = S::Unknown;
            out.reason = "search budget exhausted";
            return out;
    }
    return out;
}

}  // namespace gsflow
