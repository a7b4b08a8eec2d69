#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "canon.hpp"

namespace gsflow {

class branched_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One connected component. vertices == 0 is the circle. Half-edge 2k sits at
// arcs[k].first, 2k+1 at arcs[k].second; strand[h] is the half-edge that
// continues the same transverse arc through the branch point (may be empty
// when the pairing is unknown).
struct BranchedComponent {
    int vertices = 0;
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> strand;

    bool is_circle() const { return vertices == 0; }
    int weight() const { return vertices + 1; }
    bool has_strands() const { return !strand.empty() || is_circle(); }
};

struct Branched1Manifold {
    std::vector<BranchedComponent> components;

    Branched1Manifold() = default;
    Branched1Manifold(std::initializer_list<BranchedComponent> cs) : components(cs) {}
    explicit Branched1Manifold(std::vector<BranchedComponent> cs) : components(std::move(cs)) {}

    int size() const { return static_cast<int>(components.size()); }
};

enum class IsoMode { plain, strands };

struct ArcPosition {
    int component = 0;
    int arc = 0;   // 0 for a circle
    int slot = 0;  // ordering of points along the arc
};

struct PuncturePiece {
    int branch_points = 0;
    int free_ends = 0;
};

// ---------------------------------------------------------------------------
namespace detail {

// Arcs over vertices of degree 2 or 4, with strand pairing at every vertex.
// Degree-2 vertices are erased by smooth().
struct ArcGraph {
    int nv = 0;
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> strand;

    int vertex_of(int h) const { return (h & 1) ? arcs[h >> 1].second : arcs[h >> 1].first; }
};

inline std::vector<int> degrees(const ArcGraph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.nv), 0);
    for (auto [u, v] : g.arcs) ++deg[u], ++deg[v];
    return deg;
}

// Any pairing of the half-edges at each vertex; used when none was given.
inline std::vector<int> default_strands(int nv, const std::vector<std::pair<int, int>>& arcs) {
    std::vector<std::vector<int>> at(static_cast<std::size_t>(nv));
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        at[arcs[k].first].push_back(static_cast<int>(2 * k));
        at[arcs[k].second].push_back(static_cast<int>(2 * k + 1));
    }
    std::vector<int> s(2 * arcs.size(), -1);
    for (auto& hs : at)
        for (std::size_t i = 0; i + 1 < hs.size(); i += 2) s[hs[i]] = hs[i + 1], s[hs[i + 1]] = hs[i];
    return s;
}

inline ArcGraph to_arc_graph(const BranchedComponent& c) {
    ArcGraph g;
    if (c.is_circle()) {
        g.nv = 1;
        g.arcs = {{0, 0}};
        g.strand = {1, 0};
        return g;
    }
    g.nv = c.vertices;
    g.arcs = c.arcs;
    g.strand = c.strand.empty() ? default_strands(c.vertices, c.arcs) : c.strand;
    return g;
}

inline void append(ArcGraph& g, const ArcGraph& h) {
    int voff = g.nv;
    int hoff = static_cast<int>(2 * g.arcs.size());
    for (auto [u, v] : h.arcs) g.arcs.emplace_back(u + voff, v + voff);
    for (int s : h.strand) g.strand.push_back(s + hoff);
    g.nv += h.nv;
}

// Smooth degree-2 vertices and split into connected components.
inline std::vector<BranchedComponent> smooth(const ArcGraph& g) {
    auto deg = degrees(g);
    for (int d : deg)
        if (d != 0 && d != 2 && d != 4) throw branched_error("vertex of degree " + std::to_string(d));
    const int H = static_cast<int>(2 * g.arcs.size());
    std::vector<char> used(static_cast<std::size_t>(H), 0);

    struct NewArc {
        int u, v, hu, hv;
    };
    std::vector<NewArc> out;
    for (int h = 0; h < H; ++h) {
        if (used[h] || deg[g.vertex_of(h)] != 4) continue;
        int cur = h;
        used[cur] = 1;
        while (true) {
            int far = cur ^ 1;
            used[far] = 1;
            int x = g.vertex_of(far);
            if (deg[x] == 4) {
                out.push_back({g.vertex_of(h), x, h, far});
                break;
            }
            cur = g.strand[far];
            used[cur] = 1;
        }
    }
    // left over: closed chains through degree-2 vertices only
    int circles = 0;
    for (int h = 0; h < H; ++h) {
        if (used[h]) continue;
        ++circles;
        int cur = h;
        while (!used[cur]) {
            used[cur] = 1;
            int far = cur ^ 1;
            used[far] = 1;
            cur = g.strand[far];
        }
    }

    // union-find over the degree-4 vertices
    std::vector<int> parent(static_cast<std::size_t>(g.nv));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& a : out) parent[find(a.u)] = find(a.v);

    std::map<int, int> comp_of_root;
    std::vector<BranchedComponent> comps;
    std::vector<int> local(static_cast<std::size_t>(g.nv), -1);
    for (int v = 0; v < g.nv; ++v) {
        if (deg[v] != 4) continue;
        int r = find(v);
        auto [it, fresh] = comp_of_root.emplace(r, static_cast<int>(comps.size()));
        if (fresh) comps.emplace_back();
        local[v] = comps[it->second].vertices++;
    }
    // old half-edge at a degree-4 vertex -> (component, new half-edge)
    std::vector<std::pair<int, int>> remap(static_cast<std::size_t>(H), {-1, -1});
    for (auto& a : out) {
        int ci = comp_of_root[find(a.u)];
        auto& c = comps[ci];
        int k = static_cast<int>(c.arcs.size());
        c.arcs.emplace_back(local[a.u], local[a.v]);
        remap[a.hu] = {ci, 2 * k};
        remap[a.hv] = {ci, 2 * k + 1};
    }
    for (auto& c : comps) c.strand.assign(2 * c.arcs.size(), -1);
    for (int h = 0; h < H; ++h) {
        auto [ci, nh] = remap[h];
        if (ci < 0) continue;
        comps[ci].strand[nh] = remap[g.strand[h]].second;
    }
    for (int i = 0; i < circles; ++i) comps.emplace_back();
    return comps;
}

inline bool connected(int nv, const std::vector<std::pair<int, int>>& arcs) {
    if (nv == 0) return true;
    std::vector<int> parent(static_cast<std::size_t>(nv));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [u, v] : arcs) parent[find(u)] = find(v);
    for (int v = 1; v < nv; ++v)
        if (find(v) != find(0)) return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline void validate(const BranchedComponent& c) {
    if (c.is_circle()) {
        if (!c.arcs.empty()) throw branched_error("circle with arcs");
        return;
    }
    if (c.vertices < 0) throw branched_error("negative vertex count");
    if (c.arcs.size() != 2 * static_cast<std::size_t>(c.vertices))
        throw branched_error("|arcs| != 2|branch points|");
    std::vector<int> deg(static_cast<std::size_t>(c.vertices), 0);
    for (auto [u, v] : c.arcs) {
        if (u < 0 || v < 0 || u >= c.vertices || v >= c.vertices)
            throw branched_error("arc endpoint out of range");
        ++deg[u], ++deg[v];
    }
    for (int d : deg)
        if (d != 4) throw branched_error("branch point without degree 4");
    if (!detail::connected(c.vertices, c.arcs)) throw branched_error("component not connected");
    if (!c.strand.empty()) {
        if (c.strand.size() != 2 * c.arcs.size()) throw branched_error("bad strand table size");
        detail::ArcGraph g{c.vertices, c.arcs, c.strand};
        for (int h = 0; h < static_cast<int>(c.strand.size()); ++h) {
            int p = c.strand[h];
            if (p < 0 || p >= static_cast<int>(c.strand.size()) || p == h || c.strand[p] != h ||
                g.vertex_of(p) != g.vertex_of(h))
                throw branched_error("strand pairing is not an involution at a vertex");
        }
    }
}

inline void validate(const Branched1Manifold& m) {
    if (m.components.empty() || m.components.size() > 4)
        throw branched_error("a branched 1-manifold has 1 to 4 components");
    for (const auto& c : m.components) validate(c);
}

struct WeightInfo {
    std::vector<int> per_component;
    int total = 0;
};

inline WeightInfo weight(const Branched1Manifold& m) {
    WeightInfo w;
    for (const auto& c : m.components) {
        w.per_component.push_back(c.weight());
        w.total += c.weight();
    }
    return w;
}

inline BranchedComponent circle() { return {}; }

// A component drawn as immersed circles: each circle is the cyclic list of
// crossing labels it runs through; every label must occur exactly twice.
inline BranchedComponent from_circles(const std::vector<std::vector<int>>& circles) {
    std::map<int, int> id;
    std::map<int, int> seen;
    for (const auto& c : circles)
        for (int x : c) ++seen[x];
    for (auto [x, n] : seen) {
        if (n != 2) throw branched_error("crossing label must appear twice");
        id.emplace(x, static_cast<int>(id.size()));
    }
    BranchedComponent out;
    out.vertices = static_cast<int>(id.size());
    for (const auto& c : circles) {
        if (c.empty()) throw branched_error("empty circle in diagram");
        int first = static_cast<int>(out.arcs.size());
        int m = static_cast<int>(c.size());
        for (int i = 0; i < m; ++i) out.arcs.emplace_back(id[c[i]], id[c[(i + 1) % m]]);
        out.strand.resize(2 * out.arcs.size());
        for (int i = 0; i < m; ++i) {
            int in = 2 * (first + (i + m - 1) % m) + 1;  // arriving at c[i]
            int go = 2 * (first + i);                     // leaving c[i]
            out.strand[in] = go;
            out.strand[go] = in;
        }
    }
    validate(out);
    return out;
}

inline BranchedComponent figure_eight() { return from_circles({{0, 0}}); }

// ---------------------------------------------------------------------------
// canonical forms

inline std::string canonical_form(const BranchedComponent& c, IsoMode mode = IsoMode::plain) {
    if (c.is_circle()) return "O";
    if (mode == IsoMode::plain) {
        detail::ColoredGraph g(c.vertices);
        for (auto [u, v] : c.arcs) {
            if (u == v) g.at(u, u) += 1;
            else g.add(u, v, 1);
        }
        auto lab = detail::canonical_label(g);
        std::vector<int> pos(static_cast<std::size_t>(c.vertices));
        for (int i = 0; i < c.vertices; ++i) pos[lab.order[i]] = i;
        std::vector<std::pair<int, int>> e;
        for (auto [u, v] : c.arcs) e.emplace_back(std::min(pos[u], pos[v]), std::max(pos[u], pos[v]));
        std::sort(e.begin(), e.end());
        std::string s;
        for (auto [u, v] : e) {
            if (!s.empty()) s += ',';
            s += std::to_string(u) + ':' + std::to_string(v);
        }
        return s;
    }
    if (c.strand.empty()) throw branched_error("strand-sensitive form needs a strand pairing");
    const int V = c.vertices;
    const int H = static_cast<int>(2 * c.arcs.size());
    detail::ColoredGraph g(V + H);
    detail::ArcGraph a{c.vertices, c.arcs, c.strand};
    for (int h = 0; h < H; ++h) {
        g.color[V + h] = 1;
        g.add(V + h, a.vertex_of(h), 1);
        if ((h & 1) == 0) g.add(V + h, V + h + 1, 2);
        if (c.strand[h] > h) g.add(V + h, V + c.strand[h], 4);
    }
    auto lab = detail::canonical_label(g);
    std::string s = "S";
    for (int x : lab.code) s += '.' + std::to_string(x);
    return s;
}

inline std::string canonical_form(const Branched1Manifold& m, IsoMode mode = IsoMode::plain) {
    std::vector<std::string> parts;
    for (const auto& c : m.components) parts.push_back(canonical_form(c, mode));
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (auto& p : parts) {
        if (!s.empty()) s += '|';
        s += p;
    }
    return s;
}

inline bool is_isomorphic(const Branched1Manifold& x, const Branched1Manifold& y,
                          IsoMode mode = IsoMode::plain) {
    return canonical_form(x, mode) == canonical_form(y, mode);
}

inline bool is_isomorphic(const BranchedComponent& x, const BranchedComponent& y,
                          IsoMode mode = IsoMode::plain) {
    return canonical_form(x, mode) == canonical_form(y, mode);
}

inline BranchedComponent parse_component(const std::string& text) {
    if (text == "O") return circle();
    BranchedComponent c;
    std::stringstream ss(text);
    std::string tok;
    int maxv = -1;
    while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw branched_error("bad arc token '" + tok + "'");
        int u = 0, v = 0;
        try {
            std::size_t p1 = 0, p2 = 0;
            u = std::stoi(tok.substr(0, colon), &p1);
            v = std::stoi(tok.substr(colon + 1), &p2);
            if (p1 != colon || p2 != tok.size() - colon - 1) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw branched_error("bad arc token '" + tok + "'");
        }
        c.arcs.emplace_back(u, v);
        maxv = std::max({maxv, u, v});
    }
    c.vertices = maxv + 1;
    if (c.vertices == 0) throw branched_error("empty component text");
    validate(c);
    return c;
}

inline Branched1Manifold parse_manifold(const std::string& text) {
    Branched1Manifold m;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '|')) m.components.push_back(parse_component(part));
    validate(m);
    return m;
}

inline int weight_of_form(const std::string& form) {
    if (form == "O") return 1;
    int arcs = static_cast<int>(std::count(form.begin(), form.end(), ',')) + 1;
    return arcs / 2 + 1;
}

// ---------------------------------------------------------------------------
// enumeration

inline int enumeration_bound() {
    if (const char* env = std::getenv("GS_ENUM_BOUND")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 12) return static_cast<int>(v);
    }
    return 6;
}

inline std::vector<std::string> enumerate_connected(int w, int bound = enumeration_bound()) {
    if (w < 1) throw branched_error("weight must be positive");
    if (w > bound)
        throw branched_error("weight " + std::to_string(w) + " exceeds enumeration bound " +
                             std::to_string(bound));
    if (w == 1) return {"O"};
    const int n = w - 1;
    std::vector<std::vector<int>> a(static_cast<std::size_t>(n), std::vector<int>(n, 0));
    std::vector<int> rem(static_cast<std::size_t>(n), 4);
    std::set<std::string> forms;

    // fill row i (loops first, then j > i), then move on
    auto emit = [&] {
        BranchedComponent c;
        c.vertices = n;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < a[i][i]; ++k) c.arcs.emplace_back(i, i);
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < a[i][j]; ++k) c.arcs.emplace_back(i, j);
        }
        if (detail::connected(c.vertices, c.arcs)) forms.insert(canonical_form(c));
    };
    std::vector<int> dummy;
    auto fill = [&](auto&& self, int i, int j) -> void {
        if (i == n) {
            emit();
            return;
        }
        if (j == i) {
            for (int loops = 0; 2 * loops <= rem[i]; ++loops) {
                a[i][i] = loops;
                rem[i] -= 2 * loops;
                self(self, i, i + 1);
                rem[i] += 2 * loops;
            }
            a[i][i] = 0;
            return;
        }
        if (j == n) {
            if (rem[i] == 0) self(self, i + 1, i + 1);
            return;
        }
        int hi = std::min(rem[i], rem[j]);
        for (int m = 0; m <= hi; ++m) {
            a[i][j] = a[j][i] = m;
            rem[i] -= m;
            rem[j] -= m;
            self(self, i, j + 1);
            rem[i] += m;
            rem[j] += m;
        }
        a[i][j] = a[j][i] = 0;
    };
    fill(fill, 0, 0);
    return {forms.begin(), forms.end()};
}

// ---------------------------------------------------------------------------
// identification of two points

inline Branched1Manifold identify_points(const Branched1Manifold& m, ArcPosition p,
                                         ArcPosition q) {
    auto check = [&](const ArcPosition& x) {
        if (x.component < 0 || x.component >= m.size())
            throw branched_error("position on a missing component");
        const auto& c = m.components[x.component];
        int narcs = c.is_circle() ? 1 : static_cast<int>(c.arcs.size());
        if (x.arc < 0 || x.arc >= narcs) throw branched_error("position on a missing arc");
    };
    check(p);
    check(q);
    if (p.component == q.component && p.arc == q.arc && p.slot == q.slot)
        throw branched_error("positions coincide");

    bool strands_known = true;
    for (int ci : {p.component, q.component})
        if (!m.components[ci].has_strands()) strands_known = false;

    detail::ArcGraph g = detail::to_arc_graph(m.components[p.component]);
    int e = p.arc, f = q.arc;
    if (q.component != p.component) {
        f += static_cast<int>(g.arcs.size());
        detail::append(g, detail::to_arc_graph(m.components[q.component]));
    }
    if (e == f && q.slot < p.slot) std::swap(p, q);

    const int w = g.nv++;
    const int old_h = static_cast<int>(g.strand.size());
    const auto old = g.strand;
    auto [a, b] = g.arcs[e];
    int n1 = static_cast<int>(g.arcs.size());  // first appended arc
    std::map<int, int> rename;
    std::vector<std::pair<int, int>> at_w;  // strand pairs through w
    if (e == f) {
        // a..w, loop at w, w..b
        g.arcs[e] = {a, w};
        g.arcs.emplace_back(w, w);
        g.arcs.emplace_back(w, b);
        rename[2 * e + 1] = 2 * (n1 + 1) + 1;
        at_w = {{2 * e + 1, 2 * n1}, {2 * n1 + 1, 2 * (n1 + 1)}};
    } else {
        auto [c, d] = g.arcs[f];
        g.arcs[e] = {a, w};
        g.arcs[f] = {c, w};
        g.arcs.emplace_back(w, b);
        g.arcs.emplace_back(w, d);
        rename[2 * e + 1] = 2 * n1 + 1;
        rename[2 * f + 1] = 2 * (n1 + 1) + 1;
        at_w = {{2 * e + 1, 2 * n1}, {2 * f + 1, 2 * (n1 + 1)}};
    }
    auto nm = [&](int h) {
        auto it = rename.find(h);
        return it == rename.end() ? h : it->second;
    };
    std::vector<int> s(2 * g.arcs.size(), -1);
    for (int h = 0; h < old_h; ++h) s[nm(h)] = nm(old[h]);
    for (auto [x, y] : at_w) s[x] = y, s[y] = x;
    g.strand = std::move(s);
    auto pieces = detail::smooth(g);
    if (pieces.size() != 1) throw branched_error("identification produced a split result");
    if (!strands_known) pieces[0].strand.clear();

    Branched1Manifold out;
    int lo = std::min(p.component, q.component);
    for (int i = 0; i < m.size(); ++i) {
        if (i == lo) out.components.push_back(pieces[0]);
        else if (i != p.component && i != q.component) out.components.push_back(m.components[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<PuncturePiece> puncture(const BranchedComponent& c, int v) {
    if (c.is_circle() || v < 0 || v >= c.vertices)
        throw branched_error("puncture point is not a branch point");
    std::vector<PuncturePiece> out;
    std::vector<int> parent(static_cast<std::size_t>(c.vertices));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<int> ends(static_cast<std::size_t>(c.vertices), 0);
    for (auto [a, b] : c.arcs) {
        if (a == v && b == v) {
            out.push_back({0, 2});
            continue;
        }
        if (a == v) ++ends[b];
        else if (b == v) ++ends[a];
        else parent[find(a)] = find(b);
    }
    std::map<int, PuncturePiece> by_root;
    for (int x = 0; x < c.vertices; ++x) {
        if (x == v) continue;
        auto& pc = by_root[find(x)];
        ++pc.branch_points;
        pc.free_ends += ends[x];
    }
    for (auto& [r, pc] : by_root) out.push_back(pc);
    return out;
}

// ---------------------------------------------------------------------------
// families

inline BranchedComponent family_A_component(int w) {
    if (w < 1) throw branched_error("weight must be positive");
    if (w == 1) return circle();
    std::vector<int> seq;
    for (int i = 0; i < w - 1; ++i) seq.push_back(i);
    for (int i = w - 2; i >= 0; --i) seq.push_back(i);
    return from_circles({seq});
}

inline Branched1Manifold family_A(int w) { return {family_A_component(w)}; }

inline BranchedComponent chain_of_circles(int m) {
    if (m < 1) throw branched_error("chain needs a circle");
    if (m == 1) return circle();
    std::vector<std::vector<int>> cs;
    // crossing labels between circle i and i+1: 2i and 2i+1
    cs.push_back({0, 1});
    for (int i = 1; i + 1 < m; ++i) cs.push_back({2 * (i - 1), 2 * (i - 1) + 1, 2 * i, 2 * i + 1});
    cs.push_back({2 * (m - 2), 2 * (m - 2) + 1});
    return from_circles(cs);
}

inline Branched1Manifold family_B(int w) {
    if (w < 1) throw branched_error("weight must be positive");
    if (w % 2 == 1) return {chain_of_circles((w + 1) / 2)};
    // petal loop on the first arc of the first circle
    auto base = family_B(w - 1);
    return identify_points(base, {0, 0, 0}, {0, 0, 1});
}

inline Branched1Manifold family_minimal(int w) {
    switch (w) {
        case 1: return {circle()};
        case 2: return {figure_eight()};
        case 3: return {from_circles({{0, 1}, {0, 1}})};
        case 5: return {chain_of_circles(3)};
        case 7:
            // three great circles; labels 0..5 = x12, y12, x13, y13, x23, y23
            return {from_circles({{0, 2, 1, 3}, {0, 4, 1, 5}, {2, 4, 3, 5}})};
        default: throw branched_error("no minimal form of weight " + std::to_string(w));
    }
}

}  // namespace gsflow
