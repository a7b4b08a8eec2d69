#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gsflow {

class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SingularityType { R, C, W, D, T };
enum class Nature { a, r, s, s_s, s_u, sa, sr, ss_s, ss_u, ssa, ssr };

inline constexpr std::array<SingularityType, 5> all_types{
    SingularityType::R, SingularityType::C, SingularityType::W, SingularityType::D,
    SingularityType::T};

inline constexpr std::array<Nature, 11> all_natures{
    Nature::a,  Nature::r,  Nature::s,    Nature::s_s,  Nature::s_u, Nature::sa,
    Nature::sr, Nature::ss_s, Nature::ss_u, Nature::ssa, Nature::ssr};

inline std::string_view to_string(SingularityType t) {
    switch (t) {
        case SingularityType::R: return "R";
        case SingularityType::C: return "C";
        case SingularityType::W: return "W";
        case SingularityType::D: return "D";
        case SingularityType::T: return "T";
    }
    return "?";
}

inline std::string_view to_string(Nature n) {
    switch (n) {
        case Nature::a: return "a";
        case Nature::r: return "r";
        case Nature::s: return "s";
        case Nature::s_s: return "s_s";
        case Nature::s_u: return "s_u";
        case Nature::sa: return "sa";
        case Nature::sr: return "sr";
        case Nature::ss_s: return "ss_s";
        case Nature::ss_u: return "ss_u";
        case Nature::ssa: return "ssa";
        case Nature::ssr: return "ssr";
    }
    return "?";
}

namespace detail {
inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}
}  // namespace detail

inline std::optional<SingularityType> parse_type(std::string_view s) {
    auto l = detail::lower(s);
    for (auto t : all_types)
        if (detail::lower(to_string(t)) == l) return t;
    return std::nullopt;
}

inline std::optional<Nature> parse_nature(std::string_view s) {
    auto l = detail::lower(s);
    for (auto n : all_natures)
        if (to_string(n) == l) return n;
    return std::nullopt;
}

inline bool admissible(SingularityType t, Nature n) {
    using enum Nature;
    switch (t) {
        case SingularityType::R:
        case SingularityType::C: return n == a || n == s || n == r;
        case SingularityType::W: return n == a || n == s_s || n == s_u || n == r;
        case SingularityType::D:
            return n == a || n == sa || n == ss_s || n == ss_u || n == sr || n == r;
        case SingularityType::T: return n == a || n == ssa || n == ssr || n == r;
    }
    return false;
}

inline Nature reverse_nature(Nature n) {
    using enum Nature;
    switch (n) {
        case a: return r;
        case r: return a;
        case s: return s;
        case s_s: return s_u;
        case s_u: return s_s;
        case sa: return sr;
        case sr: return sa;
        case ss_s: return ss_u;
        case ss_u: return ss_s;
        case ssa: return ssr;
        case ssr: return ssa;
    }
    return n;
}

struct VertexLabel {
    SingularityType type = SingularityType::R;
    Nature nature = Nature::a;

    bool admissible() const { return gsflow::admissible(type, nature); }
    VertexLabel reversed() const { return {type, reverse_nature(nature)}; }
    std::string str() const {
        return std::string(to_string(type)) + "_" + std::string(to_string(nature));
    }
    friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
    friend auto operator<=>(const VertexLabel&, const VertexLabel&) = default;
};

inline VertexLabel make_label(SingularityType t, Nature n) {
    if (!admissible(t, n))
        throw model_error("inadmissible nature " + std::string(to_string(n)) + " for type " +
                          std::string(to_string(t)));
    return {t, n};
}

struct ConleyIndex {
    int h0 = 0, h1 = 0, h2 = 0;
    int euler() const { return h0 - h1 + h2; }
    friend bool operator==(const ConleyIndex&, const ConleyIndex&) = default;
};

// (W, r) is (0,0,2): the Whitney attractor boundary has weight 2, and the
// Poincare-Hopf relation only closes with h2 = 2 there.
inline ConleyIndex conley_index(SingularityType t, Nature n) {
    if (!admissible(t, n)) throw model_error("inadmissible (type, nature) pair");
    using enum Nature;
    if (n == a) return {1, 0, 0};
    switch (t) {
        case SingularityType::R:
            return n == s ? ConleyIndex{0, 1, 0} : ConleyIndex{0, 0, 1};
        case SingularityType::C:
            return n == s ? ConleyIndex{0, 1, 0} : ConleyIndex{0, 1, 2};
        case SingularityType::W:
            if (n == s_s) return {0, 1, 0};
            if (n == s_u) return {0, 0, 0};
            return {0, 0, 2};
        case SingularityType::D:
            if (n == sa) return {0, 1, 0};
            if (n == ss_s) return {0, 3, 0};
            if (n == ss_u) return {0, 1, 0};
            if (n == sr) return {0, 0, 1};
            return {0, 0, 3};
        case SingularityType::T:
            if (n == ssa) return {0, 1, 0};
            if (n == ssr) return {0, 1, 2};
            return {0, 0, 7};
    }
    return {};
}

inline ConleyIndex conley_index(VertexLabel l) { return conley_index(l.type, l.nature); }

struct FoldDegrees {
    int fin = 0;   // folds having the singularity as omega-limit
    int fout = 0;  // ... as alpha-limit
    friend bool operator==(const FoldDegrees&, const FoldDegrees&) = default;
};

namespace detail {
inline int fold_in(SingularityType t, Nature n) {
    using enum Nature;
    switch (t) {
        case SingularityType::W: return (n == a || n == s_s) ? 1 : 0;
        case SingularityType::D: return (n == a || n == sa || n == ss_s) ? 2 : 0;
        case SingularityType::T:
            if (n == a) return 6;
            if (n == ssa) return 4;
            if (n == ssr) return 2;
            return 0;
        default: return 0;
    }
}
}  // namespace detail

inline FoldDegrees fold_degrees(SingularityType t, Nature n) {
    if (!admissible(t, n)) throw model_error("inadmissible (type, nature) pair");
    return {detail::fold_in(t, n), detail::fold_in(t, reverse_nature(n))};
}

inline FoldDegrees fold_degrees(VertexLabel l) { return fold_degrees(l.type, l.nature); }

inline int total_folds(SingularityType t) {
    switch (t) {
        case SingularityType::W: return 1;
        case SingularityType::D: return 2;
        case SingularityType::T: return 6;
        default: return 0;
    }
}

// attracting / saddle / repelling natures carried by one singularity
struct NatureTally {
    int a = 0, s = 0, r = 0;
    friend bool operator==(const NatureTally&, const NatureTally&) = default;
};

inline NatureTally nature_tally(VertexLabel l) {
    using enum Nature;
    switch (l.nature) {
        case a:
            return l.type == SingularityType::D   ? NatureTally{2, 0, 0}
                   : l.type == SingularityType::T ? NatureTally{3, 0, 0}
                                                  : NatureTally{1, 0, 0};
        case r:
            return l.type == SingularityType::D   ? NatureTally{0, 0, 2}
                   : l.type == SingularityType::T ? NatureTally{0, 0, 3}
                                                  : NatureTally{0, 0, 1};
        case s:
        case s_s:
        case s_u: return {0, 1, 0};
        case sa: return {1, 1, 0};
        case sr: return {0, 1, 1};
        case ss_s:
        case ss_u: return {0, 2, 0};
        case ssa: return {1, 2, 0};
        case ssr: return {0, 2, 1};
    }
    return {};
}

// ---------------------------------------------------------------------------

struct SemiGraph {
    VertexLabel label;
    std::vector<int> in_weights;
    std::vector<int> out_weights;

    int e_plus() const { return static_cast<int>(in_weights.size()); }
    int e_minus() const { return static_cast<int>(out_weights.size()); }
    int B_plus() const { return std::accumulate(in_weights.begin(), in_weights.end(), 0); }
    int B_minus() const { return std::accumulate(out_weights.begin(), out_weights.end(), 0); }
    int degree() const { return e_plus() + e_minus(); }

    SemiGraph reversed() const { return {label.reversed(), out_weights, in_weights}; }
};

inline int ph_residual(const SemiGraph& sg) {
    int lhs = conley_index(sg.label).euler() - conley_index(sg.label.reversed()).euler();
    int rhs = sg.e_plus() - sg.B_plus() - sg.e_minus() + sg.B_minus();
    return lhs - rhs;
}

inline bool degree_bounds_ok(const SemiGraph& sg) {
    int h1 = conley_index(sg.label).h1;
    int h1r = conley_index(sg.label.reversed()).h1;
    return sg.e_minus() - 1 <= h1 && sg.e_plus() - 1 <= h1r;
}

// ---------------------------------------------------------------------------

struct Vertex {
    std::string id;
    VertexLabel label;
};

struct Edge {
    std::optional<std::size_t> source;  // nullopt = OPEN
    std::optional<std::size_t> target;
    int weight = 1;
};

class LyapunovGraph {
public:
    std::size_t add_vertex(std::string id, VertexLabel label) {
        if (index_.count(id)) throw model_error("duplicate vertex id '" + id + "'");
        index_.emplace(id, vertices_.size());
        vertices_.push_back({std::move(id), label});
        return vertices_.size() - 1;
    }

    std::size_t add_vertex(std::string id, SingularityType t, Nature n) {
        return add_vertex(std::move(id), VertexLabel{t, n});
    }

    std::size_t add_edge(std::optional<std::size_t> from, std::optional<std::size_t> to,
                         int weight) {
        if ((from && *from >= vertices_.size()) || (to && *to >= vertices_.size()))
            throw model_error("edge endpoint out of range");
        edges_.push_back({from, to, weight});
        return edges_.size() - 1;
    }

    std::size_t add_edge(const std::string& from, const std::string& to, int weight) {
        return add_edge(vertex_index(from), vertex_index(to), weight);
    }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t vertex_index(const std::string& id) const {
        auto v = find(id);
        if (!v) throw model_error("unknown vertex id '" + id + "'");
        return *v;
    }

    bool closed() const {
        return std::all_of(edges_.begin(), edges_.end(),
                           [](const Edge& e) { return e.source && e.target; });
    }

    std::vector<std::size_t> in_edges(std::size_t v) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < edges_.size(); ++i)
            if (edges_[i].target == v) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> out_edges(std::size_t v) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < edges_.size(); ++i)
            if (edges_[i].source == v) out.push_back(i);
        return out;
    }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::map<std::string, std::size_t> index_;
};

struct Violation {
    std::string kind;  // "oriented cycle", "weight >= 1", "inadmissible nature", "no endpoint"
    std::string detail;
};

inline std::vector<Violation> validate_graph(const LyapunovGraph& g) {
    std::vector<Violation> out;
    for (const auto& v : g.vertices())
        if (!v.label.admissible())
            out.push_back({"inadmissible nature", v.id + ": " + v.label.str()});
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& e = g.edges()[i];
        if (e.weight < 1)
            out.push_back({"weight >= 1", "edge " + std::to_string(i) + " has weight " +
                                              std::to_string(e.weight)});
        if (!e.source && !e.target)
            out.push_back({"no endpoint", "edge " + std::to_string(i) + " is OPEN at both ends"});
    }
    // Kahn; whatever survives sits on or behind a cycle
    const std::size_t n = g.vertices().size();
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges())
        if (e.source && e.target) ++indeg[*e.target];
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) stack.push_back(v);
    std::size_t seen = 0;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        ++seen;
        for (const auto& e : g.edges())
            if (e.source == v && e.target && --indeg[*e.target] == 0) stack.push_back(*e.target);
    }
    if (seen != n) {
        std::string ids;
        for (std::size_t v = 0; v < n; ++v)
            if (indeg[v] > 0) ids += (ids.empty() ? "" : ",") + g.vertices()[v].id;
        out.push_back({"oriented cycle", "through " + ids});
    }
    return out;
}

inline SemiGraph semigraph(const LyapunovGraph& g, std::size_t v) {
    if (v >= g.vertices().size()) throw model_error("unknown vertex");
    SemiGraph sg{g.vertices()[v].label, {}, {}};
    for (const auto& e : g.edges()) {
        if (e.target == v) sg.in_weights.push_back(e.weight);
        if (e.source == v) sg.out_weights.push_back(e.weight);
    }
    if (sg.degree() == 0)
        throw model_error("degree 0 semi-graph at '" + g.vertices()[v].id + "'");
    return sg;
}

inline SemiGraph semigraph(const LyapunovGraph& g, const std::string& id) {
    return semigraph(g, g.vertex_index(id));
}

// ---------------------------------------------------------------------------

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw model_error("zero denominator");
        if (den < 0) num = -num, den = -den;
        auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) num /= g, den /= g;
    }
    bool is_integer() const { return den == 1; }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
    friend Rational operator+(Rational x, Rational y) {
        return {x.num * y.den + y.num * x.den, x.den * y.den};
    }
    friend bool operator==(const Rational&, const Rational&) = default;
};

inline void require_closed(const LyapunovGraph& g) {
    if (!g.closed()) throw model_error("graph is not closed");
}

inline bool fold_balance(const LyapunovGraph& g) {
    require_closed(g);
    int fin = 0, fout = 0;
    for (const auto& v : g.vertices()) {
        auto f = fold_degrees(v.label);
        fin += f.fin;
        fout += f.fout;
    }
    return fin == fout;
}

inline int euler_conley(const LyapunovGraph& g) {
    require_closed(g);
    int chi = 0;
    for (const auto& v : g.vertices()) chi += conley_index(v.label).euler();
    return chi;
}

struct GsCounts {
    int a = 0, s = 0, r = 0, W = 0, T = 0;
};

inline Rational euler_gs(const GsCounts& c) {
    return Rational(c.a - c.s + c.r + c.T) + Rational(c.W, 2);
}

inline GsCounts gs_counts(const LyapunovGraph& g) {
    GsCounts c;
    for (const auto& v : g.vertices()) {
        auto t = nature_tally(v.label);
        c.a += t.a;
        c.s += t.s;
        c.r += t.r;
        if (v.label.type == SingularityType::W) ++c.W;
        if (v.label.type == SingularityType::T) ++c.T;
    }
    return c;
}

inline Rational euler_gs(const LyapunovGraph& g) {
    require_closed(g);
    return euler_gs(gs_counts(g));
}

}  // namespace gsflow
