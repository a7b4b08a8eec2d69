#pragma once

// Text graph documents, JSON reports, DOT export and the random generator.
//
//   # comment
//   version 1
//   vertex <id> <type> <nature>
//   edge <from|OPEN> <to|OPEN> <weight>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "global.hpp"
#include "local.hpp"
#include "model.hpp"

namespace gsflow {

inline constexpr int document_version = 1;
inline constexpr int report_schema_version = 1;

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l), column(c) {}
};

namespace detail {

struct Token {
    std::string text;
    int column;
};

inline std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

inline bool valid_id(const std::string& s) {
    if (s.empty() || lower(s) == "open") return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace detail

inline LyapunovGraph parse_graph(const std::string& text) {
    LyapunovGraph g;
    struct PendingEdge {
        detail::Token from, to;
        int weight;
        int line;
    };
    std::vector<PendingEdge> edges;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool have_version = false;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto tok = detail::tokenize(raw);
        if (tok.empty()) continue;
        const std::string head = detail::lower(tok[0].text);
        auto expect = [&](std::size_t n) {
            if (tok.size() < n) {
                int col = static_cast<int>(raw.find_last_not_of(" \t")) + 2;
                throw ParseError(lineno, col, "expected " + std::to_string(n - 1) + " fields after '" + head + "'");
            }
            if (tok.size() > n)
                throw ParseError(lineno, tok[n].column, "unexpected token '" + tok[n].text + "'");
        };
        if (!have_version) {
            if (head != "version")
                throw ParseError(lineno, tok[0].column, "document must start with 'version'");
            expect(2);
            if (tok[1].text != std::to_string(document_version))
                throw ParseError(lineno, tok[1].column, "unsupported version '" + tok[1].text + "'");
            have_version = true;
            continue;
        }
        if (head == "vertex") {
            expect(4);
            if (!detail::valid_id(tok[1].text))
                throw ParseError(lineno, tok[1].column, "invalid vertex id '" + tok[1].text + "'");
            auto t = parse_type(tok[2].text);
            if (!t) throw ParseError(lineno, tok[2].column, "unknown type '" + tok[2].text + "'");
            auto n = parse_nature(tok[3].text);
            if (!n) throw ParseError(lineno, tok[3].column, "unknown nature '" + tok[3].text + "'");
            if (!admissible(*t, *n))
                throw ParseError(lineno, tok[3].column,
                                 "inadmissible nature '" + tok[3].text + "' for type " +
                                     std::string(to_string(*t)));
            if (g.find(tok[1].text))
                throw ParseError(lineno, tok[1].column, "duplicate vertex id '" + tok[1].text + "'");
            g.add_vertex(tok[1].text, *t, *n);
        } else if (head == "edge") {
            expect(4);
            int w = 0;
            std::size_t used = 0;
            try {
                w = std::stoi(tok[3].text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok[3].text.size())
                throw ParseError(lineno, tok[3].column, "weight must be an integer");
            if (w < 1) throw ParseError(lineno, tok[3].column, "weight >= 1 required");
            edges.push_back({tok[1], tok[2], w, lineno});
        } else if (head == "version") {
            throw ParseError(lineno, tok[0].column, "repeated 'version'");
        } else {
            throw ParseError(lineno, tok[0].column, "unknown field '" + tok[0].text + "'");
        }
    }
    if (!have_version) throw ParseError(lineno == 0 ? 1 : lineno, 1, "missing 'version' line");
    for (const auto& e : edges) {
        auto end = [&](const detail::Token& t) -> std::optional<std::size_t> {
            if (detail::lower(t.text) == "open") return std::nullopt;
            auto v = g.find(t.text);
            if (!v) throw ParseError(e.line, t.column, "unknown vertex '" + t.text + "'");
            return v;
        };
        auto a = end(e.from), b = end(e.to);
        if (!a && !b) throw ParseError(e.line, e.from.column, "edge has no endpoint");
        g.add_edge(a, b, e.weight);
    }
    return g;
}

inline std::string serialize(const LyapunovGraph& g) {
    std::ostringstream os;
    os << "version " << document_version << "\n";
    std::vector<std::size_t> idx(g.vertices().size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](auto a, auto b) { return g.vertices()[a].id < g.vertices()[b].id; });
    for (auto i : idx) {
        const auto& v = g.vertices()[i];
        os << "vertex " << v.id << " " << to_string(v.label.type) << " " << to_string(v.label.nature)
           << "\n";
    }
    for (const auto& e : g.edges()) {
        os << "edge " << (e.source ? g.vertices()[*e.source].id : "OPEN") << " "
           << (e.target ? g.vertices()[*e.target].id : "OPEN") << " " << e.weight << "\n";
    }
    return os.str();
}

// Structural equality up to vertex order.
inline bool same_graph(const LyapunovGraph& a, const LyapunovGraph& b) {
    if (a.vertices().size() != b.vertices().size() || a.edges().size() != b.edges().size())
        return false;
    for (const auto& v : a.vertices()) {
        auto j = b.find(v.id);
        if (!j || !(b.vertices()[*j].label == v.label)) return false;
    }
    auto name = [](const LyapunovGraph& g, std::optional<std::size_t> v) {
        return v ? g.vertices()[*v].id : std::string("OPEN");
    };
    for (std::size_t e = 0; e < a.edges().size(); ++e) {
        const auto &x = a.edges()[e], &y = b.edges()[e];
        if (x.weight != y.weight || name(a, x.source) != name(b, y.source) ||
            name(a, x.target) != name(b, y.target))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

struct FoldTotals {
    int fin = 0, fout = 0;
};

inline FoldTotals fold_totals(const LyapunovGraph& g) {
    FoldTotals t;
    for (const auto& v : g.vertices()) {
        auto f = fold_degrees(v.label);
        t.fin += f.fin;
        t.fout += f.fout;
    }
    return t;
}

inline nlohmann::json report_json(const LyapunovGraph& g, const RealizationVerdict& v) {
    using nlohmann::json;
    json r;
    r["schema"] = "gsflow-report";
    r["schema_version"] = report_schema_version;
    r["status"] = std::string(to_string(v.status));
    r["theorem"] = v.theorem ? json(std::string(to_string(*v.theorem))) : json(nullptr);
    json cert = json::array();
    for (const auto& [e, form] : v.certificate) {
        const auto& E = g.edges()[e];
        cert.push_back({{"edge", e},
                        {"from", E.source ? g.vertices()[*E.source].id : "OPEN"},
                        {"to", E.target ? g.vertices()[*E.target].id : "OPEN"},
                        {"weight", E.weight},
                        {"form", form}});
    }
    r["certificate"] = cert;
    r["witnesses"] = {{"vertices", v.witness_vertices}, {"edges", v.witness_edges}};
    r["reason"] = v.reason;
    r["notes"] = v.notes;
    if (v.searched_bound) r["search_bound"] = v.searched_bound;
    json eul;
    if (g.closed() && validate_graph(g).empty()) {
        eul["gs"] = euler_gs(g).str();
        eul["conley"] = euler_conley(g);
    } else {
        eul["gs"] = nullptr;
        eul["conley"] = nullptr;
    }
    r["euler"] = eul;
    auto ft = fold_totals(g);
    r["fold_balance"] = {{"in", ft.fin}, {"out", ft.fout}, {"balanced", ft.fin == ft.fout}};
    json verts = json::array();
    auto st = classify_graph(g);
    for (std::size_t i = 0; i < g.vertices().size(); ++i)
        verts.push_back({{"id", g.vertices()[i].id},
                         {"label", g.vertices()[i].label.str()},
                         {"local", st.verdicts[i].str()}});
    r["vertices"] = verts;
    return r;
}

// Certificate entries of a report, read back as edge -> form.
inline Certificate certificate_from_json(const nlohmann::json& r) {
    if (!r.contains("schema_version") || r["schema_version"] != report_schema_version)
        throw std::runtime_error("unsupported report schema");
    Certificate c;
    for (const auto& item : r.at("certificate")) c[item.at("edge").get<std::size_t>()] = item.at("form");
    return c;
}

// ---------------------------------------------------------------------------

namespace detail {
inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string dot_quote(const std::string& s) { return "\"" + dot_escape(s) + "\""; }
}  // namespace detail

// Open edge ends become point-shaped nodes named "open:<edge>".
inline std::string export_dot(const LyapunovGraph& g) {
    std::ostringstream os;
    os << "digraph lyapunov {\n  rankdir=TB;\n";
    for (const auto& v : g.vertices())
        os << "  " << detail::dot_quote(v.id) << " [label=\"" << detail::dot_escape(v.id) << "\\n"
           << detail::dot_escape(v.label.str()) << "\"];\n";
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& E = g.edges()[e];
        auto end = [&](std::optional<std::size_t> v, const char* tag) {
            if (v) return detail::dot_quote(g.vertices()[*v].id);
            std::string n = detail::dot_quote(std::string("open:") + std::to_string(e) + tag);
            os << "  " << n << " [shape=point];\n";
            return n;
        };
        std::string a = end(E.source, "s"), b = end(E.target, "t");
        os << "  " << a << " -> " << b << " [label=\"" << E.weight << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// random GS graphs

struct GenOptions {
    std::uint64_t seed = 0;
    int vertices = 8;
    bool minimal = false;
    bool fold_balanced = false;
    int max_weight = 6;
};

namespace detail {

struct Port {
    std::size_t vertex;
    int weight;
};

struct Generator {
    const GenOptions& opt;
    std::mt19937_64 rng;
    LyapunovGraph g;
    std::vector<Port> pool;

    explicit Generator(const GenOptions& o) : opt(o), rng(o.seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    std::size_t vertex(VertexLabel l) { return g.add_vertex("v" + std::to_string(g.vertices().size()), l); }

    static const std::vector<ShapeEntry>& passing_shapes() {
        static const std::vector<ShapeEntry> s = [] {
            std::vector<ShapeEntry> out;
            for (const auto& e : shape_catalog())
                if (e.e_plus > 0 && e.e_minus > 0) out.push_back(e);
            return out;
        }();
        return s;
    }

    // pull one port of weight w (or any weight when w == 0) other than `skip`
    std::optional<std::size_t> find_port(int w, const std::vector<std::size_t>& skip) {
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if ((w == 0 || pool[i].weight == w) &&
                std::find(skip.begin(), skip.end(), i) == skip.end())
                c.push_back(i);
        if (c.empty()) return std::nullopt;
        return c[static_cast<std::size_t>(uniform(0, static_cast<int>(c.size()) - 1))];
    }

    void attach(const std::vector<std::size_t>& ports, VertexLabel l, const std::vector<int>& outs) {
        auto v = vertex(l);
        for (auto i : ports) g.add_edge(pool[i].vertex, v, pool[i].weight);
        std::vector<std::size_t> sorted = ports;
        std::sort(sorted.rbegin(), sorted.rend());
        for (auto i : sorted) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
        for (int w : outs) pool.push_back({v, w});
    }

    void start() {
        using S = SingularityType;
        static const std::vector<std::pair<VertexLabel, std::vector<int>>> sources{
            {{S::R, Nature::r}, {1}}, {{S::C, Nature::r}, {1, 1}}, {{S::W, Nature::r}, {2}},
            {{S::D, Nature::r}, {3}}, {{S::T, Nature::r}, {7}}};
        const auto& [l, outs] = sources[static_cast<std::size_t>(uniform(0, static_cast<int>(sources.size()) - 1))];
        auto v = vertex(l);
        for (int w : outs) pool.push_back({v, w});
    }

    bool grow_minimal() {
        std::size_t p = static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1));
        std::vector<std::pair<ShapeEntry, MinimalWeights>> cands;
        for (const auto& s : passing_shapes()) {
            auto mw = minimal_weights(s.label, s.e_plus, s.e_minus);
            if (std::find(mw.in.begin(), mw.in.end(), pool[p].weight) != mw.in.end())
                cands.emplace_back(s, mw);
        }
        std::shuffle(cands.begin(), cands.end(), rng);
        for (const auto& [s, mw] : cands) {
            std::vector<std::size_t> ports{p};
            std::vector<int> rest = mw.in;
            rest.erase(std::find(rest.begin(), rest.end(), pool[p].weight));
            bool ok = true;
            for (int w : rest) {
                auto q = find_port(w, ports);
                if (!q) {
                    ok = false;
                    break;
                }
                ports.push_back(*q);
            }
            if (!ok) continue;
            attach(ports, s.label, mw.out);
            return true;
        }
        return false;
    }

    static std::vector<int> random_split(std::mt19937_64& rng, int total, int parts, int cap) {
        if (parts == 0) return {};
        if (total < parts || total > parts * cap) return {};
        std::vector<int> w(static_cast<std::size_t>(parts), 1);
        for (int left = total - parts; left > 0;) {
            int i = std::uniform_int_distribution<int>(0, parts - 1)(rng);
            if (w[i] < cap) ++w[i], --left;
        }
        return w;
    }

    bool grow_free() {
        std::size_t p = static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1));
        const auto& shapes = passing_shapes();
        for (int attempt = 0; attempt < 60; ++attempt) {
            const auto& s = shapes[static_cast<std::size_t>(uniform(0, static_cast<int>(shapes.size()) - 1))];
            std::vector<std::size_t> ports{p};
            bool ok = true;
            for (int k = 1; k < s.e_plus; ++k) {
                auto q = find_port(0, ports);
                if (!q) {
                    ok = false;
                    break;
                }
                ports.push_back(*q);
            }
            if (!ok) continue;
            std::vector<int> in;
            for (auto i : ports) in.push_back(pool[i].weight);
            int Bp = std::accumulate(in.begin(), in.end(), 0);
            auto out = random_split(rng, Bp - s.offset, s.e_minus, opt.max_weight);
            if (out.empty()) continue;
            if (!local_realizable(SemiGraph{s.label, in, out}).yes()) continue;
            attach(ports, s.label, out);
            return true;
        }
        return false;
    }

    // send every open port into attractors, stepping weights down where needed
    void close_all() {
        using S = SingularityType;
        while (!pool.empty()) {
            std::size_t p = pool.size() - 1;
            int w = pool[p].weight;
            if (w == 1) {
                auto q = find_port(1, {p});
                if (q && uniform(0, 3) == 0) attach({p, *q}, {S::C, Nature::a}, {});
                else attach({p}, {S::R, Nature::a}, {});
            } else if (w == 2) {
                attach({p}, {S::W, Nature::a}, {});
            } else if (w == 3) {
                attach({p}, {S::D, Nature::a}, {});
            } else if (w == 7) {
                attach({p}, {S::T, Nature::a}, {});
            } else if (w == 5 && opt.minimal) {
                attach({p}, {S::T, Nature::ssa}, {3});
            } else {
                attach({p}, {S::W, Nature::s_s}, {w - 1});
            }
        }
    }

    void mirror() {
        // reversed copy below the original, open ports glued to their images
        const std::size_t n = g.vertices().size();
        const std::size_t m = g.edges().size();
        std::vector<std::size_t> image(n);
        for (std::size_t v = 0; v < n; ++v) image[v] = vertex(g.vertices()[v].label.reversed());
        for (std::size_t e = 0; e < m; ++e) {
            const auto E = g.edges()[e];
            g.add_edge(image[*E.target], image[*E.source], E.weight);
        }
        std::map<int, std::vector<std::size_t>> by_weight;
        for (std::size_t i = 0; i < pool.size(); ++i) by_weight[pool[i].weight].push_back(i);
        for (auto& [w, idx] : by_weight) {
            auto targets = idx;
            std::shuffle(targets.begin(), targets.end(), rng);
            for (std::size_t k = 0; k < idx.size(); ++k)
                g.add_edge(pool[idx[k]].vertex, image[pool[targets[k]].vertex], w);
        }
        pool.clear();
    }
};

}  // namespace detail

inline LyapunovGraph gen_random_gs_graph(const GenOptions& opt) {
    if (opt.vertices < 2) throw model_error("generator needs at least 2 vertices");
    if (opt.max_weight < 3) throw model_error("generator needs max weight >= 3");
    detail::Generator gen(opt);
    const int target = opt.fold_balanced ? (opt.vertices + 1) / 2 : opt.vertices;
    gen.start();
    int stuck = 0;
    while (static_cast<int>(gen.g.vertices().size() + (opt.fold_balanced ? 0 : gen.pool.size())) < target &&
           stuck < 100) {
        if (gen.pool.empty()) break;
        bool grew = opt.minimal ? gen.grow_minimal() : gen.grow_free();
        stuck = grew ? 0 : stuck + 1;
    }
    if (opt.fold_balanced) gen.mirror();
    else gen.close_all();
    return gen.g;
}

}  // namespace gsflow
