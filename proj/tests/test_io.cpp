#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "support.hpp"

using namespace gsflow;
using namespace gstest;
using enum Nature;
using S = SingularityType;

namespace {

struct CliRun {
    int code;
    std::string out;
};

CliRun cli(const std::string& args) {
    std::string cmd = std::string(GSFLOW_CLI) + " " + args + " 2>&1";
    CliRun r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string sample(const std::string& name) { return std::string(GSFLOW_SAMPLES) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParseError parse_failure(const std::string& text) {
    try {
        parse_graph(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "document parsed:\n" << text;
    return ParseError(0, 0, "");
}

int count(const std::string& s, const std::regex& re) {
    return static_cast<int>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST(Parse, SphereDocument) {
    auto g = parse_graph(slurp(sample("sphere.lg")));
    EXPECT_EQ(g.vertices().size(), 2u);
    ASSERT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.edges()[0].weight, 1);
    EXPECT_TRUE(g.closed());
}

TEST(Parse, CaseInsensitiveEnums) {
    auto g = parse_graph(slurp(sample("mixed_case.lg")));
    EXPECT_EQ(g.vertices()[*g.find("dsa")].label, (VertexLabel{S::D, sa}));
    EXPECT_EQ(g.vertices()[*g.find("wss")].label, (VertexLabel{S::W, s_s}));
    auto h = parse_graph("version 1\nvertex x T SSa\nvertex y t R\nedge y x 5\n");
    EXPECT_EQ(h.vertices()[0].label, (VertexLabel{S::T, ssa}));
}

TEST(Parse, OpenEdgesMakeSemiGraphs) {
    auto g = parse_graph(slurp(sample("open_saddle.lg")));
    EXPECT_FALSE(g.closed());
    auto x = semigraph(g, "s");
    EXPECT_EQ(x.e_plus(), 1);
    EXPECT_EQ(x.e_minus(), 2);
    EXPECT_EQ(local_realizable(x).str(), "YesMinimal");
}

TEST(Parse, DiagnosticsCarryPositions) {
    auto e = parse_failure("version 1\nvertex x R sa\n");
    EXPECT_EQ(e.line, 2);
    EXPECT_EQ(e.column, 12);
    EXPECT_NE(std::string(e.what()).find("inadmissible nature"), std::string::npos);

    e = parse_failure("version 1\n\nvertex x R a\ncolour x red\n");
    EXPECT_EQ(e.line, 4);
    EXPECT_EQ(e.column, 1);
    EXPECT_NE(std::string(e.what()).find("unknown field"), std::string::npos);

    e = parse_failure("version 1\nvertex x R a\nvertex x R r\n");
    EXPECT_EQ(e.line, 3);
    EXPECT_EQ(e.column, 8);

    e = parse_failure("version 1\nvertex x R a\nedge y  x 1\n");
    EXPECT_EQ(e.line, 3);
    EXPECT_EQ(e.column, 6);
    EXPECT_NE(std::string(e.what()).find("unknown vertex"), std::string::npos);

    e = parse_failure("version 1\nvertex x R a\nedge OPEN x 0\n");
    EXPECT_EQ(e.column, 13);
    EXPECT_NE(std::string(e.what()).find("weight >= 1"), std::string::npos);

    e = parse_failure("version 1\nedge OPEN open 1\n");
    EXPECT_NE(std::string(e.what()).find("no endpoint"), std::string::npos);

    e = parse_failure("vertex x R a\n");
    EXPECT_EQ(e.line, 1);
    e = parse_failure("version 2\n");
    EXPECT_EQ(e.column, 9);
    e = parse_failure("version 1\nvertex x Q a\n");
    EXPECT_EQ(e.column, 10);
    e = parse_failure("version 1\nvertex x R a extra\n");
    EXPECT_EQ(e.column, 14);
}

TEST(Serialize, RoundTrip) {
    for (const char* name : {"sphere.lg", "linear.lg", "non_realizable.lg", "weight5.lg", "open_saddle.lg",
                             "mixed_case.lg", "triple_pair.lg"}) {
        auto g = parse_graph(slurp(sample(name)));
        auto text = serialize(g);
        auto h = parse_graph(text);
        EXPECT_TRUE(same_graph(g, h)) << name;
        EXPECT_EQ(serialize(h), text) << name;
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = gen_random_gs_graph({seed, 9, seed % 2 == 0, seed % 3 == 0, 6});
        EXPECT_TRUE(same_graph(g, parse_graph(serialize(g))));
    }
}

TEST(Serialize, VerticesSortedById) {
    auto g = graph({{"zeta", S::R, r}, {"alpha", S::R, a}}, {{"zeta", "alpha", 1}});
    EXPECT_EQ(serialize(g), "version 1\nvertex alpha R a\nvertex zeta R r\nedge zeta alpha 1\n");
}

TEST(Dot, OneNodePerVertexOneArcPerEdge) {
    for (const char* name : {"linear.lg", "weight5.lg", "open_saddle.lg"}) {
        auto g = parse_graph(slurp(sample(name)));
        auto dot = export_dot(g);
        const int open_ends = static_cast<int>(std::count_if(g.edges().begin(), g.edges().end(), [](const Edge& e) {
            return !e.source || !e.target;
        }));
        EXPECT_EQ(count(dot, std::regex(R"(\[label="[^"\\]+\\n[A-Z]_[a-z_]+"\])")),
                  static_cast<int>(g.vertices().size()))
            << name;
        EXPECT_EQ(count(dot, std::regex(R"(\[shape=point\])")), open_ends);
        EXPECT_EQ(count(dot, std::regex(R"( -> .*\[label="\d+"\])")), static_cast<int>(g.edges().size()));
        for (const auto& e : g.edges())
            EXPECT_NE(dot.find("[label=\"" + std::to_string(e.weight) + "\"]"), std::string::npos);
    }
}

TEST(Report, CertificateParsesBack) {
    auto g = parse_graph(slurp(sample("weight5.lg")));
    auto v = realize(g, {5, 1});
    auto j = report_json(g, v);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["status"], "realizable");
    EXPECT_EQ(j["theorem"], "Search");
    EXPECT_EQ(j["euler"]["gs"], euler_gs(g).str());
    EXPECT_EQ(j["euler"]["conley"], euler_conley(g));
    EXPECT_TRUE(j["fold_balance"]["balanced"].get<bool>());
    auto back = certificate_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back, v.certificate);
    EXPECT_TRUE(verify_certificate(g, back));
    for (const auto& [e, f] : back) EXPECT_EQ(weight(parse_manifold(f)).total, g.edges()[e].weight);
}

TEST(Report, OpenGraphHasNoEuler) {
    auto g = parse_graph(slurp(sample("open_saddle.lg")));
    auto j = report_json(g, realize(g));
    EXPECT_TRUE(j["euler"]["gs"].is_null());
    EXPECT_EQ(j["status"], "unknown");
}

TEST(Generator, Deterministic) {
    for (bool minimal : {false, true})
        for (std::uint64_t seed : {1u, 7u, 99u}) {
            GenOptions o{seed, 10, minimal, true, 6};
            EXPECT_EQ(serialize(gen_random_gs_graph(o)), serialize(gen_random_gs_graph(o)));
        }
    EXPECT_THROW(gen_random_gs_graph({1, 1, false, false, 6}), model_error);
}

TEST(Generator, Invariants) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenOptions o{seed, 4 + static_cast<int>(seed % 10), seed % 2 == 1, seed % 4 < 2, 6};
        auto g = gen_random_gs_graph(o);
        EXPECT_TRUE(validate_graph(g).empty()) << seed;
        EXPECT_TRUE(g.closed());
        auto st = classify_graph(g);
        EXPECT_TRUE(st.is_gs) << seed << "\n" << serialize(g);
        if (o.minimal) EXPECT_TRUE(st.is_minimal_gs) << seed;
        if (o.fold_balanced) EXPECT_EQ(euler_gs(g), Rational(euler_conley(g)));
    }
}

TEST(Cli, Enumerate) {
    auto r = cli("enumerate --weight 4");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("count 4"), std::string::npos);
    r = cli("enumerate --weight 5");
    EXPECT_NE(r.out.find("count 10"), std::string::npos);
    r = cli("enumerate --weight 7");
    EXPECT_EQ(r.code, 64);
    r = cli("enumerate --weight 7 --bogus");
    EXPECT_EQ(r.code, 64);
}

TEST(Cli, EnumerationBoundFromEnvironment) {
    std::string cmd = "GS_ENUM_BOUND=3 " + std::string(GSFLOW_CLI) + " enumerate --weight 4 >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    EXPECT_EQ(WIFEXITED(status) ? WEXITSTATUS(status) : -1, 64);
}

TEST(Cli, Catalog) {
    auto r = cli("catalog");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("3 3 3 13 11 / 33"), std::string::npos);
    r = cli("catalog --type T");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("D_"), std::string::npos);
    EXPECT_EQ(cli("catalog --type X").code, 64);
}

TEST(Cli, RealizeExitCodes) {
    EXPECT_EQ(cli("realize " + sample("sphere.lg")).code, 0);
    EXPECT_EQ(cli("realize " + sample("non_realizable.lg")).code, 2);
    EXPECT_EQ(cli("realize --search-bound 3 " + sample("non_realizable.lg")).code, 1);
    EXPECT_EQ(cli("realize --search-bound 5 " + sample("weight5.lg")).code, 0);
    EXPECT_EQ(cli("realize --search-bound 13 " + sample("weight5.lg")).code, 64);
    EXPECT_EQ(cli("realize " + sample("missing.lg")).code, 66);

    auto r = cli("realize " + sample("triple_pair.lg"));
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["theorem"], "Thm6");
    EXPECT_EQ(j["euler"]["gs"], "8");
}

TEST(Cli, BatchKeepsFileOrder) {
    auto files = sample("sphere.lg") + " " + sample("linear.lg") + " " + sample("triple_pair.lg");
    auto one = cli("--jobs 1 realize " + files);
    auto four = cli("--jobs 4 realize " + files);
    EXPECT_EQ(one.code, 0);
    EXPECT_EQ(one.out, four.out);
    EXPECT_LT(one.out.find("sphere.lg"), one.out.find("linear.lg"));
    EXPECT_LT(one.out.find("linear.lg"), one.out.find("triple_pair.lg"));
}

TEST(Cli, ValidateAndEuler) {
    auto r = cli("validate " + sample("non_realizable.lg"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("valid"), std::string::npos);

    std::string bad = ::testing::TempDir() + "bad.lg";
    std::ofstream(bad) << "version 1\nvertex x R sa\n";
    r = cli("validate " + bad);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("2:12: inadmissible nature"), std::string::npos);

    r = cli("euler " + sample("linear.lg"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("euler_conley 1"), std::string::npos);
    EXPECT_NE(r.out.find("euler_gs 1"), std::string::npos);
    EXPECT_NE(r.out.find("balanced"), std::string::npos);
    EXPECT_EQ(cli("euler " + sample("open_saddle.lg")).code, 1);
}

TEST(Cli, GenerateAndExport) {
    auto a = cli("gen-random --seed 7 --minimal");
    auto b = cli("gen-random --seed 7 --minimal");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(classify_graph(parse_graph(a.out)).is_minimal_gs);
    EXPECT_EQ(cli("gen-random --seed 7 --vertices 1").code, 64);

    auto dot = cli("export-dot " + sample("sphere.lg"));
    EXPECT_EQ(dot.code, 0);
    EXPECT_NE(dot.out.find("\"src\" -> \"sink\" [label=\"1\"]"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("").code, 64);
    EXPECT_EQ(cli("frobnicate").code, 64);
    EXPECT_EQ(cli("realize").code, 64);
}
