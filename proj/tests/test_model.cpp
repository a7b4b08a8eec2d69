#include <gtest/gtest.h>

#include <map>
#include <random>

#include "support.hpp"

using namespace gsflow;
using namespace gstest;
using enum Nature;
using S = SingularityType;

namespace {

// Indices typed in from the table, independent of the library's switch.
const std::map<std::pair<S, Nature>, ConleyIndex>& expected_indices() {
    static const std::map<std::pair<S, Nature>, ConleyIndex> t{
        {{S::R, a}, {1, 0, 0}},    {{S::R, s}, {0, 1, 0}},    {{S::R, r}, {0, 0, 1}},
        {{S::C, a}, {1, 0, 0}},    {{S::C, s}, {0, 1, 0}},    {{S::C, r}, {0, 1, 2}},
        {{S::W, a}, {1, 0, 0}},    {{S::W, s_s}, {0, 1, 0}},  {{S::W, s_u}, {0, 0, 0}},
        {{S::W, r}, {0, 0, 2}},    {{S::D, a}, {1, 0, 0}},    {{S::D, sa}, {0, 1, 0}},
        {{S::D, ss_s}, {0, 3, 0}}, {{S::D, ss_u}, {0, 1, 0}}, {{S::D, sr}, {0, 0, 1}},
        {{S::D, r}, {0, 0, 3}},    {{S::T, a}, {1, 0, 0}},    {{S::T, ssa}, {0, 1, 0}},
        {{S::T, ssr}, {0, 1, 2}},  {{S::T, r}, {0, 0, 7}},
    };
    return t;
}

}  // namespace

TEST(Conley, TableMatchesEveryAdmissiblePair) {
    int admissible_pairs = 0;
    for (auto t : all_types)
        for (auto n : all_natures) {
            auto it = expected_indices().find({t, n});
            EXPECT_EQ(admissible(t, n), it != expected_indices().end());
            if (it == expected_indices().end()) {
                EXPECT_THROW(conley_index(t, n), model_error);
                continue;
            }
            ++admissible_pairs;
            EXPECT_EQ(conley_index(t, n), it->second) << to_string(t) << " " << to_string(n);
        }
    EXPECT_EQ(admissible_pairs, 20);
}

TEST(Conley, NamedExamples) {
    EXPECT_EQ(conley_index(S::R, s), (ConleyIndex{0, 1, 0}));
    EXPECT_EQ(conley_index(S::T, r), (ConleyIndex{0, 0, 7}));
    EXPECT_EQ(conley_index(S::W, r), (ConleyIndex{0, 0, 2}));
}

TEST(Conley, AttractorsCarryOnlyH0) {
    for (const auto& [k, idx] : expected_indices()) {
        auto c = conley_index(k.first, k.second);
        EXPECT_TRUE(c.h0 == 0 || c.h0 == 1);
        if (c.h0 == 1) EXPECT_TRUE(c.h1 == 0 && c.h2 == 0);
    }
}

TEST(Nature, ReversalIsAnInvolution) {
    for (auto n : all_natures) EXPECT_EQ(reverse_nature(reverse_nature(n)), n);
    EXPECT_EQ(reverse_nature(ss_s), ss_u);
    EXPECT_EQ(reverse_nature(s), s);
    EXPECT_EQ(reverse_nature(a), r);
    EXPECT_EQ(reverse_nature(sa), sr);
    EXPECT_EQ(reverse_nature(ssa), ssr);
    for (const auto& [k, idx] : expected_indices())
        EXPECT_EQ(conley_index(k.first, reverse_nature(reverse_nature(k.second))), idx);
}

TEST(Nature, CaseInsensitiveParsing) {
    EXPECT_EQ(parse_nature("SSa"), ssa);
    EXPECT_EQ(parse_nature("ss_s"), ss_s);
    EXPECT_EQ(parse_type("d"), S::D);
    EXPECT_FALSE(parse_nature("q").has_value());
    EXPECT_THROW(make_label(S::R, sa), model_error);
}

TEST(PoincareHopf, ResidualExamples) {
    EXPECT_EQ(ph_residual(sg(S::R, a, {1}, {})), 0);
    EXPECT_EQ(ph_residual(sg(S::T, a, {7}, {})), 0);
    EXPECT_EQ(ph_residual(sg(S::D, ss_s, {4}, {2})), 0);
    EXPECT_EQ(ph_residual(sg(S::D, ss_s, {4}, {3})), -1);
    EXPECT_EQ(ph_residual(sg(S::W, a, {2}, {})), 0);
    EXPECT_EQ(ph_residual(sg(S::C, a, {1, 1}, {})), 0);
}

TEST(PoincareHopf, AntisymmetricUnderReversal) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> deg(0, 3), w(1, 8);
    for (int i = 0; i < 2000; ++i) {
        auto t = all_types[rng() % all_types.size()];
        Nature n = all_natures[rng() % all_natures.size()];
        if (!admissible(t, n)) continue;
        SemiGraph x{{t, n}, {}, {}};
        for (int k = deg(rng); k > 0; --k) x.in_weights.push_back(w(rng));
        for (int k = deg(rng); k > 0; --k) x.out_weights.push_back(w(rng));
        EXPECT_EQ(ph_residual(x.reversed()), -ph_residual(x));
    }
}

TEST(PoincareHopf, DegreeBounds) {
    EXPECT_TRUE(degree_bounds_ok(sg(S::D, ss_s, {1}, {1, 1, 1, 1})));
    EXPECT_FALSE(degree_bounds_ok(sg(S::D, ss_s, {1}, {1, 1, 1, 1, 1})));
    EXPECT_FALSE(degree_bounds_ok(sg(S::T, ssa, {1, 1, 1}, {1})));
    EXPECT_TRUE(degree_bounds_ok(sg(S::T, ssa, {1, 1}, {1})));
    EXPECT_FALSE(degree_bounds_ok(sg(S::R, a, {1}, {1, 1})));
}

TEST(Folds, DegreesPerLabel) {
    EXPECT_EQ(fold_degrees(S::T, ssa), (FoldDegrees{4, 2}));
    EXPECT_EQ(fold_degrees(S::R, s), (FoldDegrees{0, 0}));
    EXPECT_EQ(fold_degrees(S::D, r), (FoldDegrees{0, 2}));
    EXPECT_EQ(fold_degrees(S::W, s_s), (FoldDegrees{1, 0}));
    EXPECT_EQ(fold_degrees(S::T, a), (FoldDegrees{6, 0}));
    for (auto t : all_types)
        for (auto n : all_natures) {
            if (!admissible(t, n)) continue;
            auto f = fold_degrees(t, n);
            auto g = fold_degrees(t, reverse_nature(n));
            EXPECT_EQ(f.fin, g.fout);
            EXPECT_EQ(f.fout, g.fin);
        }
    EXPECT_EQ(total_folds(S::R), 0);
    EXPECT_EQ(total_folds(S::C), 0);
    EXPECT_EQ(total_folds(S::W), 1);
    EXPECT_EQ(total_folds(S::D), 2);
    EXPECT_EQ(total_folds(S::T), 6);
}

TEST(Folds, Balance) {
    EXPECT_TRUE(fold_balance(graph({{"x", S::T, r}, {"y", S::T, a}}, {{"x", "y", 7}})));
    EXPECT_FALSE(fold_balance(graph({{"x", S::W, s_s}, {"y", S::W, a}, {"z", S::R, r}},
                                    {{"z", "x", 3}, {"x", "y", 2}})));
    EXPECT_TRUE(fold_balance(graph({{"x", S::R, r}, {"y", S::R, a}}, {{"x", "y", 1}})));
}

TEST(Euler, ConleySum) {
    EXPECT_EQ(euler_conley(graph({{"x", S::R, r}, {"y", S::R, a}}, {{"x", "y", 1}})), 2);
    EXPECT_EQ(euler_conley(graph({{"x", S::T, r}, {"y", S::T, a}}, {{"x", "y", 7}})), 8);
    EXPECT_EQ(euler_conley(graph({{"x", S::C, r}, {"y", S::C, s}, {"z", S::C, a}},
                                 {{"x", "y", 1}, {"x", "y", 1}, {"y", "z", 1}, {"y", "z", 1}})),
              1);
}

TEST(Euler, ArithmeticInstances) {
    EXPECT_EQ(euler_gs(GsCounts{3, 5, 2, 2, 0}), Rational(1));
    EXPECT_EQ(euler_gs(GsCounts{2, 3, 1, 2, 0}), Rational(1));
    EXPECT_EQ(euler_gs(GsCounts{2, 6, 2, 4, 0}), Rational(0));
    EXPECT_EQ(euler_gs(GsCounts{3, 2, 3, 2, 0}), Rational(5));
    EXPECT_EQ(euler_gs(LyapunovGraph{}), Rational(0));
    EXPECT_EQ(euler_gs(GsCounts{1, 0, 0, 1, 0}).str(), "3/2");
    EXPECT_FALSE(euler_gs(GsCounts{1, 0, 0, 1, 0}).is_integer());
}

TEST(Euler, NatureTalliesForMultiNatureLabels) {
    EXPECT_EQ(nature_tally({S::D, ss_s}), (NatureTally{0, 2, 0}));
    EXPECT_EQ(nature_tally({S::T, ssa}), (NatureTally{1, 2, 0}));
    EXPECT_EQ(nature_tally({S::T, a}), (NatureTally{3, 0, 0}));
    EXPECT_EQ(nature_tally({S::D, sr}), (NatureTally{0, 1, 1}));
}

TEST(Euler, IdentityOnFoldBalancedGraphs) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        GenOptions o;
        o.seed = seed;
        o.vertices = 4 + static_cast<int>(seed % 9);
        o.fold_balanced = true;
        auto g = gen_random_gs_graph(o);
        ASSERT_TRUE(fold_balance(g)) << seed;
        auto chi = euler_gs(g);
        EXPECT_TRUE(chi.is_integer()) << seed;
        EXPECT_EQ(chi, Rational(euler_conley(g))) << seed;
        auto c = gs_counts(g);
        EXPECT_EQ((c.W + 2 * c.T) % 2, 0) << seed;
    }
}

TEST(Graph, Validation) {
    auto ok = graph({{"x", S::R, a}}, {});
    ok.add_edge(std::nullopt, std::size_t{0}, 1);
    EXPECT_TRUE(validate_graph(ok).empty());
    EXPECT_FALSE(ok.closed());

    auto cyc = graph({{"x", S::R, s}, {"y", S::R, s}}, {{"x", "y", 1}, {"y", "x", 1}});
    auto v = validate_graph(cyc);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, "oriented cycle");

    auto zero = graph({{"x", S::R, r}, {"y", S::R, a}}, {{"x", "y", 0}});
    v = validate_graph(zero);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, "weight >= 1");

    LyapunovGraph bad;
    bad.add_vertex("x", VertexLabel{S::R, sa});
    v = validate_graph(bad);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, "inadmissible nature");

    EXPECT_THROW(bad.add_vertex("x", S::R, a), model_error);
    EXPECT_THROW(bad.add_edge("x", "nope", 1), model_error);
}

TEST(Graph, SemigraphProjection) {
    auto g = graph({{"p", S::R, r}, {"q", S::R, r}, {"v", S::D, ss_u}, {"z", S::R, a}},
                   {{"p", "v", 1}, {"q", "v", 2}, {"v", "z", 3}});
    auto x = semigraph(g, "v");
    EXPECT_EQ(x.e_plus(), 2);
    EXPECT_EQ(x.e_minus(), 1);
    EXPECT_EQ(x.in_weights, (std::vector<int>{1, 2}));
    EXPECT_EQ(x.out_weights, (std::vector<int>{3}));

    g.add_vertex("lonely", S::R, a);
    try {
        semigraph(g, "lonely");
        FAIL();
    } catch (const model_error& e) {
        EXPECT_NE(std::string(e.what()).find("degree 0 semi-graph"), std::string::npos);
    }
    EXPECT_THROW(semigraph(g, "missing"), model_error);

    auto id = g.add_vertex("dangling", S::R, r);
    g.add_edge(id, std::nullopt, 1);
    EXPECT_EQ(semigraph(g, "dangling").e_minus(), 1);
}

TEST(Graph, ClosedOperationsRejectOpenGraphs) {
    LyapunovGraph g;
    auto x = g.add_vertex("x", S::R, a);
    g.add_edge(std::nullopt, x, 1);
    EXPECT_THROW(euler_conley(g), model_error);
    EXPECT_THROW(euler_gs(g), model_error);
    EXPECT_THROW(fold_balance(g), model_error);
}
