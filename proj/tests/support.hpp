#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gsflow.hpp"

namespace gstest {

using gsflow::LyapunovGraph;
using gsflow::Nature;
using gsflow::SemiGraph;
using gsflow::SingularityType;
using gsflow::VertexLabel;

inline VertexLabel L(SingularityType t, Nature n) { return {t, n}; }

inline SemiGraph sg(SingularityType t, Nature n, std::vector<int> in, std::vector<int> out) {
    return {{t, n}, std::move(in), std::move(out)};
}

struct V {
    std::string id;
    SingularityType t;
    Nature n;
};

struct E {
    std::string from, to;
    int w;
};

inline LyapunovGraph graph(const std::vector<V>& vs, const std::vector<E>& es) {
    LyapunovGraph g;
    for (const auto& v : vs) g.add_vertex(v.id, v.t, v.n);
    for (const auto& e : es) g.add_edge(e.from, e.to, e.w);
    return g;
}

// D_r -3-> W_s_s, which splits into weights 1 and 2 toward an R and a W attractor.
inline LyapunovGraph non_realizable_instance() {
    using enum Nature;
    using S = SingularityType;
    return graph({{"d", S::D, r}, {"w", S::W, s_s}, {"ra", S::R, a}, {"wa", S::W, a}},
                 {{"d", "w", 3}, {"w", "ra", 1}, {"w", "wa", 2}});
}

// Dispatch leaves this Unknown; the weight-5 edge needs a form outside both families.
inline LyapunovGraph weight5_instance() {
    using enum Nature;
    using S = SingularityType;
    return graph({{"v0", S::D, r},
                  {"v1", S::C, s},
                  {"v2", S::T, ssr},
                  {"v3", S::D, a},
                  {"v4", S::C, s},
                  {"v5", S::T, ssa}},
                 {{"v0", "v1", 3}, {"v1", "v2", 3}, {"v4", "v3", 3}, {"v5", "v4", 3}, {"v2", "v5", 5}});
}

}  // namespace gstest
