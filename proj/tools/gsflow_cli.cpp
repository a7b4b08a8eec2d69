#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "gsflow.hpp"

namespace {

using namespace gsflow;

enum Exit : int {
    ok = 0,
    not_realizable = 1,
    unknown = 2,
    usage = 64,
    no_input = 66,
};

struct Loaded {
    std::string path;
    std::optional<LyapunovGraph> graph;
    std::string error;
    int code = ok;
};

Loaded load(const std::string& path) {
    Loaded l{path, std::nullopt, {}, ok};
    std::ifstream in(path);
    if (!in) {
        l.error = path + ": cannot read file";
        l.code = no_input;
        return l;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        l.graph = parse_graph(ss.str());
    } catch (const ParseError& e) {
        l.error = path + ":" + e.what();
        l.code = not_realizable;
    } catch (const model_error& e) {
        l.error = path + ": " + e.what();
        l.code = not_realizable;
    }
    return l;
}

// Run `fn` over every file with up to `jobs` threads; outputs keep file order.
template <class Fn>
int batch(const std::vector<std::string>& files, unsigned jobs, Fn fn) {
    std::vector<std::string> out(files.size()), err(files.size());
    std::vector<int> code(files.size(), ok);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
            auto l = load(files[i]);
            if (!l.graph) {
                err[i] = l.error;
                code[i] = l.code;
                continue;
            }
            std::ostringstream os;
            code[i] = fn(*l.graph, files[i], os);
            out[i] = os.str();
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    int worst = ok;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!err[i].empty()) std::cerr << err[i] << "\n";
        std::cout << out[i];
        worst = std::max(worst, code[i]);
    }
    return worst;
}

int cmd_validate(const LyapunovGraph& g, const std::string& path, std::ostream& os) {
    os << path << "\n";
    auto problems = validate_graph(g);
    for (const auto& p : problems) os << "  structure: " << p.kind << ": " << p.detail << "\n";
    bool fine = problems.empty();
    for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        const auto& vx = g.vertices()[v];
        os << "  " << vx.id << " " << vx.label.str();
        try {
            auto sg = semigraph(g, v);
            auto lv = local_realizable(sg);
            os << " ph_residual=" << ph_residual(sg) << " " << lv.str() << "\n";
            if (!lv.yes()) fine = false;
        } catch (const model_error& e) {
            os << " " << e.what() << "\n";
            fine = false;
        }
    }
    os << "  " << (fine ? "valid" : "invalid") << "\n";
    return fine ? ok : not_realizable;
}

int cmd_euler(const LyapunovGraph& g, const std::string& path, std::ostream& os) {
    os << path << "\n";
    if (!validate_graph(g).empty() || !g.closed()) {
        os << "  graph must be valid and closed\n";
        return not_realizable;
    }
    auto ft = fold_totals(g);
    os << "  euler_conley " << euler_conley(g) << "\n";
    os << "  euler_gs " << euler_gs(g).str() << "\n";
    os << "  folds in " << ft.fin << " out " << ft.fout << " " << (ft.fin == ft.fout ? "balanced" : "unbalanced")
       << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov graph realizability for GS flows"};
    app.require_subcommand(1);
    unsigned jobs = 1;
    app.add_option("--jobs,-j", jobs, "files processed concurrently")->check(CLI::Range(1u, 256u));

    std::vector<std::string> files;

    auto* validate = app.add_subcommand("validate", "structure and per-vertex Poincare-Hopf report");
    validate->add_option("files", files)->required();

    auto* realize_cmd = app.add_subcommand("realize", "decide realizability, print a JSON report");
    realize_cmd->add_option("files", files)->required();
    std::optional<int> search_bound;
    realize_cmd->add_option("--search-bound", search_bound, "exhaustive search up to this edge weight")
        ->check(CLI::Range(1, 12));

    auto* euler = app.add_subcommand("euler", "both Euler characteristics and fold balance");
    euler->add_option("files", files)->required();

    auto* enumerate = app.add_subcommand("enumerate", "connected branched 1-manifolds of a weight");
    int weight = 0;
    enumerate->add_option("--weight", weight)->required();

    auto* catalog = app.add_subcommand("catalog", "minimal GS isolating blocks");
    std::string type_filter;
    catalog->add_option("--type", type_filter, "R, C, W, D or T");

    auto* dot = app.add_subcommand("export-dot", "Graphviz rendering of a graph document");
    dot->add_option("files", files)->required();

    auto* gen = app.add_subcommand("gen-random", "seeded random GS graph");
    GenOptions go;
    gen->add_option("--seed", go.seed)->required();
    gen->add_option("--vertices", go.vertices)->default_val(8);
    gen->add_option("--max-weight", go.max_weight)->default_val(6);
    gen->add_flag("--minimal", go.minimal);
    gen->add_flag("--fold-balanced", go.fold_balanced);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    if (validate->parsed()) return batch(files, jobs, cmd_validate);
    if (euler->parsed()) return batch(files, jobs, cmd_euler);

    if (realize_cmd->parsed()) {
        const bool many = files.size() > 1;
        int code = batch(files, jobs, [&](const LyapunovGraph& g, const std::string& path, std::ostream& os) {
            auto v = realize(g, {search_bound, many ? 1u : jobs});
            auto j = report_json(g, v);
            if (many) j["file"] = path;
            os << j.dump(2) << "\n";
            switch (v.status) {
                case RealizationVerdict::Status::RealizableBy: return static_cast<int>(ok);
                case RealizationVerdict::Status::NotRealizable: return static_cast<int>(not_realizable);
                case RealizationVerdict::Status::Unknown: return static_cast<int>(unknown);
            }
            return static_cast<int>(unknown);
        });
        return code;
    }

    if (dot->parsed())
        return batch(files, jobs, [](const LyapunovGraph& g, const std::string&, std::ostream& os) {
            os << export_dot(g);
            return static_cast<int>(ok);
        });

    if (enumerate->parsed()) {
        const int bound = enumeration_bound();
        if (weight < 1 || weight > bound) {
            std::cerr << "weight " << weight << " outside 1.." << bound << " (bound too large; see GS_ENUM_BOUND)\n";
            return usage;
        }
        auto forms = enumerate_connected(weight, bound);
        for (const auto& f : forms) std::cout << f << "\n";
        std::cout << "count " << forms.size() << "\n";
        return ok;
    }

    if (catalog->parsed()) {
        std::optional<SingularityType> only;
        if (!type_filter.empty()) {
            only = parse_type(type_filter);
            if (!only) {
                std::cerr << "unknown type '" << type_filter << "'\n";
                return usage;
            }
        }
        for (const auto& e : minimal_block_catalog()) {
            if (only && e.label.type != *only) continue;
            std::cout << e.label.str() << " (" << e.e_plus << "," << e.e_minus << ")"
                      << " beta " << e.beta_in << "/" << e.beta_out;
            for (const auto& bp : e.boundary_pairs()) std::cout << "  [" << bp.str() << "]";
            std::cout << "\n";
        }
        auto c = catalog_counts();
        std::cout << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << " " << c[4] << " / "
                  << (c[0] + c[1] + c[2] + c[3] + c[4]) << "\n";
        return ok;
    }

    if (gen->parsed()) {
        try {
            std::cout << serialize(gen_random_gs_graph(go));
        } catch (const model_error& e) {
            std::cerr << e.what() << "\n";
            return usage;
        }
        return ok;
    }
    return usage;
}
