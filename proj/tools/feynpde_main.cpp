// feynpde: Symanzik polynomials, Griffiths pole reduction, and certified PDE
// systems for Feynman parametric integrals.
//
// Exit codes: 0 ok, 2 parse/validation failure, 3 empty derivation kernel,
// 4 exponent-regime violation, 5 certification failure, 6 numeric
// precondition failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "feynpde/graph.hpp"
#include "feynpde/pde.hpp"
#include "feynpde/serialize.hpp"
#include "feynpde/symanzik.hpp"
#include "feynpde/verify.hpp"

namespace {

using namespace feynpde;

constexpr int kExitParse = 2;
constexpr int kExitEmptyKernel = 3;
constexpr int kExitRegime = 4;
constexpr int kExitCertification = 5;
constexpr int kExitNumeric = 6;

struct ExitWith {
    int code;
    std::string message;
};

struct LoadedDiagram {
    DiagramSpec spec;
    Diagram diagram;
    InvariantBasis basis;
    std::string hash;
};

LoadedDiagram load_diagram(const std::string& path) {
    LoadedDiagram out;
    Json j;
    try {
        j = parse_json_file(path);
        out.spec = diagram_spec_from_json(j);
        out.diagram = build_diagram(out.spec);
    } catch (const std::exception& e) {
        throw ExitWith{kExitParse, e.what()};
    }
    out.hash = diagram_hash(out.spec);
    try {
        if (j.contains("basis")) {
            out.basis = make_basis(out.diagram, basis_subsets_from_json(out.diagram, j["basis"]));
        } else {
            out.basis = default_basis(out.diagram);
        }
    } catch (const std::exception& e) {
        throw ExitWith{kExitParse, e.what()};
    }
    return out;
}

DiagramPolys build_context(const LoadedDiagram& ld) {
    try {
        return build_diagram_polys(ld.diagram, ld.basis);
    } catch (const std::exception& e) {
        throw ExitWith{kExitParse, e.what()};
    }
}

void require_regime(const DiagramPolys& ctx) {
    if (!ctx.regime.valid())
        throw ExitWith{kExitRegime,
                       "exponent regime violated: k = " + std::to_string(ctx.regime.k) +
                           ", a = " + std::to_string(ctx.regime.a) +
                           " (need k >= 1 and a >= 0); the pole order vanishes in this "
                           "dimension"};
}

int cmd_polys(const std::string& diagram_path, const std::string& format) {
    LoadedDiagram ld = load_diagram(diagram_path);
    DiagramPolys ctx = build_context(ld);
    const Diagram& d = ld.diagram;

    PropertyPReport prop = check_property_p(d, ctx.basis);

    if (format == "json") {
        Json j;
        j["diagram"] = ld.spec.name;
        j["diagram_hash"] = ld.hash;
        j["loop_number"] = loop_number(d);
        j["U"] = ctx.u.render();
        Json ws = Json::array();
        for (int i = 0; i < ctx.basis.size(); ++i)
            ws.push_back(Json{{"chi", chi_to_string(d, ctx.basis.subsets[i])},
                              {"W", w_polynomial(d, ctx.alph, ctx.basis.subsets[i]).render()}});
        j["W"] = std::move(ws);
        j["Q"] = ctx.q.poly.render();
        j["property_P"] = prop.holds;
        if (!prop.holds) {
            Json off = Json::array();
            for (ExtSubset chi : prop.offenders) off.push_back(chi_to_string(d, chi));
            j["property_P_offenders"] = std::move(off);
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    std::cout << "diagram " << ld.spec.name << " (N=" << d.line_count()
              << ", n=" << d.vertex_count() << ", h=" << loop_number(d)
              << ", D=" << d.dimension() << ")\n";
    std::cout << "U = " << ctx.u.render() << "\n";
    for (int i = 0; i < ctx.basis.size(); ++i) {
        Poly w = w_polynomial(d, ctx.alph, ctx.basis.subsets[i]);
        std::cout << "W[s" << i + 1 << " = s" << chi_to_string(d, ctx.basis.subsets[i])
                  << "] = " << w.render() << "\n";
    }
    std::cout << "Q = " << ctx.q.poly.render() << "\n";
    if (prop.holds) {
        std::cout << "property (P) holds for this basis\n";
    } else {
        std::cout << "property (P) FAILS; nonzero W outside the basis:";
        for (ExtSubset chi : prop.offenders) std::cout << " " << chi_to_string(d, chi);
        std::cout << "\n";
    }
    return 0;
}

int cmd_generate(const std::string& kind, int h, int dim, const std::string& out_path) {
    DiagramSpec spec;
    std::optional<std::vector<ExtSubset>> basis;
    if (kind == "ladder" || kind == "box") {
        const int loops = (kind == "box") ? 1 : h;
        Diagram lad = build_ladder(loops, dim == 0 ? 4 : dim);
        spec.name = (kind == "box") ? "box" : ("ladder" + std::to_string(loops));
        spec.dimension = lad.dimension();
        for (const auto& v : lad.vertices()) spec.vertices.push_back({v.name, v.external});
        for (const auto& l : lad.lines())
            spec.lines.push_back(
                {l.name, lad.vertices()[l.a].name, lad.vertices()[l.b].name, l.massive});
        basis = std::vector<ExtSubset>{0b0001, 0b0010, 0b0100, 0b1000, 0b0011, 0b0110};
    } else if (kind == "bubble") {
        spec.name = "bubble";
        spec.dimension = dim == 0 ? 2 : dim;
        spec.vertices = {{"V1", true}, {"V2", true}};
        spec.lines = {{"l1", "V1", "V2", true}, {"l2", "V1", "V2", true}};
    } else if (kind == "triangle") {
        spec.name = "triangle";
        spec.dimension = dim == 0 ? 2 : dim;
        spec.vertices = {{"V1", true}, {"V2", true}, {"V3", true}};
        spec.lines = {{"l1", "V1", "V2", true},
                      {"l2", "V2", "V3", true},
                      {"l3", "V3", "V1", true}};
    } else {
        throw ExitWith{kExitParse, "unknown generator '" + kind + "'"};
    }

    Diagram d = build_diagram(spec);
    Json j = diagram_spec_to_json(spec);
    if (basis) j["basis"] = basis_subsets_to_json(d, *basis);
    const std::string bytes = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << bytes;
    else
        write_file(out_path, bytes);
    return 0;
}

int cmd_pde(const std::string& diagram_path, const std::string& mode, int order, int coeff_degree,
            const std::string& out_path) {
    LoadedDiagram ld = load_diagram(diagram_path);
    DiagramPolys ctx = build_context(ld);
    require_regime(ctx);

    std::vector<OperatorPair> pairs;
    std::vector<GriffithsCertificate> certs;
    int kernel_dim = -1;
    try {
        if (mode == "thm1") {
            CertifiedSystem sys = theorem1_system_certified(ld.diagram, ctx);
            pairs = std::move(sys.pairs);
            certs = std::move(sys.certificates);
        } else if (mode == "thm2") {
            CertifiedSystem sys = theorem2_system_certified(ld.diagram, ctx);
            pairs = std::move(sys.pairs);
            certs = std::move(sys.certificates);
        } else if (mode == "derive") {
            DeriveResult res = derive_general(ld.diagram, ctx, order, coeff_degree);
            pairs = std::move(res.pairs);
            certs = std::move(res.certificates);
            kernel_dim = res.kernel_dimension;
        } else {
            throw ExitWith{kExitParse, "unknown mode '" + mode + "' (thm1|thm2|derive)"};
        }
    } catch (const ExitWith&) {
        throw;
    } catch (const Error& e) {
        const std::string what = e.what();
        if (what.find("regime") != std::string::npos ||
            what.find("property (P)") != std::string::npos)
            throw ExitWith{kExitRegime, what};
        throw ExitWith{kExitCertification, what};
    }

    if (mode == "derive" && pairs.empty())
        throw ExitWith{kExitEmptyKernel, "derivation kernel contains no nontrivial operator"};

    Json j = operator_file_to_json(ctx, ld.hash, mode, kernel_dim, pairs, certs);
    const std::string bytes = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << bytes;
    else
        write_file(out_path, bytes);
    std::cerr << "wrote " << pairs.size() << " certified pair(s)\n";
    return 0;
}

NumericConfig numeric_config_from_file(const DiagramPolys& ctx, const std::string& path) {
    Json j = parse_json_file(path);
    NumericConfig cfg;
    require(j.contains("s") && j["s"].is_array(), "point file: missing array 's'");
    require(j.contains("z") && j["z"].is_array(), "point file: missing array 'z'");
    for (const auto& v : j["s"]) cfg.s_point.push_back(rational_from_string(v.get<std::string>()));
    for (const auto& v : j["z"]) cfg.z_point.push_back(rational_from_string(v.get<std::string>()));
    require(static_cast<int>(cfg.s_point.size()) == ctx.alph->s_count(),
            "point file: expected " + std::to_string(ctx.alph->s_count()) + " s values");
    require(static_cast<int>(cfg.z_point.size()) == ctx.alph->z_count(),
            "point file: expected " + std::to_string(ctx.alph->z_count()) + " z values");
    cfg.nodes_per_axis = j.value("nodes", 32);
    cfg.step_s = j.value("step_s", 1e-3);
    cfg.step_z = j.value("step_z", 1e-3);
    return cfg;
}

int cmd_verify(const std::string& diagram_path, const std::string& operator_path,
               const std::string& point_path, double residual_threshold,
               const std::string& format) {
    LoadedDiagram ld = load_diagram(diagram_path);
    DiagramPolys ctx = build_context(ld);
    require_regime(ctx);

    OperatorFile file;
    try {
        Json j = parse_json_file(operator_path);
        if (j.is_object() && j.value("diagram_hash", std::string()) != ld.hash)
            throw Error("operator file was produced for a different diagram (hash mismatch)");
        file = operator_file_from_json(ctx, j);
    } catch (const std::exception& e) {
        throw ExitWith{kExitParse, e.what()};
    }

    std::optional<NumericConfig> numeric;
    if (!point_path.empty()) {
        try {
            numeric = numeric_config_from_file(ctx, point_path);
        } catch (const std::exception& e) {
            throw ExitWith{kExitParse, e.what()};
        }
        if (!pole_free_check(ld.diagram, ctx, *numeric))
            throw ExitWith{kExitNumeric,
                           "pole-free check failed: Q changes sign or vanishes on the simplex "
                           "at the given point"};
    }

    Json report;
    report["diagram_hash"] = ld.hash;
    report["pairs"] = Json::array();
    bool all_ok = true;
    std::string first_failure;

    for (const auto& lp : file.pairs) {
        Json entry;
        entry["label"] = lp.pair.label;
        CertifyResult res = certify(ld.diagram, ctx, lp.pair);
        const bool cert_ok = res.ok();
        entry["certified"] = cert_ok;
        if (cert_ok) entry["certificate_sha256"] = certificate_hash(*res.certificate);
        bool pair_ok = cert_ok;
        if (cert_ok && numeric) {
            const double r = numeric_residual(ld.diagram, ctx, lp.pair, *numeric);
            entry["numeric_residual"] = r;
            entry["residual_threshold"] = residual_threshold;
            if (!(r <= residual_threshold)) pair_ok = false;
        }
        if (!pair_ok && first_failure.empty()) first_failure = lp.pair.label;
        all_ok = all_ok && pair_ok;
        report["pairs"].push_back(std::move(entry));
    }
    report["all_ok"] = all_ok;

    if (format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& entry : report["pairs"]) {
            std::cout << entry["label"].get<std::string>() << ": "
                      << (entry["certified"].get<bool>() ? "certified" : "FAILED");
            if (entry.contains("numeric_residual"))
                std::cout << ", numeric residual " << entry["numeric_residual"].get<double>();
            std::cout << "\n";
        }
        std::cout << (all_ok ? "all pairs verified" : "verification FAILED") << "\n";
    }
    if (!all_ok)
        throw ExitWith{kExitCertification, "verification failed for pair " + first_failure};
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symanzik polynomials and certified PDE systems for Feynman parametric "
                 "integrals"};
    app.require_subcommand(1);

    std::string diagram_path, out_path, operator_path, point_path;
    std::string mode = "thm1", format = "text", kind = "ladder";
    int order = 2, coeff_degree = 1, ladder_h = 1, dim = 0;
    double residual_threshold = 1e-4;

    CLI::App* polys = app.add_subcommand("polys", "print U, the basis W's and Q");
    polys->add_option("diagram", diagram_path, "diagram file (JSON)")->required();
    polys->add_option("--format", format, "text|json");

    CLI::App* generate = app.add_subcommand("generate", "write a canonical diagram file");
    generate->add_option("kind", kind, "ladder|box|bubble|triangle");
    generate->add_option("--ladder", ladder_h, "h-loop ladder with the given loop count");
    generate->add_flag("--bubble", "two parallel massive lines");
    generate->add_flag("--triangle", "one-loop triangle, all vertices external");
    generate->add_flag("--box", "one-loop box (ladder with one loop)");
    generate->add_option("--ladder-loops", ladder_h, "loop count for kind=ladder");
    generate->add_option("-D,--dimension", dim, "spacetime dimension (default 4 ladder/box, 2 otherwise)");
    generate->add_option("-o,--out", out_path, "output path (default stdout)");

    CLI::App* pde = app.add_subcommand("pde", "derive and certify a PDE system");
    pde->add_option("diagram", diagram_path, "diagram file (JSON)")->required();
    pde->add_option("--mode", mode, "thm1|thm2|derive")->required();
    pde->add_option("--order", order, "derivative order p (derive mode)");
    pde->add_option("--coeff-degree", coeff_degree, "(s,z)-degree bound of the ansatz (derive mode)");
    pde->add_option("-o,--out", out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "re-certify an operator file");
    verify->add_option("diagram", diagram_path, "diagram file (JSON)")->required();
    verify->add_option("operators", operator_path, "operator file (JSON)")->required();
    verify->add_option("--numeric", point_path, "Euclidean point file for numeric residuals");
    verify->add_option("--residual-threshold", residual_threshold, "numeric residual bound");
    verify->add_option("--format", format, "text|json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (polys->parsed()) return cmd_polys(diagram_path, format);
        if (generate->parsed()) {
            std::string chosen = generate->count("kind") ? kind : "";
            if (generate->count("--ladder")) chosen = "ladder";
            if (generate->count("--bubble")) chosen = "bubble";
            if (generate->count("--triangle")) chosen = "triangle";
            if (generate->count("--box")) chosen = "box";
            if (chosen.empty())
                throw ExitWith{kExitParse,
                               "generate: pick one of ladder|box|bubble|triangle"};
            return cmd_generate(chosen, ladder_h, dim, out_path);
        }
        if (pde->parsed()) return cmd_pde(diagram_path, mode, order, coeff_degree, out_path);
        if (verify->parsed())
            return cmd_verify(diagram_path, operator_path, point_path, residual_threshold, format);
    } catch (const ExitWith& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}
