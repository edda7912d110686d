#include "feynpde/serialize.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace feynpde {

// ---- diagram files ----

DiagramSpec diagram_spec_from_json(const Json& j) {
    DiagramSpec spec;
    require(j.is_object(), "diagram file: top level must be an object");
    require(j.contains("D"), "diagram file: missing field 'D'");
    require(j["D"].is_number_integer(), "diagram file: field 'D' must be an integer");
    spec.dimension = j["D"].get<int>();
    spec.name = j.value("name", std::string("diagram"));

    require(j.contains("vertices") && j["vertices"].is_array(),
            "diagram file: missing array field 'vertices'");
    for (const auto& v : j["vertices"]) {
        require(v.is_object() && v.contains("id"), "diagram file: vertex without 'id'");
        VertexSpec vs;
        vs.id = v["id"].get<std::string>();
        vs.external = v.value("external", false);
        spec.vertices.push_back(std::move(vs));
    }
    require(j.contains("lines") && j["lines"].is_array(),
            "diagram file: missing array field 'lines'");
    for (const auto& l : j["lines"]) {
        require(l.is_object() && l.contains("id") && l.contains("from") && l.contains("to"),
                "diagram file: line needs 'id', 'from' and 'to'");
        LineSpec ls;
        ls.id = l["id"].get<std::string>();
        ls.from = l["from"].get<std::string>();
        ls.to = l["to"].get<std::string>();
        ls.massive = l.value("massive", true);
        spec.lines.push_back(std::move(ls));
    }
    return spec;
}

Json diagram_spec_to_json(const DiagramSpec& spec) {
    Json j;
    j["name"] = spec.name;
    j["D"] = spec.dimension;
    j["vertices"] = Json::array();
    for (const auto& v : spec.vertices)
        j["vertices"].push_back(Json{{"id", v.id}, {"external", v.external}});
    j["lines"] = Json::array();
    for (const auto& l : spec.lines)
        j["lines"].push_back(
            Json{{"id", l.id}, {"from", l.from}, {"to", l.to}, {"massive", l.massive}});
    return j;
}

std::vector<ExtSubset> basis_subsets_from_json(const Diagram& d, const Json& j) {
    require(j.is_array(), "diagram file: 'basis' must be an array of vertex-id lists");
    std::vector<ExtSubset> subsets;
    for (const auto& entry : j) {
        require(entry.is_array(), "diagram file: each basis subset must be a list of vertex ids");
        ExtSubset chi = 0;
        for (const auto& id : entry) {
            const int vi = d.vertex_index(id.get<std::string>());
            int pos = -1;
            for (int e = 0; e < d.external_count(); ++e)
                if (d.externals()[e] == vi) pos = e;
            require(pos >= 0, "basis subset contains non-external vertex '" +
                                  id.get<std::string>() + "'");
            chi |= ExtSubset(1) << pos;
        }
        subsets.push_back(chi);
    }
    return subsets;
}

Json basis_subsets_to_json(const Diagram& d, const std::vector<ExtSubset>& subsets) {
    Json j = Json::array();
    for (ExtSubset chi : subsets) {
        Json entry = Json::array();
        for (int e = 0; e < d.external_count(); ++e)
            if ((chi >> e) & 1u) entry.push_back(d.vertices()[d.externals()[e]].name);
        j.push_back(std::move(entry));
    }
    return j;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string diagram_hash(const DiagramSpec& spec) {
    return sha256_hex(diagram_spec_to_json(spec).dump());
}

// ---- polynomials and operators ----

Json poly_to_json(const Poly& p) {
    Json terms = Json::array();
    // Leading term first (descending canonical order).
    const auto& m = p.terms();
    for (auto it = m.rbegin(); it != m.rend(); ++it) {
        Json t;
        t["c"] = rational_to_string(it->second);
        t["e"] = it->first;
        terms.push_back(std::move(t));
    }
    return terms;
}

Poly poly_from_json(const AlphabetPtr& alph, const Json& j) {
    require(j.is_array(), "polynomial: expected an array of terms");
    Poly p(alph);
    for (const auto& t : j) {
        require(t.is_object() && t.contains("c") && t.contains("e"),
                "polynomial term needs 'c' and 'e'");
        Exponents e = t["e"].get<Exponents>();
        require(static_cast<int>(e.size()) == alph->size(),
                "polynomial term exponent length mismatch");
        p.add_term(e, rational_from_string(t["c"].get<std::string>()));
    }
    return p;
}

namespace {

Json operator_to_json(const DiffOperator& op) {
    Json terms = Json::array();
    const auto& m = op.terms();
    for (auto it = m.rbegin(); it != m.rend(); ++it) {
        Json t;
        t["d"] = it->first; // derivative multi-index over the full alphabet
        t["coeff"] = poly_to_json(it->second);
        terms.push_back(std::move(t));
    }
    return terms;
}

DiffOperator operator_from_json(const AlphabetPtr& alph, const Json& j) {
    require(j.is_array(), "operator: expected an array of terms");
    DiffOperator op(alph);
    for (const auto& t : j) {
        require(t.is_object() && t.contains("d") && t.contains("coeff"),
                "operator term needs 'd' and 'coeff'");
        Exponents key = t["d"].get<Exponents>();
        require(static_cast<int>(key.size()) == alph->size(),
                "operator term key length mismatch");
        op.add_term(key, poly_from_json(alph, t["coeff"]));
    }
    return op;
}

} // namespace

Json operator_pair_to_json(const DiagramPolys&, const OperatorPair& pair,
                           const GriffithsCertificate* cert) {
    Json j;
    j["label"] = pair.label;
    j["order"] = pair.order_p;
    j["c_p"] = pair.c_p.get_str();
    j["c_pm1"] = pair.c_pm1.get_str();
    j["principal"] = operator_to_json(pair.principal);
    j["tail"] = operator_to_json(pair.tail);
    if (cert) {
        Json lambdas = Json::array();
        for (const Poly& l : cert->lambdas) lambdas.push_back(poly_to_json(l));
        j["certificate"] = Json{{"lambdas", std::move(lambdas)}};
    }
    return j;
}

LoadedPair operator_pair_from_json(const DiagramPolys& ctx, const Json& j) {
    require(j.is_object(), "operator pair: expected an object");
    LoadedPair lp;
    lp.pair.label = j.value("label", std::string("pair"));
    require(j.contains("order"), "operator pair: missing 'order'");
    lp.pair.order_p = j["order"].get<int>();
    require(j.contains("c_p") && j.contains("c_pm1"), "operator pair: missing prefactors");
    lp.pair.c_p = Integer(j["c_p"].get<std::string>());
    lp.pair.c_pm1 = Integer(j["c_pm1"].get<std::string>());
    require(j.contains("principal") && j.contains("tail"),
            "operator pair: missing 'principal' or 'tail'");
    lp.pair.principal = operator_from_json(ctx.alph, j["principal"]);
    lp.pair.tail = operator_from_json(ctx.alph, j["tail"]);
    if (j.contains("certificate")) {
        const Json& c = j["certificate"];
        require(c.is_object() && c.contains("lambdas"), "certificate: missing 'lambdas'");
        GriffithsCertificate cert;
        for (const auto& l : c["lambdas"]) cert.lambdas.push_back(poly_from_json(ctx.alph, l));
        require(static_cast<int>(cert.lambdas.size()) == ctx.alph->alpha_count(),
                "certificate: one lambda per line expected");
        // Reconstruct the derived fields from the lambdas.
        cert.target_r = Poly(ctx.alph);
        cert.reduced = Poly(ctx.alph);
        for (int nu = 0; nu < ctx.alph->alpha_count(); ++nu) {
            cert.target_r += cert.lambdas[nu] * ctx.q_alpha[nu];
            cert.reduced += cert.lambdas[nu].partial_derivative(ctx.alph->alpha_var(nu));
        }
        cert.stokes = true;
        lp.certificate = std::move(cert);
    }
    return lp;
}

Json operator_file_to_json(const DiagramPolys& ctx, const std::string& diagram_hash,
                           const std::string& mode, int kernel_dimension,
                           const std::vector<OperatorPair>& pairs,
                           const std::vector<GriffithsCertificate>& certs) {
    require(certs.empty() || certs.size() == pairs.size(),
            "operator file: certificate count mismatch");
    Json j;
    j["format"] = "feynpde-operators-v1";
    j["diagram_hash"] = diagram_hash;
    j["mode"] = mode;
    j["prefactors"] = Json{{"k", ctx.regime.k}, {"a", ctx.regime.a}, {"q", ctx.regime.q}};
    if (kernel_dimension >= 0) j["kernel_dimension"] = kernel_dimension;
    j["pairs"] = Json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i)
        j["pairs"].push_back(
            operator_pair_to_json(ctx, pairs[i], certs.empty() ? nullptr : &certs[i]));
    return j;
}

OperatorFile operator_file_from_json(const DiagramPolys& ctx, const Json& j) {
    require(j.is_object(), "operator file: top level must be an object");
    require(j.value("format", std::string()) == "feynpde-operators-v1",
            "operator file: unknown format tag");
    OperatorFile f;
    f.diagram_hash = j.value("diagram_hash", std::string());
    f.mode = j.value("mode", std::string());
    f.kernel_dimension = j.value("kernel_dimension", -1);
    require(j.contains("pairs") && j["pairs"].is_array(), "operator file: missing 'pairs'");
    for (const auto& p : j["pairs"]) f.pairs.push_back(operator_pair_from_json(ctx, p));
    if (!f.pairs.empty()) f.order_p = f.pairs.front().pair.order_p;
    return f;
}

std::string certificate_hash(const GriffithsCertificate& cert) {
    Json lambdas = Json::array();
    for (const Poly& l : cert.lambdas) lambdas.push_back(poly_to_json(l));
    return sha256_hex(lambdas.dump());
}

// ---- io ----

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot write file '" + path + "'");
    out << bytes;
}

Json parse_json_file(const std::string& path) {
    const std::string bytes = read_file(path);
    Json j = Json::parse(bytes, nullptr, false);
    require(!j.is_discarded(), "file '" + path + "' is not valid JSON");
    return j;
}

} // namespace feynpde
