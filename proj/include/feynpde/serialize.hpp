#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "feynpde/graph.hpp"
#include "feynpde/pde.hpp"
#include "feynpde/symanzik.hpp"
#include "feynpde/verify.hpp"

namespace feynpde {

using Json = nlohmann::ordered_json;

// ---- diagram files ----

DiagramSpec diagram_spec_from_json(const Json& j);
Json diagram_spec_to_json(const DiagramSpec& spec);

// Optional basis subsets carried in the diagram file, as vertex-id lists.
std::vector<ExtSubset> basis_subsets_from_json(const Diagram& d, const Json& j);
Json basis_subsets_to_json(const Diagram& d, const std::vector<ExtSubset>& subsets);

// SHA-256 of the canonical (compact, field-ordered) serialization.
std::string diagram_hash(const DiagramSpec& spec);
std::string sha256_hex(const std::string& bytes);

// ---- polynomial / operator files ----

Json poly_to_json(const Poly& p);
Poly poly_from_json(const AlphabetPtr& alph, const Json& j);

Json operator_pair_to_json(const DiagramPolys& ctx, const OperatorPair& pair,
                           const GriffithsCertificate* cert);

struct LoadedPair {
    OperatorPair pair;
    std::optional<GriffithsCertificate> certificate;
};

LoadedPair operator_pair_from_json(const DiagramPolys& ctx, const Json& j);

struct OperatorFile {
    std::string diagram_hash;
    std::string mode; // thm1 | thm2 | derive
    int order_p = 0;
    int kernel_dimension = -1; // derive mode only
    std::vector<LoadedPair> pairs;
};

Json operator_file_to_json(const DiagramPolys& ctx, const std::string& diagram_hash,
                           const std::string& mode, int kernel_dimension,
                           const std::vector<OperatorPair>& pairs,
                           const std::vector<GriffithsCertificate>& certs);

OperatorFile operator_file_from_json(const DiagramPolys& ctx, const Json& j);

std::string certificate_hash(const GriffithsCertificate& cert);

// ---- io helpers ----

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);
Json parse_json_file(const std::string& path);

} // namespace feynpde
