#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "feynpde/pde.hpp"
#include "feynpde/serialize.hpp"
#include "feynpde/verify.hpp"
#include "oracles.hpp"

using namespace feynpde;

TEST_CASE("polynomial JSON roundtrip is byte-identical") {
    auto alph = make_alphabet(2, 1, 2);
    std::mt19937_64 rng(8791231);
    for (int i = 0; i < 25; ++i) {
        Poly p = oracles::random_poly(alph, rng, 6, 4);
        const std::string once = poly_to_json(p).dump();
        Poly q = poly_from_json(alph, Json::parse(once));
        CHECK(q == p);
        CHECK(poly_to_json(q).dump() == once);
    }
}

TEST_CASE("diagram spec roundtrip and hash stability") {
    DiagramSpec spec;
    spec.name = "bubble";
    spec.dimension = 2;
    spec.vertices = {{"V1", true}, {"V2", true}};
    spec.lines = {{"l1", "V1", "V2", true}, {"l2", "V1", "V2", true}};

    Json j = diagram_spec_to_json(spec);
    DiagramSpec back = diagram_spec_from_json(j);
    CHECK(diagram_spec_to_json(back).dump() == j.dump());
    CHECK(diagram_hash(back) == diagram_hash(spec));

    DiagramSpec other = spec;
    other.lines[0].massive = false;
    CHECK(diagram_hash(other) != diagram_hash(spec));

    // sha256 of the empty string, a fixed reference value.
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("diagram file validation errors") {
    CHECK_THROWS_AS((void)diagram_spec_from_json(Json::parse("[]")), Error);
    CHECK_THROWS_AS((void)diagram_spec_from_json(Json::parse(R"({"D":2})")), Error);
    Json missing_to = Json::parse(
        R"({"D":2,"vertices":[{"id":"V1"}],"lines":[{"id":"l1","from":"V1"}]})");
    CHECK_THROWS_AS((void)diagram_spec_from_json(missing_to), Error);
}

TEST_CASE("basis subsets roundtrip") {
    Diagram box = build_ladder(1, 4);
    std::vector<ExtSubset> subsets{0b0001, 0b0010, 0b0100, 0b1000, 0b0011, 0b0110};
    Json j = basis_subsets_to_json(box, subsets);
    CHECK(basis_subsets_from_json(box, j) == subsets);

    Json unknown = Json::parse(R"([["nope"]])");
    CHECK_THROWS_AS((void)basis_subsets_from_json(box, unknown), Error);
}

TEST_CASE("operator file roundtrip is bit-exact and re-verifies") {
    Diagram d = oracles::bubble();
    auto ctx = build_diagram_polys(d, default_basis(d));
    auto sys = theorem1_system_certified(d, ctx);

    DiagramSpec spec;
    spec.name = "bubble";
    spec.dimension = 2;
    spec.vertices = {{"V1", true}, {"V2", true}};
    spec.lines = {{"l1", "V1", "V2", true}, {"l2", "V1", "V2", true}};

    Json file = operator_file_to_json(ctx, diagram_hash(spec), "thm1", -1, sys.pairs,
                                      sys.certificates);
    const std::string once = file.dump(2);

    OperatorFile loaded = operator_file_from_json(ctx, Json::parse(once));
    REQUIRE(loaded.pairs.size() == sys.pairs.size());
    CHECK(loaded.mode == "thm1");
    for (std::size_t i = 0; i < loaded.pairs.size(); ++i) {
        CHECK(loaded.pairs[i].pair.principal == sys.pairs[i].principal);
        CHECK(loaded.pairs[i].pair.tail == sys.pairs[i].tail);
        CHECK(loaded.pairs[i].pair.c_p == sys.pairs[i].c_p);
        REQUIRE(loaded.pairs[i].certificate.has_value());
        CHECK(check_certificate(*loaded.pairs[i].certificate, ctx.q_alpha));
    }

    // Re-serialization reproduces the same bytes.
    std::vector<OperatorPair> pairs2;
    std::vector<GriffithsCertificate> certs2;
    for (auto& lp : loaded.pairs) {
        pairs2.push_back(lp.pair);
        certs2.push_back(*lp.certificate);
    }
    Json file2 = operator_file_to_json(ctx, diagram_hash(spec), "thm1", -1, pairs2, certs2);
    CHECK(file2.dump(2) == once);
}

TEST_CASE("operator files load without certificates (optional on input)") {
    Diagram d = oracles::bubble();
    auto ctx = build_diagram_polys(d, default_basis(d));
    auto sys = theorem1_system_certified(d, ctx);
    Json file = operator_file_to_json(ctx, "h", "thm1", -1, sys.pairs, {});
    OperatorFile loaded = operator_file_from_json(ctx, file);
    REQUIRE(loaded.pairs.size() == sys.pairs.size());
    for (const auto& lp : loaded.pairs) {
        CHECK_FALSE(lp.certificate.has_value());
        // Re-certification from the bare pair still succeeds.
        CHECK(certify(d, ctx, lp.pair).ok());
    }
}

TEST_CASE("certificate hash is stable and content-sensitive") {
    Diagram d = oracles::bubble();
    auto ctx = build_diagram_polys(d, default_basis(d));
    auto sys = theorem1_system_certified(d, ctx);
    const std::string h1 = certificate_hash(sys.certificates[0]);
    CHECK(h1 == certificate_hash(sys.certificates[0]));
    CHECK(h1 != certificate_hash(sys.certificates[1]));
}
