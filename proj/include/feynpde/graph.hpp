#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feynpde/error.hpp"

namespace feynpde {

struct Vertex {
    std::string name;
    bool external = false;
};

struct Line {
    std::string name;
    int a = 0;            // dense endpoint indices
    int b = 0;
    bool massive = true;
};

// Subset of the line set as a bitmask (bit i <-> line index i).
struct EdgeSubset {
    std::uint64_t bits = 0;

    bool contains(int line) const { return (bits >> line) & 1u; }
    EdgeSubset with(int line) const { return {bits | (1ull << line)}; }
    int size() const { return __builtin_popcountll(bits); }
    bool operator==(const EdgeSubset& o) const { return bits == o.bits; }
};

// Lexicographic order on the sorted tuples of contained line indices:
// {0} < {0,2} is not comparable in our use (fixed sizes), {0,1} < {0,2} < {1,2}.
bool edge_subset_lex_less(const EdgeSubset& a, const EdgeSubset& b);

// Subset of the external vertices as a bitmask over external positions.
using ExtSubset = std::uint32_t;

struct VertexSpec {
    std::string id;
    bool external = false;
};

struct LineSpec {
    std::string id;
    std::string from;
    std::string to;
    bool massive = true;
};

struct DiagramSpec {
    std::string name;
    int dimension = 2;
    std::vector<VertexSpec> vertices;
    std::vector<LineSpec> lines;
};

// A Feynman diagram: vertices partitioned into external/internal, lines into
// massive/massless, with a spacetime dimension. Self-loops and parallel lines
// are legal. Immutable after construction.
class Diagram {
public:
    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }   // n
    int line_count() const { return static_cast<int>(lines_.size()); }        // N
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Line>& lines() const { return lines_; }

    // Dense indices of the external vertices, in vertex order.
    const std::vector<int>& externals() const { return externals_; }
    int external_count() const { return static_cast<int>(externals_.size()); }

    int component_count() const;             // c
    bool connected() const { return component_count() == 1; }

    int vertex_index(const std::string& id) const;

    friend Diagram build_diagram(const DiagramSpec& spec);

private:
    std::string name_;
    int dimension_ = 2;
    std::vector<Vertex> vertices_;
    std::vector<Line> lines_;
    std::vector<int> externals_;
};

Diagram build_diagram(const DiagramSpec& spec);

// The h-loop ladder: two rails of h+1 vertices (u0..uh, v0..vh), rungs
// u_i-v_i, then top rails u_i-u_{i+1}, then bottom rails v_i-v_{i+1}.
// External corners ordered u0, v0, vh, uh. N = 3h+1, n = 2h+2.
Diagram build_ladder(int h, int dimension);

// h = N - n + c, the cycle-space rank.
int loop_number(const Diagram& d);

// All spanning trees, deterministic lex order on line-index tuples.
std::vector<EdgeSubset> spanning_trees(const Diagram& d);

// All spanning 2-trees whose two components separate chi from its complement
// within the external vertices. chi is a bitmask over external positions.
std::vector<EdgeSubset> spanning_2trees(const Diagram& d, ExtSubset chi);

// Validates chi: non-empty proper subset of the externals.
void check_chi(const Diagram& d, ExtSubset chi);

ExtSubset full_external_set(const Diagram& d);
ExtSubset complement_chi(const Diagram& d, ExtSubset chi);

// Canonical representative of the pair {chi, complement}: the lex-smaller mask.
ExtSubset canonical_chi(const Diagram& d, ExtSubset chi);

std::string chi_to_string(const Diagram& d, ExtSubset chi);

} // namespace feynpde
