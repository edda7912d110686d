#include "feynpde/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace feynpde {

bool edge_subset_lex_less(const EdgeSubset& a, const EdgeSubset& b) {
    // Compare the sorted tuples of line indices element by element.
    std::uint64_t x = a.bits, y = b.bits;
    while (x != 0 && y != 0) {
        int ax = __builtin_ctzll(x);
        int by = __builtin_ctzll(y);
        if (ax != by) return ax < by;
        x &= x - 1;
        y &= y - 1;
    }
    return x == 0 && y != 0;
}

Diagram build_diagram(const DiagramSpec& spec) {
    require(!spec.vertices.empty(), "diagram has no vertices");
    require(spec.dimension >= 2 && spec.dimension % 2 == 0,
            "dimension D must be a positive even integer, got " + std::to_string(spec.dimension));

    Diagram d;
    d.name_ = spec.name;
    d.dimension_ = spec.dimension;

    std::map<std::string, int> index;
    for (const auto& vs : spec.vertices) {
        require(!vs.id.empty(), "vertex with empty id");
        require(index.find(vs.id) == index.end(), "duplicate vertex id '" + vs.id + "'");
        index[vs.id] = static_cast<int>(d.vertices_.size());
        d.vertices_.push_back({vs.id, vs.external});
    }
    for (const auto& ls : spec.lines) {
        auto ia = index.find(ls.from);
        auto ib = index.find(ls.to);
        require(ia != index.end(), "line '" + ls.id + "' references undeclared vertex '" + ls.from + "'");
        require(ib != index.end(), "line '" + ls.id + "' references undeclared vertex '" + ls.to + "'");
        d.lines_.push_back({ls.id, ia->second, ib->second, ls.massive});
    }
    require(!d.lines_.empty(), "diagram has no lines");
    require(d.lines_.size() <= 63, "too many lines for the edge-subset representation");

    for (int i = 0; i < d.vertex_count(); ++i)
        if (d.vertices_[i].external) d.externals_.push_back(i);
    return d;
}

Diagram build_ladder(int h, int dimension) {
    require(h >= 1, "ladder loop count must be >= 1, got " + std::to_string(h));
    DiagramSpec spec;
    spec.name = "ladder" + std::to_string(h);
    spec.dimension = dimension;

    auto u = [](int i) { return "u" + std::to_string(i); };
    auto v = [](int i) { return "v" + std::to_string(i); };

    // External corners first so that their labels are 1=u0, 2=v0, 3=vh, 4=uh.
    spec.vertices.push_back({u(0), true});
    spec.vertices.push_back({v(0), true});
    spec.vertices.push_back({v(h), true});
    spec.vertices.push_back({u(h), true});
    for (int i = 1; i < h; ++i) spec.vertices.push_back({u(i), false});
    for (int i = 1; i < h; ++i) spec.vertices.push_back({v(i), false});

    int id = 0;
    auto line = [&](const std::string& a, const std::string& b) {
        spec.lines.push_back({"l" + std::to_string(++id), a, b, true});
    };
    for (int i = 0; i <= h; ++i) line(u(i), v(i));          // rungs
    for (int i = 0; i < h; ++i) line(u(i), u(i + 1));       // top rail
    for (int i = 0; i < h; ++i) line(v(i), v(i + 1));       // bottom rail
    return build_diagram(spec);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// Backtracking enumeration of all acyclic spanning edge subsets with exactly
// `components` connected components. Lines are decided in index order with the
// include-branch first, which yields lex order on the resulting tuples.
// Self-loops can never be included (they close a cycle on their own).
template <typename Accept>
void enumerate_forests(const Diagram& d, int components, Accept&& accept) {
    const int n = d.vertex_count();
    const int N = d.line_count();
    const int target_edges = n - components;
    if (target_edges < 0) return;

    std::vector<int> chosen;
    chosen.reserve(target_edges);

    // Recursion with an explicit copy of union-find state per include-branch;
    // fine at desk scale.
    auto rec = [&](auto&& self, int next_line, int edges, const UnionFind& uf) -> void {
        if (edges == target_edges) {
            EdgeSubset s;
            for (int l : chosen) s.bits |= 1ull << l;
            accept(s);
            return;
        }
        if (next_line >= N) return;
        if (edges + (N - next_line) < target_edges) return; // cannot finish
        const Line& ln = d.lines()[next_line];
        // include branch
        if (ln.a != ln.b) {
            UnionFind uf2 = uf;
            if (uf2.unite(ln.a, ln.b)) {
                chosen.push_back(next_line);
                self(self, next_line + 1, edges + 1, uf2);
                chosen.pop_back();
            }
        }
        // exclude branch
        self(self, next_line + 1, edges, uf);
    };
    UnionFind uf(n);
    rec(rec, 0, 0, uf);
}

} // namespace

int Diagram::component_count() const {
    UnionFind uf(vertex_count());
    int c = vertex_count();
    for (const auto& ln : lines_)
        if (uf.unite(ln.a, ln.b)) --c;
    return c;
}

int Diagram::vertex_index(const std::string& id) const {
    for (int i = 0; i < vertex_count(); ++i)
        if (vertices_[i].name == id) return i;
    fail("unknown vertex id '" + id + "'");
}

int loop_number(const Diagram& d) {
    return d.line_count() - d.vertex_count() + d.component_count();
}

std::vector<EdgeSubset> spanning_trees(const Diagram& d) {
    require(d.connected(), "spanning_trees: diagram is disconnected");
    std::vector<EdgeSubset> out;
    enumerate_forests(d, 1, [&](const EdgeSubset& s) { out.push_back(s); });
    return out;
}

void check_chi(const Diagram& d, ExtSubset chi) {
    const ExtSubset full = full_external_set(d);
    require((chi & ~full) == 0, "chi contains non-external vertex positions");
    require(chi != 0, "chi must be non-empty");
    require(chi != full, "chi must be a proper subset of the external vertices");
}

ExtSubset full_external_set(const Diagram& d) {
    return (d.external_count() >= 32) ? ~ExtSubset(0)
                                      : ((ExtSubset(1) << d.external_count()) - 1);
}

ExtSubset complement_chi(const Diagram& d, ExtSubset chi) {
    return full_external_set(d) & ~chi;
}

ExtSubset canonical_chi(const Diagram& d, ExtSubset chi) {
    ExtSubset co = complement_chi(d, chi);
    return std::min(chi, co);
}

std::string chi_to_string(const Diagram& d, ExtSubset chi) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (int i = 0; i < d.external_count(); ++i) {
        if (!((chi >> i) & 1u)) continue;
        if (!first) out << ",";
        first = false;
        out << d.vertices()[d.externals()[i]].name;
    }
    out << "}";
    return out.str();
}

std::vector<EdgeSubset> spanning_2trees(const Diagram& d, ExtSubset chi) {
    require(d.connected(), "spanning_2trees: diagram is disconnected");
    check_chi(d, chi);

    // Map each vertex to its side: +1 (chi), -1 (complement), 0 (internal).
    std::vector<int> side(d.vertex_count(), 0);
    for (int i = 0; i < d.external_count(); ++i)
        side[d.externals()[i]] = ((chi >> i) & 1u) ? +1 : -1;

    std::vector<EdgeSubset> out;
    enumerate_forests(d, 2, [&](const EdgeSubset& s) {
        UnionFind uf(d.vertex_count());
        for (int l = 0; l < d.line_count(); ++l)
            if (s.contains(l)) uf.unite(d.lines()[l].a, d.lines()[l].b);
        // The two components must separate chi from its complement.
        int chi_root = -1, co_root = -1;
        bool ok = true;
        for (int v = 0; v < d.vertex_count() && ok; ++v) {
            if (side[v] == +1) {
                int r = uf.find(v);
                if (chi_root == -1) chi_root = r;
                ok = r == chi_root;
            } else if (side[v] == -1) {
                int r = uf.find(v);
                if (co_root == -1) co_root = r;
                ok = r == co_root;
            }
        }
        if (ok && chi_root != co_root) out.push_back(s);
    });
    return out;
}

} // namespace feynpde
