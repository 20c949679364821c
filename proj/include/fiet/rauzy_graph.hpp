#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fiet/error.hpp"
#include "fiet/induction.hpp"

namespace fiet {

struct Successor {
    Case which = Case::A;
    SignedPermutation target;  // labelled, as produced by the transition
    bool hole = false;         // target is reducible
    Symbol winner = 0;
    Symbol loser = 0;
};

// Both case-labelled successors; none for n = 1. Throws InvalidArgument for
// reducible input.
std::vector<Successor> successors(const SignedPermutation& p);

struct GraphEdge {
    std::size_t from = 0;
    Case which = Case::A;
    std::size_t to = 0;  // RauzyGraph::kHole for the hole
};

// Vertices are canonical permutations in breadth-first discovery order; the
// hole is a sentinel index with no outgoing edges.
class RauzyGraph {
public:
    static constexpr std::size_t kHole = std::numeric_limits<std::size_t>::max();

    std::size_t size() const { return vertices_.size(); }
    const std::vector<SignedPermutation>& vertices() const { return vertices_; }
    const SignedPermutation& vertex(std::size_t i) const { return vertices_.at(i); }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    // Edges leaving v, case A first.
    std::vector<GraphEdge> out_edges(std::size_t v) const;
    bool reaches_hole() const;

    // Index of the canonical form of p, if present.
    std::optional<std::size_t> find(const SignedPermutation& p) const;
    bool contains(const SignedPermutation& p) const { return find(p).has_value(); }

    std::size_t add_vertex(const SignedPermutation& canonical);
    void add_edge(GraphEdge e) { edges_.push_back(e); }

    // {"vertices": [text], "edges": [{"from", "case", "to" | "HOLE"}]}
    std::string to_json() const;
    static RauzyGraph from_json(const std::string& text);

private:
    std::vector<SignedPermutation> vertices_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<GraphEdge> edges_;
};

class LimitExceeded : public Error {
public:
    LimitExceeded(const std::string& what, RauzyGraph partial) : Error(what), partial_(std::move(partial)) {}
    const RauzyGraph& partial() const { return partial_; }

private:
    RauzyGraph partial_;
};

// Breadth-first closure under successors. Throws LimitExceeded when more than
// `limit` vertices would be needed.
RauzyGraph build_graph(const SignedPermutation& seed, std::size_t limit = 100000);

// Weakly connected components of the successor graph on all irreducible
// signed permutations of size n (hole edges ignored), ordered by their first
// vertex in lexicographic order.
std::vector<RauzyGraph> rauzy_classes(std::size_t n, std::size_t limit = 5);

struct ClassCounts {
    std::size_t with_signs = 0;  // over all irreducible signed permutations
    std::size_t flip_free = 0;   // over irreducible permutations with F empty
};
ClassCounts class_counts(std::size_t n, std::size_t limit = 5);

// Shortest hole-avoiding path from `from` to a vertex with the canonical form
// of `to`, replayed from the labelled permutation `from`.
std::optional<RauzyPath> find_path(const RauzyGraph& g, const SignedPermutation& from, const SignedPermutation& to);

// Shortest loop at `at` (up to relabelling) whose induction matrix is
// positive; with `neat`, loops with a border are skipped. Breadth-first over
// (labelled permutation, zero pattern of R).
std::optional<RauzyPath> find_positive_loop(const RauzyGraph& g, const SignedPermutation& at, std::size_t max_len,
                                            bool neat = false);

}  // namespace fiet
