#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>
#include <set>

#include "fiet/rauzy_graph.hpp"
#include "fiet/sampling.hpp"

using namespace fiet;

namespace {

// Successor read off an actual induction step with lengths chosen so that
// the requested case applies; no use of transition().
std::optional<std::string> stepped_successor(const SignedPermutation& p, Case c, Rng& rng) {
    const std::size_t n = p.size();
    std::vector<Scalar> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(Scalar::rational(random_unit_rational(rng, 30)));
    const Symbol a0 = p.top_at(n - 1), a1 = p.bottom_at(n - 1);
    Scalar big = v[a0] + v[a1];
    if (c == Case::A)
        v[a1] = big;
    else
        v[a0] = big;
    auto s = rauzy_step(FlipIET(p, LengthVector(std::move(v))));
    REQUIRE(s.arrow);
    REQUIRE(s.arrow->which == c);
    if (s.outcome == StepOutcome::Hole) return std::nullopt;
    return s.next->perm().canonical_string();
}

}  // namespace

TEST_CASE("successors") {
    auto s = successors(parse_permutation("-2 1"));
    REQUIRE(s.size() == 2);
    CHECK(s[0].which == Case::A);
    CHECK(s[0].hole);
    CHECK(s[1].which == Case::B);
    CHECK_FALSE(s[1].hole);
    CHECK(s[1].target.canonical_string() == "-2 1");
    CHECK_THROWS_AS(successors(parse_permutation("1 -2")), InvalidArgument);
    for (const auto& p : all_signed_permutations(3))
        if (is_irreducible(p)) CHECK(successors(p).size() <= 2);
}

TEST_CASE("successors agree with stepping lengths in general position") {
    Rng rng(99);
    std::vector<SignedPermutation> pool;
    for (std::size_t n = 2; n <= 3; ++n)
        for (auto& p : all_signed_permutations(n))
            if (is_irreducible(p)) pool.push_back(p);
    for (int i = 0; i < 1000; ++i) {
        const auto& p = pool[rng() % pool.size()];
        Case c = (rng() & 1) ? Case::A : Case::B;
        auto s = successors(p)[c == Case::A ? 0 : 1];
        auto stepped = stepped_successor(p, c, rng);
        CHECK(s.hole == !stepped.has_value());
        if (stepped) CHECK(s.target.canonical_string() == *stepped);
    }
}

TEST_CASE("build_graph small cases") {
    auto one = build_graph(parse_permutation("-1"));
    CHECK(one.size() == 1);
    CHECK(one.edges().empty());

    // Brute force over all eight signed 2-permutations: closure of "-2 1".
    Rng rng(5);
    std::set<std::string> reach{"-2 1"};
    std::vector<std::string> todo{"-2 1"};
    std::size_t hole_edges = 0;
    while (!todo.empty()) {
        auto p = parse_permutation(todo.back());
        todo.pop_back();
        for (Case c : {Case::A, Case::B}) {
            auto t = stepped_successor(p, c, rng);
            if (!t) {
                ++hole_edges;
                continue;
            }
            if (reach.insert(*t).second) todo.push_back(*t);
        }
    }
    auto g = build_graph(parse_permutation("-2 1"));
    CHECK(g.size() == reach.size());
    for (const auto& v : g.vertices()) CHECK(reach.count(v.to_string()) == 1);
    std::size_t g_holes = 0;
    for (const auto& e : g.edges()) g_holes += e.to == RauzyGraph::kHole;
    CHECK(g_holes == hole_edges);
    CHECK(g.reaches_hole());

    CHECK_THROWS_AS(build_graph(parse_permutation("1 2")), InvalidArgument);
}

TEST_CASE("vertex count is monotone in the limit") {
    auto seed = parse_permutation("2 -3 4 1");
    auto full = build_graph(seed);
    std::size_t last = 0;
    for (std::size_t limit = 1; limit <= full.size() + 2; ++limit) {
        std::size_t count;
        try {
            count = build_graph(seed, limit).size();
            CHECK(count == full.size());
        } catch (const LimitExceeded& e) {
            count = e.partial().size();
            CHECK(count == limit);
        }
        CHECK(count >= last);
        last = count;
    }
}

TEST_CASE("hole has no outgoing edges and graphs serialise deterministically") {
    auto seed = parse_permutation("-3 -4 -1 -2");
    auto a = build_graph(seed), b = build_graph(seed);
    for (const auto& e : a.edges()) CHECK(e.from != RauzyGraph::kHole);
    CHECK(a.to_json() == b.to_json());
    auto back = RauzyGraph::from_json(a.to_json());
    CHECK(back.to_json() == a.to_json());
    CHECK_THROWS_AS(RauzyGraph::from_json("{\"vertices\": 3}"), ParseError);
}

TEST_CASE("rauzy classes") {
    // Oracle for n = 2: union-find over hand-stepped successors.
    Rng rng(8);
    std::vector<std::string> verts;
    for (auto& p : all_signed_permutations(2))
        if (is_irreducible(p)) verts.push_back(p.to_string());
    std::map<std::string, std::string> root;
    for (auto& v : verts) root[v] = v;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        return root[x] == x ? x : find(root[x]);
    };
    for (auto& v : verts)
        for (Case c : {Case::A, Case::B})
            if (auto t = stepped_successor(parse_permutation(v), c, rng)) root[find(v)] = find(*t);
    std::set<std::string> roots;
    for (auto& v : verts) roots.insert(find(v));
    auto classes2 = rauzy_classes(2);
    CHECK(classes2.size() == roots.size());
    CHECK(classes2.size() == 4);

    for (std::size_t n = 2; n <= 4; ++n) {
        auto cls = rauzy_classes(n);
        std::set<std::string> seen;
        std::size_t irreducible = 0;
        for (auto& p : all_signed_permutations(n)) irreducible += is_irreducible(p);
        std::size_t total = 0;
        for (const auto& g : cls) {
            for (const auto& v : g.vertices()) {
                CHECK(seen.insert(v.to_string()).second);
                ++total;
            }
            // Re-seeding from any member stays inside the class.
            for (const auto& v : g.vertices()) {
                auto closure = build_graph(v);
                for (const auto& w : closure.vertices()) CHECK(g.contains(w));
            }
        }
        CHECK(total == irreducible);
        auto counts = class_counts(n);
        CHECK(counts.with_signs == cls.size());
        MESSAGE("n=" << n << ": " << counts.with_signs << " classes with signs, " << counts.flip_free
                     << " flip-free");
    }
    CHECK(class_counts(3).flip_free == 1);
    // Irreducible 4-permutations split into two Rauzy classes.
    CHECK(class_counts(4).flip_free == 2);
    CHECK_THROWS_AS(rauzy_classes(6), LimitExceeded);
}

TEST_CASE("find_path") {
    auto g = build_graph(parse_permutation("2 -3 4 1"));
    auto p = g.vertex(0);
    auto self = find_path(g, p, p);
    REQUIRE(self);
    CHECK(self->empty());

    // Every class member reachable from the seed (the Lemma's same-class claim
    // is checked pairwise below for n = 2 and n = 3).
    for (const auto& v : g.vertices()) {
        auto path = find_path(g, p, v);
        REQUIRE(path);
        CHECK(path->end().canonical() == v);
    }

    std::size_t pairs = 0, found = 0;
    for (std::size_t n = 2; n <= 3; ++n) {
        for (const auto& cls : rauzy_classes(n)) {
            for (const auto& a : cls.vertices())
                for (const auto& b : cls.vertices()) {
                    ++pairs;
                    found += find_path(cls, a, b).has_value();
                }
        }
    }
    MESSAGE("same-class pairs with a hole-free path: " << found << " / " << pairs);
    CHECK(found > 0);

    auto classes2 = rauzy_classes(2);
    CHECK_FALSE(find_path(classes2[0], classes2[0].vertex(0), classes2[0].vertex(0))->size() > 0);
    RauzyGraph both = classes2[0];
    both.add_vertex(classes2[1].vertex(0));
    CHECK_FALSE(find_path(both, classes2[0].vertex(0), classes2[1].vertex(0)).has_value());
}

TEST_CASE("positive loops") {
    auto plain = parse_permutation("3 2 1");
    auto g = build_graph(plain);
    auto loop = find_positive_loop(g, plain, 30);
    REQUIRE(loop);
    CHECK(is_positive(*loop));
    CHECK(loop->end().canonical() == plain);
    auto neat = find_positive_loop(g, plain, 30, true);
    REQUIRE(neat);
    CHECK(is_neat(*neat));

    CHECK_FALSE(find_positive_loop(g, plain, 2).has_value());

    // No flipped class at n = 3 carries a positive loop: every strongly
    // connected part of the labelled graph has a letter that never wins.
    auto golden = parse_permutation("2 -3 -1");
    auto gg = build_graph(golden);
    CHECK_FALSE(find_positive_loop(gg, golden, 30).has_value());
    for (const auto& cls : rauzy_classes(3)) {
        if (!cls.vertex(0).has_flips()) continue;
        for (const auto& v : cls.vertices()) CHECK_FALSE(find_positive_loop(cls, v, 200).has_value());
    }

    auto four = parse_permutation("2 -3 -4 1");
    auto g4 = build_graph(four);
    auto l4 = find_positive_loop(g4, four, 40, true);
    REQUIRE(l4);
    CHECK(is_neat(*l4));
    MESSAGE("neat positive loop at 2 -3 -4 1 of length " << l4->size());
}
