#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiet/constructions.hpp"
#include "fiet/dynamics.hpp"
#include "fiet/error.hpp"
#include "fiet/sampling.hpp"

using namespace fiet;

namespace {

Scalar q(long p, long r) { return Scalar::rational(p, r); }

// Half-open reading [a, b) of the cells, used only to follow the orbit of 0.
Scalar step_half_open(const FlipIET& f, const Scalar& x) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        Symbol s = f.perm().top_at(i);
        if (compare(x, f.top_offset(s) + f.length(s)) == Ordering::Less) return apply_branch(f, s, x);
    }
    throw OutOfDomain("x beyond the domain");
}

// Number of sampled interior points of [0, 1) where the first return of t
// differs from s.
std::size_t first_return_mismatches(const FlipIET& t, const FlipIET& s, Rng& rng, std::size_t samples,
                                    std::size_t* compared = nullptr) {
    std::size_t bad = 0, done = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        Scalar x = Scalar::rational(random_unit_rational(rng));
        auto expected = evaluate(s, x);
        auto got = first_return(t, Scalar(1L), x);
        if (!expected || !got) continue;
        ++done;
        if (!(*expected == *got)) ++bad;
    }
    if (compared) *compared = done;
    return bad;
}

FlipIET random_rational_3iet(Rng& rng) {
    static const std::vector<SignedPermutation> pool = [] {
        std::vector<SignedPermutation> out;
        for (auto& p : all_signed_permutations(3))
            if (!p.has_flips() && is_irreducible(p)) out.push_back(p);
        return out;
    }();
    std::vector<Scalar> v;
    for (int i = 0; i < 3; ++i) v.push_back(Scalar::rational(random_unit_rational(rng, 20)));
    return FlipIET(pool[rng() % pool.size()], LengthVector(std::move(v))).normalized();
}

}  // namespace

TEST_CASE("rotations") {
    auto half = rotation_iet(q(1, 2));
    CHECK(*evaluate(half, q(1, 8)) == q(5, 8));
    CHECK(*evaluate(half, q(5, 8)) == q(1, 8));

    auto r = rotation_iet(q(2, 5));
    Scalar x(0L);
    for (int i = 0; i < 5; ++i) x = step_half_open(r, x);
    CHECK(x == Scalar(0L));
    auto orbit = iterate_orbit(r, q(1, 10), 100);
    CHECK(orbit.stop == OrbitStop::CycleDetected);
    CHECK(orbit.period == 5);

    auto g = golden_rotation();
    auto run = iterate_orbit(g, q(1, 7), 10000, false);
    CHECK(run.stop == OrbitStop::Budget);
    CHECK_FALSE(detect_periodic(g, 2000).has_value());

    CHECK_THROWS_AS(rotation_iet(Scalar(1L)), InvalidArgument);
    CHECK_THROWS_AS(rotation_iet(Scalar(0L)), InvalidArgument);
}

TEST_CASE("glue_flip shape") {
    auto s = rotation_iet(q(2, 5));
    auto t = glue_flip(s);
    CHECK(t.size() == 3);
    CHECK(t.perm().flip_count() == 2);
    CHECK(t.total() == q(7, 5));
    CHECK(t.perm().to_string() == "2 -3 -1");
    CHECK_THROWS_AS(glue_flip(t), InvalidArgument);
    CHECK_THROWS_AS(glue_flip(FlipIET(parse_permutation("2 1"), LengthVector({q(1, 2), q(1, 3)}))),
                    InvalidArgument);
}

TEST_CASE("first return of the glued map is the source") {
    Rng rng(61);
    std::size_t compared = 0;
    CHECK(first_return_mismatches(glue_flip(rotation_iet(q(2, 5))), rotation_iet(q(2, 5)), rng, 100, &compared) == 0);
    CHECK(compared == 100);

    for (int i = 0; i < 50; ++i) {
        auto s = rotation_iet(Scalar::rational(random_unit_rational(rng, 16)));
        CHECK(first_return_mismatches(glue_flip(s), s, rng, 40) == 0);
    }
    for (int i = 0; i < 10; ++i) {
        auto s = random_rational_3iet(rng);
        CHECK(first_return_mismatches(glue_flip(s), s, rng, 40) == 0);
    }
    auto g = golden_rotation();
    CHECK(first_return_mismatches(glue_flip(g), g, rng, 100) == 0);
}

TEST_CASE("two flips compose to S on the glued interval") {
    Rng rng(67);
    for (int i = 0; i < 20; ++i) {
        auto s = i % 2 ? random_rational_3iet(rng) : rotation_iet(Scalar::rational(random_unit_rational(rng, 16)));
        auto t = glue_flip(s);
        Symbol a0 = s.perm().bottom_at(0);
        for (int k = 0; k < 20; ++k) {
            Scalar x = s.top_offset(a0) + s.length(a0) * Scalar::rational(random_unit_rational(rng));
            auto once = evaluate(t, x);
            REQUIRE(once);
            CHECK(compare(*once, Scalar(1L)) != Ordering::Less);
            auto twice = evaluate(t, *once);
            REQUIRE(twice);
            CHECK(*twice == *evaluate(s, x));
        }
    }
}

TEST_CASE("golden glued fIET") {
    auto t = glue_flip(golden_rotation()).normalized();
    CHECK(t.perm().to_string() == "2 -3 -1");
    // N ends the top row and alpha0 ends the bottom row, both of length
    // lambda_{alpha0}: the very first induction step is a tie.
    auto v = minimality_certificate(t, 10000);
    CHECK(v.terminal == Terminal::Tie);
    CHECK(v.depth == 1);

    // The source rotation itself survives and accumulates a positive cocycle.
    auto s = minimality_certificate(golden_rotation(), 10000);
    CHECK(s.terminal == Terminal::SurvivedBudget);
    CHECK(s.depth == 10000);
    CHECK(s.positive);
    CHECK(s.complete);
}
