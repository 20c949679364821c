#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fiet/error.hpp"
#include "fiet/measure_lab.hpp"
#include "fiet/parallel.hpp"
#include "fiet/rauzy_graph.hpp"
#include "fiet/sampling.hpp"
#include "fiet/walker.hpp"

using namespace fiet;

namespace {

Scalar q(long p, long r) { return Scalar::rational(p, r); }

WeightVector weights(std::initializer_list<long> v) {
    std::vector<Scalar> s;
    for (long x : v) s.push_back(Scalar(x));
    return WeightVector(std::move(s));
}

const std::vector<SignedPermutation>& irreducible(std::size_t n) {
    static std::map<std::size_t, std::vector<SignedPermutation>> cache;
    auto& v = cache[n];
    if (v.empty())
        for (auto& p : all_signed_permutations(n))
            if (is_irreducible(p)) v.push_back(p);
    return v;
}

// Random walk of `len` arrows avoiding the hole.
RauzyPath random_path(const SignedPermutation& start, std::size_t len, Rng& rng) {
    RauzyPath path(start);
    for (std::size_t i = 0; i < len; ++i) {
        auto succ = successors(path.end());
        std::vector<Successor> open;
        for (auto& s : succ)
            if (!s.hole) open.push_back(s);
        if (open.empty()) break;
        Case c = open[rng() % open.size()].which;
        Case cs[] = {c};
        path.append(path_from_cases(path.end(), cs));
    }
    return path;
}

FlipIET exact_fiet(const SignedPermutation& p, const std::vector<double>& lam) {
    std::vector<Scalar> v;
    for (double x : lam) v.push_back(Scalar::rational(mpq_class(x)));
    return FlipIET(p, LengthVector(std::move(v)));
}

RauzyPath section_loop() {
    auto p = parse_permutation("3 2 1");
    return *find_positive_loop(build_graph(p), p, 30, true);
}

}  // namespace

TEST_CASE("weight vectors and volumes") {
    CHECK(lambda_q_volume(weights({1, 1})) == q(1, 2));
    CHECK(lambda_q_volume(weights({1, 2, 3})) == q(1, 36));
    CHECK_THROWS_AS(weights({1, 0}), InvalidArgument);
    CHECK_THROWS_AS(WeightVector::from_doubles({1.0, -2.0}), InvalidArgument);
    auto w = weights({4, 1, 3, 2});
    CHECK(w.max() == Scalar(4L));
    CHECK(w.min() == Scalar(1L));
    CHECK(w.max_min(1) == Scalar(4L));
    CHECK(w.max_min(2) == Scalar(3L));
    CHECK(w.max_min(4) == Scalar(1L));
    CHECK(w.product() == Scalar(24L));
    CHECK(w.product(0b0101) == Scalar(12L));
}

TEST_CASE("arrow and path conditional probabilities") {
    auto p = parse_permutation("2 1");
    auto a = rauzy_step(make_fiet("2 1", {"2/3", "1/3"}));
    REQUIRE(a.arrow);
    CHECK(conditional_probability(*a.arrow, WeightVector::uniform(2)) == q(1, 2));
    // Winner weight 1, loser weight 3.
    std::vector<Scalar> wq(2);
    wq[static_cast<std::size_t>(a.arrow->winner)] = Scalar(1L);
    wq[static_cast<std::size_t>(a.arrow->loser)] = Scalar(3L);
    CHECK(conditional_probability(*a.arrow, WeightVector(wq)) == q(3, 4));

    // Telescoping: the path value is the product of the arrow values, each
    // taken at the weight transported so far.
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 4;
        const auto& pool = irreducible(n);
        auto path = random_path(pool[rng() % pool.size()], 5, rng);
        std::vector<Scalar> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(Scalar(static_cast<long>(1 + rng() % 9)));
        WeightVector w(v);
        Scalar product(1L);
        std::vector<Scalar> cur = v;
        for (const auto& arrow : path.arrows()) {
            product *= conditional_probability(arrow, WeightVector(cur));
            cur[static_cast<std::size_t>(arrow.loser)] += cur[static_cast<std::size_t>(arrow.winner)];
        }
        CHECK(product == conditional_probability(path, w));
        CHECK(WeightVector(cur).values() == apply_cocycle(path, w).values());
    }
}

TEST_CASE("arrow values lie in (0,1) and a vertex's arrows sum to at most 1") {
    Rng rng(9);
    for (std::size_t n = 2; n <= 4; ++n) {
        for (const auto& p : irreducible(n)) {
            std::vector<Scalar> v;
            for (std::size_t i = 0; i < n; ++i) v.push_back(Scalar(static_cast<long>(1 + rng() % 7)));
            WeightVector w(v);
            Scalar sum(0L);
            for (const auto& s : successors(p)) {
                RauzyArrow a{p, s.target, s.which, s.winner, s.loser};
                auto val = conditional_probability(a, w);
                CHECK(val.sign() > 0);
                CHECK(val < Scalar(1L));
                sum += val;
            }
            CHECK(sum <= Scalar(1L));
        }
    }
}

TEST_CASE("distortion statistics") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 4;
        const auto& pool = irreducible(n);
        auto path = random_path(pool[rng() % pool.size()], 1 + rng() % 12, rng);
        std::vector<Scalar> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(Scalar(static_cast<long>(1 + rng() % 5)));
        WeightVector w(v);
        auto d = distortion_stats(path, w);
        for (const auto& m : d.max_min) {
            CHECK(d.min <= m);
            CHECK(m <= d.max);
        }
        CHECK(d.max_min.front() == d.max);
        CHECK(d.max_min.back() == d.min);
        // Each arrow at most doubles the largest entry.
        CHECK(d.max_over_initial <= std::ldexp(1.0, static_cast<int>(path.size())));
    }
}

TEST_CASE("Monte Carlo volume of Lambda_q") {
    RunOptions opt;
    opt.seed = 21;
    auto r = volume_experiment(weights({1, 2, 3}), opt);
    CHECK(r.passed);
    CHECK(r.summary["exact"].get<double>() == doctest::Approx(1.0 / 36));
}

TEST_CASE("cylinder volume against hit rates") {
    Rng rng(3);
    RunOptions opt;
    opt.samples = 100000;
    for (const char* perm : {"3 2 1", "2 -3 4 1"}) {
        auto path = random_path(parse_permutation(perm), 3, rng);
        REQUIRE(path.size() == 3);
        opt.seed = rng();
        auto r = cylinder_experiment(path, WeightVector::uniform(path.start().size()), opt);
        CHECK(r.passed);
        std::vector<double> wq;
        for (std::size_t i = 0; i < path.start().size(); ++i) wq.push_back(1.0 + static_cast<double>(i));
        auto r2 = cylinder_experiment(path, WeightVector::from_doubles(wq), opt);
        CHECK(r2.passed);
    }
}

TEST_CASE("fast walker agrees with exact induction while decidable") {
    Rng rng(17);
    std::size_t steps = 0, undecidable = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 2 + rng() % 4;
        const auto& pool = irreducible(n);
        const auto& p = pool[rng() % pool.size()];
        TransitionTable table(p);
        auto lam = sample_simplex(rng, n);
        FastWalker fast(table, p, lam);
        FlipIET f = exact_fiet(p, lam);
        const double start_total = f.total().to_double();
        for (int k = 0; k < 200; ++k) {
            auto st = fast.step();
            if (st.outcome == WalkOutcome::Undecidable) {
                ++undecidable;
                break;
            }
            auto ex = rauzy_step(f);
            REQUIRE(ex.outcome != StepOutcome::Tie);
            REQUIRE(ex.arrow);
            CHECK(ex.arrow->which == st.which);
            CHECK(ex.arrow->winner == st.winner);
            CHECK(ex.arrow->loser == st.loser);
            CHECK(arrow_key(*ex.arrow) == st.key);
            CHECK((ex.outcome == StepOutcome::Hole) == (st.outcome == WalkOutcome::Hole));
            CHECK(std::fabs(std::log(ex.next->total().to_double() / start_total) - st.log_total) <=
                  st.log_error + 1e-12);
            ++steps;
            if (st.outcome == WalkOutcome::Hole) break;
            f = *ex.next;
        }
    }
    CHECK(steps > 5000);
}

TEST_CASE("fast walker log total is relative to the start") {
    auto p = parse_permutation("3 2 1");
    TransitionTable table(p);
    std::vector<double> lam{0.5, 0.3, 0.2};
    FastWalker w(table, p, lam);
    auto st = w.step();
    // Case A (0.2 < 0.5): the loser 3 is cut, total 0.8.
    CHECK(st.log_total == doctest::Approx(std::log(0.8)));
}

// The refined point is within an ulp of the double, so only the arrows have
// to agree; the lengths drift apart as induction expands the difference.
TEST_CASE("exact walker refines the fast walk") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 4;
        const auto& pool = irreducible(n);
        const auto& p = pool[rng() % pool.size()];
        TransitionTable table(p);
        auto lam = sample_simplex(rng, n);
        FastWalker fast(table, p, lam);
        Rng refine(trial);
        ExactWalker exact(table, p, lam, 512, refine);
        for (int k = 0; k < 300; ++k) {
            auto a = fast.step();
            auto b = exact.step();
            if (a.outcome == WalkOutcome::Undecidable) break;
            REQUIRE(b.outcome != WalkOutcome::Undecidable);
            CHECK(a.which == b.which);
            CHECK(a.winner == b.winner);
            CHECK(a.loser == b.loser);
            if (a.outcome == WalkOutcome::Hole) break;
        }
    }
}

TEST_CASE("survival depth matches exact Zorich steps") {
    Rng rng(29);
    RunOptions opt;
    std::size_t compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3 + rng() % 2;
        const auto& pool = irreducible(n);
        const auto& p = pool[rng() % pool.size()];
        if (!p.has_flips()) continue;
        TransitionTable table(p);
        auto lam = sample_simplex(rng, n);
        auto s = survival_depth(table, p, lam, 12, opt);
        if (s.escalated) continue;
        FlipIET f = exact_fiet(p, lam);
        std::size_t depth = 0;
        while (depth < 12) {
            auto z = zorich_step(f);
            if (z.outcome != StepOutcome::Advanced) break;
            ++depth;
            f = *z.next;
        }
        CHECK(s.depth == depth);
        ++compared;
    }
    CHECK(compared > 100);
}

TEST_CASE("survival fractions") {
    RunOptions opt;
    opt.samples = 20000;
    opt.seed = 31;
    auto r = survival_fraction(parse_permutation("-3 -4 -1 -2"), {0, 1, 2, 4, 8}, opt);
    CHECK(r.passed);
    CHECK(r.rows.front()[3] == "1");
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(std::stod(r.rows[i][3]) <= std::stod(r.rows[i - 1][3]));

    // Both successors of the all-flipped 4-permutation are in the hole.
    auto dead = survival_fraction(parse_permutation("-4 -3 -2 -1"), {0, 1, 10}, opt, 0.5, 10);
    CHECK(dead.passed);
    CHECK(dead.rows[1][3] == "0");
    CHECK_THROWS_AS(survival_fraction(parse_permutation("2 1 3"), {1}, opt), InvalidArgument);
}

TEST_CASE("Kerckhoff experiment") {
    RunOptions opt;
    opt.samples = 20000;
    opt.seed = 37;
    auto p = parse_permutation("4 3 2 1");
    auto r = kerckhoff_experiment(p, WeightVector::uniform(4), {2, 4, 8, 16, 1e9}, opt);
    CHECK(r.passed);
    for (const auto& row : r.rows)
        if (std::stod(row[1]) > 1e8) CHECK(row[2] == "0");
    CHECK_THROWS_AS(kerckhoff_experiment(p, WeightVector::uniform(4), {1.0}, opt), InvalidArgument);

    // A symbol at neither row end keeps its weight over one arrow.
    for (const auto& perm : irreducible(4)) {
        for (const auto& s : successors(perm)) {
            Case cs[] = {s.which};
            auto path = path_from_cases(perm, cs);
            auto b = apply_cocycle(path, weights({1, 2, 3, 4}));
            for (Symbol a = 0; a < 4; ++a) {
                if (a == perm.top_at(3) || a == perm.bottom_at(3)) continue;
                CHECK(b[static_cast<std::size_t>(a)] == Scalar(static_cast<long>(a + 1)));
            }
        }
    }
}

TEST_CASE("distortion experiment") {
    RunOptions opt;
    opt.samples = 5000;
    opt.seed = 41;
    auto r = distortion_experiment(parse_permutation("3 2 1"), WeightVector::uniform(3), {1.5, 2, 3, 8, 32}, 30, opt);
    CHECK(r.passed);
    CHECK(r.summary["monotone"].get<bool>());
    CHECK_FALSE(r.summary["smallest_C"].is_null());
    CHECK_THROWS_AS(distortion_experiment(parse_permutation("3 2 1"), WeightVector::uniform(3), {0.5, 2}, 30, opt),
                    InvalidArgument);
    CHECK_THROWS_AS(distortion_experiment(parse_permutation("3 2 1"), WeightVector::uniform(3), {1.0}, 30, opt),
                    InvalidArgument);
}

TEST_CASE("Markov return of the fast kernel matches markov_map") {
    auto loop = section_loop();
    const auto& p = loop.start();
    TransitionTable table(p);
    RunOptions opt;
    Rng rng(43);
    std::size_t compared = 0;
    for (int i = 0; i < 2000; ++i) {
        auto lam = sample_simplex(rng, 3);
        auto fast = markov_return(table, loop, lam, opt);
        if (fast.escalated || !fast.returned) continue;
        auto exact = markov_map(exact_fiet(p, lam), loop);
        REQUIRE(exact.returned);
        CHECK(exact.path.size() == fast.steps);
        // The doubles sum to 1 only up to rounding; markov_map assumes |lambda| = 1.
        double total = 0.0;
        for (double x : lam) total += x;
        CHECK(std::fabs(exact.roof + std::log(total) - fast.roof) <= fast.roof_error + 1e-12);
        CHECK(fast.roof_error < 1e-3);
        double lm = 0.0;
        for (const auto& c : exact.path.induction_matrix().column_sums()) lm -= std::log(c.get_d());
        CHECK(fast.log_mass == doctest::Approx(lm).epsilon(1e-9));
        ++compared;
    }
    CHECK(compared > 50);
}

TEST_CASE("roof tail and fast decay reports") {
    auto loop = section_loop();
    RunOptions opt;
    opt.samples = 2000;
    opt.seed = 47;
    opt.escalate_precision = 4096;
    auto tail = roof_tail(loop, {1, 2, 4, 8, 16, 32}, opt);
    CHECK(tail.rows.front()[4] == "1");  // P(r >= 0) = 1
    CHECK(tail.summary["monotone"].get<bool>());
    CHECK(tail.summary["probability_roof_positive"].get<double>() == 1.0);

    auto decay = fast_decay_check(loop, {1.0, 1e-20, 1e-60, 1e-120}, opt);
    CHECK(decay.summary["monotone"].get<bool>());
    CHECK(std::stod(decay.rows.back()[3]) <= 1.0);  // eps = 1
    CHECK_THROWS_AS(fast_decay_check(loop, {2.0, 0.5}, opt), InvalidArgument);
}

TEST_CASE("expansion of a positive branch") {
    auto loop = section_loop();
    RunOptions opt;
    opt.seed = 53;
    auto r = expansion_check(loop, 300, opt);
    CHECK(r.passed);
    CHECK(r.summary["max_contraction"].get<double>() < 1.0);
    CHECK(r.summary["max_jacobian_relative_error"].get<double>() < 1e-6);
    auto p = parse_permutation("3 2 1");
    Case one[] = {Case::A};
    CHECK_THROWS_AS(expansion_check(path_from_cases(p, one), 10, opt), InvalidArgument);
}

TEST_CASE("box counting") {
    RunOptions opt;
    opt.seed = 59;
    // Depth 0 keeps every cell: the slope is the ambient dimension.
    auto full = box_dimension(parse_permutation("2 -3 -1"), {0, 3, 6}, {16, 32, 64}, 1, 2000, opt);
    CHECK(full.summary["monotone_in_depth"].get<bool>());
    CHECK(full.summary["slopes_by_depth"]["0"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(full.summary["targeted_rejected"].get<std::size_t>() == 0);
    // Nothing survives one Zorich step here.
    CHECK_THROWS_AS(box_dimension(parse_permutation("-4 -3 -2 -1"), {0, 1}, {4, 8, 16}, 1, 100, opt), GridTooCoarse);
    CHECK_THROWS_AS(box_dimension(parse_permutation("2 -3 -1"), {0}, {16, 24}, 1, 0, opt), InvalidArgument);
}

TEST_CASE("reports are reproducible and independent of the thread count") {
    RunOptions a;
    a.samples = 3000;
    a.seed = 61;
    a.threads = 1;
    RunOptions b = a;
    b.threads = 3;
    auto p = parse_permutation("-3 -4 -1 -2");
    auto x = survival_fraction(p, {0, 2, 4}, a).to_csv();
    CHECK(x == survival_fraction(p, {0, 2, 4}, a).to_csv());
    CHECK(x == survival_fraction(p, {0, 2, 4}, b).to_csv());
    CHECK(x.rfind("# version=", 0) == 0);
    CHECK(x.find("seed=61") != std::string::npos);
    auto k1 = kerckhoff_experiment(p, WeightVector::uniform(4), {2, 4}, a);
    auto k2 = kerckhoff_experiment(p, WeightVector::uniform(4), {2, 4}, b);
    CHECK(k1.to_csv() == k2.to_csv());
    CHECK(k1.to_json().dump() == k2.to_json().dump());
    a.seed = 62;
    CHECK(survival_fraction(p, {0, 2, 4}, a).to_csv() != x);
}

TEST_CASE("line fit and formatting") {
    auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_line({1}, {1}), InvalidArgument);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}
