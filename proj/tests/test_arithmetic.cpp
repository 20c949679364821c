#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fiet/arithmetic.hpp"

using namespace fiet;

namespace {

mpq_class random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-50, 50);
    std::uniform_int_distribution<long> den(1, 30);
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

Scalar random_quadratic(std::mt19937_64& rng, long d = 5) {
    return Scalar::quadratic(random_rational(rng), random_rational(rng), d);
}

// Independent numeric evaluation of a + b*sqrt(d) at 400 bits (> 100 digits).
int numeric_compare(const QuadraticNumber& x, const QuadraticNumber& y) {
    mpfr_t a, b, s;
    mpfr_inits2(400, a, b, s, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(s, static_cast<unsigned long>(x.d), MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpq_class da = x.a - y.a;
    mpq_class db = x.b - y.b;
    mpfr_mul_q(b, s, db.get_mpq_t(), MPFR_RNDN);
    mpfr_set_q(a, da.get_mpq_t(), MPFR_RNDN);
    mpfr_add(a, a, b, MPFR_RNDN);
    int r = mpfr_sgn(a);
    mpfr_clears(a, b, s, static_cast<mpfr_ptr>(nullptr));
    return r;
}

int ord(Ordering o) { return o == Ordering::Less ? -1 : (o == Ordering::Equal ? 0 : 1); }

}  // namespace

TEST_CASE("rational compare and arithmetic") {
    CHECK(compare(Scalar::rational(1, 3), Scalar::rational(2, 6)) == Ordering::Equal);
    CHECK(Scalar::rational(1, 2) + Scalar::rational(1, 3) == Scalar::rational(5, 6));
    CHECK((Scalar::rational(1, 2) + Scalar::rational(1, 3)).to_string() == "5/6");
    CHECK(Scalar::rational(2, -4).as_rational().get_den() > 0);
    CHECK_THROWS_AS(Scalar::rational(1, 2) / Scalar(0L), DivisionByZero);
}

TEST_CASE("quadratic compare is exact") {
    // 1 + sqrt(5) - 3 = sqrt(5) - 2, positive because 5 > 2^2.
    auto lhs = Scalar::quadratic(1, 1, 5);
    auto rhs = Scalar::quadratic(3, 0, 5);
    CHECK(compare(lhs, rhs) == Ordering::Greater);
    CHECK(compare(rhs, lhs) == Ordering::Less);
    // Close call: 2207/987 vs sqrt(5) (a continued-fraction convergent).
    CHECK(compare(Scalar::quadratic(mpq_class(2207, 987), 0, 5), Scalar::quadratic(0, 1, 5)) == Ordering::Greater);
}

TEST_CASE("quadratic arithmetic") {
    auto p = Scalar::quadratic(1, 1, 5);
    auto q = Scalar::quadratic(1, -1, 5);
    CHECK(p * q == Scalar(-4L));
    auto r = Scalar::quadratic(0, 1, 5);
    auto one = r / r;
    CHECK(one == Scalar(1L));
    CHECK(one.as_quadratic().b == 0);
    CHECK_THROWS_AS(Scalar::quadratic(1, 1, 5) + Scalar::quadratic(1, 1, 2), MixedField);
    CHECK_THROWS_AS(compare(Scalar::quadratic(1, 1, 5), Scalar::quadratic(1, 1, 3)), MixedField);
    CHECK_THROWS_AS(r / Scalar::quadratic(0, 0, 5), DivisionByZero);
    CHECK_THROWS_AS(Scalar::quadratic(1, 1, 4), InvalidArgument);
}

TEST_CASE("approx compare refuses to guess below precision") {
    const long p = 64;
    auto x = Scalar::approx(mpq_class(1, 3), p);
    mpq_class tiny(1);
    tiny /= mpq_class(mpz_class(1) << static_cast<unsigned long>(p + 8));
    auto y = x + Scalar::rational(tiny);
    CHECK_THROWS_AS(compare(x, y), UndecidableComparison);
    CHECK(compare(x, Scalar::approx(0.5, p)) == Ordering::Less);
    // Exactly representable equal values are decidable.
    CHECK(compare(Scalar::approx(0.25, p), Scalar::approx(0.25, p)) == Ordering::Equal);
    CHECK_THROWS_AS(Scalar::approx(1.0, p) + Scalar::quadratic(0, 1, 5), MixedField);
}

TEST_CASE("approx precision never decreases") {
    auto a = Scalar::approx(0.1, 64);
    auto b = Scalar::approx(0.2, 128);
    CHECK((a + b).precision() == 128);
    CHECK((a * b).precision() == 128);
    CHECK((a - Scalar::rational(1, 7)).precision() == 64);
    auto c = a / Scalar::approx(3.0, 80);
    CHECK(c.precision() == 80);
    CHECK(c.as_approx().radius() > 0.0);
}

TEST_CASE("text forms") {
    CHECK(parse_scalar("3/10") == Scalar::rational(3, 10));
    CHECK(parse_scalar(" -4 ") == Scalar(-4L));
    auto q = parse_scalar("1/2-3/4*sqrt(5)");
    CHECK(q.kind() == Scalar::Kind::Quadratic);
    CHECK(q.as_quadratic().a == mpq_class(1, 2));
    CHECK(q.as_quadratic().b == mpq_class(-3, 4));
    CHECK(parse_scalar(q.to_string()) == q);
    CHECK(parse_scalar("sqrt(5)") == Scalar::quadratic(0, 1, 5));
    CHECK(parse_scalar("-1/2+1/2*sqrt(5)") == Scalar::quadratic(mpq_class(-1, 2), mpq_class(1, 2), 5));
    auto f = parse_scalar("0.25~prec=64");
    CHECK(f.kind() == Scalar::Kind::ApproxFloat);
    CHECK(f.precision() == 64);
    CHECK(f.as_approx().radius() == 0.0);
    auto g = parse_scalar("0.1~prec=64");
    CHECK(g.as_approx().radius() > 0.0);
    auto back = parse_scalar(g.to_string());
    CHECK(back.to_double() == g.to_double());
    CHECK_THROWS_AS(parse_scalar("1/0"), ParseError);
    CHECK_THROWS_AS(parse_scalar("abc"), ParseError);
    CHECK_THROWS_AS(parse_scalar("1+2*sqrt(8)"), ParseError);
}

TEST_CASE("backend tags") {
    CHECK(Backend::parse("rational").kind == Scalar::Kind::Rational);
    auto q = Backend::parse("quad:5");
    CHECK(q.tag() == "quad:5");
    CHECK(q.read("1/2").kind() == Scalar::Kind::Quadratic);
    auto f = Backend::parse("float:80");
    CHECK(f.read("0.3").precision() == 80);
    CHECK(f.read("3/10").precision() == 80);
    CHECK_THROWS_AS(Backend::parse("quad:9"), ParseError);
    CHECK_THROWS_AS(Backend::parse("double"), ParseError);
}

TEST_CASE("field axioms hold exactly on random operands") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        Scalar a = random_quadratic(rng), b = random_quadratic(rng), c = random_quadratic(rng);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == Scalar(0L));
        if (!b.is_zero()) CHECK((a / b) * b == a);
        Scalar x = Scalar::rational(random_rational(rng));
        Scalar y = Scalar::rational(random_rational(rng));
        CHECK(x * (y + x) == x * y + x * x);
        if (!y.is_zero()) CHECK(x / y * y == x);
    }
}

TEST_CASE("compare is a total order") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        Scalar a = random_quadratic(rng), b = random_quadratic(rng), c = random_quadratic(rng);
        CHECK(ord(compare(a, b)) == -ord(compare(b, a)));
        if (compare(a, b) != Ordering::Greater && compare(b, c) != Ordering::Greater)
            CHECK(compare(a, c) != Ordering::Greater);
    }
}

TEST_CASE("quadratic compare agrees with a 100-digit numeric oracle") {
    std::mt19937_64 rng(13);
    for (long d : {2L, 3L, 5L}) {
        for (int i = 0; i < 10000 / 3 + 1; ++i) {
            Scalar a = random_quadratic(rng, d), b = random_quadratic(rng, d);
            REQUIRE(ord(compare(a, b)) == numeric_compare(a.as_quadratic(), b.as_quadratic()));
        }
    }
}
