#include "fiet/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <regex>
#include <sstream>

namespace fiet {

namespace {

constexpr double kRadiusInflation = 1.0 + 0x1p-50;

double up(double x) { return x * kRadiusInflation; }

double abs_upper(mpfr_srcptr x) {
    double v = mpfr_get_d(x, MPFR_RNDU);
    double w = mpfr_get_d(x, MPFR_RNDD);
    return std::max(std::fabs(v), std::fabs(w));
}

// Upper bound on the round-to-nearest error of a result, 0 if the operation
// reported itself exact.
double rounding_error(mpfr_srcptr result, int ternary) {
    if (ternary == 0) return 0.0;
    double mag = abs_upper(result);
    if (mag == 0.0) return std::numeric_limits<double>::denorm_min();
    return up(std::ldexp(mag, -static_cast<int>(mpfr_get_prec(result)) + 1));
}

mpq_class parse_rational(const std::string& text) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw ParseError("malformed rational: " + text);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + text);
    q.canonicalize();
    return q;
}

std::string rational_text(const mpq_class& q) { return q.get_str(10); }

QuadraticNumber to_quadratic(const Scalar& s, long d) {
    if (s.kind() == Scalar::Kind::Rational) return {s.as_rational(), mpq_class(0), d};
    return s.as_quadratic();
}

ApproxFloat to_approx(const Scalar& s, long prec) {
    if (s.kind() == Scalar::Kind::Rational) return ApproxFloat(s.as_rational(), prec);
    return s.as_approx();
}

// Common backend of a binary operation, with rational promotion.
Scalar::Kind common_kind(const Scalar& x, const Scalar& y) {
    auto kx = x.kind();
    auto ky = y.kind();
    if (kx == ky) {
        if (kx == Scalar::Kind::Quadratic && x.field() != y.field())
            throw MixedField("quadratic fields differ: sqrt(" + std::to_string(x.field()) +
                             ") vs sqrt(" + std::to_string(y.field()) + ")");
        return kx;
    }
    if (kx == Scalar::Kind::Rational) return ky;
    if (ky == Scalar::Kind::Rational) return kx;
    throw MixedField("cannot combine quadratic and floating-point scalars");
}

// Sign of a + b*sqrt(d), exactly.
int quadratic_sign(const QuadraticNumber& q) {
    int sa = sgn(q.a);
    int sb = sgn(q.b);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with d*b^2.
    mpq_class lhs = q.a * q.a;
    mpq_class rhs = q.b * q.b * q.d;
    int c = cmp(lhs, rhs);
    return c > 0 ? sa : sb;  // c == 0 impossible for square-free d > 1
}

ApproxFloat approx_binary(const ApproxFloat& x, ArithOp op, const ApproxFloat& y) {
    long prec = std::max(x.precision(), y.precision());
    ApproxFloat r(prec);
    double rx = x.radius();
    double ry = y.radius();
    int t = 0;
    double propagated = 0.0;
    switch (op) {
        case ArithOp::Add:
            t = mpfr_add(r.get(), x.get(), y.get(), MPFR_RNDN);
            propagated = up(rx + ry);
            break;
        case ArithOp::Sub:
            t = mpfr_sub(r.get(), x.get(), y.get(), MPFR_RNDN);
            propagated = up(rx + ry);
            break;
        case ArithOp::Mul: {
            t = mpfr_mul(r.get(), x.get(), y.get(), MPFR_RNDN);
            double ax = abs_upper(x.get());
            double ay = abs_upper(y.get());
            propagated = up(up(ax * ry) + up(ay * rx) + up(rx * ry));
            break;
        }
        case ArithOp::Div: {
            double ay = mpfr_zero_p(y.get()) ? 0.0 : std::fabs(mpfr_get_d(y.get(), MPFR_RNDZ));
            if (mpfr_zero_p(y.get()) && ry == 0.0) throw DivisionByZero("division by zero");
            if (ay <= ry) throw UndecidableComparison("divisor enclosure contains zero");
            t = mpfr_div(r.get(), x.get(), y.get(), MPFR_RNDN);
            double ax = abs_upper(x.get());
            double denom = ay * (ay - ry);
            propagated = up((up(ax * ry) + up(ay * rx)) / denom * kRadiusInflation);
            break;
        }
    }
    r.set_radius(up(propagated + rounding_error(r.get(), t)));
    return r;
}

}  // namespace

std::string_view to_string(Ordering o) {
    switch (o) {
        case Ordering::Less: return "Less";
        case Ordering::Equal: return "Equal";
        case Ordering::Greater: return "Greater";
    }
    return "?";
}

bool is_square_free(long d) {
    if (d < 2) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

// ---------------------------------------------------------------- ApproxFloat

ApproxFloat::ApproxFloat(long precision_bits) {
    if (precision_bits < MPFR_PREC_MIN || precision_bits > 1 << 20)
        throw InvalidArgument("unsupported precision: " + std::to_string(precision_bits));
    mpfr_init2(value_, precision_bits);
    mpfr_set_zero(value_, 1);
}

ApproxFloat::ApproxFloat(double value, long precision_bits) : ApproxFloat(precision_bits) {
    int t = mpfr_set_d(value_, value, MPFR_RNDN);
    radius_ = rounding_error(value_, t);
}

ApproxFloat::ApproxFloat(const mpq_class& value, long precision_bits)
    : ApproxFloat(precision_bits) {
    int t = mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
    radius_ = rounding_error(value_, t);
}

ApproxFloat::ApproxFloat(const ApproxFloat& other) : radius_(other.radius_) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

ApproxFloat::ApproxFloat(ApproxFloat&& other) noexcept : radius_(other.radius_) {
    // mpfr_t has no null state; swap into a fresh minimal-precision value.
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
}

ApproxFloat& ApproxFloat::operator=(const ApproxFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
        radius_ = other.radius_;
    }
    return *this;
}

ApproxFloat& ApproxFloat::operator=(ApproxFloat&& other) noexcept {
    mpfr_swap(value_, other.value_);
    std::swap(radius_, other.radius_);
    return *this;
}

ApproxFloat::~ApproxFloat() { mpfr_clear(value_); }

// --------------------------------------------------------------------- Scalar

Scalar Scalar::rational(const mpq_class& q) {
    mpq_class c(q);
    if (c.get_den() == 0) throw DivisionByZero("zero denominator");
    c.canonicalize();
    return Scalar(std::move(c));
}

Scalar Scalar::rational(long num, long den) {
    if (den == 0) throw DivisionByZero("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(std::move(q));
}

Scalar Scalar::quadratic(const mpq_class& a, const mpq_class& b, long d) {
    if (!is_square_free(d))
        throw InvalidArgument("quadratic field needs square-free d >= 2, got " + std::to_string(d));
    QuadraticNumber q{a, b, d};
    q.a.canonicalize();
    q.b.canonicalize();
    return Scalar(std::move(q));
}

Scalar Scalar::approx(double v, long precision_bits) { return Scalar(ApproxFloat(v, precision_bits)); }

Scalar Scalar::approx(const mpq_class& v, long precision_bits) {
    return Scalar(ApproxFloat(v, precision_bits));
}

Scalar Scalar::approx(ApproxFloat v) { return Scalar(std::move(v)); }

long Scalar::field() const { return kind() == Kind::Quadratic ? as_quadratic().d : 0; }

long Scalar::precision() const { return kind() == Kind::ApproxFloat ? as_approx().precision() : 0; }

int Scalar::sign() const {
    switch (kind()) {
        case Kind::Rational: return sgn(as_rational());
        case Kind::Quadratic: return quadratic_sign(as_quadratic());
        case Kind::ApproxFloat: {
            const auto& f = as_approx();
            if (mpfr_zero_p(f.get()) && f.radius() == 0.0) return 0;
            double mag = mpfr_zero_p(f.get()) ? 0.0 : std::fabs(mpfr_get_d(f.get(), MPFR_RNDZ));
            if (mag <= f.radius()) throw UndecidableComparison("sign below working precision");
            return mpfr_sgn(f.get());
        }
    }
    return 0;
}

double Scalar::to_double() const {
    switch (kind()) {
        case Kind::Rational: {
            // mpq get_d truncates; round to nearest instead.
            mpfr_t x;
            mpfr_init2(x, 53);
            mpfr_set_q(x, as_rational().get_mpq_t(), MPFR_RNDN);
            double r = mpfr_get_d(x, MPFR_RNDN);
            mpfr_clear(x);
            return r;
        }
        case Kind::Quadratic: {
            // Evaluate through MPFR so large cancelling coefficients stay accurate.
            const auto& q = as_quadratic();
            long prec = 64 + static_cast<long>(mpz_sizeinbase(q.a.get_num_mpz_t(), 2)) +
                        static_cast<long>(mpz_sizeinbase(q.b.get_num_mpz_t(), 2));
            mpfr_t a, b;
            mpfr_init2(a, prec);
            mpfr_init2(b, prec);
            mpfr_set_ui(b, static_cast<unsigned long>(q.d), MPFR_RNDN);
            mpfr_sqrt(b, b, MPFR_RNDN);
            mpfr_mul_q(b, b, q.b.get_mpq_t(), MPFR_RNDN);
            mpfr_set_q(a, q.a.get_mpq_t(), MPFR_RNDN);
            mpfr_add(a, a, b, MPFR_RNDN);
            double r = mpfr_get_d(a, MPFR_RNDN);
            mpfr_clear(a);
            mpfr_clear(b);
            return r;
        }
        case Kind::ApproxFloat: return as_approx().to_double();
    }
    return 0.0;
}

std::string Scalar::to_string() const {
    switch (kind()) {
        case Kind::Rational: return rational_text(as_rational());
        case Kind::Quadratic: {
            const auto& q = as_quadratic();
            std::string out = rational_text(q.a);
            if (sgn(q.b) < 0) {
                out += "-" + rational_text(mpq_class(-q.b));
            } else {
                out += "+" + rational_text(q.b);
            }
            return out + "*sqrt(" + std::to_string(q.d) + ")";
        }
        case Kind::ApproxFloat: {
            const auto& f = as_approx();
            // Enough digits to round-trip the binary value.
            int digits = static_cast<int>(std::ceil(f.precision() * 0.30103)) + 2;
            char* buf = nullptr;
            mpfr_asprintf(&buf, "%.*Re", digits, f.get());
            std::string out(buf);
            mpfr_free_str(buf);
            return out + "~prec=" + std::to_string(f.precision());
        }
    }
    return {};
}

Scalar Scalar::operator-() const { return Scalar(0L) - *this; }

Scalar arith(const Scalar& x, ArithOp op, const Scalar& y) {
    auto kind = common_kind(x, y);
    switch (kind) {
        case Scalar::Kind::Rational: {
            const auto& a = x.as_rational();
            const auto& b = y.as_rational();
            switch (op) {
                case ArithOp::Add: return Scalar::rational(a + b);
                case ArithOp::Sub: return Scalar::rational(a - b);
                case ArithOp::Mul: return Scalar::rational(a * b);
                case ArithOp::Div:
                    if (sgn(b) == 0) throw DivisionByZero("division by zero");
                    return Scalar::rational(a / b);
            }
            break;
        }
        case Scalar::Kind::Quadratic: {
            long d = std::max(x.field(), y.field());
            auto p = to_quadratic(x, d);
            auto q = to_quadratic(y, d);
            switch (op) {
                case ArithOp::Add: return Scalar::quadratic(p.a + q.a, p.b + q.b, d);
                case ArithOp::Sub: return Scalar::quadratic(p.a - q.a, p.b - q.b, d);
                case ArithOp::Mul:
                    return Scalar::quadratic(p.a * q.a + p.b * q.b * d, p.a * q.b + p.b * q.a, d);
                case ArithOp::Div: {
                    // Multiply through by the conjugate of the divisor.
                    mpq_class norm = q.a * q.a - q.b * q.b * d;
                    if (sgn(norm) == 0) throw DivisionByZero("division by zero");
                    mpq_class ra = (p.a * q.a - p.b * q.b * d) / norm;
                    mpq_class rb = (p.b * q.a - p.a * q.b) / norm;
                    return Scalar::quadratic(ra, rb, d);
                }
            }
            break;
        }
        case Scalar::Kind::ApproxFloat: {
            long prec = std::max(x.precision(), y.precision());
            return Scalar::approx(approx_binary(to_approx(x, prec), op, to_approx(y, prec)));
        }
    }
    throw InvalidArgument("unknown arithmetic operation");
}

Scalar operator+(const Scalar& x, const Scalar& y) { return arith(x, ArithOp::Add, y); }
Scalar operator-(const Scalar& x, const Scalar& y) { return arith(x, ArithOp::Sub, y); }
Scalar operator*(const Scalar& x, const Scalar& y) { return arith(x, ArithOp::Mul, y); }
Scalar operator/(const Scalar& x, const Scalar& y) { return arith(x, ArithOp::Div, y); }

Ordering compare(const Scalar& a, const Scalar& b) {
    auto kind = common_kind(a, b);
    int s = 0;
    if (kind == Scalar::Kind::Rational) {
        s = cmp(a.as_rational(), b.as_rational());
    } else if (kind == Scalar::Kind::ApproxFloat) {
        long prec = std::max(a.precision(), b.precision());
        auto x = to_approx(a, prec);
        auto y = to_approx(b, prec);
        if (x.radius() == 0.0 && y.radius() == 0.0) {
            s = mpfr_cmp(x.get(), y.get());
        } else {
            s = (Scalar::approx(x) - Scalar::approx(y)).sign();
        }
    } else {
        s = (a - b).sign();
    }
    return s < 0 ? Ordering::Less : (s > 0 ? Ordering::Greater : Ordering::Equal);
}

bool operator==(const Scalar& x, const Scalar& y) { return compare(x, y) == Ordering::Equal; }
bool operator<(const Scalar& x, const Scalar& y) { return compare(x, y) == Ordering::Less; }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

// -------------------------------------------------------------------- parsing

Scalar parse_scalar(std::string_view text) {
    static const std::regex rational_re(R"(^\s*([+-]?\d+(?:/\d+)?)\s*$)");
    static const std::regex quadratic_re(
        R"(^\s*([+-]?\d+(?:/\d+)?)?\s*(?:([+-])\s*(\d+(?:/\d+)?)?\s*\*?\s*)?sqrt\(\s*(\d+)\s*\)\s*$)");
    static const std::regex float_re(
        R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*~\s*prec\s*=\s*(\d+)\s*$)");

    std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, rational_re)) return Scalar::rational(parse_rational(m[1].str()));
    if (std::regex_match(s, m, float_re)) {
        long prec = std::stol(m[2].str());
        ApproxFloat f(prec);
        int t = mpfr_set_str(f.get(), m[1].str().c_str(), 10, MPFR_RNDN);
        if (t != 0) throw ParseError("malformed float: " + s);
        // mpfr_set_str reports no ternary value; detect inexact decimals by
        // re-reading at higher precision.
        {
            ApproxFloat exact_check(prec + 64);
            mpfr_set_str(exact_check.get(), m[1].str().c_str(), 10, MPFR_RNDN);
            if (!mpfr_equal_p(exact_check.get(), f.get())) {
                double mag = abs_upper(f.get());
                f.set_radius(up(std::ldexp(mag == 0.0 ? std::numeric_limits<double>::denorm_min() : mag,
                                           -static_cast<int>(prec) + 1)));
            }
        }
        return Scalar::approx(std::move(f));
    }
    if (s.find("sqrt") != std::string::npos && std::regex_match(s, m, quadratic_re)) {
        mpq_class a = m[1].matched ? parse_rational(m[1].str()) : mpq_class(0);
        mpq_class b = m[3].matched ? parse_rational(m[3].str()) : mpq_class(1);
        if (m[2].matched && m[2].str() == "-") b = -b;
        if (!m[1].matched && !m[2].matched) b = 1;
        long d = std::stol(m[4].str());
        if (!is_square_free(d)) throw ParseError("sqrt argument must be square-free: " + s);
        return Scalar::quadratic(a, b, d);
    }
    throw ParseError("malformed scalar: '" + s + "'");
}

Backend Backend::parse(std::string_view tag) {
    std::string t(tag);
    Backend b;
    if (t == "rational") return b;
    auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError("unknown backend tag: " + t);
    std::string head = t.substr(0, colon);
    long value = 0;
    try {
        value = std::stol(t.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParseError("unknown backend tag: " + t);
    }
    if (head == "quad") {
        if (!is_square_free(value)) throw ParseError("quad backend needs square-free d: " + t);
        b.kind = Scalar::Kind::Quadratic;
        b.d = value;
    } else if (head == "float") {
        if (value < 2) throw ParseError("float backend needs precision >= 2: " + t);
        b.kind = Scalar::Kind::ApproxFloat;
        b.precision = value;
    } else {
        throw ParseError("unknown backend tag: " + t);
    }
    return b;
}

std::string Backend::tag() const {
    switch (kind) {
        case Scalar::Kind::Rational: return "rational";
        case Scalar::Kind::Quadratic: return "quad:" + std::to_string(d);
        case Scalar::Kind::ApproxFloat: return "float:" + std::to_string(precision);
    }
    return {};
}

Scalar Backend::from(const Scalar& s) const {
    switch (kind) {
        case Scalar::Kind::Rational:
            if (s.kind() != Scalar::Kind::Rational)
                throw MixedField("value " + s.to_string() + " is not rational");
            return s;
        case Scalar::Kind::Quadratic:
            if (s.kind() == Scalar::Kind::Rational) return Scalar::quadratic(s.as_rational(), 0, d);
            if (s.kind() == Scalar::Kind::Quadratic && s.field() == d) return s;
            throw MixedField("value " + s.to_string() + " is not in Q(sqrt(" + std::to_string(d) + "))");
        case Scalar::Kind::ApproxFloat:
            if (s.kind() == Scalar::Kind::Rational) return Scalar::approx(s.as_rational(), precision);
            if (s.kind() == Scalar::Kind::ApproxFloat) {
                if (s.precision() > precision) return s;  // precision never decreases
                ApproxFloat f(precision);
                mpfr_set(f.get(), s.as_approx().get(), MPFR_RNDN);
                f.set_radius(s.as_approx().radius());
                return Scalar::approx(std::move(f));
            }
            throw MixedField("quadratic value in a floating-point backend");
    }
    return s;
}

Scalar Backend::read(std::string_view text) const {
    std::string t(text);
    if (kind == Scalar::Kind::ApproxFloat && t.find('~') == std::string::npos &&
        (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
         t.find('E') != std::string::npos)) {
        t += "~prec=" + std::to_string(precision);
    }
    return from(parse_scalar(t));
}

Backend backend_of(const Scalar& s) {
    Backend b;
    b.kind = s.kind();
    b.d = s.field();
    b.precision = s.precision();
    return b;
}

}  // namespace fiet
