#pragma once

// Scalar arithmetic with three interchangeable backends:
//
//   Rational     p/q with arbitrary-size integers (GMP),
//   Quadratic    a + b*sqrt(d), a, b rational, d square-free and positive,
//   ApproxFloat  MPFR value at a fixed precision plus an absolute error
//                radius; comparisons are answered only when the two
//                enclosures are disjoint.
//
// Exact backends never round. A Rational operand is promoted silently when
// combined with a Quadratic or ApproxFloat one (Q is a subfield of both);
// any other mix of backends raises MixedField.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>
#include <mpfr.h>

#include "fiet/error.hpp"

namespace fiet {

enum class Ordering { Less, Equal, Greater };

std::string_view to_string(Ordering o);

struct QuadraticNumber {
    mpq_class a;
    mpq_class b;
    long d = 0;
};

// MPFR value with an absolute error bound. The bound is an upper estimate of
// the distance between the stored midpoint and the real number it stands for.
class ApproxFloat {
public:
    explicit ApproxFloat(long precision_bits);
    ApproxFloat(double value, long precision_bits);
    ApproxFloat(const mpq_class& value, long precision_bits);
    ApproxFloat(const ApproxFloat& other);
    ApproxFloat(ApproxFloat&& other) noexcept;
    ApproxFloat& operator=(const ApproxFloat& other);
    ApproxFloat& operator=(ApproxFloat&& other) noexcept;
    ~ApproxFloat();

    long precision() const { return static_cast<long>(mpfr_get_prec(value_)); }
    double radius() const { return radius_; }
    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

    mpfr_srcptr get() const { return value_; }
    mpfr_ptr get() { return value_; }
    void set_radius(double r) { radius_ = r; }

private:
    mpfr_t value_;
    bool moved_from_ = false;
    double radius_ = 0.0;
};

class Scalar {
public:
    enum class Kind { Rational, Quadratic, ApproxFloat };

    Scalar() : value_(mpq_class(0)) {}
    Scalar(long v) : value_(mpq_class(v)) {}  // NOLINT: integer literals are scalars

    static Scalar rational(const mpq_class& q);
    static Scalar rational(long num, long den);
    static Scalar quadratic(const mpq_class& a, const mpq_class& b, long d);
    static Scalar approx(double v, long precision_bits);
    static Scalar approx(const mpq_class& v, long precision_bits);
    static Scalar approx(ApproxFloat v);

    Kind kind() const { return static_cast<Kind>(value_.index()); }
    bool is_exact() const { return kind() != Kind::ApproxFloat; }

    const mpq_class& as_rational() const { return std::get<mpq_class>(value_); }
    const QuadraticNumber& as_quadratic() const { return std::get<QuadraticNumber>(value_); }
    const ApproxFloat& as_approx() const { return std::get<ApproxFloat>(value_); }

    // Field discriminant for Quadratic, 0 otherwise.
    long field() const;
    long precision() const;

    // -1, 0, +1. Throws UndecidableComparison for ApproxFloat values whose
    // enclosure contains zero.
    int sign() const;
    bool is_zero() const { return sign() == 0; }

    double to_double() const;
    std::string to_string() const;

    Scalar operator-() const;
    friend Scalar operator+(const Scalar& x, const Scalar& y);
    friend Scalar operator-(const Scalar& x, const Scalar& y);
    friend Scalar operator*(const Scalar& x, const Scalar& y);
    friend Scalar operator/(const Scalar& x, const Scalar& y);
    Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
    Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
    Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

    // Decided through compare(); may throw UndecidableComparison.
    friend bool operator==(const Scalar& x, const Scalar& y);
    friend bool operator<(const Scalar& x, const Scalar& y);
    friend bool operator<=(const Scalar& x, const Scalar& y) { return !(y < x); }
    friend bool operator>(const Scalar& x, const Scalar& y) { return y < x; }
    friend bool operator>=(const Scalar& x, const Scalar& y) { return !(x < y); }

private:
    template <class T>
    explicit Scalar(T v) : value_(std::move(v)) {}

    std::variant<mpq_class, QuadraticNumber, ApproxFloat> value_;
};

Ordering compare(const Scalar& a, const Scalar& b);

enum class ArithOp { Add, Sub, Mul, Div };
Scalar arith(const Scalar& a, ArithOp op, const Scalar& b);

// Text forms: "p/q", "a+b*sqrt(d)", "<decimal>~prec=<bits>".
Scalar parse_scalar(std::string_view text);

// Backend tags: "rational", "quad:<d>", "float:<bits>".
struct Backend {
    Scalar::Kind kind = Scalar::Kind::Rational;
    long d = 0;
    long precision = 0;

    static Backend parse(std::string_view tag);
    std::string tag() const;
    // Interprets `text` in this backend: rationals are promoted, decimals
    // without a precision suffix are read at this backend's precision.
    Scalar read(std::string_view text) const;
    Scalar from(const Scalar& s) const;
    friend bool operator==(const Backend&, const Backend&) = default;
};

Backend backend_of(const Scalar& s);

bool is_square_free(long d);

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace fiet
