#include "fiet/int_matrix.hpp"

#include <sstream>

#include "fiet/error.hpp"

namespace fiet {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::elementary(std::size_t n, std::size_t row, std::size_t col) {
    if (row >= n || col >= n || row == col) throw InvalidArgument("elementary matrix needs row != col");
    IntMatrix m = identity(n);
    m(row, col) = 1;
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(n_);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

// Bareiss fraction-free elimination.
mpz_class IntMatrix::determinant() const {
    if (n_ == 0) return 1;
    std::vector<mpz_class> m = a_;
    auto at = [&](std::size_t r, std::size_t c) -> mpz_class& { return m[r * n_ + c]; };
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n_; ++k) {
        if (at(k, k) == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n_ && at(swap_row, k) == 0) ++swap_row;
            if (swap_row == n_) return 0;
            for (std::size_t c = 0; c < n_; ++c) std::swap(at(k, c), at(swap_row, c));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n_; ++i) {
            for (std::size_t j = k + 1; j < n_; ++j) {
                at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
            }
        }
        prev = at(k, k);
    }
    return sign * at(n_ - 1, n_ - 1);
}

bool IntMatrix::is_positive() const {
    for (const auto& x : a_)
        if (sgn(x) <= 0) return false;
    return true;
}

bool IntMatrix::is_nonnegative() const {
    for (const auto& x : a_)
        if (sgn(x) < 0) return false;
    return true;
}

std::size_t IntMatrix::nonzero_count() const {
    std::size_t k = 0;
    for (const auto& x : a_)
        if (sgn(x) != 0) ++k;
    return k;
}

void IntMatrix::right_multiply_elementary(std::size_t row, std::size_t col) {
    for (std::size_t r = 0; r < n_; ++r) (*this)(r, col) += (*this)(r, row);
}

void IntMatrix::left_multiply_elementary(std::size_t row, std::size_t col) {
    for (std::size_t c = 0; c < n_; ++c) (*this)(row, c) += (*this)(col, c);
}

std::vector<Scalar> IntMatrix::apply(const std::vector<Scalar>& v) const {
    if (v.size() != n_) throw InvalidArgument("dimension mismatch in matrix-vector product");
    std::vector<Scalar> out;
    out.reserve(n_);
    for (std::size_t r = 0; r < n_; ++r) {
        Scalar acc = v[0] * Scalar::rational(mpq_class((*this)(r, 0)));
        for (std::size_t c = 1; c < n_; ++c) {
            if (sgn((*this)(r, c)) == 0) continue;
            acc += v[c] * Scalar::rational(mpq_class((*this)(r, c)));
        }
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<double> IntMatrix::apply(const std::vector<double>& v) const {
    if (v.size() != n_) throw InvalidArgument("dimension mismatch in matrix-vector product");
    std::vector<double> out(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) out[r] += (*this)(r, c).get_d() * v[c];
    return out;
}

std::vector<mpz_class> IntMatrix::column_sums() const {
    std::vector<mpz_class> s(n_, 0);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) s[c] += (*this)(r, c);
    return s;
}

std::vector<mpz_class> IntMatrix::row_sums() const {
    std::vector<mpz_class> s(n_, 0);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c) s[r] += (*this)(r, c);
    return s;
}

std::string IntMatrix::to_string() const {
    std::ostringstream out;
    out << '[';
    for (std::size_t r = 0; r < n_; ++r) {
        out << (r ? ", [" : "[");
        for (std::size_t c = 0; c < n_; ++c) out << (c ? ", " : "") << (*this)(r, c).get_str();
        out << ']';
    }
    out << ']';
    return out.str();
}

IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    if (x.n_ != y.n_) throw InvalidArgument("dimension mismatch in matrix product");
    IntMatrix z(x.n_);
    for (std::size_t r = 0; r < x.n_; ++r)
        for (std::size_t k = 0; k < x.n_; ++k) {
            if (sgn(x(r, k)) == 0) continue;
            for (std::size_t c = 0; c < x.n_; ++c) z(r, c) += x(r, k) * y(k, c);
        }
    return z;
}

}  // namespace fiet
