#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "fiet/arithmetic.hpp"

namespace fiet {

// Dense square matrix of arbitrary-size integers.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(std::size_t n) : n_(n), a_(n * n, 0) {}

    static IntMatrix identity(std::size_t n);
    // E + E_{row,col}.
    static IntMatrix elementary(std::size_t n, std::size_t row, std::size_t col);

    std::size_t size() const { return n_; }
    const mpz_class& operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    mpz_class& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }

    IntMatrix transpose() const;
    mpz_class determinant() const;
    bool is_positive() const;
    bool is_nonnegative() const;
    std::size_t nonzero_count() const;

    // this <- this * (E + E_{row,col}), i.e. column col += column row.
    void right_multiply_elementary(std::size_t row, std::size_t col);
    // this <- (E + E_{row,col}) * this, i.e. row row += row col.
    void left_multiply_elementary(std::size_t row, std::size_t col);

    std::vector<Scalar> apply(const std::vector<Scalar>& v) const;
    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<mpz_class> column_sums() const;
    std::vector<mpz_class> row_sums() const;

    std::string to_string() const;

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y);
    friend bool operator==(const IntMatrix& x, const IntMatrix& y) = default;

private:
    std::size_t n_ = 0;
    std::vector<mpz_class> a_;
};

}  // namespace fiet
