#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiet/arithmetic.hpp"
#include "fiet/permutation.hpp"

namespace fiet {

// Strictly positive per-symbol lengths sharing one scalar backend.
class LengthVector {
public:
    LengthVector() = default;
    explicit LengthVector(std::vector<Scalar> values);

    std::size_t size() const { return values_.size(); }
    const Scalar& operator[](Symbol s) const { return values_[s]; }
    const std::vector<Scalar>& values() const { return values_; }
    Scalar norm() const;
    Backend backend() const;
    std::vector<double> to_doubles() const;

private:
    std::vector<Scalar> values_;
};

struct WidthVector {
    std::vector<Scalar> w;
};

// An interval exchange with flips on [0, |lambda|). The intervals I_s are laid
// out in top-row order; I_s is carried onto the bottom-row slot of s,
// reversing orientation when s is flipped. Immutable.
class FlipIET {
public:
    FlipIET(SignedPermutation perm, LengthVector lengths);

    const SignedPermutation& perm() const { return perm_; }
    const LengthVector& lengths() const { return lengths_; }
    std::size_t size() const { return perm_.size(); }
    const Scalar& length(Symbol s) const { return lengths_[s]; }
    const Scalar& total() const { return total_; }

    // Left endpoint of I_s and of its image slot.
    const Scalar& top_offset(Symbol s) const { return top_offset_[s]; }
    const Scalar& bottom_offset(Symbol s) const { return bottom_offset_[s]; }

    const WidthVector& widths() const { return widths_; }

    // Same map with symbols relabelled so that the top row is the identity.
    FlipIET canonical() const;
    // Same permutation, lengths divided by |lambda|.
    FlipIET normalized() const;

private:
    SignedPermutation perm_;
    LengthVector lengths_;
    Scalar total_;
    std::vector<Scalar> top_offset_;
    std::vector<Scalar> bottom_offset_;
    WidthVector widths_;
};

// w_s = (bottom offset) - (top offset) for unflipped s and
// (bottom offset) + lambda_s + (top offset) for flipped s, so that f is
// x + w_s, resp. w_s - x, on int(I_s).
WidthVector widths(const FlipIET& f);

// Symbol whose open interval contains x, or nullopt when x is a cell
// endpoint (0 included). Throws OutOfDomain outside [0, |lambda|).
std::optional<Symbol> locate(const FlipIET& f, const Scalar& x);

// f(x); nullopt (Undefined) at cell endpoints. Throws OutOfDomain.
std::optional<Scalar> evaluate(const FlipIET& f, const Scalar& x);

// Applies the branch of symbol s regardless of where x is; used for one-sided
// limits at endpoints.
Scalar apply_branch(const FlipIET& f, Symbol s, const Scalar& x);

FlipIET make_fiet(std::string_view perm_text, const std::vector<std::string>& lengths,
                  const Backend& backend = {});

}  // namespace fiet
