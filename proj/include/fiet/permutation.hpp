#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace fiet {

// Symbols are 0-based internally and printed 1-based.
using Symbol = int;

// Combinatorial datum of an fIET: the order of the intervals before (top row)
// and after (bottom row) the map, and a flip sign per symbol.
class SignedPermutation {
public:
    SignedPermutation() = default;

    // top[i]: symbol at top position i; bottom[i]: symbol at bottom position i;
    // flipped[s]: whether symbol s is flipped. Throws InvalidArgument unless
    // both rows are permutations of 0..n-1.
    SignedPermutation(std::vector<Symbol> top, std::vector<Symbol> bottom, std::vector<bool> flipped);

    // Top row is the identity; symbol j sits at bottom position |s_j| - 1,
    // flipped iff s_j < 0.
    static SignedPermutation from_signed(const std::vector<int>& s);

    std::size_t size() const { return top_.size(); }

    Symbol top_at(std::size_t pos) const { return top_[pos]; }
    Symbol bottom_at(std::size_t pos) const { return bottom_[pos]; }
    std::size_t top_position(Symbol s) const { return top_pos_[s]; }
    std::size_t bottom_position(Symbol s) const { return bottom_pos_[s]; }
    bool flipped(Symbol s) const { return flipped_[s]; }
    int sign(Symbol s) const { return flipped_[s] ? -1 : 1; }
    bool has_flips() const;
    std::size_t flip_count() const;

    const std::vector<Symbol>& top() const { return top_; }
    const std::vector<Symbol>& bottom() const { return bottom_; }
    const std::vector<bool>& flips() const { return flipped_; }

    bool top_is_identity() const;

    // Relabels symbols so that the top row becomes the identity. `relabel`,
    // when given, receives old-symbol -> new-symbol.
    SignedPermutation canonical(std::vector<Symbol>* relabel = nullptr) const;

    // One-line form when the top row is the identity, otherwise the two-row
    // form "t_1 ... t_n | b_1 ... b_n" with signs on the bottom row.
    std::string to_string() const;
    std::string canonical_string() const { return canonical().to_string(); }

    // Injective 64-bit key for n <= 9.
    std::uint64_t encode() const;

    friend bool operator==(const SignedPermutation& a, const SignedPermutation& b) {
        return a.top_ == b.top_ && a.bottom_ == b.bottom_ && a.flipped_ == b.flipped_;
    }

private:
    std::vector<Symbol> top_;
    std::vector<Symbol> bottom_;
    std::vector<bool> flipped_;
    std::vector<std::size_t> top_pos_;
    std::vector<std::size_t> bottom_pos_;
};

// Accepts the one-line form "s_1 ... s_n" and the two-row form
// "t_1 ... t_n | b_1 ... b_n". Throws ParseError.
SignedPermutation parse_permutation(std::string_view text);

// No proper prefix of the top row occupies the same positions on the bottom
// row. Signs do not enter the criterion.
bool is_irreducible(const SignedPermutation& p);

// All signed permutations of size n with identity top row, in lexicographic
// order of the one-line form (bottom positions, then signs).
std::vector<SignedPermutation> all_signed_permutations(std::size_t n);

}  // namespace fiet

template <>
struct std::hash<fiet::SignedPermutation> {
    std::size_t operator()(const fiet::SignedPermutation& p) const noexcept {
        return std::hash<std::uint64_t>{}(p.encode());
    }
};
