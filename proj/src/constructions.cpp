#include "fiet/constructions.hpp"

#include "fiet/error.hpp"

namespace fiet {

FlipIET rotation_iet(const Scalar& alpha) {
    if (alpha.sign() <= 0 || compare(alpha, Scalar(1L)) != Ordering::Less)
        throw InvalidArgument("rotation number must lie in (0, 1), got " + alpha.to_string());
    return FlipIET(parse_permutation("2 1"), LengthVector({Scalar(1L) - alpha, alpha}));
}

Scalar golden_alpha() { return Scalar::quadratic(mpq_class(-1, 2), mpq_class(1, 2), 5); }

FlipIET golden_rotation() { return rotation_iet(golden_alpha()); }

FlipIET glue_flip(const FlipIET& s) {
    const auto& p = s.perm();
    const std::size_t n = p.size();
    if (n == 0) throw MissingAlpha0("empty IET has no first bottom symbol");
    if (p.has_flips()) throw InvalidArgument("glue_flip needs an IET without flips");
    try {
        if (compare(s.total(), Scalar(1L)) != Ordering::Equal)
            throw InvalidArgument("glue_flip needs |lambda| = 1, got " + s.total().to_string());
    } catch (const UndecidableComparison&) {
    }
    const Symbol alpha0 = p.bottom_at(0);
    if (p.bottom_position(alpha0) != 0) throw MissingAlpha0("no symbol in bottom position 1");
    const Symbol glued = static_cast<Symbol>(n);

    std::vector<Symbol> top = p.top();
    top.push_back(glued);
    std::vector<Symbol> bottom{glued};
    for (std::size_t i = 1; i < n; ++i) bottom.push_back(p.bottom_at(i));
    bottom.push_back(alpha0);
    std::vector<bool> flipped(n + 1, false);
    flipped[alpha0] = true;
    flipped[glued] = true;

    std::vector<Scalar> lengths = s.lengths().values();
    lengths.push_back(s.length(alpha0));
    return FlipIET(SignedPermutation(std::move(top), std::move(bottom), std::move(flipped)),
                   LengthVector(std::move(lengths)));
}

}  // namespace fiet
