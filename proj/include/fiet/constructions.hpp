#pragma once

#include "fiet/fiet.hpp"

namespace fiet {

// The rotation x -> x + alpha mod 1 as the 2-IET "2 1" with lengths
// (1 - alpha, alpha). Requires 0 < alpha < 1.
FlipIET rotation_iet(const Scalar& alpha);

// alpha = (sqrt(5) - 1) / 2 in Q(sqrt 5).
Scalar golden_alpha();
FlipIET golden_rotation();

// Glues an extra flipped interval N of length lambda_{alpha0} after [0, 1),
// where alpha0 is the first symbol of S's bottom row. On [0, 1 + lambda_{alpha0}):
// T = S off I_{alpha0}, I_{alpha0} goes flipped onto the new segment and the
// new segment goes flipped onto S's image slot [0, lambda_{alpha0}). The first
// return of T to [0, 1) is S.
//
// S must be a plain IET (no flips) on [0, 1).
FlipIET glue_flip(const FlipIET& s);

}  // namespace fiet
