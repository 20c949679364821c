#pragma once

// Rauzy induction for interval exchanges with flips.
//
// With alpha0 the last symbol of the top row and alpha1 the last symbol of the
// bottom row, one step induces f on [0, nu), nu = |lambda| - min(lambda_alpha0,
// lambda_alpha1). The longer of the two intervals is the winner: its length
// drops by the loser's length, so lambda = R lambda' with R = E + E_{winner,
// loser}. Case A (lambda_alpha0 < lambda_alpha1) rewrites the top row, case B
// the bottom row; in both the loser is re-inserted next to the winner, on the
// side fixed by the winner's orientation, and its sign is multiplied by the
// winner's.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fiet/fiet.hpp"
#include "fiet/int_matrix.hpp"

namespace fiet {

enum class Case { A, B };

std::string_view to_string(Case c);
Case parse_case(std::string_view text);

struct StepDecision {
    Symbol alpha0 = 0;  // last on the top row
    Symbol alpha1 = 0;  // last on the bottom row
    std::optional<Case> which;  // nullopt on a tie
    Scalar nu;
};

StepDecision decide(const FlipIET& f);

// Purely combinatorial part of one step.
struct Transition {
    SignedPermutation next;
    Symbol winner = 0;
    Symbol loser = 0;
};

Transition transition(const SignedPermutation& p, Case c);

struct RauzyArrow {
    SignedPermutation from;
    SignedPermutation to;
    Case which = Case::A;
    Symbol winner = 0;  // the symbol whose interval shrinks
    Symbol loser = 0;

    // Signs of winner and loser in `from`.
    int winner_sign() const { return from.sign(winner); }
    int loser_sign() const { return from.sign(loser); }
    // The naming used in the literature on flipped Rauzy induction, where
    // case A calls alpha0 the winner; it always coincides with `loser` here.
    Symbol nominal_winner() const { return loser; }
    Symbol nominal_loser() const { return winner; }

    IntMatrix matrix() const;
};

IntMatrix transition_matrix(const RauzyArrow& arrow);

// Sequence of chained arrows with the running product R_gamma = R_1 ... R_m,
// so that lambda_start = R_gamma lambda_end.
class RauzyPath {
public:
    RauzyPath() = default;
    explicit RauzyPath(SignedPermutation start);

    const SignedPermutation& start() const { return start_; }
    const SignedPermutation& end() const { return arrows_.empty() ? start_ : arrows_.back().to; }
    const std::vector<RauzyArrow>& arrows() const { return arrows_; }
    std::size_t size() const { return arrows_.size(); }
    bool empty() const { return arrows_.empty(); }

    // Throws ChainMismatch when arrow.from differs from end().
    void append(RauzyArrow arrow);
    void append(const RauzyPath& other);

    const IntMatrix& induction_matrix() const { return r_; }
    // B_gamma = R_gamma^T.
    IntMatrix cocycle() const { return r_.transpose(); }

private:
    SignedPermutation start_;
    std::vector<RauzyArrow> arrows_;
    IntMatrix r_;
};

// B_gamma for an arbitrary arrow sequence; empty sequence gives the identity
// of size n. Throws ChainMismatch.
IntMatrix cocycle(std::span<const RauzyArrow> arrows, std::size_t n);
IntMatrix cocycle(const RauzyPath& path);

enum class StepOutcome { Advanced, Tie, Hole };
std::string_view to_string(StepOutcome o);

struct StepResult {
    StepOutcome outcome = StepOutcome::Tie;
    StepDecision decision;
    // Present for Advanced and Hole; on Hole `next` carries the reducible
    // successor, which is still the first-return map.
    std::optional<RauzyArrow> arrow;
    std::optional<FlipIET> next;
};

// Throws InvalidArgument for reducible input and UndecidableComparison from
// the ApproxFloat backend.
StepResult rauzy_step(const FlipIET& f);

struct ZorichRun {
    Case which = Case::A;
    std::vector<RauzyArrow> arrows;
    IntMatrix matrix;  // product of the constituent step matrices

    std::size_t length() const { return arrows.size(); }
};

struct ZorichResult {
    StepOutcome outcome = StepOutcome::Tie;
    ZorichRun run;  // partial when the run was cut by a tie or the hole
    std::optional<FlipIET> next;
};

// Groups consecutive same-case steps. Throws BudgetExceeded after
// `max_steps` single steps.
ZorichResult zorich_step(const FlipIET& f, std::size_t max_steps = 1'000'000);

bool is_complete(const RauzyPath& path);
bool is_positive(const RauzyPath& path);
// Positive loop (same start and end vertex up to relabelling) none of whose
// proper nonempty prefixes is also a suffix.
bool is_neat(const RauzyPath& path);

struct MarkovResult {
    bool returned = false;  // false: induction ended in a tie or the hole
    StepOutcome terminal = StepOutcome::Advanced;
    std::optional<FlipIET> next;  // normalized, canonical labelling
    RauzyPath path;
    double roof = 0.0;      // -log |R_gamma^{-1} lambda|
};

// Runs induction from f (|lambda| = 1, canonical permutation equal to the
// start of gamma_star) until the accumulated path ends with gamma_star.
// Throws BudgetExceeded after max_steps steps.
MarkovResult markov_map(const FlipIET& f, const RauzyPath& gamma_star, std::size_t max_steps = 1'000'000);

// Hilbert projective distance log(max(u/v) / min(u/v)).
double hilbert_distance(std::span<const double> u, std::span<const double> v);
double hilbert_distance(const LengthVector& u, const LengthVector& v);

// Key of an arrow up to relabelling: (canonical source, case).
std::uint64_t arrow_key(const RauzyArrow& a);

// Replays a case sequence from `start`; throws InvalidArgument when a step
// would leave a reducible permutation (the hole).
RauzyPath path_from_cases(const SignedPermutation& start, std::span<const Case> cases);

}  // namespace fiet
