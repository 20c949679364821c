#pragma once

// Closed-form weights of induction cylinders and Monte Carlo checks of the
// probabilistic estimates around Rauzy induction.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fiet/induction.hpp"
#include "fiet/report.hpp"
#include "fiet/walker.hpp"

namespace fiet {

// Positive weight per symbol, a covector acted on by the cocycle.
class WeightVector {
public:
    // Throws InvalidArgument unless every entry is strictly positive.
    explicit WeightVector(std::vector<Scalar> q);
    static WeightVector uniform(std::size_t n);
    static WeightVector from_doubles(const std::vector<double>& q);

    std::size_t size() const { return q_.size(); }
    const Scalar& operator[](std::size_t i) const { return q_[i]; }
    const std::vector<Scalar>& values() const { return q_; }
    std::vector<double> to_doubles() const;

    Scalar product() const;  // N(q)
    // Product over the symbols whose bit is set in `mask`.
    Scalar product(std::uint64_t mask) const;
    Scalar max() const;      // M(q)
    Scalar min() const;      // m(q)
    // k-th largest entry, 1 <= k <= n: the largest minimum over k-subsets.
    Scalar max_min(std::size_t k) const;
    std::string to_string() const;

private:
    std::vector<Scalar> q_;
};

// B_gamma q.
WeightVector apply_cocycle(const RauzyPath& path, const WeightVector& q);

// nu_q(R^n_+) = 1 / (n! N(q)).
Scalar lambda_q_volume(const WeightVector& q);
// nu_q of the cylinder of gamma: 1 / (n! N(B_gamma q)).
Scalar cylinder_volume(const RauzyPath& path, const WeightVector& q);
// N(q) / N(B_gamma q).
Scalar conditional_probability(const RauzyPath& path, const WeightVector& q);
// q_loser / (q_winner + q_loser).
Scalar conditional_probability(const RauzyArrow& arrow, const WeightVector& q);

struct DistortionStats {
    Scalar max;                // M(B_gamma q)
    Scalar min;                // m(B_gamma q)
    std::vector<Scalar> max_min;  // m_k for k = 1..n
    double max_over_min = 0.0;
    double max_over_initial = 0.0;  // M(B_gamma q) / M(q)
};
DistortionStats distortion_stats(const RauzyPath& path, const WeightVector& q);

struct RunOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0: default_threads()
    std::size_t max_steps = 1'000'000;
    long escalate_precision = 212;
};

// Monte Carlo estimate of Leb(Lambda_q) from the bounding box, gated at 3 sigma.
ExperimentReport volume_experiment(const WeightVector& q, const RunOptions& opt);

// Hit rate of the cylinder of `path` among points of Lambda_q against
// cylinder_volume, gated at 3 sigma.
ExperimentReport cylinder_experiment(const RauzyPath& path, const WeightVector& q, const RunOptions& opt);

// For each symbol alpha and threshold T: probability that (B_gamma q)_alpha
// exceeds T q_alpha before alpha first wins. Gate: <= n/T + 3 sigma.
ExperimentReport kerckhoff_experiment(const SignedPermutation& p, const WeightVector& q,
                                      const std::vector<double>& thresholds, const RunOptions& opt);

// Probability that some nonempty prefix of length <= depth has
// M(B q) < C min(m(B q), M(q)), for each C of the grid (all > 1).
ExperimentReport distortion_experiment(const SignedPermutation& p, const WeightVector& q,
                                       const std::vector<double>& c_grid, std::size_t depth,
                                       const RunOptions& opt);

// Fraction of uniform lambda that go through `depth` Zorich steps without a
// tie or the hole, for every requested depth.
ExperimentReport survival_fraction(const SignedPermutation& p, const std::vector<std::size_t>& depths,
                                   const RunOptions& opt, double threshold = -1.0, std::size_t gate_depth = 0);

// Zorich depth reached by one length vector, capped at max_depth. Exposed for
// cross-checks against the exact backend. `refine` supplies the low bits of
// an escalated sample.
struct SurvivalSample {
    std::size_t depth = 0;
    bool escalated = false;
    bool discarded = false;
    bool budget = false;
};
SurvivalSample survival_depth(const TransitionTable& table, const SignedPermutation& p,
                              const std::vector<double>& lengths, std::size_t max_depth, const RunOptions& opt,
                              Rng* refine = nullptr);

// Return of uniform points of the section simplex under the Markov map of
// gamma_star, computed with the fast walker.
struct ReturnSample {
    bool returned = false;
    bool escalated = false;
    bool discarded = false;
    bool budget = false;
    double roof = 0.0;
    double roof_error = 0.0;   // bound on the rounding error of roof
    double log_mass = 0.0;     // -sum log (column sums of R_gamma)
    std::uint64_t cylinder = 0;  // hash of the return path
    std::size_t steps = 0;
};
ReturnSample markov_return(const TransitionTable& table, const RauzyPath& gamma_star,
                           const std::vector<double>& lengths, const RunOptions& opt, Rng* refine = nullptr);

// Fit of log P(r >= log T) against log T. Gate: slope < 0 and R^2 > 0.9.
ExperimentReport roof_tail(const RauzyPath& gamma_star, const std::vector<double>& thresholds,
                           const RunOptions& opt);

// Fit of log sum_{mass <= eps} mass against log eps over first-return
// cylinders. Gate: alpha_1 > 0 and R^2 > 0.9.
ExperimentReport fast_decay_check(const RauzyPath& gamma_star, const std::vector<double>& eps_grid,
                                  const RunOptions& opt);

// Hilbert contraction of the inverse branch h, Jacobian closed form against
// central differences, and the Lipschitz bound of log J.
ExperimentReport expansion_check(const RauzyPath& gamma, std::size_t pairs, const RunOptions& opt);

// Box counts of cells of the length simplex holding a survivor to each depth.
// Points come from `per_cell` jittered samples in every cell of the finest
// grid plus `targeted` points pushed through random hole-free paths of the
// deepest depth, since uniform samples rarely survive long. Every point is
// counted at the depth its own walk reaches. The slope is fitted at the
// deepest depth. Throws GridTooCoarse when fewer than 3 resolutions have a
// nonzero count.
ExperimentReport box_dimension(const SignedPermutation& p, const std::vector<std::size_t>& depths,
                               const std::vector<std::size_t>& resolutions, std::size_t per_cell,
                               std::size_t targeted, const RunOptions& opt, double lo = 0.9, double hi = 2.0);

}  // namespace fiet
