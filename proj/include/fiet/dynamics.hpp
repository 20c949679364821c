#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fiet/fiet.hpp"
#include "fiet/induction.hpp"
#include "fiet/sampling.hpp"

namespace fiet {

enum class OrbitStop { Budget, HitEndpoint, CycleDetected, LeftDomain };
std::string_view to_string(OrbitStop s);

struct OrbitRecord {
    Scalar start;
    std::vector<Scalar> iterates;  // iterates[0] == start when kept
    std::vector<Symbol> cells;     // cell of iterates[i]
    OrbitStop stop = OrbitStop::Budget;
    std::size_t steps = 0;         // number of applications of f performed
    std::size_t period = 0;        // set on CycleDetected
};

// Iterates until the budget, an endpoint, or (exact backends only) a return to
// x0. f is injective on cell interiors, so the first repeated value of a
// forward orbit is x0 itself. Comparisons that the ApproxFloat backend cannot
// decide count as hitting an endpoint.
OrbitRecord iterate_orbit(const FlipIET& f, const Scalar& x0, std::size_t budget, bool keep_iterates = true);

struct PeriodicPoint {
    std::size_t period = 0;
    Scalar witness;
};

// Tries cell midpoints, then the one-sided images of every cell endpoint.
// Throws InvalidArgument for the ApproxFloat backend.
std::optional<PeriodicPoint> detect_periodic(const FlipIET& f, std::size_t budget);

enum class Terminal { SurvivedBudget, Tie, Hole, Undecidable };
std::string_view to_string(Terminal t);

struct MinimalityVerdict {
    std::size_t depth = 0;  // steps attempted, the terminating one included
    Terminal terminal = Terminal::SurvivedBudget;
    bool complete = false;
    bool positive = false;
};

// Requires |lambda| = 1.
MinimalityVerdict minimality_certificate(const FlipIET& f, std::size_t depth);

// First return of x to [0, nu) under f; nullopt if an endpoint is hit or
// `max_iterations` is exceeded.
std::optional<Scalar> first_return(const FlipIET& f, const Scalar& nu, const Scalar& x,
                                   std::size_t max_iterations = 1000);

struct FirstReturnReport {
    std::size_t agreements = 0;
    std::size_t disagreements = 0;
    std::size_t resampled = 0;  // orbit hit an endpoint before returning
};

// Compares step.next against the simulated first-return map of f to
// [0, nu) at `samples` random exact points of (0, nu).
FirstReturnReport verify_first_return(const FlipIET& f, const FlipIET& next, const Scalar& nu,
                                      std::size_t samples, Rng& rng);
FirstReturnReport verify_first_return(const FlipIET& f, const StepResult& step, std::size_t samples, Rng& rng);

// max_k |#{x_i < k |lambda| / bins} / N - k / bins|.
double bin_discrepancy(const std::vector<double>& normalized_points, std::size_t bins);

}  // namespace fiet
