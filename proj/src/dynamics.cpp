#include "fiet/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "fiet/error.hpp"

namespace fiet {

std::string_view to_string(OrbitStop s) {
    switch (s) {
        case OrbitStop::Budget: return "Budget";
        case OrbitStop::HitEndpoint: return "HitEndpoint";
        case OrbitStop::CycleDetected: return "CycleDetected";
        case OrbitStop::LeftDomain: return "LeftDomain";
    }
    return "?";
}

std::string_view to_string(Terminal t) {
    switch (t) {
        case Terminal::SurvivedBudget: return "SurvivedBudget";
        case Terminal::Tie: return "Tie";
        case Terminal::Hole: return "Hole";
        case Terminal::Undecidable: return "Undecidable";
    }
    return "?";
}

OrbitRecord iterate_orbit(const FlipIET& f, const Scalar& x0, std::size_t budget, bool keep_iterates) {
    OrbitRecord rec;
    rec.start = x0;
    const bool exact = x0.is_exact() && f.total().is_exact();
    Scalar x = x0;
    for (;;) {
        std::optional<Symbol> cell;
        try {
            cell = locate(f, x);
        } catch (const OutOfDomain&) {
            rec.stop = OrbitStop::LeftDomain;
            return rec;
        } catch (const UndecidableComparison&) {
            rec.stop = OrbitStop::HitEndpoint;
            return rec;
        }
        if (keep_iterates) {
            rec.iterates.push_back(x);
            rec.cells.push_back(cell.value_or(-1));
        }
        if (!cell) {
            rec.stop = OrbitStop::HitEndpoint;
            return rec;
        }
        if (rec.steps >= budget) {
            rec.stop = OrbitStop::Budget;
            return rec;
        }
        x = apply_branch(f, *cell, x);
        ++rec.steps;
        if (exact && compare(x, x0) == Ordering::Equal) {
            rec.stop = OrbitStop::CycleDetected;
            rec.period = rec.steps;
            return rec;
        }
    }
}

std::optional<PeriodicPoint> detect_periodic(const FlipIET& f, std::size_t budget) {
    if (!f.total().is_exact()) throw InvalidArgument("detect_periodic needs an exact backend");
    const auto& p = f.perm();
    const std::size_t n = p.size();
    std::vector<Scalar> starts;
    for (std::size_t i = 0; i < n; ++i) {
        Symbol s = p.top_at(i);
        starts.push_back(f.top_offset(s) + f.length(s) / Scalar(2L));
    }
    // One-sided images of every endpoint, including 0 and |lambda|.
    for (std::size_t i = 0; i < n; ++i) {
        Symbol s = p.top_at(i);
        starts.push_back(apply_branch(f, s, f.top_offset(s)));
        starts.push_back(apply_branch(f, s, f.top_offset(s) + f.length(s)));
    }
    for (const auto& x : starts) {
        if (x.sign() < 0 || compare(x, f.total()) != Ordering::Less) continue;
        auto rec = iterate_orbit(f, x, budget, false);
        if (rec.stop == OrbitStop::CycleDetected) return PeriodicPoint{rec.period, x};
    }
    return std::nullopt;
}

MinimalityVerdict minimality_certificate(const FlipIET& f, std::size_t depth) {
    try {
        if (compare(f.total(), Scalar(1L)) != Ordering::Equal)
            throw InvalidArgument("minimality_certificate needs |lambda| = 1");
    } catch (const UndecidableComparison&) {
        // Float lengths normalized by rounding are accepted as they are.
    }
    MinimalityVerdict v;
    const std::size_t n = f.size();
    RauzyPath path(f.perm());
    std::vector<bool> won(n, false);
    FlipIET current = f;
    for (; v.depth < depth; ++v.depth) {
        StepResult s;
        try {
            s = rauzy_step(current);
        } catch (const UndecidableComparison&) {
            ++v.depth;
            v.terminal = Terminal::Undecidable;
            break;
        }
        if (s.outcome == StepOutcome::Tie) {
            ++v.depth;
            v.terminal = Terminal::Tie;
            break;
        }
        won[s.arrow->winner] = true;
        path.append(std::move(*s.arrow));
        current = std::move(*s.next);
        if (s.outcome == StepOutcome::Hole) {
            ++v.depth;
            v.terminal = Terminal::Hole;
            break;
        }
    }
    v.complete = std::all_of(won.begin(), won.end(), [](bool b) { return b; });
    v.positive = path.induction_matrix().is_positive();
    return v;
}

std::optional<Scalar> first_return(const FlipIET& f, const Scalar& nu, const Scalar& x, std::size_t max_iterations) {
    Scalar y = x;
    for (std::size_t i = 0; i < max_iterations; ++i) {
        auto next = evaluate(f, y);
        if (!next) return std::nullopt;
        y = std::move(*next);
        if (compare(y, nu) == Ordering::Less) return y;
    }
    return std::nullopt;
}

FirstReturnReport verify_first_return(const FlipIET& f, const FlipIET& next, const Scalar& nu, std::size_t samples,
                                      Rng& rng) {
    if (!nu.is_exact()) throw InvalidArgument("verify_first_return needs an exact backend");
    FirstReturnReport report;
    const std::size_t max_attempts = samples * 20 + 100;
    for (std::size_t attempt = 0; report.agreements + report.disagreements < samples; ++attempt) {
        if (attempt >= max_attempts) break;
        Scalar x = nu * Scalar::rational(random_unit_rational(rng));
        auto simulated = first_return(f, nu, x);
        auto induced = evaluate(next, x);
        if (!simulated || !induced) {
            ++report.resampled;
            continue;
        }
        if (compare(*simulated, *induced) == Ordering::Equal)
            ++report.agreements;
        else
            ++report.disagreements;
    }
    return report;
}

FirstReturnReport verify_first_return(const FlipIET& f, const StepResult& step, std::size_t samples, Rng& rng) {
    if (!step.next) throw InvalidArgument("step has no successor to verify");
    return verify_first_return(f, *step.next, step.decision.nu, samples, rng);
}

double bin_discrepancy(const std::vector<double>& normalized_points, std::size_t bins) {
    if (normalized_points.empty() || bins == 0) return 0.0;
    std::vector<std::size_t> counts(bins, 0);
    for (double x : normalized_points) {
        auto b = static_cast<std::size_t>(std::floor(x * static_cast<double>(bins)));
        counts[std::min(b, bins - 1)]++;
    }
    double worst = 0.0;
    std::size_t cumulative = 0;
    const double total = static_cast<double>(normalized_points.size());
    for (std::size_t k = 0; k < bins; ++k) {
        cumulative += counts[k];
        double dev = std::fabs(static_cast<double>(cumulative) / total - static_cast<double>(k + 1) / bins);
        worst = std::max(worst, dev);
    }
    return worst;
}

}  // namespace fiet
