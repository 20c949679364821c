#include "fiet/induction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiet/error.hpp"

namespace fiet {

std::string_view to_string(Case c) { return c == Case::A ? "A" : "B"; }

Case parse_case(std::string_view text) {
    if (text == "A" || text == "a") return Case::A;
    if (text == "B" || text == "b") return Case::B;
    throw ParseError("unknown case '" + std::string(text) + "'");
}

std::string_view to_string(StepOutcome o) {
    switch (o) {
        case StepOutcome::Advanced: return "Advanced";
        case StepOutcome::Tie: return "Tie";
        case StepOutcome::Hole: return "Hole";
    }
    return "?";
}

StepDecision decide(const FlipIET& f) {
    const auto& p = f.perm();
    const std::size_t n = p.size();
    StepDecision d;
    d.alpha0 = p.top_at(n - 1);
    d.alpha1 = p.bottom_at(n - 1);
    switch (compare(f.length(d.alpha0), f.length(d.alpha1))) {
        case Ordering::Less:
            d.which = Case::A;
            d.nu = f.total() - f.length(d.alpha0);
            break;
        case Ordering::Greater:
            d.which = Case::B;
            d.nu = f.total() - f.length(d.alpha1);
            break;
        case Ordering::Equal:
            d.nu = f.total();
            break;
    }
    return d;
}

Transition transition(const SignedPermutation& p, Case c) {
    const std::size_t n = p.size();
    if (n < 2) throw InvalidArgument("induction needs at least two intervals");
    const Symbol alpha0 = p.top_at(n - 1);
    const Symbol alpha1 = p.bottom_at(n - 1);
    if (alpha0 == alpha1) throw InvalidArgument("permutation " + p.to_string() + " is reducible");

    std::vector<Symbol> top = p.top();
    std::vector<Symbol> bottom = p.bottom();
    std::vector<bool> flipped = p.flips();

    // The row that changes loses its last entry (the loser) and gets it back
    // next to the winner: after it if the winner keeps orientation, before it
    // otherwise.
    Symbol winner = c == Case::A ? alpha1 : alpha0;
    Symbol loser = c == Case::A ? alpha0 : alpha1;
    std::vector<Symbol>& row = c == Case::A ? top : bottom;
    row.pop_back();
    auto it = std::find(row.begin(), row.end(), winner);
    if (!p.flipped(winner)) ++it;
    row.insert(it, loser);
    flipped[loser] = p.flipped(loser) != p.flipped(winner);

    return {SignedPermutation(std::move(top), std::move(bottom), std::move(flipped)), winner, loser};
}

IntMatrix RauzyArrow::matrix() const {
    return IntMatrix::elementary(from.size(), static_cast<std::size_t>(winner), static_cast<std::size_t>(loser));
}

IntMatrix transition_matrix(const RauzyArrow& arrow) { return arrow.matrix(); }

RauzyPath::RauzyPath(SignedPermutation start)
    : start_(std::move(start)), r_(IntMatrix::identity(start_.size())) {}

void RauzyPath::append(RauzyArrow arrow) {
    if (!(arrow.from == end()))
        throw ChainMismatch("arrow from " + arrow.from.to_string() + " does not continue a path ending at " +
                            end().to_string());
    r_.right_multiply_elementary(static_cast<std::size_t>(arrow.winner), static_cast<std::size_t>(arrow.loser));
    arrows_.push_back(std::move(arrow));
}

void RauzyPath::append(const RauzyPath& other) {
    for (const auto& a : other.arrows()) append(a);
}

IntMatrix cocycle(std::span<const RauzyArrow> arrows, std::size_t n) {
    IntMatrix r = IntMatrix::identity(n);
    for (std::size_t i = 0; i < arrows.size(); ++i) {
        if (i > 0 && !(arrows[i].from == arrows[i - 1].to))
            throw ChainMismatch("arrows " + std::to_string(i - 1) + " and " + std::to_string(i) + " do not chain");
        r = r * arrows[i].matrix();
    }
    return r.transpose();
}

IntMatrix cocycle(const RauzyPath& path) { return path.cocycle(); }

StepResult rauzy_step(const FlipIET& f) {
    const auto& p = f.perm();
    if (!is_irreducible(p)) throw InvalidArgument("rauzy_step needs an irreducible permutation, got " + p.to_string());
    StepResult result;
    if (p.size() < 2) {
        result.decision.alpha0 = result.decision.alpha1 = p.top_at(0);
        result.decision.nu = f.total();
        result.outcome = StepOutcome::Tie;
        return result;
    }
    result.decision = decide(f);
    if (!result.decision.which) {
        result.outcome = StepOutcome::Tie;
        return result;
    }
    Transition t = transition(p, *result.decision.which);
    std::vector<Scalar> lengths = f.lengths().values();
    lengths[t.winner] -= lengths[t.loser];

    RauzyArrow arrow{p, t.next, *result.decision.which, t.winner, t.loser};
    result.outcome = is_irreducible(t.next) ? StepOutcome::Advanced : StepOutcome::Hole;
    result.next.emplace(std::move(t.next), LengthVector(std::move(lengths)));
    result.arrow = std::move(arrow);
    return result;
}

ZorichResult zorich_step(const FlipIET& f, std::size_t max_steps) {
    ZorichResult out;
    out.run.matrix = IntMatrix::identity(f.size());
    auto first = rauzy_step(f);
    out.outcome = first.outcome;
    if (first.arrow) {
        out.run.which = first.arrow->which;
        out.run.matrix.right_multiply_elementary(static_cast<std::size_t>(first.arrow->winner),
                                                 static_cast<std::size_t>(first.arrow->loser));
        out.run.arrows.push_back(std::move(*first.arrow));
    }
    out.next = std::move(first.next);
    if (out.outcome != StepOutcome::Advanced) return out;

    for (std::size_t steps = 1;; ++steps) {
        StepDecision peek = decide(*out.next);
        if (!peek.which) {
            out.outcome = StepOutcome::Tie;
            return out;
        }
        if (*peek.which != out.run.which) return out;
        if (steps >= max_steps) throw BudgetExceeded("Zorich run exceeded " + std::to_string(max_steps) + " steps");
        auto s = rauzy_step(*out.next);
        out.run.matrix.right_multiply_elementary(static_cast<std::size_t>(s.arrow->winner),
                                                 static_cast<std::size_t>(s.arrow->loser));
        out.run.arrows.push_back(std::move(*s.arrow));
        out.next = std::move(s.next);
        if (s.outcome == StepOutcome::Hole) {
            out.outcome = StepOutcome::Hole;
            return out;
        }
    }
}

bool is_complete(const RauzyPath& path) {
    const std::size_t n = path.start().size();
    if (n == 0) return false;
    std::vector<bool> won(n, false);
    for (const auto& a : path.arrows()) won[a.winner] = true;
    return std::all_of(won.begin(), won.end(), [](bool b) { return b; });
}

bool is_positive(const RauzyPath& path) { return path.induction_matrix().is_positive(); }

std::uint64_t arrow_key(const RauzyArrow& a) {
    return (a.from.canonical().encode() << 1) | (a.which == Case::B ? 1u : 0u);
}

bool is_neat(const RauzyPath& path) {
    if (path.empty() || !is_positive(path)) return false;
    if (!(path.start().canonical() == path.end().canonical())) return false;
    // KMP failure function: the longest proper border must be empty.
    std::vector<std::uint64_t> keys;
    keys.reserve(path.size());
    for (const auto& a : path.arrows()) keys.push_back(arrow_key(a));
    std::vector<std::size_t> fail(keys.size(), 0);
    for (std::size_t i = 1, k = 0; i < keys.size(); ++i) {
        while (k > 0 && keys[i] != keys[k]) k = fail[k - 1];
        if (keys[i] == keys[k]) ++k;
        fail[i] = k;
    }
    return fail.back() == 0;
}

MarkovResult markov_map(const FlipIET& f, const RauzyPath& gamma_star, std::size_t max_steps) {
    if (gamma_star.empty()) throw InvalidArgument("markov_map needs a nonempty section path");
    if (!(f.perm().canonical() == gamma_star.start().canonical()))
        throw InvalidArgument("fIET permutation " + f.perm().canonical_string() + " is not the section vertex " +
                              gamma_star.start().canonical_string());
    std::vector<std::uint64_t> target;
    for (const auto& a : gamma_star.arrows()) target.push_back(arrow_key(a));
    const std::size_t k = target.size();

    MarkovResult out;
    out.path = RauzyPath(f.perm());
    std::vector<std::uint64_t> keys;
    FlipIET current = f;
    for (std::size_t step = 0;; ++step) {
        if (step >= max_steps) throw BudgetExceeded("no return within " + std::to_string(max_steps) + " steps");
        auto s = rauzy_step(current);
        if (s.outcome == StepOutcome::Tie) {
            out.terminal = StepOutcome::Tie;
            break;
        }
        keys.push_back(arrow_key(*s.arrow));
        out.path.append(std::move(*s.arrow));
        current = std::move(*s.next);
        if (s.outcome == StepOutcome::Hole) {
            out.terminal = StepOutcome::Hole;
            break;
        }
        if (keys.size() >= k && std::equal(target.begin(), target.end(), keys.end() - static_cast<long>(k))) {
            out.returned = true;
            break;
        }
    }
    double norm = current.total().to_double();
    out.roof = -std::log(norm);
    out.next = current.normalized().canonical();
    return out;
}

double hilbert_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size() || u.empty()) throw InvalidArgument("hilbert_distance needs vectors of equal size");
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0) || !(v[i] > 0.0)) throw InvalidArgument("hilbert_distance needs positive vectors");
        double r = std::log(u[i]) - std::log(v[i]);
        hi = std::max(hi, r);
        lo = std::min(lo, r);
    }
    return hi - lo;
}

double hilbert_distance(const LengthVector& u, const LengthVector& v) {
    auto a = u.to_doubles();
    auto b = v.to_doubles();
    return hilbert_distance(std::span<const double>(a), std::span<const double>(b));
}

RauzyPath path_from_cases(const SignedPermutation& start, std::span<const Case> cases) {
    RauzyPath path(start);
    for (Case c : cases) {
        const auto& from = path.end();
        if (!is_irreducible(from)) throw InvalidArgument("path continues from the hole at " + from.to_string());
        Transition t = transition(from, c);
        path.append(RauzyArrow{from, std::move(t.next), c, t.winner, t.loser});
    }
    return path;
}

}  // namespace fiet
