#include "fiet/walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiet/error.hpp"

namespace fiet {

TransitionTable::TransitionTable(const SignedPermutation& seed, std::size_t limit) : n_(seed.size()) {
    if (n_ < 2 || n_ > kMaxSize) throw InvalidArgument("transition table supports 2 <= n <= 8");
    if (!is_irreducible(seed)) throw InvalidArgument("seed " + seed.to_string() + " is reducible");
    auto add = [&](const SignedPermutation& canonical) {
        auto [it, fresh] = index_.emplace(canonical.encode(), static_cast<int>(vertices_.size()));
        if (fresh) {
            if (vertices_.size() >= limit) throw BudgetExceeded("transition table exceeds its vertex limit");
            Vertex v;
            v.perm = canonical;
            v.alpha0 = canonical.top_at(n_ - 1);
            v.alpha1 = canonical.bottom_at(n_ - 1);
            vertices_.push_back(std::move(v));
        }
        return it->second;
    };
    add(seed.canonical());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (Case c : {Case::A, Case::B}) {
            const SignedPermutation p = vertices_[i].perm;
            Transition t = transition(p, c);
            Edge e;
            e.winner = t.winner;
            e.loser = t.loser;
            e.key = arrow_key(RauzyArrow{p, t.next, c, t.winner, t.loser});
            std::vector<Symbol> relabel;
            auto canon = t.next.canonical(&relabel);
            for (std::size_t s = 0; s < n_; ++s) e.relabel[s] = relabel[s];
            e.next = is_irreducible(canon) ? add(canon) : kHole;
            vertices_[i].edges[c == Case::A ? 0 : 1] = e;
        }
    }
}

std::optional<int> TransitionTable::find(const SignedPermutation& p, std::vector<Symbol>* relabel) const {
    auto canon = p.canonical(relabel);
    auto it = index_.find(canon.encode());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FastWalker::FastWalker(const TransitionTable& table, const SignedPermutation& start, std::span<const double> lengths)
    : table_(table), n_(start.size()) {
    if (lengths.size() != n_ || n_ != table.n()) throw InvalidArgument("length vector does not match permutation");
    std::vector<Symbol> relabel;
    auto v = table.find(start, &relabel);
    if (!v) throw InvalidArgument("permutation " + start.to_string() + " is not in the transition table");
    vertex_ = *v;
    total_ = 0.0;
    for (std::size_t s = 0; s < n_; ++s) {
        auto c = static_cast<std::size_t>(relabel[s]);
        lam_[c] = lengths[s];
        // The sample is lengths[s] plus unknown bits below its last place.
        err_[c] = std::nextafter(lengths[s], std::numeric_limits<double>::infinity()) - lengths[s];
        label_[c] = static_cast<Symbol>(s);
        total_ += lengths[s];
    }
    log_start_ = std::log(total_);
    start_rel_ = relative_error();
}

double FastWalker::relative_error() const {
    double e = 0.0;
    for (std::size_t s = 0; s < n_; ++s) e += err_[s];
    // The summation of the total adds at most n roundings.
    return e / total_ + static_cast<double>(n_ + 1) * std::numeric_limits<double>::epsilon();
}

WalkStep FastWalker::step() {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const auto& v = table_[vertex_];
    const auto a0 = static_cast<std::size_t>(v.alpha0), a1 = static_cast<std::size_t>(v.alpha1);
    WalkStep out;
    const double gap = lam_[a0] - lam_[a1];
    // The gap itself is computed with one rounding.
    const double slack = (err_[a0] + err_[a1]) * (1.0 + 4.0 * eps) + eps * std::fabs(gap);
    if (std::fabs(gap) <= slack) {
        // Even an exact zero gap is only a tie of the truncated sample.
        out.outcome = WalkOutcome::Undecidable;
        return out;
    }
    out.which = gap < 0.0 ? Case::A : Case::B;
    const auto& e = v.edges[out.which == Case::A ? 0 : 1];
    const auto w = static_cast<std::size_t>(e.winner), l = static_cast<std::size_t>(e.loser);
    out.winner = label_[w];
    out.loser = label_[l];
    out.key = e.key;

    // lam_[w] > lam_[l] > 0, so the rounding error of the difference is
    // recovered exactly.
    const double diff = lam_[w] - lam_[l];
    const double rounding = std::fabs((lam_[w] - diff) - lam_[l]);
    err_[w] = (err_[w] + err_[l] + rounding) * (1.0 + 4.0 * eps);
    lam_[w] = diff;
    total_ = 0.0;
    for (std::size_t s = 0; s < n_; ++s) total_ += lam_[s];
    // Keep lengths away from underflow; log_scale_ remembers the factor.
    if (total_ < 1e-150) {
        const double k = 1e150;
        for (std::size_t s = 0; s < n_; ++s) {
            lam_[s] *= k;
            err_[s] *= k;
        }
        total_ *= k;
        log_scale_ -= std::log(k);
    }
    out.log_total = std::log(total_) + log_scale_ - log_start_;
    // |log(x(1+d))| <= |d| / (1 - |d|)
    const auto log_bound = [](double r) {
        return r < 1.0 ? r / (1.0 - r) : std::numeric_limits<double>::infinity();
    };
    out.log_error = log_bound(relative_error()) + log_bound(start_rel_);

    std::array<double, TransitionTable::kMaxSize> lam{}, err{};
    std::array<Symbol, TransitionTable::kMaxSize> label{};
    for (std::size_t s = 0; s < n_; ++s) {
        auto t = static_cast<std::size_t>(e.relabel[s]);
        lam[t] = lam_[s];
        err[t] = err_[s];
        label[t] = label_[s];
    }
    lam_ = lam;
    err_ = err;
    label_ = label;
    if (e.next == TransitionTable::kHole) {
        out.outcome = WalkOutcome::Hole;
    } else {
        vertex_ = e.next;
        out.outcome = WalkOutcome::Advanced;
    }
    return out;
}

ScalarWalker::ScalarWalker(const SignedPermutation& start, std::span<const double> lengths, long precision,
                           Rng* refine) {
    refined_ = refine != nullptr;
    std::vector<Scalar> v;
    for (double x : lengths) {
        mpq_class q(x);
        if (refine && x > 0.0) {
            // Fill the bits below the last place of x with fresh random bits.
            int e = 0;
            std::frexp(x, &e);
            const long extra = std::max(0L, precision - 60);
            mpz_class bits(0);
            for (long k = 0; k < extra; k += 64) {
                bits <<= 64;
                bits += mpz_class(static_cast<unsigned long>((*refine)()));
            }
            bits >>= static_cast<unsigned long>((extra + 63) / 64 * 64 - extra);
            mpq_class frac(bits);
            frac /= mpq_class(mpz_class(1) << static_cast<unsigned long>(extra));
            mpq_class ulp(1);
            const long shift = 53 - e;
            if (shift >= 0)
                ulp /= mpq_class(mpz_class(1) << static_cast<unsigned long>(shift));
            else
                ulp *= mpq_class(mpz_class(1) << static_cast<unsigned long>(-shift));
            q += ulp * frac;
        }
        v.push_back(Scalar::approx(q, precision));
    }
    current_.emplace(start, LengthVector(std::move(v)));
    log_start_ = std::log(current_->total().to_double());
}

WalkStep ScalarWalker::step() {
    WalkStep out;
    StepResult s;
    try {
        s = rauzy_step(*current_);
    } catch (const UndecidableComparison&) {
        out.outcome = WalkOutcome::Undecidable;
        return out;
    }
    if (s.outcome == StepOutcome::Tie) {
        out.outcome = refined_ ? WalkOutcome::Undecidable : WalkOutcome::Tie;
        return out;
    }
    out.which = s.arrow->which;
    out.winner = s.arrow->winner;
    out.loser = s.arrow->loser;
    out.key = arrow_key(*s.arrow);
    out.outcome = s.outcome == StepOutcome::Hole ? WalkOutcome::Hole : WalkOutcome::Advanced;
    current_ = std::move(*s.next);
    out.log_total = std::log(current_->total().to_double()) - log_start_;
    return out;
}

namespace {
double log_of(const mpz_class& z) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::log(2.0);
}
}  // namespace

ExactWalker::ExactWalker(const TransitionTable& table, const SignedPermutation& start, std::span<const double> lengths,
                         long bits, Rng& refine)
    : table_(table), n_(start.size()) {
    if (lengths.size() != n_ || n_ != table.n()) throw InvalidArgument("length vector does not match permutation");
    std::vector<Symbol> relabel;
    auto v = table.find(start, &relabel);
    if (!v) throw InvalidArgument("permutation " + start.to_string() + " is not in the transition table");
    vertex_ = *v;
    total_ = 0;
    for (std::size_t s = 0; s < n_; ++s) {
        const double x = lengths[s];
        if (!(x > 0.0)) throw InvalidArgument("exact walk needs positive lengths");
        int e = 0;
        const double m = std::frexp(x, &e);
        // x = mant * 2^(e - 53); scaled by 2^bits the last place is 2^shift.
        const long shift = bits + e - 53;
        if (shift < 0) throw InvalidArgument("length below the exact walk resolution");
        mpz_class z(static_cast<unsigned long>(std::ldexp(m, 53)));
        z <<= static_cast<unsigned long>(shift);
        mpz_class low(0);
        for (long k = 0; k < shift; k += 64) {
            low <<= 64;
            low += static_cast<unsigned long>(refine());
        }
        const long excess = (shift + 63) / 64 * 64 - shift;
        if (excess > 0) low >>= static_cast<unsigned long>(excess);
        z += low;
        auto c = static_cast<std::size_t>(relabel[s]);
        lam_[c] = z;
        label_[c] = static_cast<Symbol>(s);
        total_ += z;
    }
    log_start_ = log_of(total_);
}

WalkStep ExactWalker::step() {
    const auto& v = table_[vertex_];
    const auto a0 = static_cast<std::size_t>(v.alpha0), a1 = static_cast<std::size_t>(v.alpha1);
    WalkStep out;
    const int c = cmp(lam_[a0], lam_[a1]);
    if (c == 0) {
        out.outcome = WalkOutcome::Undecidable;
        return out;
    }
    out.which = c < 0 ? Case::A : Case::B;
    const auto& e = v.edges[out.which == Case::A ? 0 : 1];
    const auto w = static_cast<std::size_t>(e.winner), l = static_cast<std::size_t>(e.loser);
    out.winner = label_[w];
    out.loser = label_[l];
    out.key = e.key;
    lam_[w] -= lam_[l];
    total_ -= lam_[l];
    out.log_total = log_of(total_) - log_start_;

    std::array<mpz_class, TransitionTable::kMaxSize> lam;
    std::array<Symbol, TransitionTable::kMaxSize> label{};
    for (std::size_t s = 0; s < n_; ++s) {
        auto t = static_cast<std::size_t>(e.relabel[s]);
        lam[t].swap(lam_[s]);
        label[t] = label_[s];
    }
    lam_.swap(lam);
    label_ = label;
    if (e.next == TransitionTable::kHole) {
        out.outcome = WalkOutcome::Hole;
    } else {
        vertex_ = e.next;
        out.outcome = WalkOutcome::Advanced;
    }
    return out;
}

}  // namespace fiet
