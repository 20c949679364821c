#pragma once

// Step-by-step induction drivers used by the Monte Carlo experiments. A walker
// starts from a permutation and a length vector and reports one arrow per
// call, with winner and loser in the labels of the starting permutation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fiet/induction.hpp"
#include "fiet/sampling.hpp"

namespace fiet {

// Labelled successors of every canonical permutation reachable from a seed.
// Read-only after construction, so one table serves all worker threads.
class TransitionTable {
public:
    static constexpr int kHole = -1;
    static constexpr std::size_t kMaxSize = 8;

    struct Edge {
        int next = kHole;            // canonical index, or kHole
        Symbol winner = 0;           // in the labels of the source vertex
        Symbol loser = 0;
        std::array<Symbol, kMaxSize> relabel{};  // source symbol -> target symbol
        std::uint64_t key = 0;       // arrow_key of this arrow
    };
    struct Vertex {
        SignedPermutation perm;  // canonical
        Symbol alpha0 = 0;
        Symbol alpha1 = 0;
        std::array<Edge, 2> edges;  // case A, case B
    };

    // Throws InvalidArgument for reducible seeds or n > kMaxSize.
    explicit TransitionTable(const SignedPermutation& seed, std::size_t limit = 2'000'000);

    std::size_t size() const { return vertices_.size(); }
    std::size_t n() const { return n_; }
    const Vertex& operator[](int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    // Index of the canonical form of p; the relabelling p -> canonical goes to
    // `relabel` when given.
    std::optional<int> find(const SignedPermutation& p, std::vector<Symbol>* relabel = nullptr) const;

private:
    std::size_t n_ = 0;
    std::vector<Vertex> vertices_;
    std::unordered_map<std::uint64_t, int> index_;
};

enum class WalkOutcome { Advanced, Tie, Hole, Undecidable };

struct WalkStep {
    WalkOutcome outcome = WalkOutcome::Advanced;
    Case which = Case::A;
    Symbol winner = 0;  // labels of the starting permutation
    Symbol loser = 0;
    std::uint64_t key = 0;
    double log_total = 0.0;  // log of |lambda| after the step over the starting |lambda|
    // Bound on the error of log_total against the real point; 0 when exact.
    double log_error = 0.0;
};

class Walker {
public:
    virtual ~Walker() = default;
    // After Tie, Hole or Undecidable the walker must not be stepped again.
    virtual WalkStep step() = 0;
};

// Doubles with a running absolute error bound per length. A double sample
// stands for a real point known to 53 bits, so every length starts with an
// error of one unit in the last place. A comparison whose gap is inside the
// combined bound is reported as Undecidable.
class FastWalker final : public Walker {
public:
    FastWalker(const TransitionTable& table, const SignedPermutation& start, std::span<const double> lengths);
    WalkStep step() override;

private:
    double relative_error() const;
    const TransitionTable& table_;
    int vertex_ = 0;
    std::size_t n_ = 0;
    std::array<double, TransitionTable::kMaxSize> lam_{};
    std::array<double, TransitionTable::kMaxSize> err_{};
    std::array<Symbol, TransitionTable::kMaxSize> label_{};  // current symbol -> starting label
    double total_ = 0.0;
    double log_scale_ = 0.0;
    double log_start_ = 0.0;
    double start_rel_ = 0.0;  // relative error bound of the starting total
};

// The same walk through rauzy_step on ApproxFloat lengths, used to re-run
// samples whose fast walk hit an undecidable comparison. A double sample is
// a dyadic rational and its induction ends in a tie after about 53 bits of
// renormalization; with `refine` the bits below each double are drawn at
// random, which refines the sample instead of replacing it.
class ScalarWalker final : public Walker {
public:
    ScalarWalker(const SignedPermutation& start, std::span<const double> lengths, long precision,
                 Rng* refine = nullptr);
    WalkStep step() override;

private:
    std::optional<FlipIET> current_;
    double log_start_ = 0.0;
    bool refined_ = false;
};

// Exact walk on integer lengths at a fixed binary scale. Each double is
// extended by random bits down to 2^-bits, so the walk follows one refined
// real point exactly; a tie of the refined point is reported as Undecidable.
class ExactWalker final : public Walker {
public:
    ExactWalker(const TransitionTable& table, const SignedPermutation& start, std::span<const double> lengths,
                long bits, Rng& refine);
    WalkStep step() override;

private:
    const TransitionTable& table_;
    int vertex_ = 0;
    std::size_t n_ = 0;
    std::array<mpz_class, TransitionTable::kMaxSize> lam_;
    std::array<Symbol, TransitionTable::kMaxSize> label_{};
    mpz_class total_;
    double log_start_ = 0.0;
};

}  // namespace fiet
