#pragma once

// Reproducible random streams and simplex sampling.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace fiet {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for sample `index` of a run seeded with `master`.
inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

// Uniform in (0, 1), never exactly 0.
inline double uniform_open(Rng& rng) {
    for (;;) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

// Uniform point of the open standard simplex (exponential spacings).
inline void sample_simplex(Rng& rng, std::span<double> out) {
    double sum = 0.0;
    for (auto& x : out) {
        x = -std::log(uniform_open(rng));
        sum += x;
    }
    for (auto& x : out) x /= sum;
}

inline std::vector<double> sample_simplex(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    sample_simplex(rng, std::span<double>(v));
    return v;
}

// Projectivized nu_q: lambda_i proportional to D_i / q_i with D uniform on
// the simplex; normalized to sum 1.
inline std::vector<double> sample_weighted_simplex(Rng& rng, std::span<const double> q) {
    std::vector<double> v = sample_simplex(rng, q.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] /= q[i];
        sum += v[i];
    }
    for (auto& x : v) x /= sum;
    return v;
}

// Random rational in (0, 1) with denominator 2^bits.
inline mpq_class random_unit_rational(Rng& rng, unsigned bits = 40) {
    const std::uint64_t m = std::uint64_t{1} << bits;
    std::uint64_t k = 0;
    while (k == 0) k = rng() & (m - 1);
    mpq_class q(mpz_class(static_cast<unsigned long>(k)), mpz_class(static_cast<unsigned long>(m)));
    q.canonicalize();
    return q;
}

}  // namespace fiet
