#pragma once

// Deterministic sample loop. Each sample gets its own random stream and
// writes only its own slot, so results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fiet/sampling.hpp"

namespace fiet {

// Number of workers: FIET_THREADS when set to a positive integer, else the
// hardware concurrency.
std::size_t default_threads();

template <class Result, class Fn>
std::vector<Result> run_samples(std::size_t count, std::uint64_t seed, std::size_t threads, Fn&& fn) {
    std::vector<Result> out(count);
    if (threads == 0) threads = default_threads();
    threads = std::max<std::size_t>(1, std::min(threads, count));
    constexpr std::size_t chunk = 256;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (;;) {
                std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) return;
                std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) {
                    Rng rng = make_stream(seed, i);
                    out[i] = fn(i, rng);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace fiet
