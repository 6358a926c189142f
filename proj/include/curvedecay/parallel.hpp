#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace curvedecay {

// Worker count used when a caller passes 0.
inline int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls fn(i) for i in [0, n) on a static partition over `workers` threads.
// fn must write only to slot i of caller-owned storage, so the result does
// not depend on the worker count. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 0) workers = default_workers();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        threads.emplace_back([&, k] {
            try {
                for (std::size_t i = k; i < n; i += w) fn(i);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// Fixed-order pairwise summation.
template <class T>
T pairwise_sum(std::span<const T> x) {
    if (x.empty()) return T{};
    if (x.size() <= 8) {
        T acc = x[0];
        for (std::size_t i = 1; i < x.size(); ++i) acc += x[i];
        return acc;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& x) {
    return pairwise_sum(std::span<const T>(x));
}

}  // namespace curvedecay
