#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace hitstats::detail {

// Chunked trial runner.  Trials are partitioned into fixed-size chunks; each
// chunk accumulates into its own Acc and chunks are merged in index order, so
// the result is identical for every thread count.  Acc needs a default
// constructor and merge(const Acc&).
template <class Acc, class Fn>
Acc run_chunked_trials(std::int64_t trials, int threads, std::int64_t chunk_size, Fn&& fn) {
    if (trials <= 0)
        return Acc{};
    if (chunk_size <= 0)
        chunk_size = 1;
    const std::int64_t n_chunks = (trials + chunk_size - 1) / chunk_size;
    std::vector<Acc> parts(static_cast<std::size_t>(n_chunks));

    auto run_chunk = [&](std::int64_t c) {
        Acc& acc = parts[static_cast<std::size_t>(c)];
        const std::int64_t lo = c * chunk_size;
        const std::int64_t hi = std::min(trials, lo + chunk_size);
        for (std::int64_t i = lo; i < hi; ++i)
            fn(acc, i);
    };

    if (threads <= 1 || n_chunks == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c)
            run_chunk(c);
    } else {
        std::atomic<std::int64_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= n_chunks)
                    return;
                run_chunk(c);
            }
        };
        const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_chunks));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    Acc total{};
    for (auto& part : parts)
        total.merge(part);
    return total;
}

inline int resolve_threads(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace hitstats::detail
