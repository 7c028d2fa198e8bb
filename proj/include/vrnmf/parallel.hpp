#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace vrnmf {

/// Worker count from the VRNMF_THREADS environment variable; 0 or unset
/// means hardware concurrency.
int default_thread_count();

/// Resolve a requested count (0 = default_thread_count()) to at least 1.
int resolve_threads(int requested);

/// Run fn(begin, end) over contiguous chunks of [0, n). Each chunk runs on
/// its own thread; the partition depends only on n and threads, never on
/// timing.
template <class Fn>
void parallel_for_chunks(std::size_t n, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

}  // namespace vrnmf
