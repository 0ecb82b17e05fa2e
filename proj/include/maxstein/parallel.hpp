#pragma once

#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace maxstein {

// Worker count: explicit request > MAXSTEIN_THREADS env var > hardware.
inline unsigned resolve_thread_count(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MAXSTEIN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs body(block_index, begin, end) over [0, n) split into fixed-size
// blocks. The block layout depends only on `n` and `block_size`, never on
// the thread count, so any per-block results combined in block order are
// identical for every thread count.
template <class Body>
void parallel_for_blocks(std::size_t n, std::size_t block_size,
                         const Body& body, unsigned threads = 0) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (n + block_size - 1) / block_size;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), n_blocks));

    if (n_threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            body(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            body(b, b * block_size, std::min(n, (b + 1) * block_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

inline constexpr std::size_t kDefaultBlockSize = 1024;

}  // namespace maxstein
