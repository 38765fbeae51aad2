#ifndef FZL_PARALLEL_HPP
#define FZL_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace fzl {

struct ParallelSpec {
    int threads = 1;
    bool deterministic = true; // reserved: the chunked sweep is always deterministic
};

// Fixed row-chunk decomposition for pairwise sweeps. Chunk boundaries depend
// only on n, never on the thread count, and chunk results are merged in chunk
// order, so accumulation order (and therefore every bit of the result) is
// identical for any number of workers.
inline int chunk_rows_for(int n)
{
    int c = n / 16;
    return c < 64 ? 64 : c;
}

inline int chunk_count_for(int n)
{
    int rows = chunk_rows_for(n);
    return (n + rows - 1) / rows;
}

// Runs body(chunk, row_begin, row_end) for each chunk, distributing chunks
// over `threads` workers. body must write only into per-chunk state.
inline void run_chunks(int n, int threads,
                       const std::function<void(int, int, int)>& body)
{
    const int rows = chunk_rows_for(n);
    const int chunks = chunk_count_for(n);
    auto work_on = [&](int c) {
        int lo = c * rows;
        int hi = lo + rows < n ? lo + rows : n;
        body(c, lo, hi);
    };
    if (threads <= 1 || chunks == 1) {
        for (int c = 0; c < chunks; ++c) work_on(c);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= chunks) return;
            work_on(c);
        }
    };
    int t = threads < chunks ? threads : chunks;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// Ordered reduction of per-chunk scalar partials.
inline double merge_ordered(const std::vector<double>& partials)
{
    double s = 0.0;
    for (double p : partials) s += p;
    return s;
}

} // namespace fzl

#endif
