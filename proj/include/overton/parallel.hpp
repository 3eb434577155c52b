#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace overton {

/// Runs `work(i)` for i in [0, n) on up to `concurrency` threads and hands each
/// result to `commit(i, result)` strictly in index order, under one lock.
/// Commit order, and therefore anything it writes, is independent of the
/// thread count. The first exception stops new work and is rethrown.
template <typename Work, typename Commit>
void run_ordered(std::size_t n, int concurrency, Work&& work, Commit&& commit) {
    using Result = decltype(work(std::size_t{0}));
    std::vector<std::optional<Result>> done(n);
    std::mutex mu;
    std::size_t next_commit = 0;
    std::atomic<std::size_t> next_index{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;

    auto worker = [&] {
        while (!stop.load()) {
            std::size_t i = next_index.fetch_add(1);
            if (i >= n) return;
            try {
                Result r = work(i);
                std::lock_guard lock(mu);
                done[i].emplace(std::move(r));
                while (next_commit < n && done[next_commit]) {
                    commit(next_commit, std::move(*done[next_commit]));
                    done[next_commit].reset();
                    ++next_commit;
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, concurrency));
    if (threads == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace overton
