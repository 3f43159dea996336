#include "qcl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qcl {

namespace {
std::atomic<int> g_threads{1};
}

int thread_budget() { return g_threads.load(); }

void set_thread_budget(int threads) { g_threads.store(std::max(1, threads)); }

void for_each_shard(std::size_t nshards, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), nshards);
    if (workers <= 1) {
        for (std::size_t s = 0; s < nshards; ++s) fn(s);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t s = next.fetch_add(1);
                if (s >= nshards) return;
                try {
                    fn(s);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    next.store(nshards);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace qcl
