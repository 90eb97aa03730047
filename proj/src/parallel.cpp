#include "mrt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mrt {

namespace {
std::atomic<int> g_threads{0};
// Nested loops run serially inside an outer worker.
thread_local bool t_in_worker = false;

int resolve_default() {
    if (const char* env = std::getenv("MRT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

void set_threads(int n) { g_threads = n; }

int threads() {
    int t = g_threads.load();
    return t > 0 ? t : resolve_default();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads()), n);
    if (t <= 1 || t_in_worker) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex err_mu;
    auto worker = [&] {
        const bool outer = t_in_worker;
        t_in_worker = true;
        struct Reset {
            bool v;
            ~Reset() { t_in_worker = v; }
        } reset{outer};
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first) first = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t - 1);
    for (std::size_t k = 1; k < t; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace mrt
