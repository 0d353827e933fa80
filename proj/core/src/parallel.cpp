#include "wavekin/parallel.hpp"

namespace wavekin {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = hardware default
}

int max_threads() {
    int n = g_max_threads.load();
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    return n;
}

void set_max_threads(int n) { g_max_threads.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const int nt = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
    if (nt <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 1; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    body(0, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

} // namespace wavekin
