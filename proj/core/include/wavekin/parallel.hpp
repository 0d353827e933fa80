#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace wavekin {

/// Process-wide worker cap, set once by the CLI --threads flag.
int max_threads();
void set_max_threads(int n);

/// Static-partition parallel loop over [0, n). Results must be written to
/// disjoint slots so the outcome is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Convenience per-index variant.
inline void parallel_for_each(std::size_t n, const std::function<void(std::size_t)>& body) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) body(i);
    });
}

} // namespace wavekin
