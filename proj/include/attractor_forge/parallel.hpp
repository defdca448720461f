#pragma once

#include <cstddef>
#include <functional>

namespace af {

// Worker cap from ATTRACTOR_FORGE_THREADS (0 or unset = hardware concurrency).
std::size_t thread_budget();

// Runs body(i) for i in [0, count). Each index is processed exactly once;
// callers write into per-index slots and reduce afterwards, so results do not
// depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace af
