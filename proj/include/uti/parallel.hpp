#pragma once

#include <cstddef>
#include <functional>

namespace uti {

// Runs fn(i) for i in [0, count) on up to `threads` workers, contiguous
// chunks. Callers guarantee disjoint writes; chunking never affects
// results.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace uti
