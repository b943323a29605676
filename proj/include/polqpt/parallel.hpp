#pragma once

#include <cstddef>
#include <functional>

namespace polqpt {

/// Number of worker threads to use for `requested`; 0 means "all cores".
[[nodiscard]] std::size_t resolve_threads(std::size_t requested) noexcept;

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Work items must be independent; the first exception thrown by any item is
/// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace polqpt
