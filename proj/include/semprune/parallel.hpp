#pragma once

#include <cstddef>
#include <functional>

namespace semprune {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Callers write
/// results into slot i so the outcome never depends on scheduling. Nested
/// calls from inside a worker run inline. If any body throws, the exception
/// from the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace semprune
