#ifndef HDG_PARALLEL_HPP
#define HDG_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hdg {

/// Runs body(k) for k in [0, count) on up to `workers` threads. Each index runs
/// exactly once; callers write results into slot k so collection order does not
/// depend on scheduling. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace hdg

#endif  // HDG_PARALLEL_HPP
