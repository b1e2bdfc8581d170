#pragma once

#include <cstddef>
#include <functional>

namespace driftlab {

/// Number of worker threads used by parallel_for. Defaults to 1.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Sum of term(i) over [0, n) with a fixed blocking and summation order,
/// so the result is bit-identical for any thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace driftlab
