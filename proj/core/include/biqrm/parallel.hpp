#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace biqrm {

// Runs fn(i) for i in [0, count), statically partitioned over a small
// thread pool. Each index must write only its own output slot; under that
// contract the result is bit-identical for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Fixed pairwise tree reduction. The summation order depends only on the
// length of the input, never on thread scheduling.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

}  // namespace biqrm
