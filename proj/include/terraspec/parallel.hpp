#pragma once

#include <cstddef>
#include <functional>

namespace terraspec {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// visited exactly once; callers write results into pre-sized slots so the
/// output order never depends on scheduling. jobs <= 1 runs inline.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace terraspec
