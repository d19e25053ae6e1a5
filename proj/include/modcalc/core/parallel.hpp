// SPDX-License-Identifier: Apache-2.0
//
// Deterministic work splitting.  parallel_for partitions [0, n) into
// contiguous chunks handed to worker threads; results must not depend
// on the partition (disjoint writes only), so the worker cap changes
// wall time but never output.

#ifndef MODCALC_CORE_PARALLEL_HPP
#define MODCALC_CORE_PARALLEL_HPP

#include <functional>

#include "modcalc/core/grid.hpp"

namespace modcalc {

// Global worker cap; 0 restores the hardware default.
void set_max_workers(int n);
int max_workers();

// Runs body(begin, end) over a partition of [0, n).  Exceptions from
// workers are rethrown on the calling thread (first one wins).
void parallel_for(Index n, const std::function<void(Index, Index)>& body);

}  // namespace modcalc

#endif
