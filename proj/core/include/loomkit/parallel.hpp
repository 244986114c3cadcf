#pragma once

#include <functional>

namespace loomkit {

// Number of worker threads: LOOMKIT_THREADS when set to a positive integer,
// hardware concurrency otherwise, never less than 1.
int worker_count();

// Invoke fn(row_begin, row_end) over disjoint row blocks, one block per
// worker. Partitioning depends only on the row count, and blocks write
// disjoint output rows, so results do not depend on the worker count.
// fn must not throw.
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace loomkit
