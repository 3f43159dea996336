#pragma once

#include <cstddef>
#include <functional>

namespace qcl {

// Worker budget used by data-parallel kernels (set by the CLI --threads flag).
int thread_budget();
void set_thread_budget(int threads);

// Calls fn(shard) for every shard in [0, nshards). Shard boundaries are chosen
// by the caller, so reductions performed in shard order do not depend on the
// number of worker threads.
void for_each_shard(std::size_t nshards, const std::function<void(std::size_t)>& fn);

}  // namespace qcl
