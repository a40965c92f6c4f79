#pragma once

#include <cstddef>
#include <functional>

namespace smx {

/// How replication loops are executed. Results never depend on the choice:
/// every replication writes its own slot and reductions run afterwards in a
/// fixed tree order.
enum class Execution { serial, parallel };

// body(i) for i in [0, n). The first exception by index is rethrown after the
// loop finishes.
void for_each_index(std::size_t n, Execution policy, const std::function<void(std::size_t)>& body);

// 0 keeps the OpenMP default.
void set_thread_count(int threads);
int thread_count();

}  // namespace smx
