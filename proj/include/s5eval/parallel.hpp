#pragma once

#include <functional>

namespace s5eval {

/// Runs fn(0) .. fn(count-1) on `jobs` worker threads; serial when jobs <= 1.
/// The first exception raised by any worker is rethrown after all join.
void parallel_for(int jobs, int count, const std::function<void(int)>& fn);

}  // namespace s5eval
