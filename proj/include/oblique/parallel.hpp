#pragma once

#include <functional>

namespace oblique {

// Worker count from the THREADS environment variable, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker, so
// results do not depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace oblique
