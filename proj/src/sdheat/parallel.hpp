#pragma once

#include <cstddef>
#include <functional>

namespace sdheat {

// worker cap: SDHEAT_THREADS env var, overridden by set_thread_cap
void set_thread_cap(int n);
int thread_cap();

// body(i) for i in [0,n); each index writes only its own outputs
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sdheat
