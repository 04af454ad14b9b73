#include "sdheat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sdheat {

namespace {

int default_cap() {
    if (const char* e = std::getenv("SDHEAT_THREADS")) {
        int n = std::atoi(e);
        if (n > 0) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

// nested calls run inline on the calling worker
thread_local bool in_region = false;

std::atomic<int>& cap() {
    static std::atomic<int> c{default_cap()};
    return c;
}

}  // namespace

void set_thread_cap(int n) { cap() = n > 0 ? n : default_cap(); }
int thread_cap() { return cap(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n);
    if (workers <= 1 || in_region) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        in_region = true;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                next = n;
            }
        }
        in_region = false;
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sdheat
