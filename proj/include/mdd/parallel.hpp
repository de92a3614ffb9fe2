// Copyright 2026 The MDD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace mdd {

/// Evaluates f(0), ..., f(n - 1) on up to `jobs` threads and returns the
/// results in index order. Work items must not share mutable state; seeds
/// are derived from the index, so the output does not depend on `jobs`.
/// The first exception thrown by any item is rethrown.
template <class F>
auto parallel_map(std::size_t n, unsigned jobs, F &&f) -> std::vector<std::invoke_result_t<F &, std::size_t>> {
    using R = std::invoke_result_t<F &, std::size_t>;
    std::vector<R> out(n);
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

inline unsigned default_jobs() {
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mdd
