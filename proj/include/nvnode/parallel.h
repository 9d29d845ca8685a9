// Copyright 2026 The nvnode Authors
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

#ifndef NVNODE_PARALLEL_H
#define NVNODE_PARALLEL_H

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace nvnode {

/// Number of workers to use for `requested` (0 = hardware concurrency).
inline size_t resolve_threads(size_t requested, uint64_t work_items) {
    size_t n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<size_t>(std::max<uint64_t>(1, std::min<uint64_t>(n, work_items)));
}

/// Splits [0, n) into contiguous chunks and calls body(worker, begin, end) for
/// each on its own thread. The first exception thrown by any worker is
/// rethrown after all workers have joined.
template <class Body>
void parallel_chunks(uint64_t n, size_t workers, Body &&body) {
    if (workers <= 1 || n < 2) {
        body(size_t{0}, uint64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    uint64_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        uint64_t begin = std::min<uint64_t>(n, w * chunk);
        uint64_t end = std::min<uint64_t>(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                body(w, begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace nvnode

#endif
