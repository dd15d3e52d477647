/*
 * Copyright 2026 The ERAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERALIGN_PARALLEL_H_
#define ERALIGN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace eralign {

// Process-wide thread budget for data-parallel sections (default 1).
void set_thread_budget(unsigned threads);
unsigned thread_budget();

// Splits [0, n) into fixed blocks of `block` items and runs
// fn(begin, end, block_index) for each, on up to thread_budget() threads.
// Block boundaries do not depend on the thread count, so reductions that
// combine per-block partials in block order are reproducible.
void parallel_for_blocks(
    std::size_t n, std::size_t block,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace eralign

#endif  // ERALIGN_PARALLEL_H_
