/*
 * Copyright 2026 The Stratlift Authors.
 *
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
#ifndef STRATLIFT_PARALLEL_H_
#define STRATLIFT_PARALLEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>

namespace stratlift {

// Worker count: STRATLIFT_THREADS when set to a positive integer, else the
// hardware concurrency (at least 1).
std::size_t default_thread_count();

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = default).
// Work items must write only to their own output slot; results are then
// independent of scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

// SplitMix64 finalizer, used to derive independent stream seeds from a
// (seed, index) pair.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace stratlift

#endif  // STRATLIFT_PARALLEL_H_
