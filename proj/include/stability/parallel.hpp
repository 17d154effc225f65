//
// Copyright 2026 The stability-kit Authors
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
//

#ifndef STABILITY_PARALLEL_HPP_
#define STABILITY_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace stability {

// Worker count: hardware concurrency, capped by STABILITY_KIT_THREADS.
unsigned thread_count();

// Runs fn(i) for i in [0, n). Each index runs exactly once; callers write
// results into per-index slots, so output does not depend on scheduling.
void parallel_for(uint64_t n, const std::function<void(uint64_t)>& fn);

}  // namespace stability

#endif  // STABILITY_PARALLEL_HPP_
