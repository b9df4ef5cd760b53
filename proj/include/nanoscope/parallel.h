//
// Copyright 2026 The Nanoscope Authors
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

#ifndef NANOSCOPE_PARALLEL_H_
#define NANOSCOPE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace nanoscope {

// Worker count from NANOSCOPE_THREADS (0 or unset means hardware
// concurrency).
int DefaultWorkerCount();

// Runs body(i) for i in [0, n) on `workers` threads using static
// interleaved partitioning. Each index is processed exactly once, so callers
// that write results into slot i get output independent of the worker count.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& body);

}  // namespace nanoscope

#endif  // NANOSCOPE_PARALLEL_H_
