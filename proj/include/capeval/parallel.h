// Copyright 2026 The Capeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CAPEVAL_PARALLEL_H_
#define CAPEVAL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace capeval {

// Runs body(i) for every i in [0, count) on up to `jobs` threads. Each index
// is visited exactly once; callers write into pre-sized slots so the result
// does not depend on scheduling. The first exception thrown by any worker is
// rethrown on the calling thread.
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& body);

}  // namespace capeval

#endif  // CAPEVAL_PARALLEL_H_
