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

#ifndef CAPEVAL_RANDOM_H_
#define CAPEVAL_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

namespace capeval {

// All randomness in the toolkit flows through this engine, seeded explicitly.
// Boost distributions are used on top of it because their output is fixed by
// the library rather than by the standard library vendor.
using Rng = boost::random::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds.
uint64_t MixSeed(uint64_t x);

// Child seed for stream `index` under `parent`.
uint64_t DeriveSeed(uint64_t parent, uint64_t index);

// Seed keyed by a string, e.g. a model id or an example id.
uint64_t DeriveSeed(uint64_t parent, std::string_view key);

// `count` child seeds of `master`, in order.
std::vector<uint64_t> SeedSequence(uint64_t master, std::size_t count);

// Uniform integer in [0, bound).
std::size_t UniformIndex(Rng& rng, std::size_t bound);

// Uniform double in [0, 1).
double UniformUnit(Rng& rng);

double Gaussian(Rng& rng, double mean, double sigma);

// Indices of `k` elements chosen uniformly without replacement from [0, n),
// in the order they were drawn (partial Fisher-Yates).
std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t n,
                                                  std::size_t k);

}  // namespace capeval

#endif  // CAPEVAL_RANDOM_H_
