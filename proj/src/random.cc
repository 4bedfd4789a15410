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

#include "capeval/random.h"

#include <numeric>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace capeval {

uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t parent, uint64_t index) {
  return MixSeed(MixSeed(parent) ^ MixSeed(index + 0x632be59bd9b4e019ULL));
}

uint64_t DeriveSeed(uint64_t parent, std::string_view key) {
  // FNV-1a over the key, then mixed with the parent.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return DeriveSeed(parent, h);
}

std::vector<uint64_t> SeedSequence(uint64_t master, std::size_t count) {
  std::vector<uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = DeriveSeed(master, i);
  return seeds;
}

std::size_t UniformIndex(Rng& rng, std::size_t bound) {
  boost::random::uniform_int_distribution<std::size_t> dist(0, bound - 1);
  return dist(rng);
}

double UniformUnit(Rng& rng) {
  boost::random::uniform_01<double> dist;
  return dist(rng);
}

double Gaussian(Rng& rng, double mean, double sigma) {
  boost::random::normal_distribution<double> dist(mean, sigma);
  return dist(rng);
}

std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t n,
                                                  std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + UniformIndex(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace capeval
