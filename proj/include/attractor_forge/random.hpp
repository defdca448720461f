#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace af {

using Rng = std::mt19937_64;

// Independent stream for a (seed, key...) tuple, e.g. (seed, trial) or
// (seed, side, mode). Streams for distinct keys do not overlap in practice.
inline Rng derived_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * keys.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace af
