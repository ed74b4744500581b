#pragma once

#include <cstdint>
#include <random>

namespace noisypairs {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent stream, a pure function of its inputs. Used so that
/// per-sample work can be generated in any order (or in parallel).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

/// Named streams, so that adding a new consumer never shifts an existing one.
namespace streams {
inline constexpr std::uint64_t kLayout = 1;
inline constexpr std::uint64_t kCompose = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kTextureSplit = 4;
inline constexpr std::uint64_t kTexturePick = 5;
inline constexpr std::uint64_t kProcedural = 6;
inline constexpr std::uint64_t kSplit = 7;
inline constexpr std::uint64_t kUndersample = 8;
inline constexpr std::uint64_t kPairing = 9;
inline constexpr std::uint64_t kAugment = 10;
inline constexpr std::uint64_t kTrain = 11;
inline constexpr std::uint64_t kValidation = 12;
inline constexpr std::uint64_t kFixture = 13;
}  // namespace streams

}  // namespace noisypairs
