#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace specdiff {

/// The generator used for every simulation. No global instance exists;
/// callers construct one from a derived seed.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mix.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a hash of a text identifier, used to name independent streams.
[[nodiscard]] std::uint64_t hash_label(std::string_view text) noexcept;

/// Counter-based seed for replication `index` of stream `stream` under
/// `master`. Depends only on its arguments, so results do not depend on
/// scheduling or thread count.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream,
                                        std::uint64_t index) noexcept;

}  // namespace specdiff
