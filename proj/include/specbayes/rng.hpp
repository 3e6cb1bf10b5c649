#pragma once

#include <cstdint>
#include <random>

namespace specbayes {

using Rng = std::mt19937_64;

/// Independent generator stream for (master_seed, stream_index).
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32), 0x5eedu};
  return Rng(seq);
}

}  // namespace specbayes
