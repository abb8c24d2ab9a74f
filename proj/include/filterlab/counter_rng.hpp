#pragma once

#include <array>
#include <cstdint>

namespace filterlab {

// Philox4x32-10 block function.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Stream of 32-bit draws determined by (seed, stream, substream) alone.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t substream);

  std::uint32_t next_u32();
  // Uniform on [0, bound) by rejection; bound > 0.
  std::uint32_t below(std::uint32_t bound);

private:
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter block_{};
  unsigned used_ = 4;
};

}  // namespace filterlab
