#pragma once

#include <array>
#include <cstdint>

namespace colcont {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Draw number `index` of stream `stream` under `seed`. Pure function of its arguments.
std::uint64_t keyed_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Sequential view over one keyed stream.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  std::uint64_t next() { return keyed_draw(seed_, stream_, counter_++); }
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), bound > 0

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

namespace streams {
inline constexpr std::uint64_t sparsify = 1;
inline constexpr std::uint64_t random_template = 2;
inline constexpr std::uint64_t member_sampling = 3;
}  // namespace streams

}  // namespace colcont
