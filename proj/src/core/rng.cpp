#include "core/rng.hpp"

#include <cmath>

namespace dro {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> round_once(
    const std::array<std::uint64_t, 4>& c,
    const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMult0, c[0], hi0, lo0);
  mulhilo(kMult1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    counter = round_once(counter, key);
  }
  return counter;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return philox4x64({a, b, 0x64726f2d766172ull, 0}, {seed, 0x9E3779B97F4A7C15ull})[0];
}

void RngStream::refill() {
  buf_ = philox4x64({block_, 0, 0, 0}, key_);
  ++block_;
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 shifted away from 0 so log() stays finite.
  double u1 = next_double() + 0x1.0p-54;
  double u2 = next_double();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 6.283185307179586476925286766559 * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

}  // namespace dro
