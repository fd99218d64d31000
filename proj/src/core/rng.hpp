#pragma once

#include <array>
#include <cstdint>

namespace dro {

// Philox 4x64 counter-based generator, 10 rounds (Salmon et al., SC'11).
// Chosen because streams are pure functions of (key, counter): every
// replication gets its own stream id and results are reproducible per seed
// independent of thread scheduling.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

// Mixes (seed, a, b) into a fresh sub-seed so nested generators never share
// a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// One independent random stream: key = (seed, stream_id), counter = block
// index. Draw order within a stream is sequential and deterministic.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{seed, stream_id} {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal via Box-Muller; pairs are cached so draws stay aligned
  // with the underlying counter sequence.
  double normal();

  // Fair pick from {-b, +b}.
  double rademacher(double b) { return (next_u64() & 1u) ? b : -b; }

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;  // forces refill on first draw
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace dro
