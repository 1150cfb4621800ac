#pragma once

#include <cstddef>
#include <cstdint>

namespace zeeman {

// Counter-based stream: the n-th draw of stream (seed, id) is a pure function
// of (seed, id, n), so work split into fixed blocks reproduces bit for bit
// under any thread schedule.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

/// Fixed block size used by every Monte Carlo kernel; block b draws from
/// RandomStream(seed, b).
inline constexpr std::size_t kSampleBlock = 4096;

}  // namespace zeeman
