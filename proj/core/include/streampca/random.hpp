#pragma once

// Keyed, counter-based random streams. A stream is identified by a master
// seed and a path of labels (e.g. {purpose, trial, replicate}); the pair is
// hashed into a Philox4x32-10 key and the stream walks the counter space.
// Two streams with the same (seed, path) produce identical sequences no
// matter which thread creates them or in what order.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace streampca {

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::span<const std::uint64_t> path);
  RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path)
      : RngStream(master_seed, std::span<const std::uint64_t>(path.begin(), path.size())) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  /// Child stream with `label` appended to the path.
  RngStream derive(std::uint64_t label) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_open01();

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double next_standard_normal();

 private:
  void refill();

  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_normal_;
};

RngStream derive_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);
RngStream derive_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path);

/// N(mean, variance). variance == 0 returns mean; variance < 0 throws.
double normal(RngStream& stream, double mean, double variance);
/// Uniform(-sqrt(3), sqrt(3)): mean zero, unit variance.
double uniform_sym(RngStream& stream);
/// Square of a standard normal draw.
double chisq1(RngStream& stream);

}  // namespace streampca
