#include "streampca/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace streampca {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> hash_path(std::uint64_t seed, std::span<const std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed ^ 0x5EED5EED5EED5EEDull);
  // Mixing in the length keeps {a} and {a, 0} apart.
  h = splitmix64(h ^ splitmix64(path.size()));
  for (std::uint64_t label : path) h = splitmix64(h ^ splitmix64(label + 0x632BE59BD9B4E019ull));
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::span<const std::uint64_t> path)
    : master_seed_(master_seed), path_(path.begin(), path.end()), key_(hash_path(master_seed, path)) {}

RngStream RngStream::derive(std::uint64_t label) const {
  std::vector<std::uint64_t> child = path_;
  child.push_back(label);
  return RngStream(master_seed_, child);
}

void RngStream::refill() {
  buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           0u, 0u},
                          key_);
  ++block_;
  buffered_ = 4;
}

std::uint32_t RngStream::next_u32() {
  if (buffered_ == 0) refill();
  return buffer_[4 - buffered_--];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::next_open01() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = next_open01();
  const double u2 = next_open01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

RngStream derive_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
  return RngStream(master_seed, path);
}

RngStream derive_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path) {
  return RngStream(master_seed, path);
}

double normal(RngStream& stream, double mean, double variance) {
  if (variance < 0.0 || std::isnan(variance)) {
    throw std::invalid_argument("normal: variance must be nonnegative");
  }
  if (variance == 0.0) return mean;
  return mean + std::sqrt(variance) * stream.next_standard_normal();
}

double uniform_sym(RngStream& stream) {
  // (2k + 1 - 2^53) / 2^53 is exact and lies strictly inside (-1, 1).
  const auto k = static_cast<std::int64_t>(stream.next_u64() >> 11);
  const double u = static_cast<double>(2 * k + 1 - (std::int64_t{1} << 53)) * 0x1.0p-53;
  return std::numbers::sqrt3 * u;
}

double chisq1(RngStream& stream) {
  const double z = stream.next_standard_normal();
  return z * z;
}

}  // namespace streampca
