#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace asgard {

/// Counter-based generator: draw i of stream s under seed k is
///
///   splitmix64_finalize(key + (i + 1) * 0x9E3779B97F4A7C15),
///   key = splitmix64_finalize(k ^ splitmix64_finalize(s + 0x632BE59BD9B4E019)).
///
/// Every array of an instance uses its own stream, so arrays can be generated
/// in any order and still be bit-identical. Gaussians come from Box-Muller on
/// consecutive uniform pairs.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  /// Raw 64-bit draw at the current counter; advances the counter.
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal. Draws come in Box-Muller pairs; the second is cached.
  double normal();
  /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi);

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept;

/// Stream identifiers used by the instance generators.
namespace streams {
inline constexpr std::uint64_t kDesign = 1;     // Gaussian draws for A
inline constexpr std::uint64_t kResponse = 2;   // b, or noise on p
inline constexpr std::uint64_t kSupport = 3;    // planted support positions
inline constexpr std::uint64_t kSigns = 4;      // planted signs
inline constexpr std::uint64_t kFeatures = 5;   // kernel feature points
inline constexpr std::uint64_t kPowerStart = 6; // power-iteration start vector
} // namespace streams

} // namespace asgard
