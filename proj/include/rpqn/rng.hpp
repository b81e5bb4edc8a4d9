#pragma once

#include <cstdint>

namespace rpqn {

/// Counter-based 64-bit generator (SplitMix64 state advance). Every
/// generator in this library derives from it so instances are bit-identical
/// across runs for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform on [0,1) with 53 random mantissa bits.
  double uniform();

  /// Uniform on {lo, ..., hi}, inclusive.
  int uniform_int(int lo, int hi);

  /// Standard normal via Box-Muller (consumes two uniforms per pair,
  /// second value cached).
  double normal();

  /// Student-t with one degree of freedom (Cauchy), tan form.
  double student_t1();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rpqn
