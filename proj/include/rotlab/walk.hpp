#pragma once

// Random walk on Z_d driven by a step distribution mu, in exact rationals.

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace rotlab {

struct WalkSpec {
  std::uint64_t d = 1;
  std::vector<mpq_class> mu;     // step law, size d
  std::vector<mpq_class> theta;  // initial law, size d
  std::uint64_t steps = 0;

  static WalkSpec uniform_steps(std::uint64_t d, const std::vector<std::uint64_t>& support, std::uint64_t steps);
};

struct WalkResult {
  std::vector<mpq_class> distribution;  // after `steps` steps
  std::vector<double> tv;               // tv[j] after j steps, j = 0..steps
  bool irreducible = false;             // gcd(support, d) = 1
  bool aperiodic = false;               // gcd(support - s0, d) = 1
  double tau = 0.0;                     // max_{j != 0} |mu^(j)|
};

// Validates the spec; with require_convergence a support obstruction throws.
WalkResult walk_distribution(const WalkSpec& spec, bool require_convergence = false);

mpq_class total_variation_to_uniform(const std::vector<mpq_class>& p);
double fourier_tau(const std::vector<mpq_class>& mu);

}  // namespace rotlab
