#include "rotlab/walk.hpp"

#include <cmath>
#include <complex>
#include <numeric>

#include "rotlab/error.hpp"

namespace rotlab {

WalkSpec WalkSpec::uniform_steps(std::uint64_t d, const std::vector<std::uint64_t>& support, std::uint64_t steps) {
  require(d >= 1 && !support.empty(), "walk needs d >= 1 and a nonempty support");
  WalkSpec s;
  s.d = d;
  s.mu.assign(d, 0);
  s.theta.assign(d, 0);
  s.theta[0] = 1;
  for (auto a : support) s.mu[a % d] += mpq_class(1, static_cast<unsigned long>(support.size()));
  s.steps = steps;
  return s;
}

mpq_class total_variation_to_uniform(const std::vector<mpq_class>& p) {
  const mpq_class u(1, static_cast<unsigned long>(p.size()));
  mpq_class s = 0;
  for (const auto& v : p) s += abs(v - u);
  return s / 2;
}

double fourier_tau(const std::vector<mpq_class>& mu) {
  const std::size_t d = mu.size();
  double best = 0.0;
  for (std::size_t j = 1; j < d; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t s = 0; s < d; ++s) {
      if (mu[s] == 0) continue;
      const double angle = 2.0 * M_PI * static_cast<double>((j * s) % d) / static_cast<double>(d);
      acc += mu[s].get_d() * std::polar(1.0, angle);
    }
    best = std::max(best, std::abs(acc));
  }
  return best;
}

WalkResult walk_distribution(const WalkSpec& input, bool require_convergence) {
  WalkSpec spec = input;
  for (auto& v : spec.mu) v.canonicalize();
  for (auto& v : spec.theta) v.canonicalize();
  const std::uint64_t d = spec.d;
  require(d >= 1, "modulus must be >= 1");
  require(spec.mu.size() == d && spec.theta.size() == d, "mu and theta must have d entries");
  mpq_class sm = 0, st = 0;
  for (std::uint64_t a = 0; a < d; ++a) {
    require(spec.mu[a] >= 0 && spec.theta[a] >= 0, "probabilities must be non-negative");
    sm += spec.mu[a];
    st += spec.theta[a];
  }
  require(sm == 1 && st == 1, "mu and theta must sum to 1");

  WalkResult out;
  std::uint64_t g = d, h = d;
  std::uint64_t s0 = d;
  for (std::uint64_t a = 0; a < d; ++a) {
    if (spec.mu[a] == 0) continue;
    g = std::gcd(g, a);
    if (s0 == d) s0 = a;
    h = std::gcd(h, (a + d - s0) % d);
  }
  out.irreducible = g == 1;
  out.aperiodic = h == 1;
  out.tau = fourier_tau(spec.mu);
  if (require_convergence && !(out.irreducible && out.aperiodic)) {
    throw PreconditionError(out.irreducible ? "walk is periodic on Z_d" : "walk is not irreducible on Z_d");
  }

  std::vector<mpq_class> p = spec.theta;
  out.tv.push_back(total_variation_to_uniform(p).get_d());
  std::vector<mpq_class> next(d);
  for (std::uint64_t n = 0; n < spec.steps; ++n) {
    for (auto& v : next) v = 0;
    for (std::uint64_t a = 0; a < d; ++a) {
      if (p[a] == 0) continue;
      for (std::uint64_t s = 0; s < d; ++s) {
        if (spec.mu[s] != 0) next[(a + s) % d] += p[a] * spec.mu[s];
      }
    }
    p.swap(next);
    out.tv.push_back(total_variation_to_uniform(p).get_d());
  }
  out.distribution = std::move(p);
  return out;
}

}  // namespace rotlab
