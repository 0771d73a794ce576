#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotlab/cfrac.hpp"
#include "rotlab/ostrowski.hpp"

namespace rotlab {

// [0, rho) or [1 - rho, 1).
struct BohrInterval {
  enum class Anchor { zero, one };
  Anchor anchor = Anchor::zero;
  double rho = 0.0;

  static BohrInterval at_zero(double rho) { return {Anchor::zero, rho}; }
  static BohrInterval at_one(double rho) { return {Anchor::one, rho}; }
  double length() const { return rho < 1.0 ? rho : 1.0; }
  std::string describe() const;
};

// Interval as 128-bit words: v is a member iff (v - lo) mod 2^128 < width.
// full is set for rho >= 1.
struct WordInterval {
  u128 lo = 0;
  u128 width = 0;
  bool full = false;

  static WordInterval from(const BohrInterval& interval);
  bool contains(u128 v) const { return full || static_cast<u128>(v - lo) < width; }
  // Torus distance in words from v to the nearer endpoint.
  u128 endpoint_distance(u128 v) const;
};

inline constexpr int kBoundaryBits = 40;  // proximity counter fires below 2^-40

struct BohrSet {
  AlphaSpec alpha;
  std::uint64_t x = 0;
  BohrInterval interval;
  std::vector<std::uint64_t> members;
  std::uint64_t boundary_hits = 0;   // |{n alpha} - endpoint| < 2^-40
  std::uint64_t uncertain = 0;       // endpoint within the certified error

  std::size_t size() const { return members.size(); }
  // |B| / (x * lambda(I))
  double cardinality_ratio() const;
};

struct EnumerateOptions {
  enum class Method { scan, three_distance };
  Method method = Method::scan;
  unsigned workers = 1;
  // The return-map path skips non-members, so auditing them costs a full pass.
  bool audit_boundaries = true;
};

BohrSet bohr_enumerate(const AlphaSpec& alpha, std::uint64_t x, const BohrInterval& interval,
                       const EnumerateOptions& options = {});

// Return times to the interval: each gap between consecutive members is
// first, second or first + second.
struct ReturnTimes {
  std::uint64_t first = 0;   // smallest t with {t alpha} in [0, width)
  std::uint64_t second = 0;  // smallest t with {t alpha} in (1 - width, 1)
};
ReturnTimes return_times(const Rotation& rotation, const WordInterval& interval, std::uint64_t limit);

struct ResidueProfile {
  std::uint64_t d = 1;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double freq(std::uint64_t a) const;
  double max_deviation() const;
  // Rows of `d,class,count,total,freq,dev` (no header).
  std::string csv_rows() const;
};
inline constexpr const char* kResidueCsvHeader = "d,class,count,total,freq,dev";

ResidueProfile residue_profile(const std::vector<std::uint64_t>& members, std::uint64_t d);
ResidueProfile cylinder_residue_profile(const ContinuedFraction& cf, const Digits& prefix, std::uint64_t x,
                                        std::uint64_t d);

struct SandwichReport {
  std::size_t m = 0;
  std::size_t l = 0;
  std::uint64_t bound_c = 0;              // C(alpha) over the digits used
  bool precondition_met = false;          // x * gamma > (C + 1)^L
  std::vector<Digits> s_minus;
  std::vector<Digits> s_plus;
  std::uint64_t bohr_size = 0;
  std::uint64_t inner_size = 0;           // |union over S-|
  std::uint64_t outer_size = 0;           // |union over S+|
  std::uint64_t symmetric_difference = 0; // outer - inner
  bool inner_included = false;            // union S- within B
  bool outer_included = false;            // B within union S+
  double size_ratio = 0.0;                // max |S+-| / L^(C+1)

  bool inclusions_hold() const { return inner_included && outer_included; }
};

// Cylinder sandwich for [0, gamma) or [1 - gamma, 1) with |delta_{m+1}| <= gamma < |delta_m|.
SandwichReport sandwich(const AlphaSpec& alpha, std::uint64_t x, const BohrInterval& interval, std::size_t l);

// Finite step function on [0,1): value[j] on [breaks[j], breaks[j+1]), breaks[0] = 0, last break 1.
struct StepFunction {
  std::vector<double> breaks;
  std::vector<double> values;

  static StepFunction indicator(double a, double b);  // 1 on [a, b)
  static StepFunction constant(double c);
  double integral() const;
  // Total variation of the 1-periodic extension.
  double variation() const;
  double operator()(double t) const;
};

struct DenjoyKoksma {
  double sum = 0.0;
  double expected = 0.0;  // N * integral
  double error = 0.0;     // |sum - expected|
  double bound = 0.0;     // c * Var(f) * sum_i b_i(N)
  std::uint64_t digit_sum = 0;
  double empirical_constant = 0.0;  // error / (Var * digit sum)
  bool pass = false;
};

inline constexpr double kDefaultDkConstant = 2.0;

DenjoyKoksma dk_check(const AlphaSpec& alpha, const StepFunction& f, std::uint64_t n,
                      double constant = kDefaultDkConstant);

}  // namespace rotlab
