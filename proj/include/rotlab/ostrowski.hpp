#pragma once

// Integer and real Ostrowski numeration with respect to a ContinuedFraction.
// Digit vectors are least-significant first: digits[i] multiplies q_i (or delta_i).

#include <cstdint>
#include <string>
#include <vector>

#include "rotlab/certified.hpp"
#include "rotlab/cfrac.hpp"

namespace rotlab {

using Digits = std::vector<std::uint64_t>;

// Empty string when the digits satisfy 0 <= b_0 < a_1, 0 <= b_i <= a_{i+1},
// and b_{i-1} = 0 whenever b_i = a_{i+1}; otherwise a description of the violation.
std::string admissibility_error(const ContinuedFraction& cf, const Digits& digits);
inline bool admissible(const ContinuedFraction& cf, const Digits& digits) {
  return admissibility_error(cf, digits).empty();
}

// Largest N accepted by encode_int (q_K - 1).
std::uint64_t max_encodable(const ContinuedFraction& cf);

// Greedy top-down expansion; the result has no trailing zeros except for N = 0 -> {0}.
Digits encode_int(const ContinuedFraction& cf, std::uint64_t n);
std::uint64_t decode_int(const ContinuedFraction& cf, const Digits& digits);

// sum b_i delta_i, certified. Congruent to {N alpha} mod 1 for N = decode_int(digits).
CertifiedReal ostrowski_phase(const ContinuedFraction& cf, const Digits& digits);

struct RealOstrowski {
  Digits digits;          // c_0..c_K
  CertifiedReal value;    // sum c_i delta_i
  CertifiedReal residual; // gamma - value
};

// Expansion of gamma in [-{alpha}, 1-{alpha}) using delta_0..delta_K; needs K < cf.depth().
// |residual| <= |delta_K|.
RealOstrowski encode_real(const ContinuedFraction& cf, const CertifiedReal& gamma, std::size_t k);
RealOstrowski encode_real(const ContinuedFraction& cf, double gamma, std::size_t k);

struct IntTruncation {
  std::uint64_t minus = 0;
  std::uint64_t plus = 0;
  std::size_t top = 0;       // n, the leading index of x
  double ratio = 1.0;        // plus / minus
  double ratio_bound = 1.0;  // (x + q_{n-m}) / (x - q_{n-m})
  std::size_t nonzero_minus = 0;
  std::size_t nonzero_plus = 0;
};

// x_m^- keeps the digits of x at indices n-m..n; x_m^+ keeps the same window
// of x + q_{n-m}.
IntTruncation truncate_int(const ContinuedFraction& cf, std::uint64_t x, std::size_t m);

struct RealTruncation {
  std::size_t m = 0;  // index of the leading real digit of gamma
  RealOstrowski minus;
  RealOstrowski plus;
  long double ratio = 1.0L;
};

// gamma^-/+ = truncations to indices <= m+L of gamma -/+ |delta_{m+L}|.
RealTruncation truncate_real(const ContinuedFraction& cf, const CertifiedReal& gamma, std::size_t l);

// Sorted members of { 1 <= N <= x : b_i(N) = prefix[i] for i < prefix.size() }.
std::vector<std::uint64_t> cylinder_enumerate(const ContinuedFraction& cf, const Digits& prefix, std::uint64_t x);

std::string format_digits(const Digits& digits);
Digits parse_digits(const std::string& text);

}  // namespace rotlab
