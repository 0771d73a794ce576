#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace rotlab {

using u128 = unsigned __int128;
using i128 = __int128;

// Fixed-point real number together with a rigorous error bound:
//   |mantissa * 2^-frac_bits - true value| <= error_ulps * 2^-frac_bits.
class CertifiedReal {
 public:
  CertifiedReal() = default;
  CertifiedReal(mpz_class mantissa, unsigned frac_bits, mpz_class error_ulps);

  // Exact binary value of a double.
  static CertifiedReal from_double(double value, unsigned frac_bits = 128);
  // Value in [0,1) held as a 128-bit fraction.
  static CertifiedReal from_fraction(u128 fraction, u128 error_ulps);

  const mpz_class& mantissa() const { return mantissa_; }
  unsigned frac_bits() const { return frac_bits_; }
  const mpz_class& error_ulps() const { return error_ulps_; }

  long double value() const;
  double error_bound() const;
  // Returns log2 of the error bound (or -inf for an exact value).
  double error_log2() const;

  // +1 / -1 when the sign is certain, 0 when the error interval straddles 0.
  int certified_sign() const;

  // Expresses the value with a different number of fraction bits; rounding
  // toward -inf adds one ulp to the error when bits are dropped.
  CertifiedReal rescaled(unsigned frac_bits) const;

  CertifiedReal operator-() const;
  friend CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b);
  friend CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b);
  friend CertifiedReal operator*(const mpz_class& k, const CertifiedReal& a);

  // Lower / upper end of the error interval, as mantissas at frac_bits().
  mpz_class lower() const { return mantissa_ - error_ulps_; }
  mpz_class upper() const { return mantissa_ + error_ulps_; }

  std::string to_string(int digits = 20) const;

 private:
  mpz_class mantissa_{0};
  unsigned frac_bits_{0};
  mpz_class error_ulps_{0};
};

// Conversions between 128-bit words and GMP integers.
mpz_class to_mpz(u128 v);
u128 to_u128(const mpz_class& v);  // requires 0 <= v < 2^128

// 128-bit fraction (value * 2^-128) to long double.
long double fraction_to_ld(u128 v);

// Signed torus representative of v in (-1/2, 1/2], as long double.
long double torus_signed_ld(u128 v);

}  // namespace rotlab
