#include "rotlab/certified.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rotlab/error.hpp"

namespace rotlab {

CertifiedReal::CertifiedReal(mpz_class mantissa, unsigned frac_bits, mpz_class error_ulps)
    : mantissa_(std::move(mantissa)), frac_bits_(frac_bits), error_ulps_(std::move(error_ulps)) {
  require(error_ulps_ >= 0, "negative error bound");
}

CertifiedReal CertifiedReal::from_double(double value, unsigned frac_bits) {
  require(std::isfinite(value), "non-finite real");
  int exp = 0;
  double m = std::frexp(value, &exp);  // value = m * 2^exp, |m| in [0.5,1)
  // 53-bit integer significand.
  auto sig = static_cast<long long>(std::ldexp(m, 53));
  mpz_class mant(static_cast<long>(sig));
  int shift = exp - 53 + static_cast<int>(frac_bits);
  mpz_class err = 0;
  if (shift >= 0) {
    mant <<= static_cast<unsigned>(shift);
  } else {
    mpz_class q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), mant.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    if (q << static_cast<unsigned>(-shift) != mant) err = 1;
    mant = q;
  }
  return {mant, frac_bits, err};
}

CertifiedReal CertifiedReal::from_fraction(u128 fraction, u128 error_ulps) {
  return {to_mpz(fraction), 128, to_mpz(error_ulps)};
}

long double CertifiedReal::value() const {
  // mpz_get_d truncates; go through a 64-bit window to keep long double precision.
  const size_t bits = mpz_sizeinbase(mantissa_.get_mpz_t(), 2);
  mpz_class m = mantissa_;
  long shift = 0;
  if (bits > 64) {
    shift = static_cast<long>(bits) - 64;
    mpz_class q;
    mpz_tdiv_q_2exp(q.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    m = q;
  }
  const bool neg = m < 0;
  if (neg) m = -m;
  auto lo = static_cast<unsigned long>(mpz_get_ui(m.get_mpz_t()));
  long double v = static_cast<long double>(lo);
  if (neg) v = -v;
  return std::ldexp(v, static_cast<int>(shift - static_cast<long>(frac_bits_)));
}

double CertifiedReal::error_bound() const {
  return std::ldexp(error_ulps_.get_d(), -static_cast<int>(frac_bits_));
}

double CertifiedReal::error_log2() const {
  if (error_ulps_ == 0) return -std::numeric_limits<double>::infinity();
  return std::log2(error_ulps_.get_d()) - static_cast<double>(frac_bits_);
}

int CertifiedReal::certified_sign() const {
  if (lower() > 0) return 1;
  if (upper() < 0) return -1;
  return 0;
}

CertifiedReal CertifiedReal::rescaled(unsigned frac_bits) const {
  if (frac_bits >= frac_bits_) {
    const unsigned up = frac_bits - frac_bits_;
    return {mantissa_ << up, frac_bits, error_ulps_ << up};
  }
  const unsigned down = frac_bits_ - frac_bits;
  mpz_class m, e;
  mpz_fdiv_q_2exp(m.get_mpz_t(), mantissa_.get_mpz_t(), down);
  mpz_cdiv_q_2exp(e.get_mpz_t(), error_ulps_.get_mpz_t(), down);
  return {m, frac_bits, e + 1};
}

CertifiedReal CertifiedReal::operator-() const { return {-mantissa_, frac_bits_, error_ulps_}; }

namespace {
unsigned common_bits(const CertifiedReal& a, const CertifiedReal& b) {
  return a.frac_bits() > b.frac_bits() ? a.frac_bits() : b.frac_bits();
}
}  // namespace

CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b) {
  const unsigned bits = common_bits(a, b);
  const auto x = a.rescaled(bits);
  const auto y = b.rescaled(bits);
  return {x.mantissa_ + y.mantissa_, bits, x.error_ulps_ + y.error_ulps_};
}

CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b) { return a + (-b); }

CertifiedReal operator*(const mpz_class& k, const CertifiedReal& a) {
  mpz_class absk = abs(k);
  return {k * a.mantissa_, a.frac_bits_, absk * a.error_ulps_};
}

std::string CertifiedReal::to_string(int digits) const {
  std::ostringstream os;
  os.precision(digits);
  os << value() << " +/- " << error_bound();
  return os.str();
}

mpz_class to_mpz(u128 v) {
  mpz_class hi(static_cast<unsigned long>(v >> 64));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

u128 to_u128(const mpz_class& v) {
  require(v >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 128, "value does not fit in 128 bits");
  mpz_class hi = v >> 64;
  mpz_class lo = v - (hi << 64);
  return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) | static_cast<u128>(mpz_get_ui(lo.get_mpz_t()));
}

long double fraction_to_ld(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return std::ldexp(static_cast<long double>(hi), -64) + std::ldexp(static_cast<long double>(lo), -128);
}

long double torus_signed_ld(u128 v) {
  constexpr u128 half = static_cast<u128>(1) << 127;
  if (v <= half) return fraction_to_ld(v);
  return -fraction_to_ld(static_cast<u128>(0) - v);
}

}  // namespace rotlab
