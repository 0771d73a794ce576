#pragma once

// Continued-fraction engine for quadratic surds and rule-generated expansions.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "rotlab/certified.hpp"

namespace rotlab {

// (P + sqrt(D)) / Q with D > 0 not a perfect square and Q != 0.
struct Surd {
  mpz_class p;
  mpz_class d;
  mpz_class q;
};

// [prefix[0]; prefix[1], ..., prefix[r], period, period, ...].
struct PeriodicRule {
  std::vector<std::uint64_t> prefix;
  std::vector<std::uint64_t> period;
};

// a_0 = 0 and a_k = k^degree for k >= 1.
struct PolyRule {
  unsigned degree = 1;
};

struct AlphaSpec {
  enum class Kind { surd, periodic, poly };

  Kind kind = Kind::surd;
  std::string alias;  // "golden", "sqrt2" or empty
  std::variant<Surd, PeriodicRule, PolyRule> rule;

  const Surd& surd() const { return std::get<Surd>(rule); }
  const PeriodicRule& periodic() const { return std::get<PeriodicRule>(rule); }
  const PolyRule& poly() const { return std::get<PolyRule>(rule); }

  // Canonical text that round-trips through parse_alpha.
  std::string canonical() const;
};

// Grammar: golden | sqrt2 | surd:P,D,Q | cf:a0;a1,...|period:b1,... | cf-poly:d
AlphaSpec parse_alpha(std::string_view text);

// Largest admissible bit length of q_K; ROTATIONLAB_MAX_BITS overrides the default.
unsigned max_denominator_bits();
inline constexpr unsigned kDefaultMaxBits = 4096;

// Lazily generated, cached partial quotients a_0, a_1, ... of an AlphaSpec.
// Thread-safe.
class DigitStream {
 public:
  explicit DigitStream(AlphaSpec alpha);
  DigitStream(const DigitStream&) = delete;
  DigitStream& operator=(const DigitStream&) = delete;

  std::uint64_t digit(std::size_t k);
  const AlphaSpec& alpha() const { return alpha_; }

  // Surd kind: index where the purely periodic part starts and its length,
  // once detected (0,0 before that).
  std::pair<std::size_t, std::size_t> detected_period() const;

 private:
  void extend_to(std::size_t k);
  std::uint64_t next_surd_digit();

  AlphaSpec alpha_;
  std::mutex mutex_;
  std::vector<std::uint64_t> digits_;
  // Surd recurrence state (P_k + sqrt(D)) / Q_k.
  mpz_class sp_, sd_, sq_, sqrt_d_;
  std::map<std::pair<mpz_class, mpz_class>, std::size_t> seen_;
  std::size_t period_start_ = 0;
  std::size_t period_len_ = 0;
};

// floor(alpha * 2^bits), accurate to within 2 units in the last place.
mpz_class alpha_fixed(const AlphaSpec& alpha, unsigned bits);

class ContinuedFraction {
 public:
  // Digits a_0..a_K with convergents, certified deltas.
  static ContinuedFraction expand(const AlphaSpec& alpha, std::size_t depth);

  const AlphaSpec& alpha() const { return alpha_; }
  std::size_t depth() const { return digits_.size() - 1; }  // K

  std::uint64_t a(std::size_t i) const { return digits_.at(i); }
  const std::vector<std::uint64_t>& digits() const { return digits_; }
  const mpz_class& p(std::size_t k) const { return p_.at(k); }
  const mpz_class& q(std::size_t k) const { return q_.at(k); }
  // q_k as a machine word; throws BudgetError when it does not fit.
  std::uint64_t q_word(std::size_t k) const;
  // Largest index k with q_k < 2^63 (all Ostrowski integer work stays below it).
  std::size_t word_depth() const { return word_depth_; }

  // delta_k = q_k alpha - p_k, certified.
  const CertifiedReal& delta(std::size_t k) const;
  long double delta_ld(std::size_t k) const { return delta_ld_.at(k); }
  long double abs_delta_ld(std::size_t k) const;
  unsigned delta_bits() const { return delta_bits_; }

  // C = max_{1 <= i <= K} a_i.
  std::uint64_t bound() const { return bound_; }

 private:
  AlphaSpec alpha_;
  std::vector<std::uint64_t> digits_;
  std::vector<mpz_class> p_, q_;
  std::vector<CertifiedReal> delta_;
  std::vector<long double> delta_ld_;
  unsigned delta_bits_ = 0;
  std::uint64_t bound_ = 0;
  std::size_t word_depth_ = 0;
};

// Maximum n accepted by Rotation::frac_part under the 128-bit fraction budget.
inline constexpr std::uint64_t kMaxRotationIndex = std::uint64_t{1} << 32;

// Irrational rotation n -> {n alpha} on 128-bit fixed point. The stored step
// is within 2^-127 of {alpha}; so {n alpha} is certified to n * 2^-127.
class Rotation {
 public:
  explicit Rotation(const AlphaSpec& alpha);

  const AlphaSpec& alpha() const { return alpha_; }
  u128 step() const { return step_; }

  // Fast path: fraction word of {n alpha}; wraps consistently on the torus.
  u128 frac_word(std::uint64_t n) const { return step_ * static_cast<u128>(n); }
  // Certified {n alpha}; requires n <= kMaxRotationIndex.
  CertifiedReal frac_part(std::uint64_t n) const;
  // Error bound of frac_word(n) in units of 2^-128.
  static u128 error_ulps(std::uint64_t n) { return static_cast<u128>(n) * 2 + 1; }

 private:
  AlphaSpec alpha_;
  u128 step_ = 0;
};

}  // namespace rotlab
