#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace rotlab {

inline constexpr std::uint64_t kSieveBudget = 100000000;  // largest x for an spf table
inline constexpr std::uint64_t kDefaultSegment = std::uint64_t{1} << 18;

// Smallest-prime-factor table for 2 <= n <= x, filled segment by segment.
// Composite entries hold P-(n) <= sqrt(n) < 2^16; primes are stored as 0.
class SpfTable {
 public:
  explicit SpfTable(std::uint64_t x, std::uint64_t segment = kDefaultSegment, unsigned workers = 1);

  std::uint64_t limit() const { return limit_; }
  // P-(n) for 2 <= n <= limit.
  std::uint64_t spf(std::uint64_t n) const {
    const std::uint16_t v = table_[n];
    return v == 0 ? n : v;
  }
  // P-(1) is taken to be infinite, so 1 is z-rough for every z.
  bool is_rough(std::uint64_t n, std::uint64_t z) const { return n == 1 || spf(n) > z; }
  std::vector<std::uint64_t> primes_up_to(std::uint64_t z) const;
  // Distinct prime factors of n.
  std::vector<std::uint64_t> prime_factors(std::uint64_t n) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint16_t> table_;
};

SpfTable spf_sieve(std::uint64_t x, unsigned workers = 1);

struct RoughnessSpec {
  enum class Mode { paper, fixed, power };
  Mode mode = Mode::fixed;
  double param = 1.0;  // z for fixed, exponent c for power

  static RoughnessSpec parse(const std::string& text);  // paper | fixed:z | power:c
  std::string describe() const;
  // z = f(x): paper floor(exp((ln ln x)^2)) for x >= 16, else 1; fixed z; power floor(x^c).
  std::uint64_t eval(std::uint64_t x) const;
};

inline std::uint64_t roughness_eval(const RoughnessSpec& spec, std::uint64_t x) { return spec.eval(x); }

// Triangular: P-(n) > f(x) for every n <= x. Sequence: P-(n) > f(n), per element.
enum class RoughMode { triangular, sequence };

struct RoughSequence {
  std::uint64_t x = 0;
  std::uint64_t z = 0;  // f(x); the per-element thresholds differ in sequence mode
  RoughMode mode = RoughMode::triangular;
  std::vector<std::uint64_t> members;

  std::uint64_t phi() const { return members.size(); }
};

RoughSequence rough_enumerate(std::uint64_t x, const RoughnessSpec& spec, RoughMode mode, const SpfTable* table = nullptr);
std::uint64_t phi(std::uint64_t x, std::uint64_t z, const SpfTable* table = nullptr);

struct SingularSeriesValue {
  std::vector<std::int64_t> h;
  std::uint64_t z = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> factors;  // (p, g_h(p))
  mpq_class value;

  double approx() const { return value.get_d(); }
};

// g_h(p) = #{0, h_1, ..., h_{k-1} mod p}.
std::uint64_t local_count(const std::vector<std::int64_t>& h, std::uint64_t p);
std::vector<std::uint64_t> primes_up_to(std::uint64_t z);
SingularSeriesValue singular_series(const std::vector<std::int64_t>& h, std::uint64_t z);

struct TupleCount {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  std::vector<std::int64_t> h;
  std::uint64_t exact = 0;
  double predicted = 0.0;
  mpq_class predicted_exact;

  double ratio() const;
  std::string csv_row() const;
};
inline constexpr const char* kTupleCsvHeader = "x,z,h,exact,predicted,ratio";

// exact: #{1 <= m <= x : m + h_i in [1, x] and m, m + h_i all z-rough};
// predicted: (x - (h+ - h-))_{>0} * prod_{p <= z} (1 - g_h(p)/p).
TupleCount tuple_count(std::uint64_t x, std::uint64_t z, const std::vector<std::int64_t>& h,
                       const SpfTable* table = nullptr);

struct CuteIdentity {
  std::uint64_t p = 0;
  unsigned k = 0;
  mpq_class lhs;  // p^{-(k-1)} sum_{h in Z_p^{k-1}} (1 - g_h(p)/p)
  mpq_class rhs;  // (1 - 1/p)^k
  bool pass = false;
};

CuteIdentity cute_identity_check(std::uint64_t p, unsigned k);

std::string format_offsets(const std::vector<std::int64_t>& h);  // "2;6"

}  // namespace rotlab
