#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rotlab/bohr.hpp"
#include "rotlab/cfrac.hpp"
#include "rotlab/sieve.hpp"

namespace rotlab {

// Sorted fractional parts as 128-bit words (value = word * 2^-128).
struct PointSet {
  std::vector<u128> values;
  std::string provenance;

  std::size_t size() const { return values.size(); }
  static PointSet from_doubles(const std::vector<double>& v, std::string provenance = "explicit");
};

// n i.i.d. uniform points; each word is (hi << 64) | lo from two draws of std::mt19937_64(seed).
PointSet uniform_points(std::size_t n, std::uint64_t seed);

// {a alpha} for a in the rough set of [1, x].
PointSet build_points(const AlphaSpec& alpha, const RoughSequence& rough);
PointSet build_points(const AlphaSpec& alpha, std::uint64_t x, const RoughnessSpec& spec, RoughMode mode,
                      const SpfTable* table = nullptr);

// One coordinate of a rectangle, [lo, hi] in units of 1/N.
struct Side {
  double lo = 0.0;
  double hi = 0.0;
};
using Rect = std::vector<Side>;

Rect parse_rect(const std::string& text);  // "lo:hi[,lo:hi...]"
std::string format_rect(const Rect& rect);
double rect_volume(const Rect& rect);

struct CorrelationOptions {
  std::uint64_t scale = 0;  // N; 0 means the point count
  bool closed = false;      // closed upper endpoints instead of half-open
  unsigned workers = 1;
};

struct CorrelationResult {
  unsigned k = 2;
  Rect rect;
  std::uint64_t n = 0;
  mpz_class count;
  double value = 0.0;  // count / N
  double volume = 0.0;

  std::string csv_row() const;
};
inline constexpr const char* kCorrelationCsvHeader = "k,rect,N,count,value,vol";

// Ordered k-tuples of distinct indices with x_{n_1} - x_{n_j} in rect_j / N,
// differences taken on the torus with representative in (-1/2, 1/2].
CorrelationResult r_k(const PointSet& points, const Rect& rect, const CorrelationOptions& options = {});

struct GapHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::vector<double> expected;  // gap count * (e^-lo - e^-hi)
  std::vector<long double> scaled_gaps;
  double ks = 0.0;
  bool wrap = false;
  long double scaled_sum = 0.0L;

  std::string csv_rows() const;
};
inline constexpr const char* kGapCsvHeader = "bin_lo,bin_hi,count,expected_exp1";

GapHistogram gap_histogram(const PointSet& points, unsigned bins = 40, double t_max = 4.0, bool wrap = false);
double ks_exponential(std::vector<long double> sample);

struct KeyLemmaResult {
  std::uint64_t members = 0;
  mpz_class tuples = 0;
  mpq_class average;  // mean of prod_{p <= z} (1 - g_h(p)/p)
  mpq_class normal;   // prod_{p <= z} (1 - 1/p)^k
  double ratio = 0.0;
};

// Average singular series over h in B^{k-1} with pairwise distinct entries.
KeyLemmaResult key_lemma_average(const std::vector<std::uint64_t>& members, std::uint64_t z, unsigned k);
KeyLemmaResult key_lemma_average(const AlphaSpec& alpha, std::uint64_t x, double rho, std::uint64_t z, unsigned k);

struct AnatomyResult {
  std::uint64_t total = 0;
  std::uint64_t hits = 0;
  double fraction = 0.0;
  double shape = 0.0;  // r^{-1/3}
  bool small_r = true; // r < |B|^{1/3}
};

// Fraction of h in B (h != h_ref) with prod_{p | h - h_ref, p > r} (1 + 1/p) >= 1 + r^{-1/2}.
AnatomyResult anatomy_fraction(const std::vector<std::uint64_t>& members, double r, std::int64_t h_ref,
                               const SpfTable* table = nullptr);

struct BlowupRow {
  std::uint64_t x = 0;
  std::uint64_t n = 0;
  double s = 0.0;
  double r2 = 0.0;
  double normalized = 0.0;  // r2 / (2 s)
};

struct BlowupScan {
  std::vector<BlowupRow> rows;
  double max_normalized = 0.0;
  std::string csv_rows() const;
};
inline constexpr const char* kScanCsvHeader = "x,N,s,r2,normalized";

// x_k = q_k * max(1, floor(log f(q_k))) for convergents with x_k <= x_max.
std::vector<std::pair<std::size_t, std::uint64_t>> convergent_scales(const AlphaSpec& alpha, const RoughnessSpec& spec,
                                                                     std::uint64_t x_min, std::uint64_t x_max);
BlowupScan blowup_scan(const AlphaSpec& alpha, const RoughnessSpec& spec, const std::vector<std::uint64_t>& scales,
                       double s, unsigned workers = 1);

}  // namespace rotlab
