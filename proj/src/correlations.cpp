#include "rotlab/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "rotlab/error.hpp"

namespace rotlab {

namespace {

const mpz_class& two128() {
  static const mpz_class v = mpz_class(1) << 128;
  return v;
}

i128 to_i128(const mpz_class& v) {
  const bool neg = v < 0;
  const mpz_class a = neg ? mpz_class(-v) : v;
  const u128 w = to_u128(a);
  return neg ? -static_cast<i128>(w) : static_cast<i128>(w);
}

mpz_class from_i128(i128 v) {
  if (v >= 0) return to_mpz(static_cast<u128>(v));
  return -to_mpz(static_cast<u128>(-v));
}

// Word thresholds of one side: a difference word d is inside iff lo <= d <= hi.
// Differences live in (-2^127, 2^127]; half marks that d = 2^127 is inside.
struct WordSide {
  i128 lo;
  i128 hi;
  bool half;
};

WordSide word_side(const Side& side, std::uint64_t n, bool closed) {
  mpq_class lo(side.lo), hi(side.hi);
  lo *= two128();
  lo /= n;
  hi *= two128();
  hi /= n;
  mpz_class l, h;
  mpz_cdiv_q(l.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (closed) {
    mpz_fdiv_q(h.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
  } else {
    mpz_cdiv_q(h.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    h -= 1;
  }
  const mpz_class half = two128() / 2;
  WordSide out{0, 0, l <= half && h >= half};
  if (l <= -half) l = -half + 1;
  if (h >= half) h = half - 1;
  out.lo = l > h ? 1 : to_i128(l);
  out.hi = l > h ? 0 : to_i128(h);
  return out;
}

// #{j : (x_j - start) mod 2^128 < len} in a sorted array; len == 0 means empty.
std::size_t arc_count(const std::vector<u128>& v, u128 start, u128 len) {
  if (len == 0) return 0;
  const auto lb = [&](u128 t) { return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), t) - v.begin()); };
  const u128 end = start + len;  // wraps when the arc passes 1
  if (end > start) return lb(end) - lb(start);
  return (v.size() - lb(start)) + lb(end);
}

// #{j : lo <= a - x_j <= hi} with signed word differences.
std::size_t window_count(const std::vector<u128>& v, u128 a, i128 lo, i128 hi) {
  if (lo > hi) return 0;
  const u128 start = a - static_cast<u128>(hi);
  const u128 len = static_cast<u128>(hi - lo) + 1;
  return arc_count(v, start, len);
}

// Set partitions of {0..m-1} with the Moebius weight prod (-1)^{|B|-1} (|B|-1)!.
struct Partition {
  std::vector<unsigned> blocks;
  std::int64_t weight;
};

std::vector<Partition> set_partitions(unsigned m) {
  std::vector<Partition> out;
  std::vector<unsigned> blocks;
  std::function<void(unsigned)> rec = [&](unsigned i) {
    if (i == m) {
      std::int64_t w = 1;
      for (auto b : blocks) {
        const int size = __builtin_popcount(b);
        std::int64_t f = 1;
        for (int t = 2; t < size; ++t) f *= t;
        w *= (size % 2 == 1 ? 1 : -1) * f;
      }
      out.push_back({blocks, w});
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] |= 1u << i;
      rec(i + 1);
      blocks[b] &= ~(1u << i);
    }
    blocks.push_back(1u << i);
    rec(i + 1);
    blocks.pop_back();
  };
  rec(0);
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PointSet PointSet::from_doubles(const std::vector<double>& v, std::string provenance) {
  PointSet out;
  out.provenance = std::move(provenance);
  out.values.reserve(v.size());
  for (double d : v) {
    require(d >= 0.0 && d < 1.0, "points must lie in [0,1)");
    const double hi = std::floor(std::ldexp(d, 64));
    const double lo = std::ldexp(std::ldexp(d, 64) - hi, 64);
    out.values.push_back((static_cast<u128>(static_cast<std::uint64_t>(hi)) << 64) |
                         static_cast<u128>(static_cast<std::uint64_t>(lo)));
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

PointSet uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PointSet out;
  out.provenance = "uniform seed=" + std::to_string(seed);
  out.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const u128 hi = gen();
    const u128 lo = gen();
    out.values.push_back((hi << 64) | lo);
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

PointSet build_points(const AlphaSpec& alpha, const RoughSequence& rough) {
  if (!rough.members.empty() && rough.members.back() > kMaxRotationIndex) {
    throw PrecisionError("rotation index beyond the 128-bit fraction budget");
  }
  const Rotation rot(alpha);
  PointSet out;
  out.values.reserve(rough.members.size());
  for (auto a : rough.members) out.values.push_back(rot.frac_word(a));
  std::sort(out.values.begin(), out.values.end());
  std::ostringstream os;
  os << alpha.canonical() << " x=" << rough.x << " z=" << rough.z
     << (rough.mode == RoughMode::triangular ? " triangular" : " sequence");
  out.provenance = os.str();
  return out;
}

PointSet build_points(const AlphaSpec& alpha, std::uint64_t x, const RoughnessSpec& spec, RoughMode mode,
                      const SpfTable* table) {
  if (x > kMaxRotationIndex) throw PrecisionError("rotation index beyond the 128-bit fraction budget");
  return build_points(alpha, rough_enumerate(x, spec, mode, table));
}

Rect parse_rect(const std::string& text) {
  Rect out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw PreconditionError("rectangle side '" + item + "' is not lo:hi");
    Side s;
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
      s.lo = std::stod(a, &u1);
      s.hi = std::stod(b, &u2);
      if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw PreconditionError("rectangle side '" + item + "' is not lo:hi");
    }
    if (s.lo > s.hi) throw PreconditionError("rectangle side '" + item + "' has lo > hi");
    out.push_back(s);
  }
  if (out.empty()) throw PreconditionError("empty rectangle");
  return out;
}

std::string format_rect(const Rect& rect) {
  std::string out;
  for (std::size_t i = 0; i < rect.size(); ++i) {
    if (i) out += ';';
    out += fmt_double(rect[i].lo) + ":" + fmt_double(rect[i].hi);
  }
  return out;
}

double rect_volume(const Rect& rect) {
  double v = 1.0;
  for (const auto& s : rect) v *= s.hi - s.lo;
  return v;
}

std::string CorrelationResult::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%u,%s,%llu,%s,%.8f,%.8f\n", k, format_rect(rect).c_str(),
                static_cast<unsigned long long>(n), count.get_str().c_str(), value, volume);
  return buf;
}

CorrelationResult r_k(const PointSet& points, const Rect& rect, const CorrelationOptions& options) {
  require(!rect.empty(), "rectangle needs at least one side");
  require(rect.size() <= 6, "r_k supports k <= 7");
  const unsigned m = static_cast<unsigned>(rect.size());
  const std::uint64_t n = options.scale == 0 ? points.size() : options.scale;
  require(n >= 1, "empty point set");
  std::vector<WordSide> sides;
  for (const auto& s : rect) {
    require(s.lo <= s.hi, "rectangle side has lo > hi");
    if (std::abs(s.lo) > static_cast<double>(n) / 2 || std::abs(s.hi) > static_cast<double>(n) / 2) {
      throw PreconditionError("rectangle wider than N/2 makes toroidal differences ambiguous");
    }
    sides.push_back(word_side(s, n, options.closed));
  }
  const auto partitions = set_partitions(m);
  const unsigned subsets = 1u << m;
  const auto& v = points.values;

  auto run = [&](std::size_t begin, std::size_t end) {
    i128 total = 0;
    std::vector<i128> cnt(subsets, 0);
    for (std::size_t i = begin; i < end; ++i) {
      const u128 a = v[i];
      for (unsigned mask = 1; mask < subsets; ++mask) {
        i128 lo = std::numeric_limits<i128>::min(), hi = std::numeric_limits<i128>::max();
        bool half = true;
        for (unsigned t = 0; t < m; ++t) {
          if (mask & (1u << t)) {
            lo = std::max(lo, sides[t].lo);
            hi = std::min(hi, sides[t].hi);
            half = half && sides[t].half;
          }
        }
        i128 c = static_cast<i128>(window_count(v, a, lo, hi));
        if (half) c += static_cast<i128>(arc_count(v, a + (static_cast<u128>(1) << 127), 1));
        if (lo <= 0 && 0 <= hi) --c;  // the anchor itself
        cnt[mask] = c;
      }
      for (const auto& p : partitions) {
        i128 prod = p.weight;
        for (auto b : p.blocks) {
          prod *= cnt[b];
          if (prod == 0) break;
        }
        total += prod;
      }
    }
    return total;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, 64));
  i128 total = 0;
  if (workers == 1 || v.size() < 2 * workers) {
    total = run(0, v.size());
  } else {
    std::vector<i128> partial(workers, 0);
    std::vector<std::thread> threads;
    const std::size_t chunk = (v.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(v.size(), w * chunk), e = std::min(v.size(), b + chunk);
      threads.emplace_back([&, w, b, e] { partial[w] = run(b, e); });
    }
    for (auto& t : threads) t.join();
    for (auto p : partial) total += p;
  }

  CorrelationResult out;
  out.k = m + 1;
  out.rect = rect;
  out.n = n;
  out.count = from_i128(total);
  out.value = mpq_class(out.count, mpz_class(static_cast<unsigned long>(n))).get_d();
  out.volume = rect_volume(rect);
  return out;
}

double ks_exponential(std::vector<long double> sample) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const long double m = static_cast<long double>(sample.size());
  long double d = 0.0L;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const long double f = 1.0L - std::exp(-sample[i]);
    d = std::max(d, static_cast<long double>(i + 1) / m - f);
    d = std::max(d, f - static_cast<long double>(i) / m);
  }
  return static_cast<double>(d);
}

GapHistogram gap_histogram(const PointSet& points, unsigned bins, double t_max, bool wrap) {
  require(points.size() >= 2, "gap statistics need N >= 2");
  require(bins >= 1 && t_max > 0.0, "histogram needs bins >= 1 and t_max > 0");
  const auto& v = points.values;
  const long double n = static_cast<long double>(v.size());
  const long double scale = n / std::ldexp(1.0L, 128);
  GapHistogram out;
  out.wrap = wrap;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    out.scaled_gaps.push_back(static_cast<long double>(v[i + 1] - v[i]) * scale);
  }
  if (wrap) {
    const u128 g = v.front() - v.back();  // mod 2^128
    const long double gl = g == 0 ? std::ldexp(1.0L, 128) : static_cast<long double>(g);
    out.scaled_gaps.push_back(v.size() == 1 ? n : gl * scale);
  }
  for (auto g : out.scaled_gaps) out.scaled_sum += g;
  out.edges.resize(bins + 1);
  for (unsigned i = 0; i <= bins; ++i) out.edges[i] = t_max * i / bins;
  out.counts.assign(bins, 0);
  for (auto g : out.scaled_gaps) {
    if (g < 0 || g >= t_max) continue;
    auto b = static_cast<std::size_t>(g / (t_max / bins));
    if (b >= bins) b = bins - 1;
    while (b > 0 && g < out.edges[b]) --b;
    while (b + 1 < bins && g >= out.edges[b + 1]) ++b;
    ++out.counts[b];
  }
  const double total = static_cast<double>(out.scaled_gaps.size());
  for (unsigned i = 0; i < bins; ++i) {
    out.expected.push_back(total * (std::exp(-out.edges[i]) - std::exp(-out.edges[i + 1])));
  }
  out.ks = ks_exponential(out.scaled_gaps);
  return out;
}

std::string GapHistogram::csv_rows() const {
  std::string out;
  char buf[160];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%llu,%.6f\n", edges[i], edges[i + 1],
                  static_cast<unsigned long long>(counts[i]), expected[i]);
    out += buf;
  }
  return out;
}

KeyLemmaResult key_lemma_average(const std::vector<std::uint64_t>& members, std::uint64_t z, unsigned k) {
  require(k >= 2 && k <= 7, "key lemma average needs 2 <= k <= 7");
  require(z <= 52, "z too large for word-sized primorials");
  std::set<std::uint64_t> uniq(members.begin(), members.end());
  if (uniq.empty()) throw PreconditionError("empty Bohr set");
  const std::vector<std::uint64_t> b(uniq.begin(), uniq.end());
  const auto primes = primes_up_to(z);
  const unsigned dims = k - 1;

  mpz_class tuples = 1;
  for (unsigned i = 0; i < dims; ++i) tuples *= static_cast<long>(b.size()) - static_cast<long>(i);
  if (tuples <= 0) throw PreconditionError("Bohr set smaller than k - 1");
  if (tuples > 400000000) throw BudgetError("key lemma average over more than 4e8 tuples");

  std::uint64_t primorial = 1;
  for (auto p : primes) primorial *= p;

  std::vector<std::vector<std::uint8_t>> res(b.size(), std::vector<std::uint8_t>(primes.size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < primes.size(); ++j) res[i][j] = static_cast<std::uint8_t>(b[i] % primes[j]);
  }

  u128 sum = 0;
  std::vector<std::size_t> idx(dims);
  std::function<void(unsigned)> rec = [&](unsigned level) {
    if (level == dims) {
      std::uint64_t prod = 1;
      for (std::size_t j = 0; j < primes.size(); ++j) {
        std::uint8_t seen[8];
        unsigned g = 1;
        seen[0] = 0;
        for (unsigned t = 0; t < dims; ++t) {
          const std::uint8_t r = res[idx[t]][j];
          bool fresh = true;
          for (unsigned u = 0; u < g; ++u) fresh = fresh && seen[u] != r;
          if (fresh) seen[g++] = r;
        }
        prod *= primes[j] - g;
        if (prod == 0) break;
      }
      sum += prod;
      return;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      bool used = false;
      for (unsigned t = 0; t < level; ++t) used = used || idx[t] == i;
      if (used) continue;
      idx[level] = i;
      rec(level + 1);
    }
  };
  rec(0);

  KeyLemmaResult out;
  out.members = b.size();
  out.tuples = tuples;
  out.average = mpq_class(to_mpz(sum), tuples * mpz_class(static_cast<unsigned long>(primorial)));
  out.average.canonicalize();
  out.normal = 1;
  for (auto p : primes) {
    mpq_class f(static_cast<unsigned long>(p - 1), static_cast<unsigned long>(p));
    for (unsigned i = 0; i < k; ++i) out.normal *= f;
  }
  out.normal.canonicalize();
  out.ratio = mpq_class(out.average / out.normal).get_d();
  return out;
}

KeyLemmaResult key_lemma_average(const AlphaSpec& alpha, std::uint64_t x, double rho, std::uint64_t z, unsigned k) {
  const auto b = bohr_enumerate(alpha, x, BohrInterval::at_zero(rho));
  if (b.members.empty()) throw PreconditionError("empty Bohr set");
  return key_lemma_average(b.members, z, k);
}

AnatomyResult anatomy_fraction(const std::vector<std::uint64_t>& members, double r, std::int64_t h_ref,
                               const SpfTable* table) {
  require(r > 0.0, "anatomy threshold r must be positive");
  std::uint64_t top = 1;
  for (auto h : members) {
    const auto d = static_cast<std::int64_t>(h) - h_ref;
    top = std::max<std::uint64_t>(top, static_cast<std::uint64_t>(d < 0 ? -d : d));
  }
  std::unique_ptr<SpfTable> own;
  if (table == nullptr || table->limit() < top) {
    own = std::make_unique<SpfTable>(top);
    table = own.get();
  }
  const long double threshold = 1.0L + 1.0L / std::sqrt(static_cast<long double>(r));
  AnatomyResult out;
  for (auto h : members) {
    const auto d = static_cast<std::int64_t>(h) - h_ref;
    if (d == 0) continue;
    ++out.total;
    long double prod = 1.0L;
    for (auto p : table->prime_factors(static_cast<std::uint64_t>(d < 0 ? -d : d))) {
      if (static_cast<double>(p) > r) prod *= 1.0L + 1.0L / static_cast<long double>(p);
    }
    if (prod >= threshold) ++out.hits;
  }
  out.fraction = out.total == 0 ? 0.0 : static_cast<double>(out.hits) / static_cast<double>(out.total);
  out.shape = std::pow(r, -1.0 / 3.0);
  out.small_r = r < std::cbrt(static_cast<double>(members.size()));
  return out;
}

std::vector<std::pair<std::size_t, std::uint64_t>> convergent_scales(const AlphaSpec& alpha, const RoughnessSpec& spec,
                                                                     std::uint64_t x_min, std::uint64_t x_max) {
  require(x_max <= kMaxRotationIndex, "scan beyond the rotation budget");
  std::vector<std::pair<std::size_t, std::uint64_t>> out;
  std::size_t depth = 8;
  while (true) {
    const auto cf = ContinuedFraction::expand(alpha, depth);
    if (cf.q(depth) <= x_max && depth < 400) {
      depth *= 2;
      continue;
    }
    std::set<std::uint64_t> seen;
    for (std::size_t k = 1; k <= depth && cf.q(k) <= x_max; ++k) {
      const std::uint64_t q = cf.q_word(k);
      if (q < 2) continue;
      const double lf = std::log(static_cast<double>(spec.eval(q)));
      const auto mult = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(lf)));
      const std::uint64_t xk = q * mult;
      if (xk < x_min || xk > x_max || !seen.insert(xk).second) continue;
      out.emplace_back(k, xk);
    }
    return out;
  }
}

BlowupScan blowup_scan(const AlphaSpec& alpha, const RoughnessSpec& spec, const std::vector<std::uint64_t>& scales,
                       double s, unsigned workers) {
  require(s >= 0.0, "scan radius s must be non-negative");
  BlowupScan out;
  if (scales.empty()) return out;
  const std::uint64_t top = *std::max_element(scales.begin(), scales.end());
  const SpfTable table(top, kDefaultSegment, workers);
  for (auto x : scales) {
    const auto pts = build_points(alpha, x, spec, RoughMode::triangular, &table);
    BlowupRow row;
    row.x = x;
    row.n = pts.size();
    row.s = s;
    if (pts.size() >= 2 && s > 0.0) {
      CorrelationOptions opt;
      opt.workers = workers;
      row.r2 = r_k(pts, {{-s, s}}, opt).value;
      row.normalized = row.r2 / (2.0 * s);
    }
    out.max_normalized = std::max(out.max_normalized, row.normalized);
    out.rows.push_back(row);
  }
  return out;
}

std::string BlowupScan::csv_rows() const {
  std::string out;
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.6f,%.8f,%.8f\n", static_cast<unsigned long long>(r.x),
                  static_cast<unsigned long long>(r.n), r.s, r.r2, r.normalized);
    out += buf;
  }
  return out;
}

}  // namespace rotlab
