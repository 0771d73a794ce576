#include "rotlab/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "rotlab/error.hpp"

namespace rotlab {

namespace {

constexpr u128 kBoundaryWords = static_cast<u128>(1) << (128 - kBoundaryBits);

// floor and ceil of t * 2^128 for t in [0, 1], as mpz.
std::pair<mpz_class, mpz_class> scaled_word(double t) {
  const CertifiedReal c = CertifiedReal::from_double(t, 128);
  mpz_class fl = c.mantissa();
  mpz_class ce = fl + (c.error_ulps() == 0 ? 0 : 1);
  return {fl, ce};
}

u128 torus_distance(u128 a, u128 b) {
  const u128 d = a - b;
  const u128 e = b - a;
  return d < e ? d : e;
}

struct ScanPart {
  std::vector<std::uint64_t> members;
  std::uint64_t boundary = 0;
  std::uint64_t uncertain = 0;
};

void scan_range(const Rotation& rot, const WordInterval& iv, std::uint64_t from, std::uint64_t to, ScanPart& out) {
  const u128 step = rot.step();
  u128 v = rot.frac_word(from);
  for (std::uint64_t n = from; n <= to; ++n, v += step) {
    if (iv.contains(v)) out.members.push_back(n);
    if (!iv.full) {
      const u128 dist = iv.endpoint_distance(v);
      if (dist < kBoundaryWords) {
        ++out.boundary;
        if (dist <= Rotation::error_ulps(n)) ++out.uncertain;
      }
    }
  }
}

}  // namespace

std::string BohrInterval::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (anchor == Anchor::zero) {
    os << "[0," << rho << ")";
  } else {
    os << "[1-" << rho << ",1)";
  }
  return os.str();
}

WordInterval WordInterval::from(const BohrInterval& interval) {
  require(interval.rho > 0.0, "interval length rho must be positive");
  WordInterval w;
  if (interval.rho >= 1.0) {
    w.full = true;
    return w;
  }
  const auto [fl, ce] = scaled_word(interval.rho);
  if (interval.anchor == BohrInterval::Anchor::zero) {
    w.lo = 0;
    w.width = to_u128(ce);
  } else {
    w.width = to_u128(fl);
    w.lo = static_cast<u128>(0) - w.width;
  }
  return w;
}

u128 WordInterval::endpoint_distance(u128 v) const {
  const u128 a = torus_distance(v, lo);
  const u128 b = torus_distance(v, lo + width);
  return a < b ? a : b;
}

double BohrSet::cardinality_ratio() const {
  return static_cast<double>(members.size()) / (static_cast<double>(x) * interval.length());
}

ReturnTimes return_times(const Rotation& rotation, const WordInterval& interval, std::uint64_t limit) {
  ReturnTimes rt;
  const u128 step = rotation.step();
  u128 v = 0;
  for (std::uint64_t t = 1; t <= limit && (rt.first == 0 || rt.second == 0); ++t) {
    v += step;
    if (rt.first == 0 && v < interval.width) rt.first = t;
    if (rt.second == 0 && v != 0 && static_cast<u128>(0 - v) < interval.width) rt.second = t;
  }
  return rt;
}

BohrSet bohr_enumerate(const AlphaSpec& alpha, std::uint64_t x, const BohrInterval& interval,
                       const EnumerateOptions& options) {
  if (x > kMaxRotationIndex) throw PrecisionError("x exceeds the certified range 2^32");
  BohrSet out;
  out.alpha = alpha;
  out.x = x;
  out.interval = interval;
  const WordInterval iv = WordInterval::from(interval);
  const Rotation rot(alpha);
  if (x == 0) return out;

  if (options.method == EnumerateOptions::Method::three_distance && !iv.full) {
    const ReturnTimes rt = return_times(rot, iv, x);
    if (rt.first != 0 && rt.second != 0) {
      const u128 da = rot.frac_word(rt.first);
      const u128 eb = static_cast<u128>(0) - rot.frac_word(rt.second);
      // First member by scanning, then the three-gap return rule.
      std::uint64_t n = 0;
      u128 w = 0;
      for (std::uint64_t t = 1; t <= x; ++t) {
        if (iv.contains(rot.frac_word(t))) {
          n = t;
          w = rot.frac_word(t) - iv.lo;
          break;
        }
      }
      while (n != 0 && n <= x) {
        out.members.push_back(n);
        const u128 v = w + iv.lo;
        const u128 dist = iv.endpoint_distance(v);
        if (dist < kBoundaryWords) {
          ++out.boundary_hits;
          if (dist <= Rotation::error_ulps(n)) ++out.uncertain;
        }
        std::uint64_t t = 0;
        if (w < iv.width - da) {
          t = rt.first;
          w += da;
        } else if (w >= eb) {
          t = rt.second;
          w -= eb;
        } else {
          t = rt.first + rt.second;
          w = w + da - eb;
        }
        if (x - n < t) break;
        n += t;
      }
      if (!options.audit_boundaries) return out;
      for (std::uint64_t t = 1; t <= x; ++t) {
        const u128 v = rot.frac_word(t);
        if (!iv.contains(v) && iv.endpoint_distance(v) < kBoundaryWords) {
          ++out.boundary_hits;
          if (iv.endpoint_distance(v) <= Rotation::error_ulps(t)) ++out.uncertain;
        }
      }
      return out;
    }
  }

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, 64));
  std::vector<ScanPart> parts(workers);
  const std::uint64_t chunk = (x + workers - 1) / workers;
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t from = 1 + w * chunk;
    if (from > x) break;
    const std::uint64_t to = std::min<std::uint64_t>(x, from + chunk - 1);
    if (workers == 1) {
      scan_range(rot, iv, from, to, parts[w]);
    } else {
      threads.emplace_back(scan_range, std::cref(rot), std::cref(iv), from, to, std::ref(parts[w]));
    }
  }
  for (auto& t : threads) t.join();
  for (auto& p : parts) {
    out.members.insert(out.members.end(), p.members.begin(), p.members.end());
    out.boundary_hits += p.boundary;
    out.uncertain += p.uncertain;
  }
  return out;
}

double ResidueProfile::freq(std::uint64_t a) const {
  return total == 0 ? 0.0 : static_cast<double>(counts.at(a)) / static_cast<double>(total);
}

double ResidueProfile::max_deviation() const {
  double best = 0.0;
  for (std::uint64_t a = 0; a < d; ++a) best = std::max(best, std::fabs(freq(a) - 1.0 / static_cast<double>(d)));
  return best;
}

std::string ResidueProfile::csv_rows() const {
  std::string out;
  char buf[160];
  for (std::uint64_t a = 0; a < d; ++a) {
    const double f = freq(a);
    std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%llu,%.10f,%.10f\n", static_cast<unsigned long long>(d),
                  static_cast<unsigned long long>(a), static_cast<unsigned long long>(counts[a]),
                  static_cast<unsigned long long>(total), f, f - 1.0 / static_cast<double>(d));
    out += buf;
  }
  return out;
}

ResidueProfile residue_profile(const std::vector<std::uint64_t>& members, std::uint64_t d) {
  require(d >= 1, "modulus must be >= 1");
  ResidueProfile p;
  p.d = d;
  p.counts.assign(d, 0);
  for (auto n : members) ++p.counts[n % d];
  p.total = members.size();
  return p;
}

ResidueProfile cylinder_residue_profile(const ContinuedFraction& cf, const Digits& prefix, std::uint64_t x,
                                        std::uint64_t d) {
  return residue_profile(cylinder_enumerate(cf, prefix, x), d);
}

SandwichReport sandwich(const AlphaSpec& alpha, std::uint64_t x, const BohrInterval& interval, std::size_t l) {
  require(interval.rho > 0.0 && interval.rho < 1.0, "sandwich needs 0 < gamma < 1");
  require(l >= 1, "L must be >= 1");
  // Expand until |delta_K| < gamma, q_K > x and the window fits.
  std::size_t depth = 32;
  ContinuedFraction cf = ContinuedFraction::expand(alpha, depth);
  std::size_t m = 0;
  mpz_class g;
  while (true) {
    const CertifiedReal gamma = CertifiedReal::from_double(interval.rho, cf.delta_bits());
    g = gamma.mantissa();
    bool found = false;
    for (std::size_t k = 0; k + 1 <= cf.depth(); ++k) {
      if (abs(cf.delta(k + 1).mantissa()) <= g && g < abs(cf.delta(k).mantissa())) {
        m = k;
        found = true;
        break;
      }
    }
    if (found && m + l + 2 <= cf.depth() && x <= max_encodable(cf)) break;
    depth *= 2;
    cf = ContinuedFraction::expand(alpha, depth);
  }
  if (m < 2) throw PreconditionError("sandwich needs m >= 2 (|delta_{m+1}| <= gamma < |delta_m|)");

  SandwichReport rep;
  rep.m = m;
  rep.l = l;
  const std::size_t last = m + l;
  for (std::size_t i = 1; i <= last + 1; ++i) rep.bound_c = std::max(rep.bound_c, cf.a(i));
  rep.precondition_met =
      static_cast<long double>(x) * interval.rho > std::pow(static_cast<long double>(rep.bound_c + 1), static_cast<long double>(l));

  // Target for sum b_i delta_i: [0, gamma) or [-gamma, 0).
  const bool at_zero = interval.anchor == BohrInterval::Anchor::zero;
  const mpz_class t_lo = at_zero ? mpz_class(0) : mpz_class(-g);
  const mpz_class t_hi = at_zero ? g : mpz_class(0);

  std::vector<mpz_class> abs_delta(last + 1), delta(last + 1), err(last + 1);
  for (std::size_t i = 0; i <= last; ++i) {
    delta[i] = cf.delta(i).mantissa();
    abs_delta[i] = abs(delta[i]);
    err[i] = cf.delta(i).error_ulps();
  }

  Digits digits(last + 1, 0);
  // DFS from index m-1 upward; partial sum P and its accumulated error.
  struct Level {
    std::uint64_t digit;
    mpz_class sum;
    mpz_class error;
  };
  auto cap_at = [&](std::size_t i) -> std::uint64_t {
    std::uint64_t cap = cf.a(i + 1);
    if (i == 0) cap -= 1;
    if (i >= 1 && digits[i - 1] != 0 && cap == cf.a(i + 1)) cap -= 1;
    return cap;
  };
  std::vector<Level> stack;
  stack.push_back({0, 0, 0});
  const std::size_t first = m - 1;
  while (!stack.empty()) {
    const std::size_t i = first + stack.size() - 1;
    Level& lv = stack.back();
    if (lv.digit > cap_at(i)) {
      digits[i] = 0;
      stack.pop_back();
      if (!stack.empty()) ++stack.back().digit;
      continue;
    }
    digits[i] = lv.digit;
    const mpz_class sum = lv.sum + lv.digit * delta[i];
    const mpz_class e = lv.error + lv.digit * err[i] + 2;
    const mpz_class& w = abs_delta[i];
    const bool meets = sum + w + e >= t_lo && sum - w - e < t_hi;
    if (!meets) {
      ++lv.digit;
      continue;
    }
    if (i == last) {
      rep.s_plus.push_back(digits);
      if (sum - w - e >= t_lo && sum + w + e < t_hi) rep.s_minus.push_back(digits);
      ++lv.digit;
      continue;
    }
    stack.push_back({0, sum, e});
  }

  const BohrSet b = bohr_enumerate(alpha, x, interval);
  rep.bohr_size = b.size();
  std::vector<std::uint64_t> inner, outer;
  for (const auto& p : rep.s_minus) {
    const auto c = cylinder_enumerate(cf, p, x);
    inner.insert(inner.end(), c.begin(), c.end());
  }
  for (const auto& p : rep.s_plus) {
    const auto c = cylinder_enumerate(cf, p, x);
    outer.insert(outer.end(), c.begin(), c.end());
  }
  std::sort(inner.begin(), inner.end());
  std::sort(outer.begin(), outer.end());
  rep.inner_size = inner.size();
  rep.outer_size = outer.size();
  rep.symmetric_difference = outer.size() - std::min(outer.size(), inner.size());
  rep.inner_included = std::includes(b.members.begin(), b.members.end(), inner.begin(), inner.end());
  rep.outer_included = std::includes(outer.begin(), outer.end(), b.members.begin(), b.members.end());
  const double denom = std::pow(static_cast<double>(l), static_cast<double>(rep.bound_c + 1));
  rep.size_ratio = static_cast<double>(std::max(rep.s_plus.size(), rep.s_minus.size())) / denom;
  return rep;
}

StepFunction StepFunction::indicator(double a, double b) {
  require(0.0 <= a && a < b && b <= 1.0, "indicator needs 0 <= a < b <= 1");
  StepFunction f;
  f.breaks.push_back(0.0);
  if (a > 0.0) {
    f.values.push_back(0.0);
    f.breaks.push_back(a);
  }
  f.values.push_back(1.0);
  if (b < 1.0) {
    f.breaks.push_back(b);
    f.values.push_back(0.0);
  }
  f.breaks.push_back(1.0);
  return f;
}

StepFunction StepFunction::constant(double c) { return {{0.0, 1.0}, {c}}; }

double StepFunction::integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += values[j] * (breaks[j + 1] - breaks[j]);
  return s;
}

double StepFunction::variation() const {
  double v = 0.0;
  for (std::size_t j = 0; j + 1 < values.size(); ++j) v += std::fabs(values[j + 1] - values[j]);
  v += std::fabs(values.front() - values.back());
  return v;
}

double StepFunction::operator()(double t) const {
  const auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, t);
  return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

DenjoyKoksma dk_check(const AlphaSpec& alpha, const StepFunction& f, std::uint64_t n, double constant) {
  require(f.breaks.size() == f.values.size() + 1 && f.breaks.front() == 0.0 && f.breaks.back() == 1.0,
          "malformed step function");
  for (std::size_t j = 0; j + 1 < f.breaks.size(); ++j) require(f.breaks[j] < f.breaks[j + 1], "breaks must increase");
  if (n > kMaxRotationIndex) throw PrecisionError("N exceeds the certified range 2^32");

  std::vector<u128> thresholds;
  for (std::size_t j = 1; j + 1 < f.breaks.size(); ++j) thresholds.push_back(to_u128(scaled_word(f.breaks[j]).second));

  const Rotation rot(alpha);
  const u128 step = rot.step();
  std::vector<std::uint64_t> hits(f.values.size(), 0);
  u128 v = step;
  for (std::uint64_t k = 1; k <= n; ++k, v += step) {
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), v);
    ++hits[static_cast<std::size_t>(it - thresholds.begin())];
  }
  DenjoyKoksma out;
  for (std::size_t j = 0; j < hits.size(); ++j) out.sum += f.values[j] * static_cast<double>(hits[j]);
  out.expected = static_cast<double>(n) * f.integral();
  out.error = std::fabs(out.sum - out.expected);

  std::size_t depth = 32;
  ContinuedFraction cf = ContinuedFraction::expand(alpha, depth);
  while (n > max_encodable(cf)) cf = ContinuedFraction::expand(alpha, depth *= 2);
  for (auto b : encode_int(cf, n)) out.digit_sum += b;
  const double var = f.variation();
  out.bound = constant * var * static_cast<double>(out.digit_sum);
  out.empirical_constant = var * static_cast<double>(out.digit_sum) > 0 ? out.error / (var * static_cast<double>(out.digit_sum)) : 0.0;
  out.pass = out.error <= out.bound + 1e-9;
  return out;
}

}  // namespace rotlab
