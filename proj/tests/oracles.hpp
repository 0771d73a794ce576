#pragma once

// Reference implementations shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "rotlab/correlations.hpp"

namespace oracle {

inline mpz_class word_mpz(rotlab::u128 v) {
  return (mpz_class(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64))) << 64) +
         mpz_class(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
}

// Signed toroidal difference a - b in (-2^127, 2^127], exact.
inline mpz_class torus_diff(rotlab::u128 a, rotlab::u128 b) {
  const mpz_class half = mpz_class(1) << 127;
  mpz_class d = word_mpz(a - b);
  if (d > half) d -= mpz_class(1) << 128;
  return d;
}

// Exhaustive count of ordered distinct-index tuples. For every anchor it tests
// each other index directly against every side, then enumerates all tuples
// drawn from the per-side candidate lists.
inline mpz_class r_k_count(const rotlab::PointSet& pts, const rotlab::Rect& rect, std::uint64_t n, bool closed) {
  const auto& v = pts.values;
  const std::size_t m = rect.size();
  std::vector<mpq_class> lo(m), hi(m);
  const mpz_class one = mpz_class(1) << 128;
  for (std::size_t t = 0; t < m; ++t) {
    lo[t] = mpq_class(rect[t].lo) * one;
    hi[t] = mpq_class(rect[t].hi) * one;
  }
  const mpz_class scale(static_cast<unsigned long>(n));
  mpz_class total = 0;
  std::vector<std::vector<std::size_t>> lists(m);
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t t) {
    if (t == m) {
      ++total;
      return;
    }
    for (auto j : lists[t]) {
      bool clash = j == i;
      for (auto c : chosen) clash = clash || c == j;
      if (clash) continue;
      chosen.push_back(j);
      rec(i, t + 1);
      chosen.pop_back();
    }
  };
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (auto& l : lists) l.clear();
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == i) continue;
      const mpq_class d(torus_diff(v[i], v[j]) * scale);
      for (std::size_t t = 0; t < m; ++t) {
        const bool in = d >= lo[t] && (closed ? d <= hi[t] : d < hi[t]);
        if (in) lists[t].push_back(j);
      }
    }
    rec(i, 0);
  }
  return total;
}

}  // namespace oracle
