#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "rotlab/error.hpp"
#include "rotlab/ostrowski.hpp"

using namespace rotlab;

namespace {

// Every admissible digit string of a given length with its value, by odometer.
std::map<std::uint64_t, Digits> all_admissible(const ContinuedFraction& cf, std::size_t len) {
  std::map<std::uint64_t, Digits> out;
  Digits d(len, 0);
  while (true) {
    bool ok = d[0] < cf.a(1);
    for (std::size_t i = 1; ok && i < len; ++i) {
      ok = d[i] <= cf.a(i + 1) && !(d[i] == cf.a(i + 1) && d[i - 1] != 0);
    }
    if (ok) {
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < len; ++i) v += d[i] * cf.q_word(i);
      Digits trimmed = d;
      while (trimmed.size() > 1 && trimmed.back() == 0) trimmed.pop_back();
      const bool fresh = out.emplace(v, trimmed).second;
      CHECK(fresh);
    }
    std::size_t i = 0;
    while (i < len && d[i] == cf.a(i + 1)) d[i++] = 0;
    if (i == len) break;
    ++d[i];
  }
  return out;
}

bool satisfies_rules(const ContinuedFraction& cf, const Digits& d) {
  if (d.empty()) return true;
  if (d[0] >= cf.a(1)) return false;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > cf.a(i + 1)) return false;
    if (d[i] == cf.a(i + 1) && d[i - 1] != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("encode_int examples") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 20);
  CHECK(encode_int(g, 4) == Digits{0, 1, 0, 1});
  CHECK(encode_int(g, 0) == Digits{0});
  CHECK(decode_int(g, Digits{0, 1, 0, 1}) == 4);
  CHECK(decode_int(g, Digits{0, 0, 0}) == 0);
  CHECK_THROWS_AS(decode_int(g, Digits{0, 1, 1}), PreconditionError);
  CHECK_THROWS_AS(decode_int(g, Digits{1}), PreconditionError);

  auto s2 = ContinuedFraction::expand(parse_alpha("sqrt2"), 20);
  CHECK(encode_int(s2, 7) == Digits{0, 1, 1});
  CHECK(format_digits(encode_int(s2, 7)) == "0,1,1");
  CHECK(parse_digits("0,1,1") == Digits{0, 1, 1});
  CHECK_THROWS_AS(parse_digits("0,x"), PreconditionError);
}

TEST_CASE("encode_int matches exhaustive admissible strings") {
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1", "cf:0;3,1|period:1,4"}) {
    CAPTURE(spec);
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 14);
    const std::size_t len = 9;
    const auto table = all_admissible(cf, len);
    // Values of length-len strings are exactly [0, q_len).
    CHECK(table.size() == cf.q_word(len));
    CHECK(table.rbegin()->first == cf.q_word(len) - 1);
    for (const auto& [n, digits] : table) CHECK(encode_int(cf, n) == digits);
  }
}

TEST_CASE("roundtrip and capacity") {
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1"}) {
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 15);
    const std::uint64_t cap = cf.q_word(15);
    CHECK(max_encodable(cf) == cap - 1);
    for (std::uint64_t n = 0; n < cap; ++n) {
      const auto d = encode_int(cf, n);
      if (!satisfies_rules(cf, d) || decode_int(cf, d) != n) {
        FAIL("roundtrip failed at " << n << " for " << spec);
      }
    }
    CHECK_THROWS_AS(encode_int(cf, cap), PreconditionError);
  }
}

TEST_CASE("Ostrowski phase is congruent to n alpha") {
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1"}) {
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 15);
    Rotation rot(cf.alpha());
    for (std::uint64_t n = 1; n < cf.q_word(15); n += 7) {
      const long double s = ostrowski_phase(cf, encode_int(cf, n)).value();
      const long double f = rot.frac_part(n).value();
      long double diff = std::fmod(std::fabs(s - f), 1.0L);
      diff = std::min(diff, 1.0L - diff);
      if (diff > 1e-12L) FAIL("phase mismatch at " << n);
    }
  }
}

TEST_CASE("encode_real") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 30);
  const auto unit = encode_real(g, g.delta(3), 8);
  Digits expect(9, 0);
  expect[3] = 1;
  CHECK(unit.digits == expect);
  CHECK(unit.residual.mantissa() == 0);

  CHECK(encode_real(g, 0.0, 10).digits == Digits(11, 0));

  const auto r = encode_real(g, 0.1, 12);
  CHECK(satisfies_rules(g, r.digits));
  CHECK(std::fabs(static_cast<double>(r.residual.value())) <= static_cast<double>(g.abs_delta_ld(12)));

  CHECK_THROWS_AS(encode_real(g, 0.5, 12), PreconditionError);   // >= 1 - {alpha}
  CHECK_THROWS_AS(encode_real(g, -0.7, 12), PreconditionError);  // < -{alpha}
  CHECK_THROWS_AS(encode_real(g, 0.1, 30), PreconditionError);
}

TEST_CASE("encode_real fuzz") {
  std::mt19937_64 rng(7);
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1", "cf:0;5,1|period:3,1,2"}) {
    CAPTURE(spec);
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 40);
    const double lo = -static_cast<double>(cf.delta_ld(0));
    std::uniform_real_distribution<double> dist(lo, lo + 1.0);
    for (int t = 0; t < 300; ++t) {
      const double gamma = dist(rng);
      for (std::size_t k : {3u, 10u, 25u}) {
        const auto r = encode_real(cf, gamma, k);
        CHECK(satisfies_rules(cf, r.digits));
        CHECK(std::fabs(static_cast<double>(r.residual.value())) <= static_cast<double>(cf.abs_delta_ld(k)) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("truncate_int") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 40);
  const auto t = truncate_int(g, 10000, 5);
  CHECK(t.minus <= 10000);
  CHECK(t.plus >= 10000);
  CHECK(t.ratio < 1.2);

  auto s2 = ContinuedFraction::expand(parse_alpha("sqrt2"), 30);
  const auto t2 = truncate_int(s2, s2.q_word(10), 3);
  CHECK(t2.minus == s2.q_word(10));
  CHECK_THROWS_AS(truncate_int(s2, 12, 3), PreconditionError);

  std::mt19937_64 rng(11);
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1"}) {
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 60);
    std::uniform_int_distribution<std::uint64_t> xs(100, 1000000000);
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t x = xs(rng);
      const std::size_t top = encode_int(cf, x).size() - 1;
      std::uniform_int_distribution<std::size_t> ms(1, top - 1);
      const std::size_t m = ms(rng);
      const auto tr = truncate_int(cf, x, m);
      CHECK(tr.minus <= x);
      CHECK(x <= tr.plus);
      CHECK(tr.nonzero_minus <= m + 2);
      CHECK(tr.nonzero_plus <= m + 2);
      CHECK(tr.ratio <= tr.ratio_bound * (1 + 1e-12));
      CHECK(tr.ratio <= 1 + 6.0 * std::pow(2.0 / 3.0, static_cast<double>(m)));
    }
  }
}

TEST_CASE("truncate_real") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 40);
  const auto gamma = g.delta(4) + g.delta(8);
  const auto t = truncate_real(g, gamma, 6);
  CHECK(t.m == 4);
  CHECK(t.minus.value.value() <= gamma.value());
  CHECK(gamma.value() <= t.plus.value.value());
  CHECK(t.ratio <= 1 + 6.0 * std::pow(2.0 / 3.0, 6.0));
  for (std::size_t i = 0; i + 2 < t.m; ++i) {
    CHECK(t.plus.digits[i] == 0);
    CHECK(t.minus.digits[i] == 0);
  }

  const auto exact = truncate_real(g, g.delta(6), 4);
  CHECK(exact.minus.value.mantissa() == g.delta(6).mantissa());

  CHECK_THROWS_AS(truncate_real(g, g.delta(0), 4), PreconditionError);
}

TEST_CASE("cylinder_enumerate") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 40);
  std::vector<std::uint64_t> all(10);
  for (int i = 0; i < 10; ++i) all[i] = i + 1;
  CHECK(cylinder_enumerate(g, {}, 10) == all);
  CHECK(cylinder_enumerate(g, {0, 1}, 12) == std::vector<std::uint64_t>{1, 4, 6, 9, 12});

  auto s2 = ContinuedFraction::expand(parse_alpha("sqrt2"), 30);
  CHECK_THROWS_AS(cylinder_enumerate(s2, {1, 2}, 100), PreconditionError);  // b_1 = a_2 with b_0 != 0
}

TEST_CASE("cylinder sets partition [1, x] and match exhaustive encoding") {
  for (const char* spec : {"golden", "sqrt2", "surd:0,3,1"}) {
    CAPTURE(spec);
    auto cf = ContinuedFraction::expand(parse_alpha(spec), 30);
    const std::uint64_t x = 5000;
    std::vector<Digits> codes(x + 1);
    for (std::uint64_t n = 1; n <= x; ++n) codes[n] = encode_int(cf, n);
    for (std::size_t len : {1u, 2u, 4u}) {
      std::vector<int> hits(x + 1, 0);
      const auto prefixes = all_admissible(cf, len);
      for (const auto& [v, trimmed] : prefixes) {
        Digits prefix = trimmed;
        prefix.resize(len, 0);
        const auto members = cylinder_enumerate(cf, prefix, x);
        std::vector<std::uint64_t> expected;
        for (std::uint64_t n = 1; n <= x; ++n) {
          Digits d = codes[n];
          d.resize(std::max(d.size(), len), 0);
          if (std::equal(prefix.begin(), prefix.end(), d.begin())) expected.push_back(n);
        }
        CHECK(members == expected);
        for (auto n : members) ++hits[n];
      }
      for (std::uint64_t n = 1; n <= x; ++n) CHECK(hits[n] == 1);
    }
  }
}
