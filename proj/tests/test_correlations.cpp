#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rotlab/correlations.hpp"
#include "rotlab/error.hpp"

using namespace rotlab;

namespace {

PointSet lattice(std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(i) / static_cast<double>(n));
  return PointSet::from_doubles(v, "lattice");
}

CorrelationOptions closed_opts() {
  CorrelationOptions o;
  o.closed = true;
  return o;
}

}  // namespace

TEST_CASE("build_points") {
  const auto pts = build_points(parse_alpha("sqrt2"), 30, RoughnessSpec::parse("fixed:5"), RoughMode::triangular);
  CHECK(pts.size() == 8);
  const Rotation rot(parse_alpha("sqrt2"));
  std::vector<u128> expect;
  for (std::uint64_t a : {1, 7, 11, 13, 17, 19, 23, 29}) expect.push_back(rot.frac_word(a));
  std::sort(expect.begin(), expect.end());
  CHECK(pts.values == expect);
  CHECK(std::is_sorted(pts.values.begin(), pts.values.end()));
  CHECK(build_points(parse_alpha("golden"), 500, RoughnessSpec::parse("fixed:1"), RoughMode::triangular).size() == 500);
  const auto table = spf_sieve(1000000);
  CHECK(build_points(parse_alpha("golden"), 1000000, RoughnessSpec::parse("paper"), RoughMode::triangular, &table)
            .size() == phi(1000000, 987, &table));
}

TEST_CASE("r_k examples") {
  const auto lat = lattice(4);
  const auto r2 = r_k(lat, {{-1, 1}}, closed_opts());
  CHECK(r2.count == 8);
  CHECK(r2.value == 2.0);
  CHECK(r2.volume == 2.0);
  CHECK(r2.k == 2);
  const auto pair = r_k(PointSet::from_doubles({0.1, 0.3}), {{-1, 1}});
  CHECK(pair.count == 2);
  CHECK(pair.value == 1.0);
  const auto r3 = r_k(lat, {{-1, 1}, {-1, 1}}, closed_opts());
  CHECK(r3.count == 8);
  CHECK(r3.value == 2.0);
  CHECK(r3.csv_row() == "3,-1:1;-1:1,4,8,2.00000000,4.00000000\n");

  // Half-open upper ends drop the exact lattice neighbours on one side.
  CHECK(r_k(lat, {{-1, 1}}).count == 4);
  CHECK_THROWS_AS(r_k(lat, {{-3, 1}}), PreconditionError);
  CHECK(r_k(lat, {{0, 2}}, closed_opts()).count == 8);
}

TEST_CASE("rect parsing") {
  const auto r = parse_rect("-1:1,0:2.5");
  REQUIRE(r.size() == 2);
  CHECK(r[1].hi == 2.5);
  CHECK(format_rect(r) == "-1:1;0:2.5");
  CHECK_THROWS_AS(parse_rect("1:0"), PreconditionError);
  CHECK_THROWS_AS(parse_rect("1"), PreconditionError);
  CHECK_THROWS_AS(parse_rect("a:b"), PreconditionError);
}

TEST_CASE("r_k equals the exhaustive count") {
  std::mt19937_64 gen(20240611);
  for (int set = 0; set < 12; ++set) {
    CAPTURE(set);
    const std::size_t n = 40 + set * 53;
    const auto pts = set % 3 == 0 ? build_points(parse_alpha("sqrt2"), n, RoughnessSpec::parse("fixed:3"),
                                                 RoughMode::triangular)
                                  : uniform_points(n, gen());
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (unsigned k : {2u, 3u}) {
      Rect rect;
      for (unsigned t = 1; t < k; ++t) {
        double a = u(gen), b = u(gen);
        if (a > b) std::swap(a, b);
        rect.push_back({a, b});
      }
      for (bool closed : {false, true}) {
        CorrelationOptions o;
        o.closed = closed;
        const auto r = r_k(pts, rect, o);
        CHECK(r.count == oracle::r_k_count(pts, rect, pts.size(), closed));
      }
    }
  }
  const auto lat = lattice(10);
  for (bool closed : {false, true}) {
    for (const Rect& rect : {Rect{{-2, 1}}, Rect{{0, 1}, {-1, 0}}, Rect{{-1, 1}, {-2, 2}, {0, 3}}}) {
      CorrelationOptions o;
      o.closed = closed;
      CHECK(r_k(lat, rect, o).count == oracle::r_k_count(lat, rect, lat.size(), closed));
    }
  }
}

TEST_CASE("symmetry, monotonicity and worker independence") {
  const auto pts = build_points(parse_alpha("sqrt2"), 100000, RoughnessSpec::parse("fixed:7"), RoughMode::triangular);
  for (double s : {0.3, 1.0, 2.5}) {
    const auto plus = r_k(pts, {{0, s}});
    const auto minus = r_k(pts, {{-s, 0}});
    CorrelationOptions c;
    c.closed = true;
    const auto minus_closed = r_k(pts, {{-s, 0}}, c);
    const auto plus_closed = r_k(pts, {{0, s}}, c);
    CHECK(plus_closed.count == minus_closed.count);
    CHECK(plus.count == minus.count);
    const auto both = r_k(pts, {{-s, s}});
    CHECK(both.count == 2 * plus.count);
  }
  CHECK(r_k(pts, {{-0.5, 0.5}}).count <= r_k(pts, {{-1, 1}}).count);
  CHECK(r_k(pts, {{-0.5, 0.5}, {0, 1}}).count <= r_k(pts, {{-1, 1}, {-1, 1}}).count);
  for (unsigned w : {2u, 3u, 8u}) {
    CorrelationOptions o;
    o.workers = w;
    CHECK(r_k(pts, {{-1, 1}, {0, 2}}, o).count == r_k(pts, {{-1, 1}, {0, 2}}).count);
  }
  CHECK(r_k(pts, {{0, 0}}).count == 0);
}

TEST_CASE("gap histogram") {
  const auto lat = gap_histogram(lattice(16), 40, 4.0);
  CHECK(lat.scaled_gaps.size() == 15);
  for (auto g : lat.scaled_gaps) CHECK(std::abs(static_cast<double>(g) - 1.0) < 1e-12);
  CHECK(lat.ks == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  CHECK(gap_histogram(lattice(16), 40, 4.0, true).scaled_gaps.size() == 16);

  const auto two = gap_histogram(PointSet::from_doubles({0.0, 0.5}), 10, 2.0, true);
  REQUIRE(two.scaled_gaps.size() == 2);
  CHECK(two.scaled_gaps[0] == 1.0L);
  CHECK(two.scaled_gaps[1] == 1.0L);

  const auto uni = uniform_points(100000, 5);
  const auto h = gap_histogram(uni);
  CHECK(h.ks < 0.02);
  const long double span = static_cast<long double>(uni.values.back() - uni.values.front()) / std::ldexp(1.0L, 128);
  CHECK(std::abs(static_cast<double>(h.scaled_sum - span * uni.size())) < 1e-9 * uni.size());
  const auto hw = gap_histogram(uni, 40, 4.0, true);
  CHECK(std::abs(static_cast<double>(hw.scaled_sum) - static_cast<double>(uni.size())) < 1e-9 * uni.size());
  std::uint64_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total <= uni.size() - 1);
  CHECK(h.csv_rows().rfind("0.000000,0.100000,", 0) == 0);
}

TEST_CASE("key lemma average") {
  const auto toy = key_lemma_average(std::vector<std::uint64_t>{2, 4}, 2, 2);
  CHECK(toy.average == mpq_class(1, 2));
  CHECK(toy.ratio == 2.0);

  for (std::uint64_t z : {2u, 3u, 5u, 7u}) {
    std::uint64_t primorial = 1;
    for (auto p : primes_up_to(z)) primorial *= p;
    std::vector<std::uint64_t> full;
    for (std::uint64_t h = 1; h <= primorial; ++h) full.push_back(h);
    const auto r = key_lemma_average(full, z, 2);
    CHECK(r.average == r.normal);
    CHECK(r.ratio == 1.0);
  }

  // Direct average over distinct ordered pairs.
  const std::vector<std::uint64_t> b{3, 10, 14, 25, 31};
  mpq_class sum = 0;
  std::size_t count = 0;
  for (auto h1 : b) {
    for (auto h2 : b) {
      if (h1 == h2) continue;
      sum += singular_series({static_cast<std::int64_t>(h1), static_cast<std::int64_t>(h2)}, 7).value;
      ++count;
    }
  }
  sum /= static_cast<long>(count);
  CHECK(key_lemma_average(b, 7, 3).average == sum);

  CHECK_THROWS_AS(key_lemma_average(std::vector<std::uint64_t>{}, 5, 2), PreconditionError);
  CHECK_THROWS_AS(key_lemma_average(parse_alpha("sqrt2"), 10, 1e-6, 5, 2), PreconditionError);
}

TEST_CASE("anatomy fraction") {
  const std::vector<std::uint64_t> b{2, 4, 8};
  const auto a = anatomy_fraction(b, 1.5, 0);
  CHECK(a.total == 3);
  // Only the prime 2 exceeds r, and 1 + 1/2 < 1 + 1.5^{-1/2}.
  CHECK(a.hits == 0);
  // 105: (4/3)(6/5)(8/7) >= 1 + 2.5^{-1/2}; 15: (4/3)(6/5) is not.
  CHECK(anatomy_fraction({105, 15}, 2.5, 0).hits == 1);
  CHECK(anatomy_fraction({6, 35, 77}, 100.0, 0).fraction == 0.0);
  CHECK(anatomy_fraction({5, 10}, 1.0, 5).total == 1);
  const auto big = bohr_enumerate(parse_alpha("sqrt2"), 1000000, BohrInterval::at_zero(1e-3));
  const auto r = anatomy_fraction(big.members, 100.0, 0);
  CHECK(r.fraction <= 5 * r.shape);
  CHECK(r.total == big.size());
}

TEST_CASE("blowup scan") {
  const auto spec = RoughnessSpec::parse("fixed:5");
  const auto scales = convergent_scales(parse_alpha("cf-poly:2"), spec, 10, 100000);
  REQUIRE(!scales.empty());
  for (const auto& [k, x] : scales) {
    const auto cf = ContinuedFraction::expand(parse_alpha("cf-poly:2"), k);
    CHECK(x == cf.q_word(k) * 1);
  }
  std::vector<std::uint64_t> xs;
  for (const auto& s : scales) xs.push_back(s.second);
  const auto zero = blowup_scan(parse_alpha("cf-poly:2"), spec, xs, 0.0);
  for (const auto& row : zero.rows) CHECK(row.r2 == 0.0);
  const auto one = blowup_scan(parse_alpha("sqrt2"), spec, {20000}, 1.0);
  REQUIRE(one.rows.size() == 1);
  const auto pts = build_points(parse_alpha("sqrt2"), 20000, spec, RoughMode::triangular);
  CHECK(one.rows[0].n == pts.size());
  CHECK(one.rows[0].r2 == r_k(pts, {{-1, 1}}).value);
  CHECK(one.csv_rows().find("20000,") == 0);

  const auto paper = convergent_scales(parse_alpha("golden"), RoughnessSpec::parse("paper"), 1, 1000000);
  for (const auto& [k, x] : paper) {
    const auto q = ContinuedFraction::expand(parse_alpha("golden"), k).q_word(k);
    const auto mult = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::log(static_cast<double>(RoughnessSpec::parse("paper").eval(q)))));
    CHECK(x == q * mult);
  }
}
