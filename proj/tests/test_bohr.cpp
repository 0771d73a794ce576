#include <doctest.h>

#include <algorithm>

#include <gmpxx.h>

#include "rotlab/bohr.hpp"
#include "rotlab/error.hpp"

using namespace rotlab;

namespace {

// Per-n oracle from a 320-bit float value of alpha.
std::vector<std::uint64_t> float_scan(const mpf_class& alpha, std::uint64_t x, double lo, double hi) {
  std::vector<std::uint64_t> out;
  mpf_class v(0, 320), f(0, 320);
  for (std::uint64_t n = 1; n <= x; ++n) {
    v = alpha * n;
    mpf_floor(f.get_mpf_t(), v.get_mpf_t());
    v -= f;
    if (v >= lo && v < hi) out.push_back(n);
  }
  return out;
}

mpf_class sqrt2_f() { return sqrt(mpf_class(2, 320)); }
mpf_class golden_f() { return (1 + sqrt(mpf_class(5, 320))) / 2; }

}  // namespace

TEST_CASE("enumerate examples") {
  const auto b = bohr_enumerate(parse_alpha("sqrt2"), 100, BohrInterval::at_zero(0.05));
  CHECK(b.members == std::vector<std::uint64_t>{17, 29, 58, 87, 99});
  CHECK(b.uncertain == 0);

  const auto all = bohr_enumerate(parse_alpha("golden"), 50, BohrInterval::at_zero(1.0));
  CHECK(all.size() == 50);
  CHECK(all.members.front() == 1);
  CHECK(all.members.back() == 50);

  const auto g = bohr_enumerate(parse_alpha("golden"), 1000000, BohrInterval::at_zero(1e-4));
  CHECK(g.size() >= 90);
  CHECK(g.size() <= 110);

  CHECK_THROWS_AS(bohr_enumerate(parse_alpha("golden"), 10, BohrInterval::at_zero(0.0)), PreconditionError);
  CHECK_THROWS_AS(bohr_enumerate(parse_alpha("golden"), kMaxRotationIndex + 1, BohrInterval::at_zero(0.1)),
                  PrecisionError);
}

TEST_CASE("enumerate matches a high-precision per-n scan") {
  const std::uint64_t x = 100000;
  struct Case {
    const char* spec;
    mpf_class value;
  };
  const Case cases[] = {{"sqrt2", sqrt2_f()}, {"golden", golden_f()}};
  for (const auto& c : cases) {
    CAPTURE(c.spec);
    for (double rho : {1e-3, 0.013, 0.25}) {
      const auto b0 = bohr_enumerate(parse_alpha(c.spec), x, BohrInterval::at_zero(rho));
      CHECK(b0.members == float_scan(c.value, x, 0.0, rho));
      const auto b1 = bohr_enumerate(parse_alpha(c.spec), x, BohrInterval::at_one(rho));
      CHECK(b1.members == float_scan(c.value, x, 1.0 - rho, 1.0));
    }
  }
}

TEST_CASE("three-distance fast path and workers agree with the scan") {
  for (const char* spec : {"sqrt2", "golden", "surd:0,3,1", "cf-poly:2"}) {
    CAPTURE(spec);
    const auto alpha = parse_alpha(spec);
    for (auto iv : {BohrInterval::at_zero(2e-3), BohrInterval::at_one(7e-3), BohrInterval::at_zero(0.3)}) {
      const auto scan = bohr_enumerate(alpha, 200000, iv);
      EnumerateOptions fast;
      fast.method = EnumerateOptions::Method::three_distance;
      const auto td = bohr_enumerate(alpha, 200000, iv, fast);
      CHECK(td.members == scan.members);
      CHECK(td.boundary_hits == scan.boundary_hits);
      EnumerateOptions par;
      par.workers = 4;
      const auto p4 = bohr_enumerate(alpha, 200000, iv, par);
      CHECK(p4.members == scan.members);
      CHECK(p4.boundary_hits == scan.boundary_hits);
      const auto rt = return_times(Rotation(alpha), WordInterval::from(iv), 200000);
      for (std::size_t i = 1; i < scan.members.size(); ++i) {
        const auto gap = scan.members[i] - scan.members[i - 1];
        CHECK((gap == rt.first || gap == rt.second || gap == rt.first + rt.second));
      }
    }
  }
}

TEST_CASE("monotonicity and cardinality") {
  const auto alpha = parse_alpha("sqrt2");
  const auto small = bohr_enumerate(alpha, 50000, BohrInterval::at_zero(0.01));
  const auto big = bohr_enumerate(alpha, 80000, BohrInterval::at_zero(0.01));
  const auto wide = bohr_enumerate(alpha, 50000, BohrInterval::at_zero(0.02));
  CHECK(std::includes(big.members.begin(), big.members.end(), small.members.begin(), small.members.end()));
  CHECK(std::includes(wide.members.begin(), wide.members.end(), small.members.begin(), small.members.end()));

  for (const char* spec : {"golden", "sqrt2"}) {
    for (double lambda : {1e-3, 1e-2}) {
      const auto b = bohr_enumerate(parse_alpha(spec), 100000, BohrInterval::at_zero(lambda));
      CHECK(b.cardinality_ratio() >= 0.9);
      CHECK(b.cardinality_ratio() <= 1.1);
    }
  }
}

TEST_CASE("residue profiles") {
  const std::vector<std::uint64_t> b{17, 29, 58, 87, 99};
  const auto p1 = residue_profile(b, 1);
  CHECK(p1.counts == std::vector<std::uint64_t>{5});
  const auto p2 = residue_profile(b, 2);
  CHECK(p2.counts == std::vector<std::uint64_t>{1, 4});
  CHECK(p2.total == 5);
  CHECK(residue_profile(b, 2).csv_rows().rfind("2,0,1,5,0.2000000000,-0.3000000000\n", 0) == 0);
  CHECK_THROWS_AS(residue_profile(b, 0), PreconditionError);

  const auto big = bohr_enumerate(parse_alpha("sqrt2"), 1000000, BohrInterval::at_zero(2e-3));
  for (std::uint64_t d = 1; d <= 12; ++d) {
    const auto p = residue_profile(big.members, d);
    std::uint64_t s = 0;
    for (auto c : p.counts) s += c;
    CHECK(s == big.size());
  }
  CHECK(residue_profile(big.members, 3).max_deviation() < 0.1);
}

TEST_CASE("cylinder residue profiles") {
  auto g = ContinuedFraction::expand(parse_alpha("golden"), 40);
  const auto p = cylinder_residue_profile(g, {}, 100, 7);
  for (auto c : p.counts) CHECK((c == 14 || c == 15));
  CHECK(cylinder_residue_profile(g, {0, 1}, 12, 3).counts == std::vector<std::uint64_t>{3, 2, 0});
  CHECK(cylinder_residue_profile(g, {0, 0, 0}, 1000000, 2).max_deviation() < 0.1);
  auto s2 = ContinuedFraction::expand(parse_alpha("sqrt2"), 30);
  CHECK_THROWS_AS(cylinder_residue_profile(s2, {1, 2}, 100, 2), PreconditionError);
}

TEST_CASE("sandwich") {
  const auto alpha = parse_alpha("sqrt2");
  const auto r = sandwich(alpha, 10000, BohrInterval::at_zero(1e-2), 6);
  CHECK(r.inclusions_hold());
  CHECK(r.m >= 2);
  CHECK(r.inner_size <= r.bohr_size);
  CHECK(r.bohr_size <= r.outer_size);

  const auto r2 = sandwich(alpha, 100000, BohrInterval::at_zero(1e-3), 10);
  CHECK(r2.inclusions_hold());
  CHECK(static_cast<double>(r2.symmetric_difference) <= 0.2 * static_cast<double>(r2.bohr_size));

  for (const char* spec : {"golden", "surd:0,3,1"}) {
    for (auto iv : {BohrInterval::at_zero(3e-3), BohrInterval::at_one(3e-3)}) {
      const auto rr = sandwich(parse_alpha(spec), 50000, iv, 5);
      CHECK(rr.inclusions_hold());
      for (const auto& p : rr.s_plus) {
        for (std::size_t i = 0; i + 1 < rr.m; ++i) CHECK(p[i] == 0);
      }
    }
  }
  CHECK_THROWS_AS(sandwich(alpha, 1000, BohrInterval::at_zero(0.3), 4), PreconditionError);
}

TEST_CASE("Denjoy-Koksma check") {
  const auto one = dk_check(parse_alpha("sqrt2"), StepFunction::constant(1.0), 1000);
  CHECK(one.error == doctest::Approx(0.0));
  CHECK(one.pass);

  const auto half = dk_check(parse_alpha("golden"), StepFunction::indicator(0.0, 0.5), 89);
  CHECK(half.digit_sum == 1);
  CHECK(std::abs(half.sum - 44.5) <= 2.0);
  CHECK(half.pass);

  const auto tenth = dk_check(parse_alpha("sqrt2"), StepFunction::indicator(0.0, 0.1), 100000);
  CHECK(tenth.pass);

  StepFunction f{{0.0, 0.2, 0.7, 1.0}, {1.0, -2.0, 0.5}};
  CHECK(f.variation() == doctest::Approx(3.0 + 2.5 + 0.5));
  CHECK(f.integral() == doctest::Approx(0.2 - 1.0 + 0.15));
  CHECK(f(0.1) == 1.0);
  CHECK(f(0.2) == -2.0);
  for (std::uint64_t n : {1000ULL, 33461ULL, 123456ULL}) CHECK(dk_check(parse_alpha("sqrt2"), f, n).pass);
}
