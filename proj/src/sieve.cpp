#include "rotlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "rotlab/error.hpp"

namespace rotlab {

namespace {

std::vector<std::uint64_t> simple_primes(std::uint64_t n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

SpfTable::SpfTable(std::uint64_t x, std::uint64_t segment, unsigned workers) : limit_(x) {
  if (x > kSieveBudget) throw BudgetError("spf table for x = " + std::to_string(x) + " exceeds the sieve budget");
  require(segment >= 16, "segment size must be >= 16");
  table_.assign(x + 1, 0);
  if (x < 4) return;
  const std::vector<std::uint64_t> base = simple_primes(isqrt(x));
  const std::uint64_t segments = (x + 1 + segment - 1) / segment;

  auto run = [&](unsigned worker, unsigned stride) {
    for (std::uint64_t s = worker; s < segments; s += stride) {
      const std::uint64_t lo = s * segment;
      const std::uint64_t hi = std::min(x + 1, lo + segment);
      for (std::uint64_t p : base) {
        if (p * p >= hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (std::uint64_t j = start; j < hi; j += p) {
          if (table_[j] == 0) table_[j] = static_cast<std::uint16_t>(p);
        }
      }
    }
  };
  const unsigned w = std::max(1u, std::min(workers, 64u));
  if (w == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < w; ++i) threads.emplace_back(run, i, w);
    for (auto& t : threads) t.join();
  }
}

std::vector<std::uint64_t> SpfTable::primes_up_to(std::uint64_t z) const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= std::min(z, limit_); ++n) {
    if (table_[n] == 0) out.push_back(n);
  }
  return out;
}

std::vector<std::uint64_t> SpfTable::prime_factors(std::uint64_t n) const {
  require(n >= 1 && n <= limit_, "factorisation outside the table");
  std::vector<std::uint64_t> out;
  while (n > 1) {
    const std::uint64_t p = spf(n);
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  return out;
}

SpfTable spf_sieve(std::uint64_t x, unsigned workers) { return SpfTable(x, kDefaultSegment, workers); }

RoughnessSpec RoughnessSpec::parse(const std::string& text) {
  RoughnessSpec s;
  if (text == "paper") {
    s.mode = Mode::paper;
    s.param = 0.0;
    return s;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (colon == std::string::npos || (head != "fixed" && head != "power")) {
    throw PreconditionError("roughness must be paper, fixed:z or power:c");
  }
  const std::string arg = text.substr(colon + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != arg.size()) throw PreconditionError("malformed roughness parameter '" + arg + "'");
  if (head == "fixed") {
    if (v < 1 || v != std::floor(v)) throw PreconditionError("fixed roughness needs an integer z >= 1");
    s.mode = Mode::fixed;
  } else {
    if (v <= 0 || v >= 1) throw PreconditionError("power roughness needs 0 < c < 1");
    s.mode = Mode::power;
  }
  s.param = v;
  return s;
}

std::string RoughnessSpec::describe() const {
  std::ostringstream os;
  switch (mode) {
    case Mode::paper:
      return "paper";
    case Mode::fixed:
      os << "fixed:" << static_cast<std::uint64_t>(param);
      break;
    case Mode::power:
      os << "power:" << param;
      break;
  }
  return os.str();
}

std::uint64_t RoughnessSpec::eval(std::uint64_t x) const {
  require(x >= 1, "roughness is defined for x >= 1");
  switch (mode) {
    case Mode::paper: {
      if (x < 16) return 1;
      const double ll = std::log(std::log(static_cast<double>(x)));
      return static_cast<std::uint64_t>(std::floor(std::exp(ll * ll)));
    }
    case Mode::fixed:
      return static_cast<std::uint64_t>(param);
    case Mode::power:
      return static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(x), param) + 1e-9));
  }
  return 1;
}

RoughSequence rough_enumerate(std::uint64_t x, const RoughnessSpec& spec, RoughMode mode, const SpfTable* table) {
  std::unique_ptr<SpfTable> own;
  if (table == nullptr || table->limit() < x) {
    own = std::make_unique<SpfTable>(x);
    table = own.get();
  }
  RoughSequence out;
  out.x = x;
  out.mode = mode;
  if (x == 0) return out;
  out.z = spec.eval(x);
  if (mode == RoughMode::triangular || spec.mode == RoughnessSpec::Mode::fixed) {
    for (std::uint64_t n = 1; n <= x; ++n) {
      if (table->is_rough(n, out.z)) out.members.push_back(n);
    }
  } else {
    for (std::uint64_t n = 1; n <= x; ++n) {
      if (table->is_rough(n, spec.eval(n))) out.members.push_back(n);
    }
  }
  return out;
}

std::uint64_t phi(std::uint64_t x, std::uint64_t z, const SpfTable* table) {
  RoughnessSpec s;
  s.mode = RoughnessSpec::Mode::fixed;
  s.param = static_cast<double>(std::max<std::uint64_t>(z, 1));
  return rough_enumerate(x, s, RoughMode::triangular, table).phi();
}

std::uint64_t local_count(const std::vector<std::int64_t>& h, std::uint64_t p) {
  std::set<std::uint64_t> residues{0};
  const auto sp = static_cast<std::int64_t>(p);
  for (auto v : h) residues.insert(static_cast<std::uint64_t>(((v % sp) + sp) % sp));
  return residues.size();
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t z) { return z < 2 ? std::vector<std::uint64_t>{} : simple_primes(z); }

SingularSeriesValue singular_series(const std::vector<std::int64_t>& h, std::uint64_t z) {
  std::set<std::int64_t> seen;
  for (auto v : h) {
    if (v == 0) throw PreconditionError("offsets must be nonzero");
    if (!seen.insert(v).second) throw PreconditionError("offsets must be distinct");
  }
  SingularSeriesValue out;
  out.h = h;
  out.z = z;
  out.value = 1;
  for (auto p : primes_up_to(z)) {
    const std::uint64_t g = local_count(h, p);
    out.factors.emplace_back(p, g);
    out.value *= mpq_class(static_cast<unsigned long>(p - g), static_cast<unsigned long>(p));
  }
  out.value.canonicalize();
  return out;
}

double TupleCount::ratio() const { return predicted == 0.0 ? (exact == 0 ? 1.0 : 0.0) : static_cast<double>(exact) / predicted; }

std::string format_offsets(const std::vector<std::int64_t>& h) {
  std::ostringstream os;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) os << ';';
    os << h[i];
  }
  return os.str();
}

std::string TupleCount::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%llu,%s,%llu,%.6f,%.8f\n", static_cast<unsigned long long>(x),
                static_cast<unsigned long long>(z), format_offsets(h).c_str(), static_cast<unsigned long long>(exact),
                predicted, ratio());
  return buf;
}

TupleCount tuple_count(std::uint64_t x, std::uint64_t z, const std::vector<std::int64_t>& h, const SpfTable* table) {
  require(z <= x, "tuple_count needs z <= x");
  for (auto v : h) require(static_cast<std::uint64_t>(v < 0 ? -v : v) <= x, "offsets must satisfy |h_i| <= x");
  const SingularSeriesValue series = singular_series(h, z);
  std::unique_ptr<SpfTable> own;
  if (table == nullptr || table->limit() < x) {
    own = std::make_unique<SpfTable>(x);
    table = own.get();
  }
  TupleCount out;
  out.x = x;
  out.z = z;
  out.h = h;
  std::int64_t hp = 0, hm = 0;
  for (auto v : h) {
    hp = std::max(hp, v);
    hm = std::min(hm, v);
  }
  const auto sx = static_cast<std::int64_t>(x);
  for (std::int64_t m = 1; m <= sx; ++m) {
    if (m + hm < 1 || m + hp > sx) continue;
    if (!table->is_rough(static_cast<std::uint64_t>(m), z)) continue;
    bool ok = true;
    for (auto v : h) {
      if (!table->is_rough(static_cast<std::uint64_t>(m + v), z)) {
        ok = false;
        break;
      }
    }
    if (ok) ++out.exact;
  }
  const std::int64_t len = std::max<std::int64_t>(0, sx - (hp - hm));
  out.predicted_exact = mpq_class(static_cast<long>(len)) * series.value;
  out.predicted = out.predicted_exact.get_d();
  return out;
}

CuteIdentity cute_identity_check(std::uint64_t p, unsigned k) {
  require(k >= 2, "identity needs k >= 2");
  require(p >= 2, "p must be prime");
  for (std::uint64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) throw PreconditionError(std::to_string(p) + " is not prime");
  }
  const unsigned dims = k - 1;
  std::vector<std::uint64_t> h(dims, 0);
  mpz_class sum = 0;  // sum of (p - g_h(p))
  std::vector<unsigned> hits(p, 0);
  while (true) {
    std::uint64_t g = 1;
    hits[0] = 1;
    for (auto v : h) {
      if (hits[v] == 0) {
        hits[v] = 1;
        ++g;
      }
    }
    for (auto v : h) hits[v] = 0;
    hits[0] = 0;
    sum += static_cast<unsigned long>(p - g);
    std::size_t i = 0;
    while (i < dims && ++h[i] == p) h[i++] = 0;
    if (i == dims) break;
  }
  CuteIdentity out;
  out.p = p;
  out.k = k;
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
  out.lhs = mpq_class(sum, pk);
  out.lhs.canonicalize();
  mpz_class q1;
  mpz_ui_pow_ui(q1.get_mpz_t(), p - 1, k);
  out.rhs = mpq_class(q1, pk);
  out.rhs.canonicalize();
  out.pass = out.lhs == out.rhs;
  return out;
}

}  // namespace rotlab
