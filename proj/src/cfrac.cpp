#include "rotlab/cfrac.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "rotlab/error.hpp"

namespace rotlab {

namespace {

mpz_class parse_integer(std::string_view s, std::string_view what) {
  std::string text(s);
  while (!text.empty() && text.front() == ' ') text.erase(text.begin());
  while (!text.empty() && text.back() == ' ') text.pop_back();
  mpz_class v;
  if (text.empty() || v.set_str(text, 10) != 0) {
    throw PreconditionError("malformed integer '" + text + "' in " + std::string(what));
  }
  return v;
}

std::vector<std::uint64_t> parse_digit_list(std::string_view s, std::string_view what) {
  std::vector<std::uint64_t> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    mpz_class v = parse_integer(item, what);
    if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 62) {
      throw PreconditionError("digit out of range in " + std::string(what));
    }
    out.push_back(mpz_get_ui(v.get_mpz_t()));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::uint64_t>& v, std::size_t from = 0) {
  std::ostringstream os;
  for (std::size_t i = from; i < v.size(); ++i) {
    if (i > from) os << ',';
    os << v[i];
  }
  return os.str();
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// floor((P + sqrt D) / Q) given s = isqrt(D), sqrt(D) irrational.
mpz_class surd_floor(const mpz_class& p, const mpz_class& q, const mpz_class& s) {
  mpz_class out;
  if (q > 0) {
    mpz_class num = p + s;
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
  } else {
    mpz_class num = -p - s - 1;
    mpz_class den = -q;
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  }
  return out;
}

std::uint64_t checked_digit(const mpz_class& v) {
  if (v < 0) throw PreconditionError("negative partial quotient; shift alpha by an integer");
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 62) throw BudgetError("partial quotient exceeds 62 bits");
  return mpz_get_ui(v.get_mpz_t());
}

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && out > (std::uint64_t{1} << 62) / base) throw BudgetError("partial quotient exceeds 62 bits");
    out *= base;
  }
  return out;
}

}  // namespace

std::string AlphaSpec::canonical() const {
  if (!alias.empty()) return alias;
  std::ostringstream os;
  switch (kind) {
    case Kind::surd:
      os << "surd:" << surd().p.get_str() << ',' << surd().d.get_str() << ',' << surd().q.get_str();
      break;
    case Kind::periodic: {
      const auto& r = periodic();
      os << "cf:" << r.prefix.front();
      if (r.prefix.size() > 1) os << ';' << join(r.prefix, 1);
      os << "|period:" << join(r.period);
      break;
    }
    case Kind::poly:
      os << "cf-poly:" << poly().degree;
      break;
  }
  return os.str();
}

AlphaSpec parse_alpha(std::string_view text) {
  AlphaSpec out;
  if (text == "golden") {
    out.kind = AlphaSpec::Kind::surd;
    out.alias = "golden";
    out.rule = Surd{1, 5, 2};
    return out;
  }
  if (text == "sqrt2") {
    out.kind = AlphaSpec::Kind::surd;
    out.alias = "sqrt2";
    out.rule = Surd{0, 2, 1};
    return out;
  }
  if (starts_with(text, "surd:")) {
    const auto body = text.substr(5);
    const auto c1 = body.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
    if (c2 == std::string_view::npos || body.find(',', c2 + 1) != std::string_view::npos) {
      throw PreconditionError("surd expects three integers P,D,Q");
    }
    Surd s{parse_integer(body.substr(0, c1), "surd P"), parse_integer(body.substr(c1 + 1, c2 - c1 - 1), "surd D"),
           parse_integer(body.substr(c2 + 1), "surd Q")};
    if (s.d <= 0) throw PreconditionError("surd D must be positive");
    if (mpz_perfect_square_p(s.d.get_mpz_t())) throw PreconditionError("surd D must not be a perfect square");
    if (s.q == 0) throw PreconditionError("surd Q must be nonzero");
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), s.d.get_mpz_t());
    if (surd_floor(s.p, s.q, root) < 0) throw PreconditionError("alpha must be positive; shift it by an integer");
    out.kind = AlphaSpec::Kind::surd;
    out.rule = std::move(s);
    return out;
  }
  if (starts_with(text, "cf-poly:")) {
    const mpz_class d = parse_integer(text.substr(8), "cf-poly degree");
    if (d < 0 || d > 16) throw PreconditionError("cf-poly degree must be in [0,16]");
    out.kind = AlphaSpec::Kind::poly;
    out.rule = PolyRule{static_cast<unsigned>(d.get_ui())};
    return out;
  }
  if (starts_with(text, "cf:")) {
    const auto body = text.substr(3);
    const auto bar = body.find('|');
    if (bar == std::string_view::npos) throw PreconditionError("cf rule needs a '|period:' part (finite expansions are rational)");
    const auto head = body.substr(0, bar);
    const auto tail = body.substr(bar + 1);
    if (!starts_with(tail, "period:")) throw PreconditionError("expected 'period:' after '|'");
    PeriodicRule rule;
    const auto semi = head.find(';');
    const mpz_class a0 = parse_integer(head.substr(0, semi), "cf a0");
    if (a0 < 0 || mpz_sizeinbase(a0.get_mpz_t(), 2) > 62) throw PreconditionError("cf a0 out of range");
    rule.prefix.push_back(a0.get_ui());
    if (semi != std::string_view::npos) {
      for (auto v : parse_digit_list(head.substr(semi + 1), "cf prefix")) rule.prefix.push_back(v);
    }
    rule.period = parse_digit_list(tail.substr(7), "cf period");
    if (rule.period.empty()) throw PreconditionError("empty period");
    for (std::size_t i = 1; i < rule.prefix.size(); ++i) require(rule.prefix[i] >= 1, "cf digits must be >= 1");
    for (auto v : rule.period) require(v >= 1, "cf digits must be >= 1");
    out.kind = AlphaSpec::Kind::periodic;
    out.rule = std::move(rule);
    return out;
  }
  throw PreconditionError("unrecognised alpha '" + std::string(text) + "'");
}

unsigned max_denominator_bits() {
  if (const char* env = std::getenv("ROTATIONLAB_MAX_BITS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v >= 64) return v;
    throw PreconditionError("ROTATIONLAB_MAX_BITS must be an integer >= 64");
  }
  return kDefaultMaxBits;
}

DigitStream::DigitStream(AlphaSpec alpha) : alpha_(std::move(alpha)) {
  if (alpha_.kind == AlphaSpec::Kind::surd) {
    const auto& s = alpha_.surd();
    sp_ = s.p;
    sd_ = s.d;
    sq_ = s.q;
    // The recurrence needs Q | (D - P^2).
    mpz_class r = sd_ - sp_ * sp_;
    if (r % sq_ != 0) {
      mpz_class absq = abs(sq_);
      sp_ *= absq;
      sd_ *= sq_ * sq_;
      sq_ *= absq;
    }
    mpz_sqrt(sqrt_d_.get_mpz_t(), sd_.get_mpz_t());
  }
}

std::uint64_t DigitStream::next_surd_digit() {
  const std::size_t k = digits_.size();
  if (period_len_ != 0) return digits_[period_start_ + (k - period_start_) % period_len_];
  if (k >= 1) {
    auto key = std::make_pair(sp_, sq_);
    auto [it, inserted] = seen_.emplace(std::move(key), k);
    if (!inserted) {
      period_start_ = it->second;
      period_len_ = k - it->second;
      seen_.clear();
      return digits_[period_start_];
    }
  }
  const mpz_class a = surd_floor(sp_, sq_, sqrt_d_);
  const std::uint64_t digit = checked_digit(a);
  const mpz_class p_next = a * sq_ - sp_;
  const mpz_class q_next = (sd_ - p_next * p_next) / sq_;
  sp_ = p_next;
  sq_ = q_next;
  return digit;
}

void DigitStream::extend_to(std::size_t k) {
  while (digits_.size() <= k) {
    const std::size_t i = digits_.size();
    std::uint64_t d = 0;
    switch (alpha_.kind) {
      case AlphaSpec::Kind::surd:
        d = next_surd_digit();
        break;
      case AlphaSpec::Kind::periodic: {
        const auto& r = alpha_.periodic();
        d = i < r.prefix.size() ? r.prefix[i] : r.period[(i - r.prefix.size()) % r.period.size()];
        break;
      }
      case AlphaSpec::Kind::poly:
        d = i == 0 ? 0 : checked_pow(i, alpha_.poly().degree);
        break;
    }
    digits_.push_back(d);
  }
}

std::uint64_t DigitStream::digit(std::size_t k) {
  std::lock_guard lock(mutex_);
  extend_to(k);
  return digits_[k];
}

std::pair<std::size_t, std::size_t> DigitStream::detected_period() const { return {period_start_, period_len_}; }

mpz_class alpha_fixed(const AlphaSpec& alpha, unsigned bits) {
  if (alpha.kind == AlphaSpec::Kind::surd) {
    // Exact: floor((P 2^b + sqrt(D 4^b)) / Q) with the surd_floor rounding argument.
    const auto& s = alpha.surd();
    mpz_class scaled = s.d << (2 * bits);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    return surd_floor(s.p << bits, s.q, root);
  }
  DigitStream stream(alpha);
  mpz_class p_prev = 1, q_prev = 0;
  mpz_class p = stream.digit(0), q = 1;
  const unsigned need = bits + 2;
  for (std::size_t k = 1; 2 * (mpz_sizeinbase(q.get_mpz_t(), 2) - 1) < need; ++k) {
    const mpz_class a = static_cast<unsigned long>(stream.digit(k));
    mpz_class pn = a * p + p_prev;
    mpz_class qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
  }
  mpz_class num = p << bits;
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
  return out;
}

ContinuedFraction ContinuedFraction::expand(const AlphaSpec& alpha, std::size_t depth) {
  require(depth >= 1, "expansion depth must be >= 1");
  const unsigned budget = max_denominator_bits();
  ContinuedFraction cf;
  cf.alpha_ = alpha;
  DigitStream stream(alpha);
  cf.digits_.reserve(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) {
    cf.digits_.push_back(stream.digit(k));
    const mpz_class a = static_cast<unsigned long>(cf.digits_.back());
    if (k == 0) {
      cf.p_.push_back(a);
      cf.q_.push_back(1);
    } else if (k == 1) {
      cf.p_.push_back(a * cf.p_[0] + 1);
      cf.q_.push_back(a);
    } else {
      cf.p_.push_back(a * cf.p_[k - 1] + cf.p_[k - 2]);
      cf.q_.push_back(a * cf.q_[k - 1] + cf.q_[k - 2]);
    }
    if (mpz_sizeinbase(cf.q_.back().get_mpz_t(), 2) > budget) {
      throw BudgetError("q_" + std::to_string(k) + " exceeds the " + std::to_string(budget) + "-bit budget");
    }
    if (k >= 1 && cf.digits_.back() > cf.bound_) cf.bound_ = cf.digits_.back();
  }
  const auto qbits = static_cast<unsigned>(mpz_sizeinbase(cf.q_.back().get_mpz_t(), 2));
  cf.delta_bits_ = 64 + 2 * qbits + 8;
  const unsigned work_bits = cf.delta_bits_ + qbits + 8;
  const mpz_class afix = alpha_fixed(alpha, work_bits);
  cf.delta_.reserve(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) {
    const mpz_class m = cf.q_[k] * afix - (cf.p_[k] << work_bits);
    const CertifiedReal wide(m, work_bits, 2 * cf.q_[k]);
    cf.delta_.push_back(wide.rescaled(cf.delta_bits_));
    cf.delta_ld_.push_back(cf.delta_.back().value());
    if (mpz_sizeinbase(cf.q_[k].get_mpz_t(), 2) <= 63) cf.word_depth_ = k;
  }
  return cf;
}

std::uint64_t ContinuedFraction::q_word(std::size_t k) const {
  const auto& v = q_.at(k);
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 63) throw BudgetError("q_" + std::to_string(k) + " exceeds 63 bits");
  return v.get_ui();
}

const CertifiedReal& ContinuedFraction::delta(std::size_t k) const {
  if (k >= delta_.size()) throw PreconditionError("delta index " + std::to_string(k) + " beyond expansion depth");
  return delta_[k];
}

long double ContinuedFraction::abs_delta_ld(std::size_t k) const {
  const long double v = delta_ld_.at(k);
  return v < 0 ? -v : v;
}

Rotation::Rotation(const AlphaSpec& alpha) : alpha_(alpha) {
  // {alpha} * 2^128 from a 192-bit value: floor keeps it within 2 units.
  mpz_class wide = alpha_fixed(alpha, 192);
  mpz_class frac;
  mpz_fdiv_r_2exp(frac.get_mpz_t(), wide.get_mpz_t(), 192);
  frac >>= 64;
  step_ = to_u128(frac);
}

CertifiedReal Rotation::frac_part(std::uint64_t n) const {
  if (n > kMaxRotationIndex) throw PrecisionError("n = " + std::to_string(n) + " exceeds the certified range");
  return CertifiedReal::from_fraction(frac_word(n), error_ulps(n));
}

}  // namespace rotlab
