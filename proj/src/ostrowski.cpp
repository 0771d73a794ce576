#include "rotlab/ostrowski.hpp"

#include <algorithm>
#include <sstream>

#include "rotlab/error.hpp"

namespace rotlab {

namespace {

// q_i as a word when the index is within the word range, else UINT64_MAX.
std::uint64_t q_or_max(const ContinuedFraction& cf, std::size_t i) {
  if (i > cf.word_depth()) return UINT64_MAX;
  return cf.q_word(i);
}

std::size_t top_index(const ContinuedFraction& cf, std::uint64_t x) {
  std::size_t top = 0;
  for (std::size_t i = 0; i + 1 <= cf.depth() && q_or_max(cf, i) <= x; ++i) top = i;
  return top;
}

mpz_class cdiv(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

}  // namespace

std::string admissibility_error(const ContinuedFraction& cf, const Digits& digits) {
  if (digits.size() > cf.depth()) {
    return "digit string of length " + std::to_string(digits.size()) + " exceeds expansion depth " +
           std::to_string(cf.depth());
  }
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const std::uint64_t cap = cf.a(i + 1);
    if (i == 0 && digits[0] >= cap) return "b_0 = " + std::to_string(digits[0]) + " must be < a_1";
    if (digits[i] > cap) return "b_" + std::to_string(i) + " exceeds a_" + std::to_string(i + 1);
    if (i >= 1 && digits[i] == cap && digits[i - 1] != 0) {
      return "b_" + std::to_string(i) + " = a_" + std::to_string(i + 1) + " forces b_" + std::to_string(i - 1) + " = 0";
    }
  }
  return {};
}

std::uint64_t max_encodable(const ContinuedFraction& cf) {
  const std::uint64_t q = q_or_max(cf, cf.depth());
  return q == UINT64_MAX ? (UINT64_MAX >> 1) : q - 1;
}

Digits encode_int(const ContinuedFraction& cf, std::uint64_t n) {
  if (n > max_encodable(cf)) {
    throw PreconditionError("N = " + std::to_string(n) + " needs a deeper expansion (N < q_K required)");
  }
  if (n == 0) return {0};
  const std::size_t top = top_index(cf, n);
  Digits out(top + 1, 0);
  std::uint64_t rem = n;
  for (std::size_t i = top + 1; i-- > 0;) {
    const std::uint64_t q = cf.q_word(i);
    out[i] = rem / q;
    rem -= out[i] * q;
  }
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

std::uint64_t decode_int(const ContinuedFraction& cf, const Digits& digits) {
  if (const auto err = admissibility_error(cf, digits); !err.empty()) throw PreconditionError(err);
  u128 sum = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == 0) continue;
    sum += static_cast<u128>(digits[i]) * cf.q_word(i);
    if (sum > UINT64_MAX) throw BudgetError("decoded value exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(sum);
}

CertifiedReal ostrowski_phase(const ContinuedFraction& cf, const Digits& digits) {
  CertifiedReal sum(0, cf.delta_bits(), 0);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] != 0) sum = sum + mpz_class(static_cast<unsigned long>(digits[i])) * cf.delta(i);
  }
  return sum;
}

RealOstrowski encode_real(const ContinuedFraction& cf, const CertifiedReal& gamma, std::size_t k) {
  if (k + 1 > cf.depth()) throw PreconditionError("real expansion to index K needs depth > K");
  const unsigned bits = cf.delta_bits();
  const CertifiedReal g = gamma.rescaled(bits);
  const mpz_class one = mpz_class(1) << bits;
  const mpz_class& d0 = cf.delta(0).mantissa();
  if (g.mantissa() < -d0 || g.mantissa() >= one - d0) throw PreconditionError("gamma outside [-{alpha}, 1-{alpha})");

  RealOstrowski out;
  out.digits.assign(k + 1, 0);
  mpz_class r = g.mantissa();
  for (std::size_t i = 0; i <= k; ++i) {
    const mpz_class& di = cf.delta(i).mantissa();
    const mpz_class abs_i = abs(di);
    const mpz_class abs_next = abs(cf.delta(i + 1).mantissa());
    const mpz_class signed_r = (i % 2 == 0) ? r : mpz_class(-r);
    const mpz_class num = signed_r - abs_next;
    mpz_class c = num <= 0 ? mpz_class(0) : cdiv(num, abs_i);
    mpz_class cap = static_cast<unsigned long>(cf.a(i + 1));
    if (i == 0 || out.digits[i - 1] != 0) cap -= 1;
    if (c > cap) c = cap;
    out.digits[i] = c.get_ui();
    r -= c * di;
  }
  out.value = ostrowski_phase(cf, out.digits);
  out.residual = g - out.value;
  const CertifiedReal& dk = cf.delta(k);
  if (abs(out.residual.mantissa()) > abs(dk.mantissa()) + dk.error_ulps() + out.residual.error_ulps()) {
    throw PrecisionError("real Ostrowski residual exceeds |delta_K|");
  }
  return out;
}

RealOstrowski encode_real(const ContinuedFraction& cf, double gamma, std::size_t k) {
  return encode_real(cf, CertifiedReal::from_double(gamma, cf.delta_bits()), k);
}

IntTruncation truncate_int(const ContinuedFraction& cf, std::uint64_t x, std::size_t m) {
  const Digits bx = encode_int(cf, x);
  IntTruncation out;
  out.top = bx.size() - 1;
  if (x == 0 || m >= out.top) throw PreconditionError("truncation index m must be below the top index of x");
  const std::size_t low = out.top - m;
  Digits minus(bx.size(), 0);
  std::copy(bx.begin() + static_cast<std::ptrdiff_t>(low), bx.end(), minus.begin() + static_cast<std::ptrdiff_t>(low));
  out.minus = decode_int(cf, minus);

  const std::uint64_t q_low = cf.q_word(low);
  Digits bx2 = encode_int(cf, x + q_low);
  std::fill(bx2.begin(), bx2.begin() + static_cast<std::ptrdiff_t>(std::min(low, bx2.size())), 0);
  out.plus = decode_int(cf, bx2);

  auto nonzero = [](const Digits& d) { return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](auto v) { return v != 0; })); };
  out.nonzero_minus = nonzero(minus);
  out.nonzero_plus = nonzero(bx2);
  out.ratio = static_cast<double>(out.plus) / static_cast<double>(out.minus);
  out.ratio_bound = (static_cast<double>(x) + static_cast<double>(q_low)) / (static_cast<double>(x) - static_cast<double>(q_low));
  return out;
}

RealTruncation truncate_real(const ContinuedFraction& cf, const CertifiedReal& gamma, std::size_t l) {
  const RealOstrowski full = encode_real(cf, gamma, cf.depth() - 1);
  const auto it = std::find_if(full.digits.begin(), full.digits.end(), [](auto v) { return v != 0; });
  if (it == full.digits.end()) throw PreconditionError("gamma has no nonzero real digit within the expansion");
  RealTruncation out;
  out.m = static_cast<std::size_t>(it - full.digits.begin());
  if (out.m == 0) throw PreconditionError("leading real digit at index 0; truncation needs m >= 1");
  const std::size_t k = out.m + l;
  if (k + 1 > cf.depth()) throw PreconditionError("m + L exceeds expansion depth");

  const CertifiedReal& dk = cf.delta(k);
  const CertifiedReal width = dk.certified_sign() < 0 ? -dk : dk;
  out.plus = encode_real(cf, gamma + width, k);
  out.minus = encode_real(cf, gamma - width, k);
  // A gamma already supported on the window is its own lower bound.
  const RealOstrowski own = encode_real(cf, gamma, k);
  if (own.residual.mantissa() == 0) {
    if (gamma.certified_sign() >= 0) {
      out.minus = own;
    } else {
      out.plus = own;
    }
  }
  long double a = out.plus.value.value();
  long double b = out.minus.value.value();
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  out.ratio = a > b ? a / b : b / a;
  return out;
}

std::vector<std::uint64_t> cylinder_enumerate(const ContinuedFraction& cf, const Digits& prefix, std::uint64_t x) {
  if (const auto err = admissibility_error(cf, prefix); !err.empty()) throw PreconditionError(err);
  if (x > max_encodable(cf)) throw PreconditionError("x needs a deeper expansion");
  std::vector<std::uint64_t> out;
  if (x == 0) return out;
  const std::size_t top = top_index(cf, x);
  const std::size_t lo = prefix.size();

  u128 fixed = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] != 0) {
      if (i > cf.word_depth()) return out;
      fixed += static_cast<u128>(prefix[i]) * cf.q_word(i);
    }
  }
  if (fixed > x) return out;
  if (lo > top) {
    if (fixed >= 1) out.push_back(static_cast<std::uint64_t>(fixed));
    return out;
  }
  const std::uint64_t budget = x - static_cast<std::uint64_t>(fixed);
  const bool low_nonzero = lo >= 1 && prefix[lo - 1] != 0;

  std::vector<std::uint64_t> q(top + 1);
  for (std::size_t i = lo; i <= top; ++i) q[i] = cf.q_word(i);

  // Iterative DFS from index top down to lo, digits ascending; frames hold (digit, partial sum).
  struct Frame {
    std::uint64_t digit;
    std::uint64_t sum;
  };
  std::vector<Frame> stack;
  stack.reserve(top - lo + 2);
  stack.push_back({0, 0});
  while (!stack.empty()) {
    const std::size_t i = top - (stack.size() - 1);
    Frame& f = stack.back();
    const std::uint64_t cap = cf.a(i + 1) - (i == 0 ? 1 : 0);
    bool parent_full = false;
    if (stack.size() >= 2) {
      const std::size_t parent = i + 1;
      parent_full = stack[stack.size() - 2].digit == cf.a(parent + 1);
    }
    const std::uint64_t limit = parent_full ? 0 : cap;
    const std::uint64_t total = f.sum + f.digit * q[i];
    if (f.digit > limit || total > budget) {
      stack.pop_back();
      if (!stack.empty()) ++stack.back().digit;
      continue;
    }
    if (i == lo) {
      const bool full = f.digit == cf.a(i + 1);
      if (!(full && low_nonzero)) {
        const std::uint64_t n = total + static_cast<std::uint64_t>(fixed);
        if (n >= 1) out.push_back(n);
      }
      ++f.digit;
      continue;
    }
    stack.push_back({0, total});
  }
  return out;
}

std::string format_digits(const Digits& digits) {
  std::ostringstream os;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i) os << ',';
    os << digits[i];
  }
  return os.str();
}

Digits parse_digits(const std::string& text) {
  Digits out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw PreconditionError("malformed digit '" + item + "'");
    }
    if (used != item.size() || item.front() == '-') throw PreconditionError("malformed digit '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace rotlab
