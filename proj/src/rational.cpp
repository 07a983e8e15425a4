#include "arakel/rational.hpp"

#include <cctype>
#include <ostream>

namespace arakel {

int BigInt::cmp_mag(const BigInt& a, const BigInt& b) {
  if (a.limbs_.size() != b.limbs_.size())
    return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
  }
  return 0;
}

BigInt BigInt::add_mag(const BigInt& a, const BigInt& b) {
  BigInt r;
  const auto& x = a.limbs_;
  const auto& y = b.limbs_;
  std::size_t n = std::max(x.size(), y.size());
  r.limbs_.resize(n, 0);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = carry;
    if (i < x.size()) s += x[i];
    if (i < y.size()) s += y[i];
    r.limbs_[i] = static_cast<std::uint32_t>(s & 0xffffffffu);
    carry = s >> 32;
  }
  if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
  return r;
}

BigInt BigInt::sub_mag(const BigInt& a, const BigInt& b) {
  BigInt r;
  r.limbs_.resize(a.limbs_.size(), 0);
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    std::int64_t d = static_cast<std::int64_t>(a.limbs_[i]) - borrow -
                     (i < b.limbs_.size() ? static_cast<std::int64_t>(b.limbs_[i]) : 0);
    if (d < 0) {
      d += (std::int64_t(1) << 32);
      borrow = 1;
    } else {
      borrow = 0;
    }
    r.limbs_[i] = static_cast<std::uint32_t>(d);
  }
  r.trim();
  return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  if (a.negative_ == b.negative_) {
    BigInt r = BigInt::add_mag(a, b);
    r.negative_ = a.negative_;
    r.trim();
    return r;
  }
  int c = BigInt::cmp_mag(a, b);
  if (c == 0) return BigInt();
  if (c > 0) {
    BigInt r = BigInt::sub_mag(a, b);
    r.negative_ = a.negative_;
    r.trim();
    return r;
  }
  BigInt r = BigInt::sub_mag(b, a);
  r.negative_ = b.negative_;
  r.trim();
  return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  if (a.is_zero() || b.is_zero()) return BigInt();
  BigInt r;
  r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
      std::uint64_t cur = r.limbs_[i + j] +
                          static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
      r.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    std::size_t k = i + b.limbs_.size();
    while (carry) {
      std::uint64_t cur = r.limbs_[k] + carry;
      r.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
      ++k;
    }
  }
  r.negative_ = a.negative_ != b.negative_;
  r.trim();
  return r;
}

std::uint32_t BigInt::divmod_small(std::vector<std::uint32_t>& n, std::uint32_t d) {
  std::uint64_t rem = 0;
  for (std::size_t i = n.size(); i-- > 0;) {
    std::uint64_t cur = (rem << 32) | n[i];
    n[i] = static_cast<std::uint32_t>(cur / d);
    rem = cur % d;
  }
  while (!n.empty() && n.back() == 0) n.pop_back();
  return static_cast<std::uint32_t>(rem);
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
  int c = cmp_mag(a, b);
  if (c < 0) {
    q = BigInt();
    r = a;
    return;
  }
  if (b.limbs_.size() == 1) {
    std::vector<std::uint32_t> qd = a.limbs_;
    std::uint32_t rem = divmod_small(qd, b.limbs_[0]);
    q = BigInt();
    q.limbs_ = std::move(qd);
    q.negative_ = a.negative_ != b.negative_;
    q.trim();
    r = BigInt();
    if (rem) {
      r.limbs_ = {rem};
      r.negative_ = a.negative_;
    }
    return;
  }
  // Schoolbook long division on 32-bit limbs via shift-and-subtract over bits.
  // Simple base-2^32 normalization-free variant: binary long division.
  BigInt rem;
  BigInt quot;
  quot.limbs_.assign(a.limbs_.size(), 0);
  const BigInt babs = b.abs();
  for (std::size_t li = a.limbs_.size(); li-- > 0;) {
    for (int bit = 31; bit >= 0; --bit) {
      // rem = rem*2 + bit
      std::uint32_t carry = (a.limbs_[li] >> bit) & 1u;
      for (std::size_t k = 0; k < rem.limbs_.size(); ++k) {
        std::uint32_t nc = rem.limbs_[k] >> 31;
        rem.limbs_[k] = (rem.limbs_[k] << 1) | carry;
        carry = nc;
      }
      if (carry) rem.limbs_.push_back(carry);
      if (cmp_mag(rem, babs) >= 0) {
        rem = sub_mag(rem, babs);
        quot.limbs_[li] |= (1u << bit);
      }
    }
  }
  quot.negative_ = a.negative_ != b.negative_;
  quot.trim();
  rem.negative_ = a.negative_;
  rem.trim();
  q = std::move(quot);
  r = std::move(rem);
}

namespace {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

BigInt BigInt::shl(std::size_t bits) const {
  if (is_zero() || bits == 0) return *this;
  BigInt r;
  const std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
  r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
    r.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v & 0xffffffffu);
    r.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
  }
  r.negative_ = negative_;
  r.trim();
  return r;
}

BigInt BigInt::shr(std::size_t bits) const {
  const std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
  if (limb_shift >= limbs_.size()) return BigInt();
  BigInt r;
  r.limbs_.assign(limbs_.size() - limb_shift, 0);
  for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
    std::uint64_t v = limbs_[i + limb_shift];
    if (bit_shift && i + limb_shift + 1 < limbs_.size())
      v |= static_cast<std::uint64_t>(limbs_[i + limb_shift + 1]) << 32;
    r.limbs_[i] = static_cast<std::uint32_t>((v >> bit_shift) & 0xffffffffu);
  }
  r.negative_ = negative_;
  r.trim();
  return r;
}

std::size_t BigInt::trailing_zero_bits() const {
  if (is_zero()) return 0;
  std::size_t tz = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i] == 0) {
      tz += 32;
      continue;
    }
    std::uint32_t v = limbs_[i];
    while (!(v & 1)) {
      ++tz;
      v >>= 1;
    }
    break;
  }
  return tz;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.negative_ = false;
  b.negative_ = false;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Fast path: both fit in 64 bits (the common case for desk-scale data).
  if (a.fits_i64() && b.fits_i64()) {
    std::uint64_t g = gcd_u64(static_cast<std::uint64_t>(a.to_i64()),
                              static_cast<std::uint64_t>(b.to_i64()));
    return BigInt::from_u64(g);
  }
  // Binary gcd: cheap shifts and subtractions only.
  const std::size_t shift = std::min(a.trailing_zero_bits(), b.trailing_zero_bits());
  a = a.shr(a.trailing_zero_bits());
  b = b.shr(b.trailing_zero_bits());
  while (true) {
    if (a.fits_i64() && b.fits_i64()) {
      std::uint64_t g = gcd_u64(static_cast<std::uint64_t>(a.to_i64()),
                                static_cast<std::uint64_t>(b.to_i64()));
      return BigInt::from_u64(g).shl(shift);
    }
    int c = cmp_mag(a, b);
    if (c == 0) break;
    if (c < 0) std::swap(a, b);
    a = sub_mag(a, b);
    a = a.shr(a.trailing_zero_bits());
  }
  return a.shl(shift);
}

BigInt BigInt::pow(const BigInt& base, std::uint64_t e) {
  BigInt r(1), b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

BigInt BigInt::factorial(std::uint64_t n) {
  BigInt r(1);
  for (std::uint64_t i = 2; i <= n; ++i) r *= BigInt::from_u64(i);
  return r;
}

BigInt BigInt::binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt r(1);
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= BigInt::from_u64(n - k + i);
    BigInt q, rem;
    divmod(r, BigInt::from_u64(i), q, rem);
    r = std::move(q);
  }
  return r;
}

double BigInt::to_double() const {
  double r = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + limbs_[i];
  return negative_ ? -r : r;
}

std::size_t BigInt::bit_length() const {
  if (limbs_.empty()) return 0;
  std::size_t bits = (limbs_.size() - 1) * 32;
  std::uint32_t top = limbs_.back();
  while (top) {
    ++bits;
    top >>= 1;
  }
  return bits;
}

bool BigInt::fits_i64() const {
  if (limbs_.size() > 2) return false;
  if (limbs_.size() < 2) return true;
  std::uint64_t m = (static_cast<std::uint64_t>(limbs_[1]) << 32) | limbs_[0];
  return negative_ ? m <= (std::uint64_t(1) << 63) : m < (std::uint64_t(1) << 63);
}

std::int64_t BigInt::to_i64() const {
  std::uint64_t m = 0;
  if (limbs_.size() > 0) m |= limbs_[0];
  if (limbs_.size() > 1) m |= static_cast<std::uint64_t>(limbs_[1]) << 32;
  return negative_ ? -static_cast<std::int64_t>(m) : static_cast<std::int64_t>(m);
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  std::vector<std::uint32_t> mag = limbs_;
  std::string digits;
  while (!mag.empty()) {
    std::uint32_t rem = divmod_small(mag, 1000000000u);
    for (int i = 0; i < 9; ++i) {
      digits.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  if (negative_) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

BigInt BigInt::from_decimal(std::string_view s) {
  BigInt r;
  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    neg = s[i] == '-';
    ++i;
  }
  if (i == s.size()) throw std::invalid_argument("BigInt: empty literal");
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("BigInt: bad digit in literal");
    r = r * BigInt(10) + BigInt(s[i] - '0');
  }
  if (neg) r = -r;
  return r;
}

std::ostream& operator<<(std::ostream& os, const BigInt& v) { return os << v.to_string(); }

void Rational::normalize() {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  if (den_.is_negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("Rational: non-finite double");
  if (x == 0.0) return Rational();
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
  // 53 bits of mantissa
  std::int64_t mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  exp -= 53;
  Rational r(mant);
  if (exp >= 0) return Rational(r.num() * BigInt::pow(BigInt(2), static_cast<std::uint64_t>(exp)), BigInt(1));
  return Rational(r.num(), BigInt::pow(BigInt(2), static_cast<std::uint64_t>(-exp)));
}

Rational Rational::parse(std::string_view s) {
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    return Rational(BigInt::from_decimal(s.substr(0, slash)),
                    BigInt::from_decimal(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string_view frac = s.substr(dot + 1);
    digits += std::string(frac);
    BigInt num = BigInt::from_decimal(digits);
    BigInt den = BigInt::pow(BigInt(10), frac.size());
    return Rational(std::move(num), std::move(den));
  }
  return Rational(BigInt::from_decimal(s));
}

double Rational::to_double() const {
  if (num_.is_zero()) return 0.0;
  double n = num_.to_double();
  double d = den_.to_double();
  if (std::isfinite(n) && std::isfinite(d) && d != 0.0) return n / d;
  // Scale by a power of two so the integer quotient keeps ~64 bits.
  const auto nb = static_cast<std::int64_t>(num_.bit_length());
  const auto db = static_cast<std::int64_t>(den_.bit_length());
  std::int64_t s = 64 + db - nb;
  BigInt nn = num_.abs(), dd = den_;
  if (s > 0)
    nn = nn * BigInt::pow(BigInt(2), static_cast<std::uint64_t>(s));
  else if (s < 0)
    dd = dd * BigInt::pow(BigInt(2), static_cast<std::uint64_t>(-s));
  BigInt q, r;
  BigInt::divmod(nn, dd, q, r);
  double val = std::ldexp(q.to_double(), static_cast<int>(-s));
  return num_.is_negative() ? -val : val;
}

std::string Rational::to_string() const {
  if (is_integer()) return num_.to_string();
  return num_.to_string() + "/" + den_.to_string();
}

std::ostream& operator<<(std::ostream& os, const Rational& v) { return os << v.to_string(); }

}  // namespace arakel
