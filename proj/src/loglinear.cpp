#include "arakel/loglinear.hpp"

#include <cmath>
#include <sstream>

namespace arakel {

std::map<std::int64_t, std::int64_t> factor_integer(BigInt n) {
  std::map<std::int64_t, std::int64_t> fac;
  if (n.is_negative()) n = -n;
  if (n.is_zero()) throw std::domain_error("factor_integer: zero");
  BigInt q, r;
  for (std::int64_t p = 2; ; p += (p == 2 ? 1 : 2)) {
    if (BigInt(p) * BigInt(p) > n) break;
    while (true) {
      BigInt::divmod(n, BigInt(p), q, r);
      if (!r.is_zero()) break;
      n = q;
      ++fac[p];
    }
    if (p > 1000000) {
      if (n == BigInt(1)) return fac;
      throw std::domain_error("factor_integer: cofactor exceeds the trial-division bound");
    }
  }
  if (n != BigInt(1)) {
    if (!n.fits_i64()) throw std::domain_error("factor_integer: prime cofactor too large");
    ++fac[n.to_i64()];
  }
  return fac;
}

std::map<std::int64_t, std::int64_t> factor_rational(const Rational& x) {
  auto fac = factor_integer(x.num());
  for (const auto& [p, e] : factor_integer(x.den())) fac[p] -= e;
  for (auto it = fac.begin(); it != fac.end();)
    it = it->second == 0 ? fac.erase(it) : std::next(it);
  return fac;
}

LogLin LogLin::log_of(const Rational& x) {
  if (x.sign() <= 0) throw std::domain_error("LogLin::log_of: need a positive rational");
  LogLin out;
  for (const auto& [p, e] : factor_rational(x)) out.logs_[p] = Rational(e);
  out.trim();
  return out;
}

LogLin LogLin::log_prime(std::int64_t p, Rational coeff) {
  LogLin out;
  if (!coeff.is_zero()) out.logs_[p] = std::move(coeff);
  return out;
}

void LogLin::trim() {
  for (auto it = logs_.begin(); it != logs_.end();)
    it = it->second.is_zero() ? logs_.erase(it) : std::next(it);
}

bool LogLin::is_zero() const { return c_.is_zero() && logs_.empty(); }

int LogLin::sign() const {
  if (is_zero()) return 0;
  if (logs_.empty()) return c_.sign();
  double v = to_double();
  if (v > 1e-12) return 1;
  if (v < -1e-12) return -1;
  // Values this close to zero without being exactly zero do not occur in the
  // exact paths; fall back to long-double evaluation for robustness.
  long double acc = static_cast<long double>(c_.to_double());
  for (const auto& [p, q] : logs_)
    acc += static_cast<long double>(q.to_double()) * std::log(static_cast<long double>(p));
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

LogLin LogLin::operator-() const {
  LogLin out;
  out.c_ = -c_;
  for (const auto& [p, q] : logs_) out.logs_[p] = -q;
  return out;
}

LogLin operator+(const LogLin& a, const LogLin& b) {
  LogLin out = a;
  out.c_ += b.c_;
  for (const auto& [p, q] : b.logs_) {
    auto it = out.logs_.find(p);
    if (it == out.logs_.end())
      out.logs_[p] = q;
    else
      it->second += q;
  }
  out.trim();
  return out;
}

LogLin operator-(const LogLin& a, const LogLin& b) { return a + (-b); }

LogLin operator*(const Rational& c, const LogLin& a) {
  LogLin out;
  if (c.is_zero()) return out;
  out.c_ = c * a.c_;
  for (const auto& [p, q] : a.logs_) out.logs_[p] = c * q;
  return out;
}

double LogLin::to_double() const {
  double v = c_.to_double();
  for (const auto& [p, q] : logs_) v += q.to_double() * std::log(static_cast<double>(p));
  return v;
}

std::string LogLin::to_string() const {
  if (logs_.empty()) return c_.to_string();
  std::ostringstream os;
  bool first = true;
  if (!c_.is_zero()) {
    os << c_.to_string();
    first = false;
  }
  for (const auto& [p, q] : logs_) {
    if (!first) os << " + ";
    os << "(" << q.to_string() << ")log(" << p << ")";
    first = false;
  }
  return os.str();
}

}  // namespace arakel
