#include "lyubich/rational.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace lyubich {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("Rational: int64 overflow");
  }
  return static_cast<std::int64_t>(v);
}

Rational reduced(__int128 num, __int128 den) {
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ <= 0) throw std::invalid_argument("Rational: denominator must be positive");
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return reduced(static_cast<__int128>(a.num_) + b.num_, a.den_);
  return reduced(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                 static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduced(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string to_string(const Rational& r) {
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

std::int64_t checked_pow(std::int64_t n, int k) {
  __int128 v = 1;
  for (int i = 0; i < k; ++i) {
    v *= n;
    if (v > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("checked_pow overflow");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace lyubich
