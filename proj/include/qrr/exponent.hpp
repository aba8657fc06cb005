#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>

#include "qrr/error.hpp"

namespace qrr {

/// Exact rational exponent of q, kept in lowest terms with a positive
/// denominator. Exponents in this domain stay small, so 64-bit parts with
/// checked 128-bit intermediates are enough; overflow throws.
class QExponent {
 public:
  constexpr QExponent() = default;
  constexpr QExponent(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  QExponent(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  bool is_zero() const noexcept { return num_ == 0; }

  /// Largest integer not above the value.
  std::int64_t floor() const noexcept {
    std::int64_t f = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --f;
    return f;
  }
  std::int64_t ceil() const noexcept { return -QExponent(-num_, den_).floor(); }

  friend QExponent operator+(const QExponent& a, const QExponent& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend QExponent operator-(const QExponent& a, const QExponent& b) { return a + (-b); }
  friend QExponent operator*(const QExponent& a, const QExponent& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend QExponent operator/(const QExponent& a, const QExponent& b) {
    if (b.num_ == 0) fail(ErrorKind::DomainError, "exponent division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_,
                     static_cast<__int128>(a.den_) * b.num_);
  }
  QExponent operator-() const {
    QExponent r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  QExponent& operator+=(const QExponent& o) { return *this = *this + o; }
  QExponent& operator-=(const QExponent& o) { return *this = *this - o; }
  QExponent& operator*=(const QExponent& o) { return *this = *this * o; }

  friend bool operator==(const QExponent& a, const QExponent& b) = default;
  friend std::strong_ordering operator<=>(const QExponent& a, const QExponent& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  /// `p/q` in lowest terms, or just `p` for integers.
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const QExponent& e) { return os << e.str(); }

  /// Parses `p` or `p/q`; throws DomainError on malformed text.
  static QExponent parse(const std::string& text);

 private:
  static QExponent from_wide(__int128 n, __int128 d) {
    if (d == 0) fail(ErrorKind::DomainError, "zero denominator in exponent");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) fail(ErrorKind::Overflow, "exponent out of range");
    QExponent r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::int64_t lcm_den(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace qrr

template <>
struct std::hash<qrr::QExponent> {
  std::size_t operator()(const qrr::QExponent& e) const noexcept {
    return std::hash<std::int64_t>{}(e.num()) * 1000003u ^ std::hash<std::int64_t>{}(e.den());
  }
};
