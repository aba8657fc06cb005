#pragma once

// Truncated Laurent-Puiseux series in q with exact rational coefficients.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrr/exponent.hpp"

namespace qrr {

using Coefficient = mpq_class;

/// c * q^e. The zero monomial always carries exponent 0.
class Monomial {
 public:
  Monomial() = default;
  Monomial(Coefficient coeff, QExponent exponent);

  static Monomial q_pow(QExponent e) { return Monomial(1, e); }
  static Monomial constant(Coefficient c) { return Monomial(std::move(c), 0); }

  const Coefficient& coeff() const noexcept { return coeff_; }
  const QExponent& exponent() const noexcept { return exponent_; }
  bool is_zero() const { return sgn(coeff_) == 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  Monomial operator-() const { return Monomial(-coeff_, exponent_); }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.coeff_ == b.coeff_ && a.exponent_ == b.exponent_;
  }
  /// Throws DomainError on 0^n with n < 0.
  Monomial pow(std::int64_t n) const;

  std::string str() const;

 private:
  Coefficient coeff_ = 0;
  QExponent exponent_ = 0;
};

struct Term {
  QExponent exponent;
  Coefficient coeff;
};

/// Valuation of a series: a finite exponent or +infinity when every stored
/// coefficient below the truncation order is zero.
struct Valuation {
  std::optional<QExponent> value;
  bool infinite() const { return !value.has_value(); }
};

/// First exponent at which two series disagree.
struct Mismatch {
  QExponent exponent;
  Coefficient lhs;
  Coefficient rhs;
};

struct Comparison {
  bool equal = true;
  std::optional<Mismatch> witness;
};

/// Immutable value. Terms are sorted by exponent with no zero coefficients;
/// every exponent is strictly below order(). A series without an order is
/// exact (a Laurent polynomial known completely).
class Series {
 public:
  Series() = default;  // exact zero

  static Series zero(std::optional<QExponent> order = std::nullopt);
  static Series one() { return from_monomial(Monomial(1, 0)); }
  static Series from_monomial(const Monomial& m, std::optional<QExponent> order = std::nullopt);
  /// Terms may be unsorted and contain duplicates or zeros; they are
  /// normalized and truncated at `order`.
  static Series from_terms(std::vector<Term> terms, std::optional<QExponent> order = std::nullopt);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  const std::optional<QExponent>& order() const noexcept { return order_; }
  bool is_exact() const noexcept { return !order_.has_value(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// True for an exact series with exactly one term (or the exact zero).
  bool is_monomial() const { return is_exact() && terms_.size() <= 1; }
  /// Throws TypeMismatch unless is_monomial().
  Monomial as_monomial() const;

  Coefficient coefficient(const QExponent& e) const;
  /// Least common multiple of all exponent denominators (1 when empty).
  std::int64_t exponent_denominator() const;

  /// Drops terms at or above `order` and tightens the order to it.
  Series truncated(const QExponent& order) const;

  Series operator-() const;
  friend bool operator==(const Series& a, const Series& b);

 private:
  std::vector<Term> terms_;
  std::optional<QExponent> order_;

  friend class SeriesBuilder;
};

/// Exclusive order of `a` as a comparable value where exact means +infinity.
bool order_below(const std::optional<QExponent>& a, const std::optional<QExponent>& b);
std::optional<QExponent> min_order(const std::optional<QExponent>& a,
                                   const std::optional<QExponent>& b);

Series add(const Series& a, const Series& b);
Series sub(const Series& a, const Series& b);
Series mul(const Series& a, const Series& b);
Series scale(const Series& a, const Coefficient& c);
Series mul_monomial(const Series& a, const Monomial& m);

/// Multiplicative inverse. An exact input that is not a monomial has an
/// infinite inverse, so `cap` bounds the result order; otherwise the result
/// order is a.order - 2*val(a), further limited by `cap` when given.
/// Throws ZeroSeries when a has no nonzero term below its order.
Series invert(const Series& a, std::optional<QExponent> cap = std::nullopt);
Series divide(const Series& a, const Series& b, std::optional<QExponent> cap = std::nullopt);
/// Integer power; negative powers go through invert with the given cap.
Series pow(const Series& a, std::int64_t n, std::optional<QExponent> cap = std::nullopt);

/// q -> q^k. Throws NonPositiveScale unless k > 0.
Series substitute_base(const Series& a, const QExponent& k);

Valuation valuation(const Series& a);

/// Coefficientwise comparison below `n`. Throws InsufficientOrder when either
/// input is truncated below n.
Comparison equal_up_to(const Series& a, const Series& b, const QExponent& n);

/// Exact value of the stored terms at q = q0 (0 < q0 < 1). Fractional
/// exponents need a rational root of q0; IrrationalPower otherwise.
Coefficient eval_at(const Series& a, const Coefficient& q0);

/// Plain-text form: one `exponent coefficient` line per term in increasing
/// exponent order, then `order <p/q>` or `order exact`.
std::string to_text(const Series& a);
Series parse_text(const std::string& text);

/// Compact human form like `1 - q + 2*q^(1/2) + O(q^5)`.
std::string to_pretty(const Series& a);

/// Exact rational r-th root when one exists.
std::optional<Coefficient> rational_root(const Coefficient& x, std::int64_t r);

}  // namespace qrr
