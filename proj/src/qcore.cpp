#include "qrr/qcore.hpp"

#include <algorithm>

#include "qrr/dense.hpp"
#include "qrr/term_sum.hpp"

namespace qrr {

namespace {

void require_positive_base(const QExponent& r) {
  if (!(r > QExponent(0))) fail(ErrorKind::NonPositiveScale, "Pochhammer base exponent must be positive, got " + r.str());
}

std::int64_t lattice(const Monomial& a, const QExponent& r) {
  return std::lcm(a.exponent().den(), r.den());
}

Monomial factor(const Monomial& a, const QExponent& r, std::int64_t k) {
  return a * Monomial::q_pow(r * QExponent(k));
}

Series exactify(const DenseSeries& d) {
  Series s = d.to_series();
  return Series::from_terms(s.terms(), std::nullopt);
}

}  // namespace

std::optional<QExponent> poch_valuation(const Monomial& a, const QExponent& r, std::int64_t n) {
  require_positive_base(r);
  QExponent v = 0;
  if (n >= 0) {
    for (std::int64_t k = 0; k < n; ++k) {
      auto fv = binomial_valuation(factor(a, r, k));
      if (!fv) return std::nullopt;
      v += *fv;
    }
    return v;
  }
  for (std::int64_t k = 1; k <= -n; ++k) {
    Monomial f = factor(a, r, -k);
    auto fv = binomial_valuation(f);
    if (!fv) fail(ErrorKind::DivisionByZeroFactor, "(a;q)_n with negative n hits the vanishing factor 1 - " + f.str());
    v -= *fv;
  }
  return v;
}

Series poch_finite(const Monomial& a, const QExponent& r, std::int64_t n,
                   std::optional<QExponent> order) {
  require_positive_base(r);
  if (n == 0 || a.is_zero()) return order ? Series::one().truncated(*order) : Series::one();
  auto v = poch_valuation(a, r, n);
  if (!v) return Series();
  const std::int64_t den = lattice(a, r);
  const std::int64_t lo = (*v * QExponent(den)).num();

  if (n > 0) {
    // Total span of the exact Laurent polynomial.
    QExponent span = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      QExponent e = factor(a, r, k).exponent();
      span += e < QExponent(0) ? -e : e;
    }
    std::int64_t full = (span * QExponent(den)).num() + 1;
    std::int64_t len = full;
    if (order) len = std::min(len, (*order * QExponent(den)).ceil() - lo);
    if (len <= 0) return Series::zero(order);
    DenseSeries d = DenseSeries::one(den, static_cast<std::size_t>(len));
    // 1 - c q^{-e} = -c q^{-e} (1 - q^e / c): collect the monomials and
    // shift once at the end.
    Monomial shift(1, 0);
    for (std::int64_t k = 0; k < n; ++k) {
      Monomial f = factor(a, r, k);
      if (f.exponent() < QExponent(0)) {
        shift = shift * Monomial(-f.coeff(), f.exponent());
        f = Monomial(1 / f.coeff(), -f.exponent());
      }
      d.mul_binomial(f);
    }
    d.mul_monomial(shift);
    if (len == full) {
      Series exact = exactify(d);
      return order ? exact.truncated(*order) : exact;
    }
    return d.to_series().truncated(*order);
  }

  if (!order) fail(ErrorKind::DomainError, "negative-index Pochhammer symbols need a truncation order");
  std::int64_t len = (*order * QExponent(den)).ceil() - lo;
  if (len <= 0) return Series::zero(order);
  DenseSeries d = DenseSeries::one(den, static_cast<std::size_t>(len));
  for (std::int64_t k = 1; k <= -n; ++k) d.div_binomial(factor(a, r, -k));
  return d.to_series().truncated(*order);
}

Series poch_infinite(const Monomial& a, const QExponent& r, const QExponent& order) {
  require_positive_base(r);
  if (a.is_zero()) return Series::one().truncated(order);
  const QExponent& e = a.exponent();
  if (a.coeff() == 1 && !(e > QExponent(0))) {
    QExponent k = -e / r;
    if (k.is_integer()) return Series();  // factor k is exactly 1 - 1
  }
  if (!(e > QExponent(0))) {
    fail(ErrorKind::FormallyDivergent, "(" + a.str() + "; q^" + r.str() + ")_inf needs a positive exponent");
  }
  const std::int64_t den = lattice(a, r);
  const std::int64_t len = (order * QExponent(den)).ceil();
  if (len <= 0) return Series::zero(order);
  DenseSeries d = DenseSeries::one(den, static_cast<std::size_t>(len));
  for (std::int64_t k = 0;; ++k) {
    Monomial f = factor(a, r, k);
    if (!(f.exponent() < order)) break;
    d.mul_binomial(f);
  }
  return d.to_series().truncated(order);
}

Series poch_multi(std::span<const Monomial> args, const QExponent& r, PochIndex n,
                  std::optional<QExponent> order) {
  if (n.is_infinite() && !order) fail(ErrorKind::DomainError, "infinite Pochhammer products need a truncation order");
  // Laurent factors lower the order of the product; compensate up front.
  std::vector<QExponent> vals;
  QExponent negative_part = 0;
  bool zero = false;
  for (const auto& a : args) {
    std::optional<QExponent> v = QExponent(0);
    if (!n.is_infinite()) v = poch_valuation(a, r, *n.finite);
    if (!v) zero = true;
    vals.push_back(v.value_or(QExponent(0)));
    if (v && *v < QExponent(0)) negative_part += *v;
  }
  if (zero) return Series();
  Series result = Series::one();
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::optional<QExponent> need;
    if (order) need = *order - (negative_part - std::min(vals[i], QExponent(0)));
    Series f = n.is_infinite() ? poch_infinite(args[i], r, *need) : poch_finite(args[i], r, *n.finite, need);
    if (f.is_exact() && f.is_zero()) return Series();
    result = mul(result, f);
  }
  return order ? result.truncated(*order) : result;
}

Series qbinomial(std::int64_t n, std::int64_t k, const QExponent& r, std::optional<QExponent> order) {
  require_positive_base(r);
  if (n < 0 || k < 0 || k > n) return order ? Series::zero(order) : Series();
  k = std::min(k, n - k);
  const std::int64_t den = r.den();
  const std::int64_t degree = (r * QExponent(k * (n - k)) * QExponent(den)).num();
  std::int64_t full = degree + 1;
  std::int64_t len = full;
  if (order) len = std::min(len, (*order * QExponent(den)).ceil());
  if (len <= 0) return Series::zero(order);
  DenseSeries d = DenseSeries::one(den, static_cast<std::size_t>(len));
  for (std::int64_t i = n - k + 1; i <= n; ++i) d.mul_binomial(Monomial::q_pow(r * QExponent(i)));
  for (std::int64_t i = 1; i <= k; ++i) d.div_binomial(Monomial::q_pow(r * QExponent(i)));
  if (len == full) {
    Series exact = exactify(d);
    return order ? exact.truncated(*order) : exact;
  }
  return d.to_series().truncated(*order);
}

}  // namespace qrr
