#include "qrr/dense.hpp"

namespace qrr {

std::int64_t DenseSeries::index_of(const QExponent& e) const {
  QExponent scaled = e * QExponent(den_);
  if (!scaled.is_integer()) fail(ErrorKind::DomainError, "exponent " + e.str() + " is off the working lattice");
  return scaled.num();
}

void DenseSeries::scale(const Coefficient& c) {
  if (sgn(c) == 0) {
    zero_ = true;
    for (auto& x : coeffs_) x = 0;
    return;
  }
  if (c == 1) return;
  for (auto& x : coeffs_) {
    if (sgn(x) != 0) x *= c;
  }
}

void DenseSeries::mul_monomial(const Monomial& m) {
  scale(m.coeff());
  if (!m.is_zero()) lo_ += index_of(m.exponent());
}

void DenseSeries::mul_binomial(const Monomial& m) {
  if (m.is_zero() || zero_) return;
  std::int64_t e = index_of(m.exponent());
  if (e == 0) {
    Coefficient f = 1 - m.coeff();
    scale(f);
    return;
  }
  if (e < 0) {
    // 1 - c q^e = -c q^e (1 - c^{-1} q^{-e})
    scale(-m.coeff());
    lo_ += e;
    mul_binomial(Monomial(1 / m.coeff(), -m.exponent()));
    return;
  }
  const std::size_t shift = static_cast<std::size_t>(e);
  const Coefficient& c = m.coeff();
  Coefficient prod;
  for (std::size_t i = coeffs_.size(); i-- > shift;) {
    const Coefficient& src = coeffs_[i - shift];
    if (sgn(src) == 0) continue;
    mpq_mul(prod.get_mpq_t(), c.get_mpq_t(), src.get_mpq_t());
    mpq_sub(coeffs_[i].get_mpq_t(), coeffs_[i].get_mpq_t(), prod.get_mpq_t());
  }
}

void DenseSeries::div_binomial(const Monomial& m) {
  if (m.is_zero()) return;
  std::int64_t e = index_of(m.exponent());
  if (e == 0) {
    Coefficient f = 1 - m.coeff();
    if (sgn(f) == 0) fail(ErrorKind::ZeroDenominator, "division by the vanishing factor 1 - " + m.str());
    if (!zero_) scale(1 / f);
    return;
  }
  if (zero_) return;
  if (e < 0) {
    scale(-1 / m.coeff());
    lo_ -= e;
    div_binomial(Monomial(1 / m.coeff(), -m.exponent()));
    return;
  }
  const std::size_t shift = static_cast<std::size_t>(e);
  const Coefficient& c = m.coeff();
  Coefficient prod;
  for (std::size_t i = shift; i < coeffs_.size(); ++i) {
    const Coefficient& src = coeffs_[i - shift];
    if (sgn(src) == 0) continue;
    mpq_mul(prod.get_mpq_t(), c.get_mpq_t(), src.get_mpq_t());
    mpq_add(coeffs_[i].get_mpq_t(), coeffs_[i].get_mpq_t(), prod.get_mpq_t());
  }
}

void DenseSeries::accumulate(const DenseSeries& other) {
  if (other.zero_) return;
  std::int64_t start = std::max(lo_, other.lo_);
  std::int64_t stop = end();
  for (std::int64_t k = start; k < stop; ++k) {
    if (k >= other.end()) break;
    const Coefficient& src = other.at(k);
    if (sgn(src) != 0) at(k) += src;
  }
}

Series DenseSeries::to_series() const {
  std::vector<Term> out;
  if (!zero_) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (sgn(coeffs_[i]) != 0) out.push_back({QExponent(lo_ + static_cast<std::int64_t>(i), den_), coeffs_[i]});
    }
  }
  return Series::from_terms(std::move(out), QExponent(end(), den_));
}

}  // namespace qrr
