#pragma once

// Fixed-relative-precision dense series on the lattice (1/den)Z. Internal to
// the engine: multiplying or dividing by exact binomials preserves the number
// of known coefficients, which is what the term-ratio summation relies on.

#include <cstddef>
#include <vector>

#include "qrr/fps.hpp"

namespace qrr {

class DenseSeries {
 public:
  /// `len` coefficients starting at exponent lo/den, all zero.
  DenseSeries(std::int64_t den, std::int64_t lo, std::size_t len)
      : den_(den), lo_(lo), coeffs_(len) {}

  static DenseSeries one(std::int64_t den, std::size_t len) {
    DenseSeries s(den, 0, len);
    if (len > 0) s.coeffs_[0] = 1;
    return s;
  }

  std::int64_t den() const noexcept { return den_; }
  /// Lattice index of the first stored coefficient.
  std::int64_t lo() const noexcept { return lo_; }
  /// Exclusive lattice index up to which coefficients are known.
  std::int64_t end() const noexcept { return lo_ + static_cast<std::int64_t>(coeffs_.size()); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool exactly_zero() const noexcept { return zero_; }
  const Coefficient& at(std::int64_t index) const { return coeffs_[static_cast<std::size_t>(index - lo_)]; }
  Coefficient& at(std::int64_t index) { return coeffs_[static_cast<std::size_t>(index - lo_)]; }

  /// Lattice index of e; throws DomainError when e is off the lattice.
  std::int64_t index_of(const QExponent& e) const;

  void scale(const Coefficient& c);
  void mul_monomial(const Monomial& m);
  /// *= (1 - m)
  void mul_binomial(const Monomial& m);
  /// /= (1 - m); throws ZeroDenominator when 1 - m is exactly zero.
  void div_binomial(const Monomial& m);

  /// Keeps only the first `len` coefficients.
  void shrink_to(std::size_t len) {
    if (len < coeffs_.size()) coeffs_.resize(len);
  }

  /// Adds `other` into this on the overlapping index range. `other` must
  /// start at or after lo() and be known at least up to end().
  void accumulate(const DenseSeries& other);

  Series to_series() const;

 private:
  std::int64_t den_;
  std::int64_t lo_;
  std::vector<Coefficient> coeffs_;
  bool zero_ = false;
};

}  // namespace qrr
