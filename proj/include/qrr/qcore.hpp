#pragma once

// q-Pochhammer symbols and Gaussian binomials over an arbitrary rational
// base q^r. `order` is the exclusive truncation bound of the result; the
// finite products accept nullopt and then return the exact Laurent
// polynomial.

#include <optional>
#include <span>

#include "qrr/fps.hpp"

namespace qrr {

/// Index of a Pochhammer symbol: a finite integer or infinity.
struct PochIndex {
  std::optional<std::int64_t> finite;  // nullopt means infinity

  static PochIndex infinity() { return {}; }
  static PochIndex of(std::int64_t n) { return {n}; }
  bool is_infinite() const { return !finite.has_value(); }
};

/// (a; q^r)_n for integer n. Negative n means 1 / (a q^{rn}; q^r)_{-n} and
/// throws DivisionByZeroFactor when one of those factors vanishes.
Series poch_finite(const Monomial& a, const QExponent& r, std::int64_t n,
                   std::optional<QExponent> order);

/// (a; q^r)_inf. Exactly zero when some factor vanishes; otherwise requires
/// a.exponent > 0 and throws FormallyDivergent.
Series poch_infinite(const Monomial& a, const QExponent& r, const QExponent& order);

/// (a_1, ..., a_k; q^r)_n
Series poch_multi(std::span<const Monomial> args, const QExponent& r, PochIndex n,
                  std::optional<QExponent> order);

/// Valuation of (a; q^r)_n, or nullopt when the symbol is exactly zero.
/// Throws like poch_finite for vanishing denominator factors.
std::optional<QExponent> poch_valuation(const Monomial& a, const QExponent& r, std::int64_t n);

/// [n choose k] in base q^r; zero unless 0 <= k <= n.
Series qbinomial(std::int64_t n, std::int64_t k, const QExponent& r,
                 std::optional<QExponent> order = std::nullopt);

}  // namespace qrr
