#pragma once

// Named special functions: the Ramanujan function A_q, Stieltjes-Wigert
// polynomials, the Schur polynomials a_m, b_m and the three Jackson q-Bessel
// functions.

#include <cstdint>

#include "qrr/fps.hpp"
#include "qrr/term_sum.hpp"

namespace qrr {

/// A_{q^r}(z) = sum_n q^{r n^2} (-z)^n / (q^r; q^r)_n
Series ramanujan_aq(const Monomial& z, const QExponent& r, const QExponent& order,
                    const TruncationProtocol& protocol = {});

/// S_n(x; q) = sum_{k=0}^n q^{k^2} (-x)^k / ((q;q)_k (q;q)_{n-k})
Series stieltjes_wigert(std::int64_t n, const Monomial& x, const QExponent& order);

struct SchurPair {
  std::int64_t m = 0;
  Series a;  // exact polynomial
  Series b;  // exact polynomial
};

/// Built from X_{m+1} = X_m + q^{m-1} X_{m-1} with a_0 = 1, a_1 = 0,
/// b_0 = 0, b_1 = 1. Results are memoized; safe for concurrent callers.
SchurPair schur_pair(std::int64_t m);

/// Andrews' closed forms as sums of q-binomials; DomainError for m < 2,
/// where the strict q-binomial convention breaks the closed form.
SchurPair schur_closed(std::int64_t m);

enum class BesselKind { First = 1, Second = 2, Third = 3 };

struct BesselSpec {
  BesselKind kind = BesselKind::Second;
  QExponent nu = 0;
  Monomial z;
};

/// Jackson's I_nu^{(k)}(z; q), including the (q^{nu+1};q)_inf/(q;q)_inf
/// prefactor. Negative integer nu is handled through the cancelled form
/// (q^{nu+1+n};q)_inf / (q;q)_inf, which drops the vanishing leading terms.
Series qbessel(const BesselSpec& spec, const QExponent& order,
               const TruncationProtocol& protocol = {});

}  // namespace qrr
