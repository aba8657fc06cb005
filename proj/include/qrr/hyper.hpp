#pragma once

// Basic hypergeometric series with monomial parameters, base q.
//
//   r phi s (a; b; q, z) = sum_{n>=0} (a_1..a_r;q)_n / (q, b_1..b_s;q)_n
//                          ((-1)^n q^{n(n-1)/2})^{1+s-r} z^n
//   r psi r (a; b; q, z) = sum_{n in Z} (a_1..a_r;q)_n / (b_1..b_r;q)_n z^n
//
// Analytic convergence is replaced by formal convergence: the valuation of
// the n-th term must tend to +infinity, which for monomial parameters is a
// strict inequality between exponents (larger exponent = smaller size).

#include <string>
#include <vector>

#include "qrr/fps.hpp"
#include "qrr/term_sum.hpp"

namespace qrr {

struct HyperSpec {
  std::vector<Monomial> upper;
  std::vector<Monomial> lower;
  Monomial z;
  bool bilateral = false;
};

/// Empty when the series converges formally, otherwise the violated
/// condition (for psi, mentions which side failed).
std::string formal_convergence_violation(const HyperSpec& spec);

Series phi(const HyperSpec& spec, const QExponent& order, const TruncationProtocol& protocol = {});
Series psi_bilateral(const HyperSpec& spec, const QExponent& order,
                     const TruncationProtocol& protocol = {});

}  // namespace qrr
