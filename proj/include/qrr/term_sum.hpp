#pragma once

// Summation of series whose consecutive terms differ by a product of exact
// binomials: t_{n+1} = t_n * mono * prod(1 - up_i) / prod(1 - down_j).
// Term valuations are known in closed form, which drives both the
// truncation protocol and the working precision.

#include <functional>
#include <optional>
#include <vector>

#include "qrr/fps.hpp"

namespace qrr {

/// Shared truncation protocol for infinite sums: a term is included while its
/// valuation is below the target order; summation stops after `window`
/// consecutive terms at or above the order with non-decreasing valuation.
struct TruncationProtocol {
  int window = 4;
  std::int64_t max_terms = 10000;
};

struct RatioStep {
  Monomial mono{1, 0};
  std::vector<Monomial> up;    // factors (1 - m) multiplied in
  std::vector<Monomial> down;  // factors (1 - m) divided out
};

/// Valuation of the exact binomial 1 - m, or nullopt when it vanishes.
std::optional<QExponent> binomial_valuation(const Monomial& m);

struct RatioSeries {
  RatioStep initial;                            // t_0 = initial applied to 1
  std::function<RatioStep(std::int64_t)> step;  // t_{n+1} / t_n
  std::optional<std::int64_t> last;             // inclusive bound for finite sums
  std::string label = "series";                 // used in error messages
};

/// Sum to the given exclusive order. Throws ZeroDenominator when a divided
/// factor vanishes and MaxTermsExceeded when the protocol does not settle.
Series sum_ratio_series(const RatioSeries& series, const QExponent& order,
                        const TruncationProtocol& protocol = {});

}  // namespace qrr
