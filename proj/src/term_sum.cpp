#include "qrr/term_sum.hpp"

#include <algorithm>

#include "qrr/dense.hpp"

namespace qrr {

std::optional<QExponent> binomial_valuation(const Monomial& m) {
  if (m.is_zero()) return QExponent(0);
  const QExponent& e = m.exponent();
  if (e > QExponent(0)) return QExponent(0);
  if (e < QExponent(0)) return e;
  if (m.coeff() == 1) return std::nullopt;
  return QExponent(0);
}

namespace {

struct StepInfo {
  bool vanishes = false;  // some multiplied factor is exactly zero
  QExponent valuation = 0;
};

StepInfo inspect(const RatioStep& s, const std::string& label) {
  StepInfo info;
  if (s.mono.is_zero()) {
    info.vanishes = true;
    return info;
  }
  info.valuation = s.mono.exponent();
  for (const auto& m : s.up) {
    auto v = binomial_valuation(m);
    if (!v) {
      info.vanishes = true;
      return info;
    }
    info.valuation += *v;
  }
  for (const auto& m : s.down) {
    auto v = binomial_valuation(m);
    if (!v) fail(ErrorKind::ZeroDenominator, label + ": vanishing denominator factor 1 - " + m.str());
    info.valuation -= *v;
  }
  return info;
}

std::int64_t step_denominator(const RatioStep& s) {
  std::int64_t d = s.mono.exponent().den();
  for (const auto& m : s.up) d = std::lcm(d, m.exponent().den());
  for (const auto& m : s.down) d = std::lcm(d, m.exponent().den());
  return d;
}

void apply(DenseSeries& t, const RatioStep& s) {
  t.mul_monomial(s.mono);
  for (const auto& m : s.up) t.mul_binomial(m);
  for (const auto& m : s.down) t.div_binomial(m);
}

}  // namespace

Series sum_ratio_series(const RatioSeries& series, const QExponent& order,
                        const TruncationProtocol& protocol) {
  StepInfo first = inspect(series.initial, series.label);
  if (first.vanishes) return Series::zero(order);

  // Pass 1: valuations only, to fix the summation range.
  std::vector<RatioStep> steps;       // steps[n] takes t_n to t_{n+1}
  std::vector<QExponent> valuations;  // of t_n
  std::vector<char> included;
  valuations.push_back(first.valuation);
  included.push_back(first.valuation < order);
  int streak = included.back() ? 0 : 1;
  std::int64_t n = 0;
  while (true) {
    if (series.last && n >= *series.last) break;
    if (!series.last && streak >= protocol.window) break;
    if (n + 1 >= protocol.max_terms) {
      fail(ErrorKind::MaxTermsExceeded, series.label + ": term cap of " +
                                            std::to_string(protocol.max_terms) + " reached");
    }
    RatioStep s = series.step(n);
    StepInfo info = inspect(s, series.label);
    if (info.vanishes) break;  // every later term is exactly zero
    QExponent v = valuations.back() + info.valuation;
    bool in = v < order;
    if (in) {
      streak = 0;
    } else if (v >= valuations.back()) {
      ++streak;
    } else {
      streak = 0;
    }
    steps.push_back(std::move(s));
    valuations.push_back(v);
    included.push_back(in);
    ++n;
  }
  // Drop trailing excluded terms; they contribute nothing.
  while (!included.empty() && !included.back()) {
    included.pop_back();
    valuations.pop_back();
    if (!steps.empty()) steps.pop_back();
  }
  if (included.empty()) return Series::zero(order);
  steps.resize(valuations.size() - 1);

  std::int64_t den = std::lcm(step_denominator(series.initial), order.den());
  for (const auto& s : steps) den = std::lcm(den, step_denominator(s));
  for (const auto& v : valuations) den = std::lcm(den, v.den());

  const std::int64_t end = (order * QExponent(den)).ceil();
  std::vector<std::int64_t> suffix_min(valuations.size());
  for (std::size_t i = valuations.size(); i-- > 0;) {
    std::int64_t vi = (valuations[i] * QExponent(den)).num();
    if (!included[i]) vi = end;
    suffix_min[i] = i + 1 < valuations.size() ? std::min(vi, suffix_min[i + 1]) : vi;
  }
  const std::int64_t lowest = suffix_min[0];

  DenseSeries acc(den, lowest, static_cast<std::size_t>(end - lowest));
  DenseSeries term = DenseSeries::one(den, static_cast<std::size_t>(end - lowest));
  apply(term, series.initial);
  for (std::size_t i = 0; i < valuations.size(); ++i) {
    if (i > 0) apply(term, steps[i - 1]);
    if (included[i]) acc.accumulate(term);
    if (i + 1 < valuations.size()) {
      // Relative precision still needed by the remaining terms.
      std::int64_t need = end - suffix_min[i + 1];
      term.shrink_to(static_cast<std::size_t>(std::max<std::int64_t>(need, 0)));
    }
  }
  return acc.to_series().truncated(order);
}

}  // namespace qrr
