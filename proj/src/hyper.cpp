#include "qrr/hyper.hpp"

#include <sstream>

namespace qrr {

namespace {

Monomial shifted(const Monomial& a, std::int64_t k) { return a * Monomial::q_pow(k); }

// Some factor 1 - a q^n with n >= 0 is exactly zero.
bool vanishes_going_up(const std::vector<Monomial>& params) {
  for (const auto& a : params) {
    if (!a.is_zero() && a.coeff() == 1 && a.exponent().is_integer() && a.exponent() <= QExponent(0)) return true;
  }
  return false;
}

// Some factor 1 - b q^{m-1} with m <= 0 is exactly zero.
bool vanishes_going_down(const std::vector<Monomial>& params) {
  for (const auto& b : params) {
    if (!b.is_zero() && b.coeff() == 1 && b.exponent().is_integer() && b.exponent() >= QExponent(1)) return true;
  }
  return false;
}

std::string describe(const HyperSpec& spec) {
  std::ostringstream os;
  os << (spec.bilateral ? "psi(" : "phi(");
  for (std::size_t i = 0; i < spec.upper.size(); ++i) os << (i ? "," : "") << spec.upper[i].str();
  os << ";";
  for (std::size_t i = 0; i < spec.lower.size(); ++i) os << (i ? "," : "") << spec.lower[i].str();
  os << ";" << spec.z.str() << ")";
  return os.str();
}

}  // namespace

std::string formal_convergence_violation(const HyperSpec& spec) {
  const QExponent ez = spec.z.exponent();
  if (!spec.bilateral) {
    if (spec.z.is_zero() || vanishes_going_up(spec.upper)) return {};
    const std::int64_t c = 1 + static_cast<std::int64_t>(spec.lower.size()) - static_cast<std::int64_t>(spec.upper.size());
    if (c > 0) return {};
    if (c == 0 && ez > QExponent(0)) return {};
    if (c == 0) return "exponent(z) = " + ez.str() + " must be > 0";
    return "r > s + 1 diverges formally";
  }
  if (spec.upper.size() != spec.lower.size()) return "bilateral series need r = s";
  if (spec.z.is_zero()) return "bilateral series need z != 0";
  std::string out;
  if (!vanishes_going_up(spec.upper) && !(ez > QExponent(0))) {
    out = "positive side: exponent(z) = " + ez.str() + " must be > 0";
  }
  if (!vanishes_going_down(spec.lower)) {
    // Ratio t_{m-1}/t_m for m -> -inf has valuation slope (#b - #a) in m.
    std::int64_t slope = 0;
    QExponent constant = -ez;
    for (const auto& b : spec.lower) {
      if (b.is_zero()) continue;
      --slope;
      constant += b.exponent();
    }
    for (const auto& a : spec.upper) {
      if (a.is_zero()) continue;
      ++slope;
      constant -= a.exponent();
    }
    // m -> -inf: valuation ~ slope * |m| + constant
    bool ok = slope > 0 || (slope == 0 && constant > QExponent(0));
    if (!ok) {
      if (!out.empty()) out += "; ";
      out += "negative side: sum exponent(b) - sum exponent(a) - exponent(z) = " + constant.str() + " must be > 0";
    }
  }
  return out;
}

Series phi(const HyperSpec& spec, const QExponent& order, const TruncationProtocol& protocol) {
  if (spec.bilateral) fail(ErrorKind::DomainError, "phi called with a bilateral spec");
  std::string why = formal_convergence_violation(spec);
  if (!why.empty()) fail(ErrorKind::FormallyDivergent, describe(spec) + ": " + why);
  const std::int64_t c = 1 + static_cast<std::int64_t>(spec.lower.size()) - static_cast<std::int64_t>(spec.upper.size());
  RatioSeries s;
  s.label = describe(spec);
  s.step = [&spec, c](std::int64_t n) {
    RatioStep st;
    Monomial sign(c % 2 == 0 ? 1 : -1, 0);
    st.mono = spec.z * sign * Monomial::q_pow(QExponent(n * c));
    for (const auto& a : spec.upper) st.up.push_back(shifted(a, n));
    st.down.push_back(Monomial::q_pow(n + 1));
    for (const auto& b : spec.lower) st.down.push_back(shifted(b, n));
    return st;
  };
  try {
    return sum_ratio_series(s, order, protocol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ZeroDenominator) fail(ErrorKind::ZeroDenominator, describe(spec) + ": lower parameter hits q^{-k}");
    throw;
  }
}

Series psi_bilateral(const HyperSpec& spec, const QExponent& order, const TruncationProtocol& protocol) {
  if (!spec.bilateral) fail(ErrorKind::DomainError, "psi called with a unilateral spec");
  std::string why = formal_convergence_violation(spec);
  if (!why.empty()) fail(ErrorKind::FormallyDivergent, describe(spec) + ": " + why);

  RatioSeries up;
  up.label = describe(spec) + " (m >= 0)";
  up.step = [&spec](std::int64_t n) {
    RatioStep st;
    st.mono = spec.z;
    for (const auto& a : spec.upper) st.up.push_back(shifted(a, n));
    for (const auto& b : spec.lower) st.down.push_back(shifted(b, n));
    return st;
  };

  // t_{m-1} / t_m = prod(1 - b q^{m-1}) / prod(1 - a q^{m-1}) / z
  auto down_step = [&spec](std::int64_t m) {
    RatioStep st;
    st.mono = Monomial(1, 0) / spec.z;
    for (const auto& b : spec.lower) st.up.push_back(shifted(b, m - 1));
    for (const auto& a : spec.upper) st.down.push_back(shifted(a, m - 1));
    return st;
  };
  RatioSeries down;
  down.label = describe(spec) + " (m < 0)";
  down.initial = down_step(0);
  down.step = [down_step](std::int64_t j) { return down_step(-1 - j); };

  return add(sum_ratio_series(up, order, protocol), sum_ratio_series(down, order, protocol));
}

}  // namespace qrr
