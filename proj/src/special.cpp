#include "qrr/special.hpp"

#include <mutex>
#include <vector>

#include "qrr/qcore.hpp"

namespace qrr {

Series ramanujan_aq(const Monomial& z, const QExponent& r, const QExponent& order,
                    const TruncationProtocol& protocol) {
  if (!(r > QExponent(0))) fail(ErrorKind::NonPositiveScale, "A_{q^r} needs r > 0");
  RatioSeries s;
  s.label = "A_q(" + z.str() + ")";
  s.step = [z, r](std::int64_t n) {
    RatioStep st;
    st.mono = -z * Monomial::q_pow(r * QExponent(2 * n + 1));
    st.down = {Monomial::q_pow(r * QExponent(n + 1))};
    return st;
  };
  return sum_ratio_series(s, order, protocol);
}

Series stieltjes_wigert(std::int64_t n, const Monomial& x, const QExponent& order) {
  if (n < 0) fail(ErrorKind::DomainError, "Stieltjes-Wigert degree must be non-negative");
  RatioSeries s;
  s.label = "S_" + std::to_string(n) + "(" + x.str() + ")";
  for (std::int64_t i = 1; i <= n; ++i) s.initial.down.push_back(Monomial::q_pow(i));
  s.last = n;
  s.step = [x, n](std::int64_t k) {
    RatioStep st;
    st.mono = -x * Monomial::q_pow(2 * k + 1);
    st.up = {Monomial::q_pow(n - k)};
    st.down = {Monomial::q_pow(k + 1)};
    return st;
  };
  return sum_ratio_series(s, order);
}

namespace {

std::mutex schur_mutex;
std::vector<SchurPair> schur_memo;

}  // namespace

SchurPair schur_pair(std::int64_t m) {
  if (m < 0) fail(ErrorKind::DomainError, "Schur polynomial index must be non-negative");
  std::lock_guard<std::mutex> lock(schur_mutex);
  if (schur_memo.empty()) {
    schur_memo.push_back({0, Series::one(), Series()});
    schur_memo.push_back({1, Series(), Series::one()});
  }
  while (static_cast<std::int64_t>(schur_memo.size()) <= m) {
    std::int64_t k = static_cast<std::int64_t>(schur_memo.size()) - 1;  // build k + 1
    const SchurPair& cur = schur_memo[k];
    const SchurPair& prev = schur_memo[k - 1];
    Monomial shift = Monomial::q_pow(k - 1);
    SchurPair next{k + 1, add(cur.a, mul_monomial(prev.a, shift)), add(cur.b, mul_monomial(prev.b, shift))};
    schur_memo.push_back(std::move(next));
  }
  return schur_memo[m];
}

SchurPair schur_closed(std::int64_t m) {
  if (m < 2) fail(ErrorKind::DomainError, "closed Schur forms hold for m >= 2, got " + std::to_string(m));
  Series a, b;
  for (std::int64_t j = 0; 2 * j <= m; ++j) {
    a = add(a, mul_monomial(qbinomial(m - j - 2, j, 1), Monomial::q_pow(j * j + j)));
    b = add(b, mul_monomial(qbinomial(m - j - 1, j, 1), Monomial::q_pow(j * j)));
  }
  return {m, a, b};
}

namespace {

// Exponent of the kind-specific q-power q^{e(n)} in the n-th term, and its
// increment from n to n + 1.
QExponent kind_exponent(BesselKind kind, const QExponent& nu, std::int64_t n) {
  switch (kind) {
    case BesselKind::First: return 0;
    case BesselKind::Second: return QExponent(n) * (QExponent(n) + nu);
    case BesselKind::Third: return QExponent(n * (n - 1), 2);
  }
  return 0;
}

Monomial fractional_power(const Monomial& w, const QExponent& nu) {
  if (w.is_zero()) {
    if (nu < QExponent(0)) fail(ErrorKind::DomainError, "(z/2)^nu with z = 0 and nu < 0");
    return nu.is_zero() ? Monomial(1, 0) : Monomial();
  }
  auto root = rational_root(w.coeff(), nu.den());
  if (!root) {
    fail(ErrorKind::IrrationalPower, "(" + w.str() + ")^(" + nu.str() + ") has an irrational coefficient");
  }
  Monomial base(*root, w.exponent() / QExponent(nu.den()));
  return base.pow(nu.num());
}

}  // namespace

Series qbessel(const BesselSpec& spec, const QExponent& order, const TruncationProtocol& protocol) {
  const BesselKind kind = spec.kind;
  const QExponent nu = spec.nu;
  const Monomial w = spec.z / Monomial(2, 0);
  const std::string label = "I^(" + std::to_string(static_cast<int>(kind)) + ")_" + nu.str();

  if (w.is_zero()) {
    if (nu < QExponent(0)) fail(ErrorKind::DomainError, label + ": z = 0 needs nu >= 0");
    if (!nu.is_zero()) return Series();
    return Series::one().truncated(order);  // (q;q)_inf / (q;q)_inf
  }
  if (kind == BesselKind::First && !(w.exponent() > QExponent(0))) {
    fail(ErrorKind::FormallyDivergent, label + ": first-kind series needs a positive exponent in z");
  }

  const QExponent shifted = nu + QExponent(1);
  RatioSeries s;
  s.label = label;
  if (shifted > QExponent(0)) {
    s.initial.mono = fractional_power(w, nu);
    s.step = [kind, nu, w](std::int64_t n) {
      RatioStep st;
      st.mono = w * w * Monomial::q_pow(kind_exponent(kind, nu, n + 1) - kind_exponent(kind, nu, n));
      st.down = {Monomial::q_pow(n + 1), Monomial::q_pow(nu + QExponent(n + 1))};
      return st;
    };
    Series sum = sum_ratio_series(s, order, protocol);
    Valuation v = valuation(sum);
    QExponent need = order;
    if (!v.infinite() && *v.value < QExponent(0)) need = order - *v.value;
    Series prefactor = mul(poch_infinite(Monomial::q_pow(shifted), 1, need),
                           invert(poch_infinite(Monomial::q_pow(1), 1, need), need));
    return mul(prefactor, sum).truncated(order);
  }
  if (!nu.is_integer()) {
    fail(ErrorKind::FormallyDivergent, label + ": (q^{nu+1};q)_inf with non-integral nu + 1 <= 0");
  }
  // nu = -N0: terms n < N0 vanish; the rest is sum_j of
  // q^{e(N0+j)} w^{nu + 2(N0+j)} / ((q;q)_{N0+j} (q;q)_j).
  const std::int64_t n0 = -nu.num();
  s.initial.mono = Monomial::q_pow(kind_exponent(kind, nu, n0)) * w.pow(n0);
  for (std::int64_t i = 1; i <= n0; ++i) s.initial.down.push_back(Monomial::q_pow(i));
  s.step = [kind, nu, w, n0](std::int64_t j) {
    RatioStep st;
    std::int64_t n = n0 + j;
    st.mono = w * w * Monomial::q_pow(kind_exponent(kind, nu, n + 1) - kind_exponent(kind, nu, n));
    st.down = {Monomial::q_pow(n + 1), Monomial::q_pow(j + 1)};
    return st;
  };
  return sum_ratio_series(s, order, protocol);
}

}  // namespace qrr
