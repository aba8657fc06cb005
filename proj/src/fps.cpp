#include "qrr/fps.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "qrr/dense.hpp"

namespace qrr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroSeries: return "ZeroSeries";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::InsufficientOrder: return "InsufficientOrder";
    case ErrorKind::IrrationalPower: return "IrrationalPower";
    case ErrorKind::DivisionByZeroFactor: return "DivisionByZeroFactor";
    case ErrorKind::FormallyDivergent: return "FormallyDivergent";
    case ErrorKind::MaxTermsExceeded: return "MaxTermsExceeded";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Overflow: return "Overflow";
  }
  return "Unknown";
}

QExponent QExponent::parse(const std::string& text) {
  try {
    std::size_t slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      std::int64_t v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return QExponent(v);
    }
    std::string ns = text.substr(0, slash), ds = text.substr(slash + 1);
    std::int64_t n = std::stoll(ns, &used);
    if (used != ns.size()) throw std::invalid_argument(text);
    std::int64_t d = std::stoll(ds, &used);
    if (used != ds.size()) throw std::invalid_argument(text);
    return QExponent(n, d);
  } catch (const std::logic_error&) {
    fail(ErrorKind::DomainError, "malformed exponent '" + text + "'");
  }
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(Coefficient coeff, QExponent exponent)
    : coeff_(std::move(coeff)), exponent_(exponent) {
  coeff_.canonicalize();
  if (sgn(coeff_) == 0) exponent_ = 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return Monomial(a.coeff_ * b.coeff_, a.exponent_ + b.exponent_);
}

Monomial operator/(const Monomial& a, const Monomial& b) {
  if (b.is_zero()) fail(ErrorKind::ZeroSeries, "division by the zero monomial");
  if (a.is_zero()) return {};
  return Monomial(a.coeff_ / b.coeff_, a.exponent_ - b.exponent_);
}

Monomial Monomial::pow(std::int64_t n) const {
  if (n == 0) return Monomial(1, 0);
  if (is_zero()) {
    if (n < 0) fail(ErrorKind::DomainError, "zero monomial to a negative power");
    return {};
  }
  Coefficient c = 1;
  Coefficient base = coeff_;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  while (k != 0) {
    if (k & 1u) c *= base;
    base *= base;
    k >>= 1;
  }
  if (n < 0) c = 1 / c;
  return Monomial(c, exponent_ * QExponent(n));
}

std::string Monomial::str() const {
  if (is_zero()) return "0";
  std::string c = coeff_.get_str();
  if (exponent_.is_zero()) return c;
  std::string qp = exponent_ == QExponent(1)
                       ? "q"
                       : (exponent_.is_integer() ? "q^" + exponent_.str() : "q^(" + exponent_.str() + ")");
  if (coeff_ == 1) return qp;
  if (coeff_ == -1) return "-" + qp;
  return c + "*" + qp;
}

// ------------------------------------------------------------------ Series

bool order_below(const std::optional<QExponent>& a, const std::optional<QExponent>& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

std::optional<QExponent> min_order(const std::optional<QExponent>& a,
                                   const std::optional<QExponent>& b) {
  return order_below(a, b) ? a : b;
}

Series Series::zero(std::optional<QExponent> order) {
  Series s;
  s.order_ = order;
  return s;
}

Series Series::from_monomial(const Monomial& m, std::optional<QExponent> order) {
  Series s;
  s.order_ = order;
  if (!m.is_zero() && (!order || m.exponent() < *order)) s.terms_.push_back({m.exponent(), m.coeff()});
  return s;
}

Series Series::from_terms(std::vector<Term> terms, std::optional<QExponent> order) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  Series s;
  s.order_ = order;
  for (auto& t : terms) {
    if (order && !(t.exponent < *order)) break;
    t.coeff.canonicalize();
    if (!s.terms_.empty() && s.terms_.back().exponent == t.exponent) {
      s.terms_.back().coeff += t.coeff;
    } else {
      s.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(s.terms_, [](const Term& t) { return sgn(t.coeff) == 0; });
  return s;
}

Monomial Series::as_monomial() const {
  if (!is_monomial()) fail(ErrorKind::TypeMismatch, "expected a monomial, got " + to_pretty(*this));
  if (terms_.empty()) return {};
  return Monomial(terms_[0].coeff, terms_[0].exponent);
}

Coefficient Series::coefficient(const QExponent& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [](const Term& t, const QExponent& x) { return t.exponent < x; });
  if (it != terms_.end() && it->exponent == e) return it->coeff;
  return 0;
}

std::int64_t Series::exponent_denominator() const {
  std::int64_t d = 1;
  for (const auto& t : terms_) d = std::lcm(d, t.exponent.den());
  return d;
}

Series Series::truncated(const QExponent& order) const {
  if (order_ && !(order < *order_)) return *this;
  Series s;
  s.order_ = order;
  for (const auto& t : terms_) {
    if (!(t.exponent < order)) break;
    s.terms_.push_back(t);
  }
  return s;
}

Series Series::operator-() const {
  Series s = *this;
  for (auto& t : s.terms_) t.coeff = -t.coeff;
  return s;
}

bool operator==(const Series& a, const Series& b) {
  if (a.order_ != b.order_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].exponent != b.terms_[i].exponent || a.terms_[i].coeff != b.terms_[i].coeff)
      return false;
  }
  return true;
}

Series add(const Series& a, const Series& b) {
  std::optional<QExponent> order = min_order(a.order(), b.order());
  std::vector<Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  auto below = [&](const QExponent& e) { return !order || e < *order; };
  std::size_t i = 0, j = 0;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].exponent < tb[j].exponent)) {
      if (below(ta[i].exponent)) out.push_back(ta[i]);
      ++i;
    } else if (i == ta.size() || tb[j].exponent < ta[i].exponent) {
      if (below(tb[j].exponent)) out.push_back(tb[j]);
      ++j;
    } else {
      if (below(ta[i].exponent)) {
        Coefficient c = ta[i].coeff + tb[j].coeff;
        if (sgn(c) != 0) out.push_back({ta[i].exponent, std::move(c)});
      }
      ++i;
      ++j;
    }
  }
  return Series::from_terms(std::move(out), order);
}

Series sub(const Series& a, const Series& b) { return add(a, -b); }

Series scale(const Series& a, const Coefficient& c) {
  if (sgn(c) == 0) return Series::zero(a.order());
  std::vector<Term> out = a.terms();
  for (auto& t : out) t.coeff *= c;
  return Series::from_terms(std::move(out), a.order());
}

Series mul_monomial(const Series& a, const Monomial& m) {
  if (m.is_zero()) return a.is_exact() ? Series() : Series::zero(std::nullopt);
  std::vector<Term> out = a.terms();
  for (auto& t : out) {
    t.coeff *= m.coeff();
    t.exponent += m.exponent();
  }
  std::optional<QExponent> order = a.order();
  if (order) *order += m.exponent();
  return Series::from_terms(std::move(out), order);
}

Valuation valuation(const Series& a) {
  if (a.terms().empty()) return {};
  return {a.terms().front().exponent};
}

Series mul(const Series& a, const Series& b) {
  if ((a.is_exact() && a.is_zero()) || (b.is_exact() && b.is_zero())) return Series();
  Valuation va = valuation(a), vb = valuation(b);
  std::optional<QExponent> order;
  if (va.infinite() && vb.infinite()) {
    // Both truncated zeros.
    QExponent x = *a.order(), y = *b.order();
    order = std::min({x, y, x + y});
  } else {
    if (a.order() && !vb.infinite()) order = min_order(order, *a.order() + *vb.value);
    if (b.order() && !va.infinite()) order = min_order(order, *b.order() + *va.value);
  }
  if (a.is_zero() || b.is_zero()) return Series::zero(order);
  if (a.is_monomial() || b.is_monomial()) {
    Series r = a.is_monomial() ? mul_monomial(b, a.as_monomial()) : mul_monomial(a, b.as_monomial());
    return order ? r.truncated(*order) : r;
  }

  std::int64_t d = std::lcm(a.exponent_denominator(), b.exponent_denominator());
  auto idx = [d](const QExponent& e) { return (e * QExponent(d)).num(); };
  std::int64_t lo = idx(a.terms().front().exponent) + idx(b.terms().front().exponent);
  std::int64_t hi = idx(a.terms().back().exponent) + idx(b.terms().back().exponent) + 1;
  if (order) hi = std::min(hi, (*order * QExponent(d)).ceil());
  if (hi <= lo) return Series::zero(order);
  std::vector<Coefficient> acc(static_cast<std::size_t>(hi - lo));
  std::vector<std::int64_t> ib;
  ib.reserve(b.terms().size());
  for (const auto& t : b.terms()) ib.push_back(idx(t.exponent));
  Coefficient prod;
  for (const auto& ta : a.terms()) {
    std::int64_t ia = idx(ta.exponent);
    for (std::size_t j = 0; j < ib.size(); ++j) {
      std::int64_t k = ia + ib[j];
      if (k >= hi) break;
      mpq_mul(prod.get_mpq_t(), ta.coeff.get_mpq_t(), b.terms()[j].coeff.get_mpq_t());
      mpq_add(acc[k - lo].get_mpq_t(), acc[k - lo].get_mpq_t(), prod.get_mpq_t());
    }
  }
  std::vector<Term> out;
  for (std::int64_t k = lo; k < hi; ++k) {
    if (sgn(acc[k - lo]) != 0) out.push_back({QExponent(k, d), std::move(acc[k - lo])});
  }
  return Series::from_terms(std::move(out), order);
}

Series invert(const Series& a, std::optional<QExponent> cap) {
  if (a.is_zero()) fail(ErrorKind::ZeroSeries, "cannot invert a series with no nonzero term below its order");
  const Term& lead = a.terms().front();
  QExponent v = lead.exponent;
  if (a.is_monomial()) {
    Series r = Series::from_monomial(Monomial(1 / lead.coeff, -v));
    return cap ? r.truncated(*cap) : r;
  }
  std::optional<QExponent> order;
  if (a.order()) order = *a.order() - v - v;
  order = min_order(order, cap);
  if (!order) fail(ErrorKind::DomainError, "inverting an exact non-monomial series needs an order cap");

  std::int64_t d = a.exponent_denominator();
  std::int64_t len = ((*order + v) * QExponent(d)).ceil();
  if (len <= 0) return Series::zero(order);
  DenseSeries f(d, 0, static_cast<std::size_t>(len));
  Coefficient inv_lead = 1 / lead.coeff;
  std::vector<std::pair<std::int64_t, Coefficient>> tail;
  for (std::size_t i = 1; i < a.terms().size(); ++i) {
    std::int64_t k = ((a.terms()[i].exponent - v) * QExponent(d)).num();
    if (k >= len) break;
    tail.emplace_back(k, a.terms()[i].coeff * inv_lead);
  }
  // g = 1 / (1 + sum tail): g_n = -sum_k f_k g_{n-k}.
  std::vector<Coefficient> g(static_cast<std::size_t>(len));
  g[0] = 1;
  Coefficient prod;
  for (std::int64_t n = 1; n < len; ++n) {
    Coefficient& gn = g[n];
    for (const auto& [k, fk] : tail) {
      if (k > n) break;
      mpq_mul(prod.get_mpq_t(), fk.get_mpq_t(), g[n - k].get_mpq_t());
      mpq_sub(gn.get_mpq_t(), gn.get_mpq_t(), prod.get_mpq_t());
    }
  }
  std::vector<Term> out;
  for (std::int64_t n = 0; n < len; ++n) {
    if (sgn(g[n]) != 0) out.push_back({QExponent(n, d) - v, g[n] * inv_lead});
  }
  return Series::from_terms(std::move(out), order);
}

Series divide(const Series& a, const Series& b, std::optional<QExponent> cap) {
  std::optional<QExponent> inv_cap;
  if (cap && !b.is_monomial()) {
    // Enough of 1/b for a*(1/b) to reach cap.
    Valuation va = valuation(a);
    inv_cap = *cap - (va.infinite() ? QExponent(0) : *va.value);
  }
  Series r = mul(a, invert(b, inv_cap));
  return cap ? r.truncated(*cap) : r;
}

Series pow(const Series& a, std::int64_t n, std::optional<QExponent> cap) {
  if (n == 0) return Series::one();
  if (a.is_monomial()) {
    Series r = Series::from_monomial(a.as_monomial().pow(n));
    return cap ? r.truncated(*cap) : r;
  }
  Series base = n < 0 ? invert(a, cap) : a;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  Series result = Series::one();
  bool first = true;
  while (k != 0) {
    if (k & 1u) {
      result = first ? base : mul(result, base);
      first = false;
    }
    k >>= 1;
    if (k != 0) base = mul(base, base);
  }
  return cap ? result.truncated(*cap) : result;
}

Series substitute_base(const Series& a, const QExponent& k) {
  if (!(k > QExponent(0))) fail(ErrorKind::NonPositiveScale, "base substitution needs k > 0, got " + k.str());
  std::vector<Term> out = a.terms();
  for (auto& t : out) t.exponent *= k;
  std::optional<QExponent> order = a.order();
  if (order) *order *= k;
  return Series::from_terms(std::move(out), order);
}

Comparison equal_up_to(const Series& a, const Series& b, const QExponent& n) {
  if (order_below(a.order(), n) || order_below(b.order(), n)) {
    fail(ErrorKind::InsufficientOrder, "comparison below " + n.str() + " exceeds input order");
  }
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t i = 0, j = 0;
  while (true) {
    bool ai = i < ta.size() && ta[i].exponent < n;
    bool bj = j < tb.size() && tb[j].exponent < n;
    if (!ai && !bj) return {};
    if (ai && bj && ta[i].exponent == tb[j].exponent) {
      if (ta[i].coeff != tb[j].coeff) return {false, Mismatch{ta[i].exponent, ta[i].coeff, tb[j].coeff}};
      ++i;
      ++j;
    } else if (ai && (!bj || ta[i].exponent < tb[j].exponent)) {
      return {false, Mismatch{ta[i].exponent, ta[i].coeff, 0}};
    } else {
      return {false, Mismatch{tb[j].exponent, 0, tb[j].coeff}};
    }
  }
}

std::optional<Coefficient> rational_root(const Coefficient& x, std::int64_t r) {
  if (r <= 0) return std::nullopt;
  if (r == 1) return x;
  if (sgn(x) < 0 && r % 2 == 0) return std::nullopt;
  mpz_class num = abs(x.get_num()), den = x.get_den();
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(r)) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(r)) == 0) return std::nullopt;
  Coefficient out(rn, rd);
  out.canonicalize();
  if (sgn(x) < 0) out = -out;
  return out;
}

Coefficient eval_at(const Series& a, const Coefficient& q0) {
  if (!(sgn(q0) > 0 && q0 < 1)) fail(ErrorKind::DomainError, "evaluation point must satisfy 0 < q0 < 1");
  std::int64_t d = a.exponent_denominator();
  auto root = rational_root(q0, d);
  if (!root) {
    fail(ErrorKind::IrrationalPower,
         "q0 = " + q0.get_str() + " has no rational root of degree " + std::to_string(d));
  }
  Coefficient total = 0;
  for (const auto& t : a.terms()) {
    std::int64_t k = (t.exponent * QExponent(d)).num();
    total += t.coeff * Monomial(*root, 0).pow(k).coeff();
  }
  return total;
}

std::string to_text(const Series& a) {
  std::ostringstream os;
  for (const auto& t : a.terms()) os << t.exponent.str() << ' ' << t.coeff.get_str() << '\n';
  os << "order " << (a.order() ? a.order()->str() : std::string("exact")) << '\n';
  return os.str();
}

Series parse_text(const std::string& text) {
  std::istringstream is(text);
  std::string e, c;
  std::vector<Term> terms;
  std::optional<QExponent> order;
  bool saw_order = false;
  while (is >> e >> c) {
    if (e == "order") {
      if (c != "exact") order = QExponent::parse(c);
      saw_order = true;
      break;
    }
    Coefficient coeff;
    if (coeff.set_str(c, 10) != 0) fail(ErrorKind::DomainError, "malformed coefficient '" + c + "'");
    coeff.canonicalize();
    terms.push_back({QExponent::parse(e), coeff});
  }
  if (!saw_order) fail(ErrorKind::DomainError, "series text is missing its order line");
  return Series::from_terms(std::move(terms), order);
}

std::string to_pretty(const Series& a) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : a.terms()) {
    Monomial m(t.coeff, t.exponent);
    std::string s = m.str();
    if (first) {
      os << s;
    } else if (s.front() == '-') {
      os << " - " << s.substr(1);
    } else {
      os << " + " << s;
    }
    first = false;
  }
  if (a.order()) {
    std::string o = a.order()->is_integer() ? a.order()->str() : "(" + a.order()->str() + ")";
    os << (first ? "" : " + ") << "O(q^" << o << ")";
  } else if (first) {
    os << "0";
  }
  return os.str();
}

}  // namespace qrr
