#include <algorithm>
#include <functional>

#include "qrr/dsl.hpp"
#include "qrr/hyper.hpp"
#include "qrr/qcore.hpp"
#include "qrr/special.hpp"

namespace qrr::dsl {

namespace {

std::string at(const Node& n) {
  return " at " + std::to_string(n.span.line) + ":" + std::to_string(n.span.column);
}

// Binding plus the indices of enclosing sums and products.
struct Env {
  const Binding* base = nullptr;
  std::vector<std::pair<std::string, Value>> locals;

  const Value* lookup(const std::string& name, Value& scratch) const {
    for (auto it = locals.rbegin(); it != locals.rend(); ++it) {
      if (it->first == name) {
        scratch = it->second;
        return &scratch;
      }
    }
    auto it = base->find(name);
    return it == base->end() ? nullptr : &it->second;
  }
};

QExponent to_exponent(const Coefficient& c, const Node& where) {
  if (!c.get_num().fits_slong_p() || !c.get_den().fits_slong_p()) {
    fail(ErrorKind::Overflow, "exponent " + c.get_str() + " is too large" + at(where));
  }
  return QExponent(c.get_num().get_si(), c.get_den().get_si());
}

std::int64_t to_integer(const Coefficient& c, const Node& where) {
  if (c.get_den() != 1) fail(ErrorKind::TypeMismatch, "expected an integer, got " + c.get_str() + at(where));
  if (!c.get_num().fits_slong_p()) fail(ErrorKind::Overflow, "integer " + c.get_str() + " is too large" + at(where));
  return c.get_num().get_si();
}

Coefficient scalar(const Expr& e, const Env& env);

Coefficient scalar_pow(const Coefficient& b, std::int64_t k, const Node& where) {
  if (k < 0 && sgn(b) == 0) fail(ErrorKind::DomainError, "0 to a negative power" + at(where));
  Coefficient r = 1;
  Coefficient x = k < 0 ? Coefficient(1 / b) : b;
  std::uint64_t n = k < 0 ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
  while (n) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

Coefficient floor_of(const Coefficient& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return Coefficient(f);
}

Coefficient scalar(const Expr& e, const Env& env) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Number: return n.number;
    case NodeKind::Var: {
      Value scratch;
      const Value* v = env.lookup(n.name, scratch);
      if (!v) fail(ErrorKind::UnboundVariable, n.name);
      if (const auto* c = std::get_if<Coefficient>(v)) return *c;
      const Monomial& m = std::get<Monomial>(*v);
      if (m.exponent().is_zero()) return m.coeff();
      fail(ErrorKind::TypeMismatch, "'" + n.name + "' is bound to " + m.str() + ", expected a scalar" + at(n));
    }
    case NodeKind::Neg: return -scalar(n.args[0], env);
    case NodeKind::Add: return scalar(n.args[0], env) + scalar(n.args[1], env);
    case NodeKind::Sub: return scalar(n.args[0], env) - scalar(n.args[1], env);
    case NodeKind::Mul: return scalar(n.args[0], env) * scalar(n.args[1], env);
    case NodeKind::Div: {
      Coefficient d = scalar(n.args[1], env);
      if (sgn(d) == 0) fail(ErrorKind::DomainError, "division by zero" + at(n));
      return scalar(n.args[0], env) / d;
    }
    case NodeKind::Pow: {
      Coefficient b = scalar(n.args[0], env);
      return scalar_pow(b, to_integer(scalar(n.args[1], env), *n.args[1]), n);
    }
    case NodeKind::Call:
      if (n.builtin == Builtin::Floor) return floor_of(scalar(n.args[0], env));
      fail(ErrorKind::TypeMismatch, std::string(builtin_name(n.builtin)) + "(...) is not a scalar" + at(n));
    case NodeKind::Q: fail(ErrorKind::TypeMismatch, "q is not a scalar" + at(n));
    case NodeKind::Inf: fail(ErrorKind::TypeMismatch, "inf is not a scalar" + at(n));
  }
  fail(ErrorKind::TypeMismatch, "not a scalar" + at(n));
}

std::int64_t integer(const Expr& e, const Env& env) { return to_integer(scalar(e, env), *e); }
QExponent exponent(const Expr& e, const Env& env) { return to_exponent(scalar(e, env), *e); }

class Evaluator {
 public:
  explicit Evaluator(const EvalOptions& options) : opt_(options) {}

  Series eval(const Expr& e, Env& env, const QExponent& T);
  Monomial monomial(const Expr& e, Env& env);

 private:
  struct Factor {
    Expr node;
    std::int64_t power;
    std::optional<Series> fixed;  // precomputed exact value
  };

  void flatten(const Expr& e, std::int64_t power, Env& env, std::vector<Factor>& out, bool& negate);
  Series product(const std::vector<Factor>& factors, Env& env, const QExponent& T);
  Series sum(const Node& n, Env& env, const QExponent& T);
  Series infinite_prod(const Node& n, Env& env, std::int64_t lo, const QExponent& T);
  Series call(const Node& n, Env& env, const QExponent& T);
  Series coefficient(const Node& n, Env& env, const QExponent& T);

  EvalOptions opt_;
};

Monomial Evaluator::monomial(const Expr& e, Env& env) {
  Series s = eval(e, env, QExponent(0));
  if (!s.is_monomial()) {
    fail(ErrorKind::TypeMismatch, "'" + print(e) + "' is not a monomial" + at(*e));
  }
  return s.as_monomial();
}

void Evaluator::flatten(const Expr& e, std::int64_t power, Env& env, std::vector<Factor>& out,
                        bool& negate) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Mul:
      flatten(n.args[0], power, env, out, negate);
      flatten(n.args[1], power, env, out, negate);
      return;
    case NodeKind::Div:
      flatten(n.args[0], power, env, out, negate);
      flatten(n.args[1], -power, env, out, negate);
      return;
    case NodeKind::Neg:
      if (power % 2 != 0) negate = !negate;
      flatten(n.args[0], power, env, out, negate);
      return;
    case NodeKind::Pow:
      if (n.args[0]->kind != NodeKind::Q) {
        Coefficient k = scalar(n.args[1], env);
        if (k.get_den() == 1) {
          std::int64_t kk = to_integer(k, *n.args[1]);
          if (kk == 0) return;
          flatten(n.args[0], power * kk, env, out, negate);
          return;
        }
      }
      break;
    case NodeKind::Call:
      // (a;q^r)_n with n < 0 is 1/(a q^{rn};q^r)_{-n}: keep the exact
      // polynomial and flip the power.
      if ((n.builtin == Builtin::Poch && n.args[2]->kind != NodeKind::Inf) ||
          (n.builtin == Builtin::PochMulti && n.args[1]->kind != NodeKind::Inf)) {
        const bool multi = n.builtin == Builtin::PochMulti;
        std::int64_t k = integer(n.args[multi ? 1 : 2], env);
        if (k >= 0) break;
        QExponent r = exponent(n.args[multi ? 0 : 1], env);
        if (r <= QExponent(0)) fail(ErrorKind::NonPositiveScale, "base exponent must be positive" + at(n));
        std::vector<Monomial> xs;
        if (multi) {
          for (std::size_t i = 2; i < n.args.size(); ++i) xs.push_back(monomial(n.args[i], env));
        } else {
          xs.push_back(monomial(n.args[0], env));
        }
        for (const auto& x : xs) {
          Series s = poch_finite(x * Monomial::q_pow(r * QExponent(k)), r, -k, std::nullopt);
          if (s.is_zero() && power > 0) {
            fail(ErrorKind::DivisionByZeroFactor, "negative-index Pochhammer '" + print(e) +
                                                      "' has a vanishing factor" + at(n));
          }
          out.push_back({e, -power, std::move(s)});
        }
        return;
      }
      break;
    default: break;
  }
  out.push_back({e, power, std::nullopt});
}

// Each factor f^k with valuation v and order o contributes order
// o - v + V to the product, where V is the total valuation; so every factor
// is needed to order T - V + v.
Series Evaluator::product(const std::vector<Factor>& factors, Env& env, const QExponent& T) {
  const std::size_t count = factors.size();
  std::vector<Series> val(count);
  std::vector<QExponent> need(count, T);
  for (std::size_t i = 0; i < count; ++i) {
    val[i] = factors[i].fixed ? *factors[i].fixed : eval(factors[i].node, env, T);
  }

  auto lead = [](const Series& s) -> std::optional<QExponent> {
    if (!s.is_zero()) return s.terms().front().exponent;
    return s.order();  // a lower bound; nullopt for the exact zero
  };

  int deepen = 0;
  for (int round = 0; round < 24; ++round) {
    bool retry = false;
    for (std::size_t i = 0; i < count; ++i) {
      const Series& s = val[i];
      if (!s.is_zero()) continue;
      if (s.is_exact()) {
        if (factors[i].power > 0) return Series();
        fail(ErrorKind::ZeroSeries, "division by the zero series '" + print(factors[i].node) + "'" +
                                        at(*factors[i].node));
      }
      if (factors[i].power < 0) {
        // Look deeper for a nonzero term before giving up.
        if (++deepen > 12) {
          fail(ErrorKind::ZeroSeries, "division by the zero series '" + print(factors[i].node) + "'" +
                                          at(*factors[i].node));
        }
        QExponent o = *s.order();
        QExponent step = std::max(QExponent(16), o < QExponent(0) ? -o : o);
        val[i] = eval(factors[i].node, env, o + step);
        retry = true;
      }
    }
    if (retry) continue;

    QExponent V = 0;
    for (std::size_t i = 0; i < count; ++i) V += QExponent(factors[i].power) * *lead(val[i]);
    bool changed = false;
    for (std::size_t i = 0; i < count; ++i) {
      need[i] = T - V + *lead(val[i]);
      if (!val[i].is_exact() && *val[i].order() < need[i]) {
        Series again = eval(factors[i].node, env, need[i]);
        if (order_below(val[i].order(), again.order())) {
          val[i] = std::move(again);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  QExponent V = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (val[i].is_zero() && val[i].is_exact()) return Series();
    V += QExponent(factors[i].power) * *(val[i].is_zero() ? val[i].order() : std::optional(val[i].terms().front().exponent));
  }
  // Valuation at or above T: nothing below T survives. Products of
  // monomials stay exact.
  bool all_monomial = std::all_of(val.begin(), val.end(), [](const Series& s) { return s.is_monomial(); });
  if (!all_monomial && !(V < T)) return Series::zero(T);
  std::vector<QExponent> lead_of(count);
  for (std::size_t i = 0; i < count; ++i) {
    lead_of[i] = val[i].is_zero() ? *val[i].order() : val[i].terms().front().exponent;
  }
  // Exact polynomials are cut where they stop mattering, so long products
  // of Pochhammer polynomials stay cheap.
  auto trim = [](const Series& s, const QExponent& cap) {
    if (s.is_monomial() || s.is_zero()) return s;
    if (s.is_exact() && s.terms().back().exponent < cap) return s;
    return s.truncated(cap);
  };
  Series result = Series::one();
  QExponent done = 0;  // valuation of the factors multiplied so far
  for (std::size_t i = 0; i < count; ++i) {
    const Series& s = val[i];
    std::int64_t k = factors[i].power;
    QExponent kv = QExponent(k) * lead_of[i];
    // f^k is only needed below T - (V - k v).
    QExponent cap = T - V + kv;
    Series f = k == 1 ? trim(s, cap) : pow(s, k, s.is_monomial() ? std::nullopt : std::optional(cap));
    result = mul(result, f);
    done += kv;
    result = trim(result, T - V + done);
  }
  return result;
}

Series Evaluator::sum(const Node& n, Env& env, const QExponent& T) {
  const std::string& var = n.args[0]->name;
  const Expr& lo_e = n.args[1];
  const Expr& hi_e = n.args[2];
  const Expr& body = n.args[3];
  const bool lo_inf = lo_e->kind == NodeKind::Neg && lo_e->args[0]->kind == NodeKind::Inf;
  const bool hi_inf = hi_e->kind == NodeKind::Inf;

  auto term = [&](std::int64_t k) {
    env.locals.emplace_back(var, Coefficient(k));
    Series s;
    try {
      s = eval(body, env, T);
    } catch (...) {
      env.locals.pop_back();
      throw;
    }
    env.locals.pop_back();
    return s;
  };

  if (!lo_inf && !hi_inf) {
    std::int64_t lo = integer(lo_e, env), hi = integer(hi_e, env);
    Series acc;
    for (std::int64_t k = lo; k <= hi; ++k) {
      Series t = term(k);
      acc = add(acc, t.is_exact() ? t : t.truncated(T));
    }
    return acc;
  }

  // One direction of an infinite sum under the shared truncation protocol.
  auto run = [&](std::int64_t start, std::int64_t step, std::optional<std::int64_t> stop) {
    Series acc = Series::zero(T);
    int window = 0;
    std::optional<QExponent> prev;
    std::int64_t used = 0;
    // Lowest term valuation seen; a new low long after the start means the
    // valuations are not growing.
    std::optional<QExponent> low;
    for (std::int64_t k = start;; k += step) {
      if (stop && (step > 0 ? k > *stop : k < *stop)) break;
      if (++used > opt_.protocol.max_terms) {
        fail(ErrorKind::MaxTermsExceeded, "sum over " + var + " did not settle after " +
                                              std::to_string(opt_.protocol.max_terms) + " terms" + at(n));
      }
      Series t = term(k);
      acc = add(acc, t);
      std::optional<QExponent> v;
      if (!t.is_zero()) v = t.terms().front().exponent;
      else v = t.order();
      if (!t.is_zero() && (!low || *v < *low)) {
        if (low && used >= 24) {
          fail(ErrorKind::FormallyDivergent, "term valuations of the sum over " + var + " do not grow" + at(n));
        }
        low = v;
      }
      bool high = !v || *v >= T;
      if (!high) {
        window = 0;
      } else if (window == 0 || !v || (prev && *v >= *prev)) {
        ++window;
      } else {
        window = 1;
      }
      prev = v;
      if (window >= opt_.protocol.window) break;
    }
    return acc;
  };

  Series result;
  if (lo_inf && hi_inf) {
    result = add(run(0, 1, std::nullopt), run(-1, -1, std::nullopt));
  } else if (hi_inf) {
    result = run(integer(lo_e, env), 1, std::nullopt);
  } else {
    result = run(integer(hi_e, env), -1, std::nullopt);
  }
  return result.truncated(T);
}

Series Evaluator::infinite_prod(const Node& n, Env& env, std::int64_t lo, const QExponent& T) {
  const std::string& var = n.args[0]->name;
  const Expr& body = n.args[3];
  Series acc = Series::one();
  int window = 0;
  std::optional<QExponent> prev;
  for (std::int64_t k = lo;; ++k) {
    if (k - lo > opt_.protocol.max_terms) {
      fail(ErrorKind::MaxTermsExceeded, "product over " + var + " did not settle" + at(n));
    }
    // Factors that are 1 + O(q^w) only matter below the current valuation
    // shift; an infinite product needs them to tend to 1.
    QExponent shift = 0;
    if (!acc.is_zero()) shift = std::min(QExponent(0), acc.terms().front().exponent);
    const QExponent need = T - shift;
    env.locals.emplace_back(var, Coefficient(k));
    Series f;
    try {
      f = eval(body, env, need);
    } catch (...) {
      env.locals.pop_back();
      throw;
    }
    env.locals.pop_back();
    if (f.is_exact() && f.is_zero()) return Series();
    Series dev = sub(f, Series::one());
    std::optional<QExponent> v = dev.is_zero() ? dev.order() : std::optional(dev.terms().front().exponent);
    if (v && *v <= QExponent(0) && k - lo > 64) {
      fail(ErrorKind::FormallyDivergent, "factors of the product over " + var + " do not tend to 1" + at(n));
    }
    bool high = !v || *v >= need;
    if (!high) {
      acc = mul(acc, f);
      window = 0;
    } else {
      if (window == 0 || !v || (prev && *v >= *prev)) ++window;
      else window = 1;
    }
    prev = v;
    if (window >= opt_.protocol.window) break;
  }
  return acc.is_exact() ? acc.truncated(T) : acc.truncated(std::min(*acc.order(), T));
}

Series Evaluator::call(const Node& n, Env& env, const QExponent& T) {
  const auto& a = n.args;
  auto base_of = [&](std::size_t i) {
    if (a.size() <= i) return QExponent(1);
    QExponent r = exponent(a[i], env);
    if (r <= QExponent(0)) fail(ErrorKind::NonPositiveScale, "base exponent must be positive" + at(*a[i]));
    return r;
  };
  switch (n.builtin) {
    case Builtin::Sum: return sum(n, env, T);
    case Builtin::Prod: {
      std::int64_t lo = integer(a[1], env);
      if (a[2]->kind == NodeKind::Inf) return infinite_prod(n, env, lo, T);
      std::int64_t hi = integer(a[2], env);
      std::vector<Factor> factors;
      std::vector<Expr> holders;
      // Finite products: evaluate every factor with its own index.
      Series acc = Series::one();
      std::vector<Series> parts;
      for (std::int64_t k = lo; k <= hi; ++k) {
        env.locals.emplace_back(a[0]->name, Coefficient(k));
        try {
          parts.push_back(eval(a[3], env, T));
        } catch (...) {
          env.locals.pop_back();
          throw;
        }
        env.locals.pop_back();
      }
      // Negative valuations in some factors call for more precision in the
      // others.
      QExponent V = 0;
      for (const auto& p : parts) {
        if (p.is_exact() && p.is_zero()) return Series();
        V += p.is_zero() ? *p.order() : p.terms().front().exponent;
      }
      if (V < QExponent(0)) {
        parts.clear();
        for (std::int64_t k = lo; k <= hi; ++k) {
          env.locals.emplace_back(a[0]->name, Coefficient(k));
          try {
            parts.push_back(eval(a[3], env, T - V));
          } catch (...) {
            env.locals.pop_back();
            throw;
          }
          env.locals.pop_back();
        }
      }
      for (const auto& p : parts) acc = mul(acc, p);
      return acc;
    }
    case Builtin::Poch: {
      Monomial x = monomial(a[0], env);
      QExponent r = base_of(1);
      if (a[2]->kind == NodeKind::Inf) return poch_infinite(x, r, T);
      std::int64_t k = integer(a[2], env);
      // Kept exact unless the polynomial reaches far past T.
      if (k >= 0 && k <= 256) {
        QExponent top = 0;  // degree of the polynomial
        for (std::int64_t j = 0; j < k; ++j) top += std::max(QExponent(0), x.exponent() + r * QExponent(j));
        if (top < T + QExponent(64)) return poch_finite(x, r, k, std::nullopt);
      }
      try {
        return poch_finite(x, r, k, T);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DivisionByZeroFactor) fail(e.kind(), std::string(e.what()) + at(n));
        throw;
      }
    }
    case Builtin::PochMulti: {
      QExponent r = exponent(a[0], env);
      if (r <= QExponent(0)) fail(ErrorKind::NonPositiveScale, "base exponent must be positive" + at(*a[0]));
      PochIndex idx = a[1]->kind == NodeKind::Inf ? PochIndex::infinity() : PochIndex::of(integer(a[1], env));
      std::vector<Monomial> xs;
      for (std::size_t i = 2; i < a.size(); ++i) xs.push_back(monomial(a[i], env));
      bool exact = idx.finite && *idx.finite >= 0 && *idx.finite <= 256;
      return poch_multi(xs, r, idx, exact ? std::nullopt : std::optional(T));
    }
    case Builtin::QBin: return qbinomial(integer(a[0], env), integer(a[1], env), base_of(2));
    case Builtin::QPow: return Series::from_monomial(Monomial::q_pow(exponent(a[0], env)));
    case Builtin::Aq: return ramanujan_aq(monomial(a[0], env), base_of(1), T, opt_.protocol);
    case Builtin::SW: {
      std::int64_t k = integer(a[0], env);
      if (k < 0) fail(ErrorKind::DomainError, "sw needs n >= 0" + at(n));
      return stieltjes_wigert(k, monomial(a[1], env), T);
    }
    case Builtin::SchurA:
    case Builtin::SchurB: {
      std::int64_t m = integer(a[0], env);
      if (m < 0) fail(ErrorKind::DomainError, "Schur polynomials need m >= 0" + at(n));
      SchurPair p = schur_pair(m);
      Series s = n.builtin == Builtin::SchurA ? p.a : p.b;
      if (a.size() > 1) s = substitute_base(s, base_of(1));
      return s;
    }
    case Builtin::Bessel: {
      std::int64_t kind = integer(a[0], env);
      if (kind < 1 || kind > 3) fail(ErrorKind::DomainError, "bessel kind must be 1, 2 or 3" + at(n));
      BesselSpec spec{static_cast<BesselKind>(kind), exponent(a[1], env), monomial(a[2], env)};
      return qbessel(spec, T, opt_.protocol);
    }
    case Builtin::Phi:
    case Builtin::Psi: {
      std::int64_t r = integer(a[0], env), s = integer(a[1], env);
      HyperSpec spec;
      spec.bilateral = n.builtin == Builtin::Psi;
      for (std::int64_t i = 0; i < r; ++i) spec.upper.push_back(monomial(a[2 + i], env));
      for (std::int64_t i = 0; i < s; ++i) spec.lower.push_back(monomial(a[2 + r + i], env));
      spec.z = monomial(a[2 + r + s], env);
      return spec.bilateral ? psi_bilateral(spec, T, opt_.protocol) : phi(spec, T, opt_.protocol);
    }
    case Builtin::Floor: return Series::from_monomial(Monomial::constant(floor_of(scalar(a[0], env))));
    case Builtin::Coef: return coefficient(n, env, T);
  }
  fail(ErrorKind::TypeMismatch, "unsupported call" + at(n));
}

// coef(z, k, f): the coefficient of z^k in f, found by evaluating f at
// z = c q for c = 1, 2, ... and interpolating each q-coefficient as a
// polynomial in c. Two extra nodes must agree with the interpolant, else the
// node count doubles.
Series Evaluator::coefficient(const Node& n, Env& env, const QExponent& T) {
  const std::string& var = n.args[0]->name;
  const std::int64_t k = integer(n.args[1], env);
  if (k < 0) fail(ErrorKind::DomainError, "coef needs k >= 0" + at(n));
  const QExponent inner = T + QExponent(k);
  std::vector<Series> values;
  auto value_at = [&](std::size_t c) -> const Series& {
    while (values.size() < c) {
      env.locals.emplace_back(var, Monomial(Coefficient(static_cast<long>(values.size() + 1)), QExponent(1)));
      try {
        values.push_back(eval(n.args[2], env, inner));
      } catch (...) {
        env.locals.pop_back();
        throw;
      }
      env.locals.pop_back();
    }
    return values[c - 1];
  };

  for (std::size_t nodes = std::max<std::size_t>(k + 1, 12); nodes <= 256; nodes *= 2) {
    const std::size_t total = nodes + 2;
    std::optional<QExponent> o;
    std::vector<QExponent> exps;
    for (std::size_t c = 1; c <= total; ++c) {
      const Series& s = value_at(c);
      if (s.order() && (!o || *s.order() < *o)) o = s.order();
      for (const auto& t : s.terms()) exps.push_back(t.exponent);
    }
    std::sort(exps.begin(), exps.end());
    exps.erase(std::unique(exps.begin(), exps.end()), exps.end());

    std::vector<Term> out;
    bool fits = true;
    for (const QExponent& e : exps) {
      if (o && !(e < *o)) continue;
      std::vector<Coefficient> y(total);
      for (std::size_t c = 1; c <= total; ++c) y[c - 1] = value_at(c).coefficient(e);
      // Newton divided differences on nodes 1..nodes.
      std::vector<Coefficient> dd(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(nodes));
      for (std::size_t j = 1; j < nodes; ++j) {
        for (std::size_t i = nodes - 1; i >= j; --i) {
          dd[i] = (dd[i] - dd[i - 1]) / Coefficient(static_cast<long>(j));
          if (i == j) break;
        }
      }
      auto newton_at = [&](const Coefficient& x) {
        Coefficient r = dd[nodes - 1];
        for (std::size_t i = nodes - 1; i-- > 0;) r = r * (x - Coefficient(static_cast<long>(i + 1))) + dd[i];
        return r;
      };
      for (std::size_t c = nodes + 1; c <= total && fits; ++c) {
        if (newton_at(Coefficient(static_cast<long>(c))) != y[c - 1]) fits = false;
      }
      if (!fits) break;
      // Expand into the monomial basis; only the c^k coefficient is kept.
      std::vector<Coefficient> poly(nodes, Coefficient(0));
      poly[0] = dd[nodes - 1];
      std::size_t deg = 0;
      for (std::size_t i = nodes - 1; i-- > 0;) {
        // poly = poly * (x - (i+1)) + dd[i]
        Coefficient root(static_cast<long>(i + 1));
        for (std::size_t d = deg + 1; d-- > 0;) {
          Coefficient v = poly[d];
          poly[d + 1] += v;
          poly[d] = -root * v;
        }
        ++deg;
        poly[0] += dd[i];
      }
      if (static_cast<std::size_t>(k) < nodes && sgn(poly[k]) != 0) {
        out.push_back({e - QExponent(k), poly[k]});
      }
    }
    if (!fits) continue;
    if (o) return Series::from_terms(std::move(out), *o - QExponent(k));
    return Series::from_terms(std::move(out));
  }
  fail(ErrorKind::DomainError, "coefficient extraction in " + var + " did not stabilise" + at(n));
}

Series Evaluator::eval(const Expr& e, Env& env, const QExponent& T) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Number: return Series::from_monomial(Monomial::constant(n.number));
    case NodeKind::Q: return Series::from_monomial(Monomial::q_pow(1));
    case NodeKind::Inf: fail(ErrorKind::TypeMismatch, "inf is not a value" + at(n));
    case NodeKind::Var: {
      Value scratch;
      const Value* v = env.lookup(n.name, scratch);
      if (!v) fail(ErrorKind::UnboundVariable, n.name);
      if (const auto* c = std::get_if<Coefficient>(v)) return Series::from_monomial(Monomial::constant(*c));
      return Series::from_monomial(std::get<Monomial>(*v));
    }
    case NodeKind::Neg: return -eval(n.args[0], env, T);
    case NodeKind::Add: return add(eval(n.args[0], env, T), eval(n.args[1], env, T));
    case NodeKind::Sub: return sub(eval(n.args[0], env, T), eval(n.args[1], env, T));
    case NodeKind::Pow:
      if (n.args[0]->kind == NodeKind::Q) {
        return Series::from_monomial(Monomial::q_pow(exponent(n.args[1], env)));
      } else {
        Coefficient k = scalar(n.args[1], env);
        if (k.get_den() != 1) {
          // Rational powers only of monomials with a rational root.
          Monomial m = monomial(n.args[0], env);
          QExponent s = to_exponent(k, *n.args[1]);
          Monomial p = m.pow(s.num());
          auto root = rational_root(p.coeff(), s.den());
          if (!root) fail(ErrorKind::IrrationalPower, "(" + m.str() + ")^(" + s.str() + ") is irrational" + at(n));
          return Series::from_monomial(Monomial(*root, m.exponent() * s));
        }
      }
      [[fallthrough]];
    case NodeKind::Mul:
    case NodeKind::Div: {
      std::vector<Factor> factors;
      bool negate = false;
      flatten(e, 1, env, factors, negate);
      Series r = product(factors, env, T);
      return negate ? -r : r;
    }
    case NodeKind::Call: return call(n, env, T);
  }
  fail(ErrorKind::TypeMismatch, "unsupported expression" + at(n));
}

}  // namespace

Series eval_expr(const Expr& e, const Binding& binding, const QExponent& order, const EvalOptions& options) {
  Evaluator ev(options);
  Env env;
  env.base = &binding;
  QExponent T = order;
  Series best;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Series r = ev.eval(e, env, T);
    if (r.is_exact()) return r;
    if (attempt == 0 || order_below(best.order(), r.order())) best = r;
    if (!(*r.order() < order)) break;
    T = T + (order - *r.order()) + QExponent(1);
  }
  if (!best.is_exact() && order < *best.order()) return best.truncated(order);
  return best;
}

Coefficient eval_scalar(const Expr& e, const Binding& binding) {
  Env env;
  env.base = &binding;
  return scalar(e, env);
}

Monomial parse_monomial(std::string_view text) {
  Expr e = parse(text);
  Binding none;
  Series s = eval_expr(e, none, QExponent(0));
  if (!s.is_monomial()) fail(ErrorKind::TypeMismatch, "'" + std::string(text) + "' is not a monomial");
  return s.as_monomial();
}

Value parse_value(std::string_view text) {
  Expr e = parse(text);
  Binding none;
  try {
    return eval_scalar(e, none);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::TypeMismatch) throw;
  }
  return parse_monomial(text);
}

}  // namespace qrr::dsl
