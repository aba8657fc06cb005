#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "qrr/qcore.hpp"

using namespace qrr;

namespace {

Series poly(std::vector<std::pair<QExponent, int>> ts, std::optional<QExponent> order = std::nullopt) {
  std::vector<Term> terms;
  for (auto& [e, c] : ts) terms.push_back({e, c});
  return Series::from_terms(std::move(terms), order);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Overflow;
}

bool same(const Series& a, const Series& b) {
  if (a.is_exact() && b.is_exact()) return a == b;
  return equal_up_to(a, b, *min_order(a.order(), b.order())).equal;
}

const Monomial q(1, 1);

std::vector<Monomial> grid() {
  std::vector<Monomial> g;
  for (QExponent e : {QExponent(1, 2), QExponent(1), QExponent(3, 2), QExponent(2)}) {
    g.emplace_back(1, e);
    g.emplace_back(-1, e);
  }
  g.emplace_back(2, 1);
  g.emplace_back(mpq_class(1, 2), 2);
  return g;
}

// Pascal: [n,k] = [n-1,k-1] + q^k [n-1,k]
Series pascal(int n, int k) {
  if (k < 0 || k > n) return Series();
  if (n == 0) return Series::one();
  return add(pascal(n - 1, k - 1), mul_monomial(pascal(n - 1, k), Monomial(1, k)));
}

}  // namespace

TEST_CASE("finite Pochhammer") {
  CHECK(poch_finite(q, 1, 2, std::nullopt) == poly({{0, 1}, {1, -1}, {2, -1}, {3, 1}}));
  CHECK(poch_finite(Monomial(-3, QExponent(1, 2)), 1, 0, std::nullopt) == Series::one());
  // (q^2;q)_{-1} (q;q)_1 = 1
  Series neg = poch_finite(Monomial(1, 2), 1, -1, 8);
  CHECK(same(mul(neg, poch_finite(q, 1, 1, std::nullopt)), Series::one()));
  for (int k = 0; k < 8; ++k) CHECK(neg.coefficient(k) == 1);
  CHECK(kind_of([] { poch_finite(Monomial(1, 1), 1, -1, 5); }) == ErrorKind::DivisionByZeroFactor);
  // base q^{1/2}: (q^{1/2};q^{1/2})_2 = (1 - q^{1/2})(1 - q)
  CHECK(poch_finite(Monomial(1, QExponent(1, 2)), QExponent(1, 2), 2, std::nullopt) ==
        poly({{0, 1}, {QExponent(1, 2), -1}, {1, -1}, {QExponent(3, 2), 1}}));
  // truncated form agrees with the exact one
  Series exact = poch_finite(Monomial(-2, QExponent(1, 3)), 1, 5, std::nullopt);
  CHECK(poch_finite(Monomial(-2, QExponent(1, 3)), 1, 5, 4) == exact.truncated(4));
}

TEST_CASE("infinite Pochhammer against the pentagonal numbers") {
  const int T = 60;
  std::map<int, int> euler;
  for (int k = -10; k <= 10; ++k) {
    int e = k * (3 * k - 1) / 2;
    if (e < T) euler[e] = k % 2 ? -1 : 1;
  }
  Series s = poch_infinite(q, 1, T);
  REQUIRE(s.order());
  CHECK(*s.order() >= QExponent(T));
  for (int e = 0; e < T; ++e) CHECK(s.coefficient(e) == (euler.count(e) ? euler[e] : 0));
  CHECK(poch_infinite(Monomial(1, -2), 1, 10).is_zero());
  CHECK(kind_of([] { poch_infinite(Monomial(2, 0), 1, 5); }) == ErrorKind::FormallyDivergent);
  CHECK(kind_of([] { poch_infinite(Monomial(1, -1), 2, 5); }) == ErrorKind::FormallyDivergent);
}

TEST_CASE("multi-argument Pochhammer") {
  std::vector<Monomial> a{q, Monomial(1, 4)};
  Series s = poch_multi(a, 5, PochIndex::infinity(), 6);
  CHECK(s.truncated(6) == poly({{0, 1}, {1, -1}, {4, -1}, {5, 1}}, 6));
  // both factors expanded independently
  Series direct = mul(poch_infinite(q, 5, 30), poch_infinite(Monomial(1, 4), 5, 30));
  CHECK(same(poch_multi(a, 5, PochIndex::infinity(), 30), direct));
  CHECK(poch_multi({}, 1, PochIndex::of(3), std::nullopt) == Series::one());
  std::vector<Monomial> b{Monomial(1, 2), Monomial(1, 3)};
  CHECK(poch_multi(b, 5, PochIndex::infinity(), 3) == poly({{0, 1}, {2, -1}}, 3));
}

TEST_CASE("Pochhammer valuation") {
  CHECK(*poch_valuation(Monomial(1, -2), 1, 2) == QExponent(-3));
  CHECK(*poch_valuation(q, 1, 4) == QExponent(0));
  CHECK_FALSE(poch_valuation(Monomial(1, -1), 1, 3).has_value());
}

TEST_CASE("Gaussian binomials") {
  CHECK(qbinomial(2, 1, 1) == poly({{0, 1}, {1, 1}}));
  for (int n = 0; n <= 5; ++n) CHECK(qbinomial(n, 0, 1) == Series::one());
  CHECK(qbinomial(4, 2, 1) == poly({{0, 1}, {1, 1}, {2, 2}, {3, 1}, {4, 1}}));
  CHECK(qbinomial(3, 4, 1).is_zero());
  CHECK(qbinomial(3, -1, 1).is_zero());
  CHECK(qbinomial(-2, 1, 1).is_zero());
  for (int n = 0; n <= 12; ++n) {
    for (int k = 0; k <= n; ++k) {
      CHECK(qbinomial(n, k, 1) == pascal(n, k));
      CHECK(qbinomial(n, k, 1) == qbinomial(n, n - k, 1));
    }
  }
  CHECK(qbinomial(4, 2, QExponent(1, 2)) == substitute_base(pascal(4, 2), QExponent(1, 2)));
}

TEST_CASE("addition law and ratio of infinite products") {
  const QExponent T = 25;
  for (const auto& a : grid()) {
    for (int n = -4; n <= 4; ++n) {
      for (int m = -4; m <= 4; ++m) {
        try {
          Series lhs = poch_finite(a, 1, n + m, T);
          Series rhs = mul(poch_finite(a, 1, n, T), poch_finite(a * Monomial(1, n), 1, m, T));
          CHECK(same(lhs, rhs));
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::DivisionByZeroFactor);
        }
      }
      if (QExponent(a.exponent() + QExponent(n)) <= QExponent(0)) continue;
      try {
        Series fin = poch_finite(a, 1, n, T);
        Series ratio = divide(poch_infinite(a, 1, T), poch_infinite(a * Monomial(1, n), 1, T), T);
        CHECK(same(fin, ratio));
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DivisionByZeroFactor);
      }
    }
  }
}

TEST_CASE("Euler sum equals (-z;q)_inf") {
  const QExponent T = 30;
  for (const auto& z : grid()) {
    Series want = poch_infinite(-z, 1, T);
    Series got = Series::zero(T);
    for (int n = 0; n < 40; ++n) {
      Monomial t = Monomial(1, n * (n - 1) / 2) * z.pow(n);
      if (t.exponent() >= T) continue;
      got = add(got, mul_monomial(invert(poch_finite(q, 1, n, std::nullopt), T), t).truncated(T));
    }
    CHECK(same(got, want));
  }
}
