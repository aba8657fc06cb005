// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "qrr/corpus.hpp"
#include "qrr/qcore.hpp"
#include "qrr/special.hpp"

namespace {

using namespace qrr;
using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("violated: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

const Corpus& corpus() {
  static const Corpus c = load_corpus(QRR_DEFAULT_CORPUS);
  return c;
}

const IdentityEntry& entry(const std::string& id) {
  const IdentityEntry* e = corpus().find(id);
  if (!e) fail(ErrorKind::ConfigError, "corpus lacks " + id);
  return *e;
}

std::size_t count(const std::vector<Report>& rs, Status s) {
  return static_cast<std::size_t>(std::count_if(rs.begin(), rs.end(), [&](const Report& r) { return r.status == s; }));
}

VerifyOptions at_order(std::int64_t order) {
  VerifyOptions o;
  o.order = order;
  return o;
}

// Number of partitions of k into parts whose residue mod 5 is in `residues`.
std::vector<mpz_class> restricted_partitions(int below, const std::vector<int>& residues) {
  std::vector<mpz_class> p(below, 0);
  p[0] = 1;
  for (int part = 1; part < below; ++part) {
    if (std::find(residues.begin(), residues.end(), part % 5) == residues.end()) continue;
    for (int k = part; k < below; ++k) p[k] += p[k - part];
  }
  return p;
}

bool series_equal(const Series& a, const Series& b) {
  if (a.is_exact() && b.is_exact()) return a == b;
  QExponent n = *min_order(a.order(), b.order());
  return equal_up_to(a, b, n).equal;
}

// ---------------------------------------------------------------------------

void rogers_ramanujan(Check& c) {
  const std::pair<const char*, std::vector<int>> cases[] = {{"RR1", {1, 4}}, {"RR2", {2, 3}}};
  for (const auto& [id, residues] : cases) {
    auto t0 = Clock::now();
    auto rs = verify_entry(entry(id), at_order(60));
    double t = seconds_since(t0);
    c.expect(rs.size() == 1 && rs[0].status == Status::Pass, std::string(id) + " passes at order 60");
    c.expect(t < 1.0, std::string(id) + " under 1 s (took " + fmt(t) + ")");
    auto oracle = restricted_partitions(30, residues);
    for (const auto& ex : {entry(id).reading.lhs, entry(id).reading.rhs}) {
      Series s = dsl::eval_expr(ex, {}, 30);
      for (int k = 0; k < 30; ++k) {
        c.expect(s.coefficient(k) == mpq_class(oracle[k]),
                 std::string(id) + " coefficient of q^" + std::to_string(k) + " matches the partition count");
      }
    }
    c.note(std::string(id) + " " + fmt(t));
  }
}

void m_version(Check& c) {
  auto rs = verify_entry(entry("GIS"), at_order(40));
  c.expect(rs.size() == 13 && count(rs, Status::Pass) == 13, "GIS passes for m = 0..12");
  for (std::int64_t m = 2; m <= 30; ++m) {
    SchurPair closed = schur_closed(m);
    SchurPair rec = schur_pair(m);
    c.expect(closed.a.is_exact() && closed.a == rec.a && closed.b == rec.b,
             "closed forms equal the recurrence at m = " + std::to_string(m));
  }
}

void theorem_family(Check& c) {
  std::size_t bindings = 0;
  for (const char* id : {"T12A", "T12B", "T12C"}) {
    auto rs = verify_entry(entry(id), at_order(40));
    bindings += rs.size();
    c.expect(!rs.empty() && count(rs, Status::Pass) == rs.size(), std::string(id) + " passes on every binding");
  }
  c.expect(bindings >= 20, "at least 20 bindings");
  // Composition: T12A with z = b and T12B share the left side, so their
  // right sides are the two sides of T12C.
  const auto& a = entry("T12A");
  const auto& b = entry("T12B");
  const auto& cc = entry("T12C");
  std::size_t composed = 0;
  for (const auto& bind : grid_bindings(cc, GridProfile::Default)) {
    if (!violated_condition(b, bind).empty()) continue;
    dsl::Binding az{{"a", bind.at("a")}, {"z", bind.at("b")}};
    const QExponent T = 40;
    Series lhs_a = dsl::eval_expr(a.reading.lhs, az, T);
    Series rhs_a = dsl::eval_expr(a.reading.rhs, az, T);
    Series lhs_b = dsl::eval_expr(b.reading.lhs, bind, T);
    Series rhs_b = dsl::eval_expr(b.reading.rhs, bind, T);
    Series lhs_c = dsl::eval_expr(cc.reading.lhs, bind, T);
    Series rhs_c = dsl::eval_expr(cc.reading.rhs, bind, T);
    std::string key = " [" + binding_key(bind) + "]";
    c.expect(series_equal(lhs_a, lhs_b), "shared left side" + key);
    c.expect(series_equal(rhs_a, lhs_c) && series_equal(rhs_b, rhs_c), "composition gives T12C" + key);
    ++composed;
  }
  c.expect(composed >= 20, "composition checked on at least 20 bindings");
  c.note(std::to_string(bindings) + " bindings, " + std::to_string(composed) + " compositions");
}

void bilateral(Check& c) {
  const std::pair<const char*, std::size_t> ids[] = {
      {"RAM1PSI1", 6}, {"T31_11", 4}, {"T31_21", 4}, {"T31_22", 4}, {"T31_32", 4}};
  for (const auto& [id, need] : ids) {
    const auto& e = entry(id);
    auto rs = verify_entry(e, at_order(40));
    std::size_t pass = count(rs, Status::Pass);
    c.expect(pass >= need, std::string(id) + " passes on at least " + std::to_string(need) + " bindings");
    c.expect(count(rs, Status::Fail) == 0 && count(rs, Status::Error) == 0, std::string(id) + " has no FAIL or ERROR");
    for (const auto& r : rs) {
      if (!violated_condition(e, r.binding).empty()) {
        c.expect(r.status == Status::Skipped, std::string(id) + " skips [" + binding_key(r.binding) + "]");
      }
    }
    c.note(std::string(id) + " " + std::to_string(pass) + " pass, " + std::to_string(count(rs, Status::Skipped)) +
           " skipped");
  }
}

void slater_type(Check& c) {
  for (const char* id : {"E27", "E28", "E214", "E215", "E417", "SW7", "SW9", "SW10", "SW11"}) {
    const auto& e = entry(id);
    auto rs = verify_entry(e, at_order(60));
    std::string variant;
    if (e.has_variants()) {
      ProbeResult p = summarize_probe(e, rs);
      c.expect(p.selected.has_value(), std::string(id) + " selects a reading");
      if (!p.selected) continue;
      variant = *p.selected;
      c.note(std::string(id) + " reading '" + variant + "'");
    }
    std::size_t n = 0, pass = 0;
    for (const auto& r : rs) {
      if (r.variant != variant) continue;
      ++n;
      if (r.status == Status::Pass) ++pass;
    }
    c.expect(n > 0 && pass == n, std::string(id) + " passes at order 60");
  }
}

// (q;q)_n S_n(x) = sum_k [n,k] q^{k^2} (-x)^k, an exact Laurent polynomial.
Series cleared_sw(std::int64_t n, const Monomial& x) {
  Series s;
  for (std::int64_t k = 0; k <= n; ++k) {
    Monomial t = Monomial(1, k * k) * (-x).pow(k);
    s = add(s, mul_monomial(qbinomial(n, k, 1), t));
  }
  return s;
}

bool integral_exponents(const Series& s) { return s.exponent_denominator() == 1; }

// The library polynomial agrees with the cleared form up to order 40.
bool matches_library(std::int64_t n, const Monomial& x, const Series& cleared) {
  const QExponent T = 40;
  Series s = mul(stieltjes_wigert(n, x, T), poch_finite(Monomial(1, 1), 1, n, std::nullopt));
  return series_equal(s, cleared.truncated(*s.order()));
}

void stieltjes_wigert_values(Check& c) {
  const Monomial q(1, 1);
  for (std::int64_t n = 0; n <= 8; ++n) {
    std::string tag = " at n = " + std::to_string(n);
    // S_{2n}(q^{-2n}) = (-1)^n q^{-n^2} / (q^2;q^2)_n, S_{2n+1}(q^{-2n-1}) = 0
    Series even = cleared_sw(2 * n, Monomial(1, -2 * n));
    Series want = mul_monomial(poch_finite(q, 2, n, std::nullopt), Monomial(n % 2 ? -1 : 1, -n * n));
    c.expect(even == want, "even evaluation" + tag);
    c.expect(matches_library(2 * n, Monomial(1, -2 * n), even), "library S_2n agrees" + tag);
    c.expect(cleared_sw(2 * n + 1, Monomial(1, -2 * n - 1)).is_zero(), "odd evaluation vanishes" + tag);
    // S_n(-q^{-n+1/2}) and S_n(-q^{-n-1/2}) over (q^{1/2};q^{1/2})_n
    for (int part = 0; part <= 1; ++part) {
      Monomial x(-1, QExponent(-2 * n + 1 - 2 * part, 2));
      Series lhs = cleared_sw(n, x);
      c.expect(matches_library(n, x, lhs), "library S_n agrees part " + std::to_string(part) + tag);
      QExponent e(-(n * n - n + 2 * part * n), 4);
      Series rhs = mul_monomial(poch_finite(Monomial(-1, QExponent(1, 2)), QExponent(1, 2), n, std::nullopt),
                                Monomial(1, e));
      Series l4 = substitute_base(lhs, 4);
      Series r4 = substitute_base(rhs, 4);
      c.expect(integral_exponents(l4) && integral_exponents(r4) && l4 == r4,
               "half-integer evaluation part " + std::to_string(part) + tag);
    }
  }
  ProbeResult p = probe_variants(entry("SW56"), at_order(40));
  c.expect(p.selected && *p.selected == "even", "probe selects the q^{-n^2} reading");
  for (const auto& v : p.variants) {
    if (v.name != "lemma") continue;
    bool at_one = v.witness && v.witness->status == Status::Fail &&
                  std::get<Coefficient>(v.witness->binding.at("n")) == 1;
    c.expect(at_one, "rejected reading has a FAIL witness at n = 1");
    if (v.witness) c.note("witness: " + to_human(*v.witness));
  }
}

Series random_series(std::mt19937& rng) {
  std::uniform_int_distribution<int> nterms(0, 5), num(-6, 6), den(1, 4), ex(-4, 12), ord(0, 3);
  std::vector<Term> ts;
  for (int i = nterms(rng); i > 0; --i) ts.push_back({QExponent(ex(rng), 2), mpq_class(num(rng), den(rng))});
  const std::optional<QExponent> orders[] = {std::nullopt, 4, 6, QExponent(13, 2)};
  std::optional<QExponent> o = orders[ord(rng)];
  return Series::from_terms(std::move(ts), o);
}

void property_suites(Check& c) {
  std::mt19937 rng(20240611);
  int ring = 0;
  for (int i = 0; i < 200; ++i) {
    Series a = random_series(rng), b = random_series(rng), d = random_series(rng);
    std::string tag = " (triple " + std::to_string(i) + ")";
    c.expect(series_equal(add(a, b), add(b, a)), "add commutes" + tag);
    c.expect(series_equal(mul(a, b), mul(b, a)), "mul commutes" + tag);
    c.expect(series_equal(add(add(a, b), d), add(a, add(b, d))), "add associates" + tag);
    c.expect(series_equal(mul(mul(a, b), d), mul(a, mul(b, d))), "mul associates" + tag);
    c.expect(series_equal(mul(a, add(b, d)), add(mul(a, b), mul(a, d))), "mul distributes" + tag);
    Valuation va = valuation(a), vb = valuation(b), vab = valuation(mul(a, b));
    if (!va.infinite() && !vb.infinite()) {
      c.expect(!vab.infinite() && *vab.value == *va.value + *vb.value, "valuation adds" + tag);
    }
    ++ring;
  }

  int poch = 0, undefined = 0;
  const QExponent T = 30;
  for (const auto& a : default_monomial_grid()) {
    for (std::int64_t n = -4; n <= 4; ++n) {
      for (std::int64_t m = -4; m <= 4; ++m) {
        try {
          Series whole = poch_finite(a, 1, n + m, T);
          Series left = poch_finite(a, 1, n, T);
          Series right = poch_finite(a * Monomial(1, n), 1, m, T);
          c.expect(series_equal(whole, mul(left, right)),
                   "addition law a = " + a.str() + ", n = " + std::to_string(n) + ", m = " + std::to_string(m));
          ++poch;
        } catch (const Error& e) {
          c.expect(e.kind() == ErrorKind::DivisionByZeroFactor, std::string("unexpected error ") + e.what());
          ++undefined;
        }
      }
    }
  }

  int aq = 0;
  for (const auto& z : default_monomial_grid()) {
    const QExponent T40 = 40;
    Series lhs = ramanujan_aq(z, 1, T40);
    Series rhs = sub(ramanujan_aq(z * Monomial(1, 1), 1, T40),
                     mul_monomial(ramanujan_aq(z * Monomial(1, 2), 1, T40), z * Monomial(1, 1)));
    c.expect(lhs.order() && *lhs.order() >= T40 && series_equal(lhs, rhs), "A_q functional equation at z = " + z.str());
    ++aq;
  }
  c.note(std::to_string(ring) + " ring triples, " + std::to_string(poch) + " addition-law cases (" +
         std::to_string(undefined) + " undefined), " + std::to_string(aq) + " functional-equation points");
}

std::string records(const RunResult& r) {
  std::string out;
  for (const auto& rep : r.reports) out += to_record(rep) + "\n";
  return out;
}

RunResult full_single, full_multi;
double full_single_time = 0, full_multi_time = 0;

void check_run(Check& c, const RunResult& res, const std::string& label) {
  c.expect(res.summary.failing_plain == 0, label + ": no FAIL or ERROR outside variant entries");
  for (const auto& p : res.summary.probes) {
    if (p.selected) continue;
    bool witnessed = std::all_of(p.variants.begin(), p.variants.end(),
                                 [](const VariantOutcome& v) { return v.passes || v.witness.has_value(); });
    c.expect(witnessed, label + ": " + p.id + " is inconclusive without witnesses");
    c.note(p.id + " INCONCLUSIVE");
  }
}

void full_corpus(Check& c) {
  VerifyOptions o = at_order(40);
  auto t0 = Clock::now();
  full_single = verify_all(corpus(), o);
  full_single_time = seconds_since(t0);
  o.jobs = 8;
  t0 = Clock::now();
  full_multi = verify_all(corpus(), o);
  full_multi_time = seconds_since(t0);
  check_run(c, full_single, "1 thread");
  check_run(c, full_multi, "8 threads");
  c.expect(full_single_time < 300, "single-threaded run under 5 minutes");
  c.expect(full_multi_time < 90, "8-thread run under 90 s");
  const auto& n = full_single.summary.counts;
  auto get = [&](Status s) { return n.count(s) ? n.at(s) : 0; };
  c.note(std::to_string(full_single.reports.size()) + " reports: " + std::to_string(get(Status::Pass)) + " pass, " +
         std::to_string(get(Status::Fail)) + " fail (variants only), " + std::to_string(get(Status::Skipped)) +
         " skipped, " + std::to_string(get(Status::Error)) + " error");
  c.note("1 thread " + fmt(full_single_time) + ", 8 threads " + fmt(full_multi_time) + " on " +
         std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s)");
}

void determinism(Check& c) {
  c.expect(!full_single.reports.empty(), "the full run produced reports");
  c.expect(records(full_single) == records(full_multi), "records from 1 and 8 threads are byte-identical");
  VerifyOptions o = at_order(40);
  o.jobs = 3;
  std::vector<std::string> ids{"T12A", "SW56", "E418", "RAM1PSI1"};
  c.expect(records(verify_all(corpus(), o, ids)) == records(verify_all(corpus(), at_order(40), ids)),
           "records from 1 and 3 threads are byte-identical on a subset");
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* title;
    std::function<void(Check&)> run;
    double budget;  // seconds; 0 when the criterion times itself
  };
  const Criterion criteria[] = {
      {1, "Rogers-Ramanujan identities against partition counts", rogers_ramanujan, 0},
      {2, "m-version for m = 0..12 and Schur closed forms up to 30", m_version, 5},
      {3, "A_q expansions of 1phi1 and their composition", theorem_family, 10},
      {4, "bilateral sums: 1psi1 and the four (r,s) cases", bilateral, 30},
      {5, "Slater-type entries at order 60", slater_type, 30},
      {6, "Stieltjes-Wigert evaluations and the errata probe", stieltjes_wigert_values, 0},
      {7, "property suites", property_suites, 0},
      {8, "full corpus at order 40", full_corpus, 0},
      {9, "record output independent of thread count", determinism, 0},
  };
  bool all = true;
  for (const auto& cr : criteria) {
    Check c;
    auto t0 = Clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    double t = seconds_since(t0);
    if (cr.budget > 0 && t >= cr.budget) c.expect(false, "runtime under " + fmt(cr.budget) + " (took " + fmt(t) + ")");
    all = all && c.ok;
    std::cout << "criterion " << cr.number << ": " << (c.ok ? "PASS" : "FAIL") << "  " << cr.title << "  (" << fmt(t)
              << ")\n";
    std::size_t shown = 0;
    for (const auto& n : c.notes) {
      if (++shown > 12) {
        std::cout << "    ... " << c.notes.size() - 12 << " more\n";
        break;
      }
      std::cout << "    " << n << "\n";
    }
    std::cout.flush();
  }
  return all ? 0 : 1;
}
