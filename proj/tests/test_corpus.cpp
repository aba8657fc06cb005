#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "qrr/corpus.hpp"

using namespace qrr;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error thrown");
  return Error(ErrorKind::Overflow, "");
}

const Corpus& corpus() {
  static const Corpus c = load_corpus(QRR_DEFAULT_CORPUS);
  return c;
}

const IdentityEntry& entry(const std::string& id) {
  const IdentityEntry* e = corpus().find(id);
  REQUIRE(e);
  return *e;
}

VerifyOptions at(std::int64_t order) {
  VerifyOptions o;
  o.order = order;
  return o;
}

const char* kSample = R"(# sample
id: GEO
title: geometric series
lhs: sum(n, 0, inf, z^n)
rhs: 1 / (1 - z)
param: z grid q, -q^2,
  1/2*q^(1/2)
require: ex(z) > 0

id: FIN
lhs: poch(a, 1, n)
rhs: prod(k, 0, n - 1, 1 - a*q^k)
param: n int 0..3
param: a values q, -2*q^(1/2)
require: n < 3 or co(a) == 1
limit: 5
variant.wrong.rhs: 1
variant.wrong.note: a reading
  that spans lines
variant.right.rhs: prod(k, 0, n - 1, 1 - a*q^k)
)";

}  // namespace

TEST_CASE("corpus format") {
  Corpus c = parse_corpus(kSample, "sample");
  REQUIRE(c.entries.size() == 2);
  const IdentityEntry& geo = c.entries[0];
  CHECK(geo.id == "GEO");
  CHECK(geo.title == "geometric series");
  REQUIRE(geo.params.size() == 1);
  CHECK(geo.params[0].kind == Param::Kind::Grid);
  CHECK(geo.params[0].values.size() == 3);
  CHECK(geo.preconditions.size() == 1);
  CHECK(geo.line == 2);
  const IdentityEntry& fin = *c.find("FIN");
  CHECK(fin.params[0].kind == Param::Kind::IntRange);
  CHECK(fin.params[0].lo == 0);
  CHECK(fin.params[0].hi == 3);
  CHECK(fin.preconditions[0].alternatives.size() == 2);
  CHECK(fin.limit == 5);
  REQUIRE(fin.variants.size() == 2);
  CHECK(fin.variants[0].name == "wrong");
  CHECK(fin.variants[0].note == "a reading\nthat spans lines");
  // variant sides default to the record's own
  CHECK(dsl::same(fin.variants[0].lhs, fin.reading.lhs));
  CHECK(c.find("NONE") == nullptr);
}

TEST_CASE("corpus errors name the line") {
  auto bad = [](const std::string& text) { return error_of([&] { parse_corpus(text, "f"); }); };
  Error e = bad("id: X\nlhs: q\nrhs: q +\n");
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(std::string(e.what()).find("f:1") != std::string::npos);
  CHECK(bad("lhs: q\n").kind() == ErrorKind::ConfigError);
  CHECK(bad("id: X\nlhs: q\nrhs: q\nbogus: 1\n").kind() == ErrorKind::ConfigError);
  CHECK(std::string(bad("id: X\nlhs: q\nrhs: q\nbogus: 1\n").what()).find("f:4") != std::string::npos);
  CHECK(bad("id: X\nlhs: q\nrhs: q\nid: X\nlhs: q\nrhs: q\n").kind() == ErrorKind::ConfigError);
  CHECK(bad("id: X\nlhs: a\nrhs: q\n").kind() == ErrorKind::ConfigError);  // a is not a parameter
  CHECK(bad("id: X\nlhs: q\nrhs: q\nlimit: 0\n").kind() == ErrorKind::ConfigError);
  CHECK(bad("id: X\nlhs: q\nrhs: q\nparam: n int 3\n").kind() == ErrorKind::ConfigError);
  CHECK(bad("id: X\nlhs: q\nrhs: q\nrequire: ex(q)\n").kind() == ErrorKind::ConfigError);
  CHECK(error_of([] { load_corpus("/nonexistent/corpus.qrr"); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("the shipped corpus loads and covers every listed identity") {
  const char* ids[] = {"RR1",    "RR2",    "GIS",    "CGAUSS", "T11A",  "T11B",   "T12A",   "T12B",   "T12C",
                       "C13",    "T14A",   "T14B",   "E118",   "E119",  "E120",   "E25",    "E26",    "E27",
                       "E28",    "T21",    "E211",   "E29",    "E210",  "E2_11",  "T22",    "AIRY3",  "E213",
                       "E214",   "E215",   "T31_11", "T31_21", "T31_22", "T31_32", "C32",   "C33A",   "C33B",
                       "RAM1PSI1", "T3BES", "SW54",  "SW56",   "SW58",  "T41A",   "T41B",   "T41C",   "SPB",
                       "T42A",   "T42B",   "T42C",   "T42D",   "T42E",  "T42F",   "E437",   "E438",   "E417",
                       "E418",   "JGEN",   "SW2",    "SW5",    "SW6",   "SW7",    "SW8",    "SW9",    "SW10",
                       "SW11"};
  for (const char* id : ids) CHECK_MESSAGE(corpus().find(id) != nullptr, id);
  for (const auto& e : corpus().entries) {
    CHECK_MESSAGE(!e.anchor.empty(), e.id);
    // every reading that gets verified has both sides
    if (!e.has_variants()) CHECK_MESSAGE((e.reading.lhs && e.reading.rhs), e.id);
    for (const auto& v : e.variants) CHECK_MESSAGE((v.lhs && v.rhs), e.id << " " << v.name);
  }
}

TEST_CASE("grid bindings") {
  Corpus c = parse_corpus(kSample, "sample");
  const IdentityEntry& fin = *c.find("FIN");
  auto all = grid_bindings(fin, GridProfile::Full);
  CHECK(all.size() == 8);
  auto filtered = grid_bindings(fin, GridProfile::Full, {}, true);
  CHECK(filtered.size() == 7);  // n = 3 with a = -2 q^(1/2) is excluded
  auto thin = grid_bindings(fin, GridProfile::Default);
  CHECK(thin.size() == 6);  // 5 admissible plus one inadmissible
  CHECK(grid_bindings(fin, GridProfile::Default) == thin);
  CHECK(grid_bindings(fin, GridProfile::Quick).size() <= 7);
  auto one = grid_bindings(fin, GridProfile::Default, {{"n", Coefficient(2)}});
  CHECK(one.size() == 2);
  CHECK(error_of([&] { grid_bindings(fin, GridProfile::Default, {{"x", Coefficient(1)}}); }).kind() ==
        ErrorKind::ConfigError);
  CHECK(default_monomial_grid().size() == 10);
  CHECK(parse_profile("quick") == GridProfile::Quick);
  CHECK(error_of([] { parse_profile("huge"); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("preconditions") {
  Corpus c = parse_corpus(kSample, "sample");
  const IdentityEntry& geo = *c.find("GEO");
  CHECK(violated_condition(geo, {{"z", Monomial(1, 1)}}).empty());
  CHECK(violated_condition(geo, {{"z", Monomial(1, 0)}}) == "ex(z) > 0");
  const IdentityEntry& fin = *c.find("FIN");
  CHECK(violated_condition(fin, {{"n", Coefficient(3)}, {"a", Monomial(1, 1)}}).empty());
  CHECK_FALSE(violated_condition(fin, {{"n", Coefficient(3)}, {"a", Monomial(-2, 1)}}).empty());
  Report r = verify_reading(geo, geo.reading, {{"z", Monomial(-1, 0)}}, 10);
  CHECK(r.status == Status::Skipped);
  CHECK(r.message.find("ex(z) > 0") != std::string::npos);
}

TEST_CASE("verify examples") {
  auto rr1 = verify_entry(entry("RR1"), at(40));
  REQUIRE(rr1.size() == 1);
  CHECK(rr1[0].status == Status::Pass);
  CHECK(rr1[0].verified == QExponent(40));
  auto gis = verify_entry(entry("GIS"), at(40), {{"m", Coefficient(0)}});
  REQUIRE(gis.size() == 1);
  CHECK(gis[0].status == Status::Pass);
  // m = 0 and m = 1 coincide with RR1 and RR2 coefficientwise
  for (int m = 0; m <= 1; ++m) {
    dsl::Binding b{{"m", Coefficient(m)}};
    Series g = dsl::eval_expr(entry("GIS").reading.rhs, b, 40);
    Series r = dsl::eval_expr(entry(m == 0 ? "RR1" : "RR2").reading.rhs, {}, 40);
    CHECK(equal_up_to(g, r, 40).equal);
  }
  const IdentityEntry& psi = entry("RAM1PSI1");
  dsl::Binding edge{{"a", Monomial(1, 1)}, {"b", Monomial(1, 3)}, {"z", Monomial(1, 2)}};
  Report s = verify_reading(psi, psi.reading, edge, 40);
  CHECK(s.status == Status::Skipped);
  CHECK_FALSE(s.message.empty());
}

TEST_CASE("a wrong identity fails with a witness") {
  Corpus c = parse_corpus("id: W\nlhs: 1 / (1 - q)\nrhs: 1 + q + 2*q^2\n", "w");
  auto rs = verify_entry(c.entries[0], at(10));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].status == Status::Fail);
  REQUIRE(rs[0].witness);
  CHECK(rs[0].witness->exponent == QExponent(2));
  CHECK(rs[0].witness->lhs == 1);
  CHECK(rs[0].witness->rhs == 2);
  // evaluation errors surface as ERROR reports
  Corpus d = parse_corpus("id: D\nlhs: 1 / (q - q)\nrhs: 1\n", "d");
  CHECK(verify_entry(d.entries[0], at(10))[0].status == Status::Error);
}

TEST_CASE("verify_all summary") {
  Corpus c = parse_corpus(kSample, "sample");
  RunResult r = verify_all(c, at(12));
  CHECK(r.summary.failing_plain == 0);
  REQUIRE(r.summary.probes.size() == 1);
  CHECK(*r.summary.probes[0].selected == "right");
  CHECK(std::is_sorted(r.reports.begin(), r.reports.end(), [](const Report& a, const Report& b) {
    return std::tie(a.id, a.variant) < std::tie(b.id, b.variant);
  }));
  VerifyOptions zero = at(1);
  zero.order = 0;
  RunResult z = verify_all(c, zero);
  CHECK(z.summary.degenerate_order);
  CHECK(error_of([&] { verify_all(c, at(5), {"NOPE"}); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("errata probe") {
  ProbeResult sw = probe_variants(entry("SW56"), at(40));
  REQUIRE(sw.selected);
  CHECK(*sw.selected == "even");
  for (const auto& v : sw.variants) {
    if (v.name != "lemma") continue;
    CHECK_FALSE(v.passes);
    REQUIRE(v.witness);
    CHECK(std::get<Coefficient>(v.witness->binding.at("n")) == 1);
  }
  ProbeResult e214 = probe_variants(entry("E214"), at(40));
  REQUIRE(e214.selected);
  CHECK(*e214.selected == "n");
  CHECK(error_of([] { probe_variants(entry("RR1"), at(40)); }).kind() == ErrorKind::ConfigError);
  // several passing readings are inconclusive
  Corpus c = parse_corpus("id: P\nlhs: q\nrhs: q\nvariant.a.rhs: q\nvariant.b.rhs: q^1\n", "p");
  ProbeResult p = probe_variants(c.entries[0], at(5));
  CHECK(p.inconclusive());
}

TEST_CASE("record output") {
  Corpus c = parse_corpus("id: W\nlhs: 1 / (1 - q)\nrhs: 1 + q + 2*q^2\nparam: m int 1..1\n", "w");
  auto rs = verify_entry(c.entries[0], at(10));
  std::string rec = to_record(rs[0]);
  auto j = nlohmann::json::parse(rec);
  CHECK(j["id"] == "W");
  CHECK(j["status"] == "FAIL");
  CHECK(j["binding"]["m"] == "1");
  CHECK(j["order"] == "10");
  CHECK(j["witness"]["exponent"] == "2");
  CHECK(rec.find("seconds") == std::string::npos);
  CHECK(rec.find('\n') == std::string::npos);
  CHECK(to_human(rs[0]).rfind("FAIL", 0) == 0);
  // records do not depend on the thread count
  VerifyOptions o = at(30);
  std::vector<std::string> ids{"T12A", "RAM1PSI1"};
  RunResult one = verify_all(corpus(), o, ids);
  o.jobs = 4;
  RunResult four = verify_all(corpus(), o, ids);
  REQUIRE(one.reports.size() == four.reports.size());
  for (std::size_t i = 0; i < one.reports.size(); ++i) CHECK(to_record(one.reports[i]) == to_record(four.reports[i]));
}
