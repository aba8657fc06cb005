// qrr: command-line front end for the identity verifier.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "qrr/corpus.hpp"
#include "qrr/special.hpp"

namespace {

using namespace qrr;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

struct Config {
  std::string order = "40";
  std::string corpus;
  std::string id;
  std::vector<std::string> sets;
  unsigned jobs = 1;
  std::string format = "human";
  std::string profile = "default";
  std::string expr;
  int max = 10;
};

std::string default_corpus() {
  if (const char* env = std::getenv("QRR_CORPUS"); env && *env) return env;
  return QRR_DEFAULT_CORPUS;
}

QExponent parse_order(const std::string& text) {
  QExponent o;
  try {
    o = QExponent::parse(text);
  } catch (const Error&) {
    fail(ErrorKind::ConfigError, "bad --order '" + text + "'");
  }
  if (o <= QExponent(0)) fail(ErrorKind::ConfigError, "--order must be positive");
  return o;
}

dsl::Binding parse_sets(const std::vector<std::string>& sets) {
  dsl::Binding b;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::ConfigError, "--set expects name=expr, got '" + s + "'");
    b[s.substr(0, eq)] = dsl::parse_value(s.substr(eq + 1));
  }
  return b;
}

VerifyOptions options_of(const Config& c) {
  if (c.format != "human" && c.format != "records") {
    fail(ErrorKind::ConfigError, "--format must be human or records");
  }
  if (c.jobs < 1) fail(ErrorKind::ConfigError, "--jobs must be at least 1");
  VerifyOptions o;
  o.order = parse_order(c.order);
  o.profile = parse_profile(c.profile);
  o.jobs = c.jobs;
  return o;
}

void print_reports(const std::vector<Report>& reports, const std::string& format) {
  for (const auto& r : reports) std::cout << (format == "records" ? to_record(r) : to_human(r)) << "\n";
}

void print_probe(const ProbeResult& p) {
  std::cout << "probe " << p.id << ": ";
  if (p.selected) {
    std::cout << "selected '" << *p.selected << "'\n";
  } else {
    std::cout << "INCONCLUSIVE\n";
  }
  for (const auto& v : p.variants) {
    std::cout << "  " << (v.passes ? "PASS " : "FAIL ") << v.name << ": " << v.pass << " pass, " << v.fail
              << " fail, " << v.skipped << " skipped, " << v.error << " error\n";
    if (v.witness) std::cout << "    witness " << to_human(*v.witness) << "\n";
  }
}

const IdentityEntry& require_entry(const Corpus& corpus, const std::string& id) {
  if (id.empty()) fail(ErrorKind::ConfigError, "--id is required");
  const IdentityEntry* e = corpus.find(id);
  if (!e) fail(ErrorKind::ConfigError, "unknown identity '" + id + "'");
  return *e;
}

bool bad(const Report& r) { return r.status == Status::Fail || r.status == Status::Error; }

int cmd_verify(const Config& c) {
  VerifyOptions o = options_of(c);
  Corpus corpus = load_corpus(c.corpus);
  const IdentityEntry& e = require_entry(corpus, c.id);
  auto reports = verify_entry(e, o, parse_sets(c.sets));
  print_reports(reports, c.format);
  if (e.has_variants()) {
    ProbeResult p = summarize_probe(e, reports);
    if (c.format == "human") print_probe(p);
    for (const auto& v : p.variants) {
      if (v.passes) return kOk;
    }
    return kFailed;
  }
  return std::any_of(reports.begin(), reports.end(), bad) ? kFailed : kOk;
}

int cmd_verify_all(const Config& c) {
  VerifyOptions o = options_of(c);
  Corpus corpus = load_corpus(c.corpus);
  std::vector<std::string> ids;
  if (!c.id.empty()) ids.push_back(c.id);
  RunResult res = verify_all(corpus, o, ids);
  print_reports(res.reports, c.format);
  const Summary& s = res.summary;
  bool unresolved = false;
  for (const auto& p : s.probes) {
    for (const auto& v : p.variants) {
      if (v.error > 0) unresolved = true;
    }
  }
  if (c.format == "human") {
    std::cout << "\nsummary";
    for (Status st : {Status::Pass, Status::Fail, Status::Skipped, Status::Error}) {
      auto it = s.counts.find(st);
      std::cout << "  " << to_string(st) << " " << (it == s.counts.end() ? 0 : it->second);
    }
    std::cout << "\nnon-variant FAIL/ERROR: " << s.failing_plain << "\n";
    if (s.degenerate_order) std::cout << "warning: degenerate order, comparisons are vacuous\n";
    for (const auto& p : s.probes) print_probe(p);
  } else {
    std::cerr << "summary: " << res.reports.size() << " reports, non-variant FAIL/ERROR " << s.failing_plain << "\n";
  }
  return s.failing_plain > 0 || unresolved ? kFailed : kOk;
}

int cmd_eval(const Config& c) {
  if (c.expr.empty()) fail(ErrorKind::ConfigError, "--expr is required");
  QExponent order = parse_order(c.order);
  dsl::Expr e = dsl::parse(c.expr);
  Series s = dsl::eval_expr(e, parse_sets(c.sets), order);
  if (c.format == "human") {
    std::cout << to_text(s);
  } else {
    std::cout << to_pretty(s) << "\n";
  }
  return kOk;
}

int cmd_table_schur(const Config& c) {
  if (c.max < 0) fail(ErrorKind::ConfigError, "--max must be non-negative");
  for (int m = 0; m <= c.max; ++m) {
    SchurPair p = schur_pair(m);
    std::cout << "m " << m << "\n[a]\n" << to_text(p.a) << "[b]\n" << to_text(p.b);
  }
  return kOk;
}

int cmd_probe(const Config& c) {
  VerifyOptions o = options_of(c);
  Corpus corpus = load_corpus(c.corpus);
  const IdentityEntry& e = require_entry(corpus, c.id);
  ProbeResult p = probe_variants(e, o);
  print_probe(p);
  return p.selected ? kOk : kFailed;
}

int cmd_list(const Config& c) {
  Corpus corpus = load_corpus(c.corpus);
  for (const auto& e : corpus.entries) {
    std::cout << e.id;
    for (const auto& p : e.params) {
      std::cout << " " << p.name;
      if (p.kind == Param::Kind::IntRange) std::cout << "=" << p.lo << ".." << p.hi;
      else std::cout << "{" << p.values.size() << "}";
    }
    if (e.has_variants()) {
      std::cout << " variants:";
      for (const auto& v : e.variants) std::cout << " " << v.name;
    }
    if (!e.title.empty()) std::cout << "  # " << e.title;
    std::cout << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  c.corpus = default_corpus();
  CLI::App app{"Exact q-series identity verifier"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool with_corpus) {
    sub->add_option("--order", c.order, "exclusive truncation order (rational)")->capture_default_str();
    if (with_corpus) {
      sub->add_option("--corpus", c.corpus, "corpus file (default: $QRR_CORPUS or the bundled one)");
      sub->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
      sub->add_option("--format", c.format, "human or records")->capture_default_str();
      sub->add_option("--profile", c.profile, "grid profile: quick, default or full")->capture_default_str();
    }
  };

  auto* verify = app.add_subcommand("verify", "verify one identity on its grid");
  common(verify, true);
  verify->add_option("--id", c.id, "identity id");
  verify->add_option("--set", c.sets, "fix a parameter, e.g. --set m=3 or --set a=-q^2");

  auto* all = app.add_subcommand("verify-all", "verify every identity");
  common(all, true);
  all->add_option("--id", c.id, "restrict to one identity");

  auto* ev = app.add_subcommand("eval", "evaluate an expression");
  ev->add_option("--order", c.order, "exclusive truncation order")->capture_default_str();
  ev->add_option("--expr", c.expr, "expression");
  ev->add_option("--set", c.sets, "bind a variable, e.g. --set z=-q^2");
  ev->add_option("--format", c.format, "human (text pairs) or pretty");

  auto* table = app.add_subcommand("table", "tables of special polynomials");
  auto* schur = table->add_subcommand("schur", "a_m and b_m for m = 0..max");
  schur->add_option("--max", c.max, "largest m")->capture_default_str();
  table->require_subcommand(1);

  auto* probe = app.add_subcommand("probe", "decide between candidate readings");
  common(probe, true);
  probe->add_option("--id", c.id, "identity id");

  auto* list = app.add_subcommand("list", "list corpus identities");
  list->add_option("--corpus", c.corpus, "corpus file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*verify) return cmd_verify(c);
    if (*all) return cmd_verify_all(c);
    if (*ev) return cmd_eval(c);
    if (*schur) return cmd_table_schur(c);
    if (*probe) return cmd_probe(c);
    if (*list) return cmd_list(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::SyntaxError:
      case ErrorKind::ArityError:
      case ErrorKind::UnboundVariable:
        return kConfig;
      default:
        return kFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kConfig;
}
