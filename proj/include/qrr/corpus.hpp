#pragma once

// Identity corpus: loading, parameter grids, verification and the errata
// probe.
//
// File format (UTF-8, one record per identity):
//
//   # comment
//   id: RR1
//   title: free text
//   anchor: verbatim quote of the source display
//   lhs: sum(n, 0, inf, qpow(n^2) / poch(q, 1, n))
//   rhs: 1 / pochm(5, inf, q, q^4)
//   param: m int 0..12          integer range (inclusive)
//   param: nu values 0, 1/2, 1  explicit scalar or monomial list
//   param: a grid               the default monomial grid
//   param: z grid q, -q^2       explicit monomial list
//   require: ex(z) > 0          precondition; several `require` lines are
//                               conjoined, ` or ` separates alternatives
//   limit: 24                   bindings kept after filtering (default 24)
//   variant.printed.rhs: ...    alternative reading; lhs/rhs default to the
//   variant.printed.note: ...   record's own
//   note: free text
//
// A line starting with whitespace continues the previous value. Expressions
// in `require` lines may use ex(x) and co(x) for the exponent and the
// coefficient of a monomial-valued parameter x, with comparisons
// <, <=, >, >=, ==, !=.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrr/dsl.hpp"

namespace qrr {

struct Param {
  enum class Kind { IntRange, Values, Grid };
  std::string name;
  Kind kind = Kind::IntRange;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<dsl::Value> values;  // Values and Grid
};

struct Reading {
  std::string name;  // empty for the record's own reading
  std::string lhs_text;
  std::string rhs_text;
  dsl::Expr lhs;
  dsl::Expr rhs;
  std::string note;
};

struct Condition {
  std::string text;
  // Alternatives, each a chain of comparisons.
  struct Comparison {
    dsl::Expr left;
    std::string op;
    dsl::Expr right;
  };
  std::vector<Comparison> alternatives;
};

struct IdentityEntry {
  std::string id;
  std::string title;
  std::string anchor;
  Reading reading;                // lhs/rhs as written
  std::vector<Reading> variants;  // candidate readings, if any
  std::vector<Param> params;
  std::vector<Condition> preconditions;
  std::size_t limit = 24;
  std::string notes;
  int line = 0;  // where the record starts

  bool has_variants() const { return !variants.empty(); }
};

struct Corpus {
  std::vector<IdentityEntry> entries;
  const IdentityEntry* find(const std::string& id) const;
};

/// Throws Error(ConfigError) with file:line context; expression errors keep
/// their kind.
Corpus parse_corpus(const std::string& text, const std::string& source = "<corpus>");
Corpus load_corpus(const std::string& path);

/// Default specialisation grid for continuous parameters.
std::vector<Monomial> default_monomial_grid();

enum class GridProfile { Quick, Default, Full };
/// Throws ConfigError for unknown names.
GridProfile parse_profile(const std::string& name);

std::string binding_key(const dsl::Binding& b);

/// Empty when every precondition holds, otherwise the first violated one.
std::string violated_condition(const IdentityEntry& entry, const dsl::Binding& b);

/// All bindings for an entry: the cartesian product of the parameter
/// ranges, with `overrides` replacing whole parameters, filtered by the
/// preconditions only when `filter` is set, then thinned deterministically
/// to the entry limit (per profile).
std::vector<dsl::Binding> grid_bindings(const IdentityEntry& entry, GridProfile profile,
                                        const dsl::Binding& overrides = {}, bool filter = false);

enum class Status { Pass, Fail, Skipped, Error };
std::string_view to_string(Status s);

struct Report {
  std::string id;
  std::string variant;  // empty for the record's own reading
  dsl::Binding binding;
  Status status = Status::Pass;
  QExponent requested = 0;
  QExponent verified = 0;  // order actually compared
  std::optional<Mismatch> witness;
  std::string message;  // violated condition or error text
  double seconds = 0;
};

struct VerifyOptions {
  QExponent order = 40;
  GridProfile profile = GridProfile::Default;
  unsigned jobs = 1;
  dsl::EvalOptions eval;
};

Report verify_reading(const IdentityEntry& entry, const Reading& reading, const dsl::Binding& binding,
                      const QExponent& order, const dsl::EvalOptions& eval = {});

/// Verifies the record's own reading, or every variant when it has some.
std::vector<Report> verify_entry(const IdentityEntry& entry, const VerifyOptions& options,
                                 const dsl::Binding& overrides = {});

struct VariantOutcome {
  std::string name;
  bool passes = false;  // no FAIL/ERROR and at least one PASS
  std::size_t pass = 0, fail = 0, skipped = 0, error = 0;
  std::optional<Report> witness;  // first FAIL or ERROR
};

struct ProbeResult {
  std::string id;
  std::vector<VariantOutcome> variants;
  std::optional<std::string> selected;  // exactly one variant passes
  bool inconclusive() const { return !selected.has_value(); }
};

ProbeResult summarize_probe(const IdentityEntry& entry, const std::vector<Report>& reports);
/// Throws ConfigError when the entry has no variants.
ProbeResult probe_variants(const IdentityEntry& entry, const VerifyOptions& options);

struct Summary {
  std::map<Status, std::size_t> counts;
  std::size_t failing_plain = 0;  // FAIL or ERROR outside variant entries
  std::vector<ProbeResult> probes;
  bool degenerate_order = false;
  double seconds = 0;
};

struct RunResult {
  std::vector<Report> reports;  // sorted by (id, variant, binding)
  Summary summary;
};

RunResult verify_all(const Corpus& corpus, const VerifyOptions& options,
                     const std::vector<std::string>& ids = {});

/// One JSON object per line, keys sorted; timings are left out so runs are
/// byte-comparable.
std::string to_record(const Report& r);
std::string to_human(const Report& r);

}  // namespace qrr
