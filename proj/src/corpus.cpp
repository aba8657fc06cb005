#include "qrr/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace qrr {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string::npos ? std::string::npos : p - start)));
    if (p == std::string::npos) break;
    start = p + sep.size();
  }
  return out;
}

// Splits a comma-separated list at top-level commas only.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

const std::regex& helper_call() {
  static const std::regex re(R"(\b(ex|co)\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\))");
  return re;
}

std::string rewrite_helpers(const std::string& text) {
  return std::regex_replace(text, helper_call(), "__$1_$2");
}

struct Context {
  std::string source;
  int line = 0;
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::ConfigError, source + ":" + std::to_string(line) + ": " + msg);
  }
};

dsl::Expr parse_in(const Context& ctx, const std::string& text, const std::string& what) {
  try {
    return dsl::parse(text);
  } catch (const Error& e) {
    fail(e.kind(), ctx.source + ":" + std::to_string(ctx.line) + ": " + what + ": " + e.what());
  }
}

Condition parse_condition(const Context& ctx, const std::string& text) {
  Condition c;
  c.text = text;
  static const char* ops[] = {"<=", ">=", "==", "!=", "<", ">"};
  for (const std::string& alt : split(text, " or ")) {
    std::size_t pos = std::string::npos;
    std::string op;
    for (const char* o : ops) {
      std::size_t p = alt.find(o);
      if (p != std::string::npos) {
        pos = p;
        op = o;
        break;
      }
    }
    if (pos == std::string::npos) ctx.error("precondition without comparison: " + alt);
    std::string left = rewrite_helpers(alt.substr(0, pos));
    std::string right = rewrite_helpers(alt.substr(pos + op.size()));
    c.alternatives.push_back({parse_in(ctx, left, "require"), op, parse_in(ctx, right, "require")});
  }
  return c;
}

Param parse_param(const Context& ctx, const std::string& text) {
  std::istringstream is(text);
  Param p;
  std::string kind;
  is >> p.name >> kind;
  std::string rest;
  std::getline(is, rest, '\0');
  rest = trim(rest);
  if (p.name.empty() || kind.empty()) ctx.error("param needs a name and a kind");
  try {
    if (kind == "int") {
      auto dots = rest.find("..");
      if (dots == std::string::npos) ctx.error("int range must look like lo..hi");
      p.kind = Param::Kind::IntRange;
      p.lo = std::stoll(rest.substr(0, dots));
      p.hi = std::stoll(rest.substr(dots + 2));
      if (p.hi < p.lo) ctx.error("empty int range for " + p.name);
    } else if (kind == "values" || kind == "grid") {
      p.kind = kind == "grid" ? Param::Kind::Grid : Param::Kind::Values;
      if (kind == "grid" && (rest.empty() || rest == "default")) {
        for (const auto& m : default_monomial_grid()) p.values.emplace_back(m);
      } else {
        for (const auto& item : split_args(rest)) {
          dsl::Value v = dsl::parse_value(item);
          if (kind == "grid" && std::holds_alternative<Coefficient>(v)) {
            v = Monomial::constant(std::get<Coefficient>(v));
          }
          p.values.push_back(v);
        }
      }
      if (p.values.empty()) ctx.error("no values for " + p.name);
    } else {
      ctx.error("unknown param kind '" + kind + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    ctx.error("param " + p.name + ": " + e.what());
  } catch (const std::exception& e) {
    ctx.error("param " + p.name + ": " + e.what());
  }
  return p;
}

void finish_entry(const Context& ctx, IdentityEntry& e) {
  if (e.reading.lhs_text.empty() && e.variants.empty()) ctx.error(e.id + ": missing lhs");
  if (e.reading.rhs_text.empty() && e.variants.empty()) ctx.error(e.id + ": missing rhs");
  std::set<std::string> names;
  for (const auto& p : e.params) names.insert(p.name);
  auto compile = [&](Reading& r) {
    if (r.lhs_text.empty()) r.lhs_text = e.reading.lhs_text;
    if (r.rhs_text.empty()) r.rhs_text = e.reading.rhs_text;
    if (r.lhs_text.empty() || r.rhs_text.empty()) ctx.error(e.id + ": reading '" + r.name + "' is incomplete");
    r.lhs = parse_in(ctx, r.lhs_text, e.id + " lhs");
    r.rhs = parse_in(ctx, r.rhs_text, e.id + " rhs");
    for (const auto& ex : {r.lhs, r.rhs}) {
      for (const auto& v : dsl::free_variables(ex)) {
        if (!names.count(v)) ctx.error(e.id + ": free variable '" + v + "' is not a param");
      }
    }
  };
  if (!e.reading.lhs_text.empty() && !e.reading.rhs_text.empty()) compile(e.reading);
  for (auto& v : e.variants) compile(v);
  if (e.variants.size() == 1) ctx.error(e.id + ": a variant set needs at least two readings");
}

}  // namespace

const IdentityEntry* Corpus::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<Monomial> default_monomial_grid() {
  std::vector<Monomial> g;
  for (QExponent e : {QExponent(1, 2), QExponent(1), QExponent(3, 2), QExponent(2)}) {
    g.emplace_back(1, e);
    g.emplace_back(-1, e);
  }
  g.emplace_back(2, 1);
  g.emplace_back(-3, 2);
  return g;
}

GridProfile parse_profile(const std::string& name) {
  if (name == "quick") return GridProfile::Quick;
  if (name == "default") return GridProfile::Default;
  if (name == "full") return GridProfile::Full;
  fail(ErrorKind::ConfigError, "unknown grid profile '" + name + "' (expected quick, default or full)");
}

Corpus parse_corpus(const std::string& text, const std::string& source) {
  Corpus corpus;
  Context ctx{source, 0};
  std::istringstream is(text);
  std::string raw;
  std::optional<IdentityEntry> cur;
  std::string* target = nullptr;  // value receiving continuation lines
  int entry_line = 0;

  auto close = [&]() {
    if (!cur) return;
    Context at{source, entry_line};
    finish_entry(at, *cur);
    if (corpus.find(cur->id)) at.error("duplicate id " + cur->id);
    corpus.entries.push_back(std::move(*cur));
    cur.reset();
  };

  std::vector<std::pair<std::string, int>> pending_params, pending_requires;
  auto flush_pending = [&]() {
    if (!cur) return;
    for (auto& [t, l] : pending_params) cur->params.push_back(parse_param({source, l}, t));
    for (auto& [t, l] : pending_requires) cur->preconditions.push_back(parse_condition({source, l}, t));
    pending_params.clear();
    pending_requires.clear();
  };

  // Multi-line values are accumulated first and interpreted once complete.
  std::string* param_text = nullptr;
  while (std::getline(is, raw)) {
    ++ctx.line;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (std::isspace(static_cast<unsigned char>(line[0]))) {
      if (!target && !param_text) ctx.error("continuation line without a value");
      std::string* dst = target ? target : param_text;
      *dst += "\n" + t;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) ctx.error("expected 'key: value'");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    target = nullptr;
    param_text = nullptr;
    if (key == "id") {
      flush_pending();
      close();
      if (value.empty()) ctx.error("empty id");
      cur.emplace();
      cur->id = value;
      cur->line = ctx.line;
      entry_line = ctx.line;
      continue;
    }
    if (!cur) ctx.error("'" + key + "' before the first id");
    if (key == "title") {
      cur->title = value;
      target = &cur->title;
    } else if (key == "anchor") {
      cur->anchor = value;
      target = &cur->anchor;
    } else if (key == "lhs") {
      cur->reading.lhs_text = value;
      target = &cur->reading.lhs_text;
    } else if (key == "rhs") {
      cur->reading.rhs_text = value;
      target = &cur->reading.rhs_text;
    } else if (key == "note") {
      cur->notes = value;
      target = &cur->notes;
    } else if (key == "param") {
      pending_params.emplace_back(value, ctx.line);
      param_text = &pending_params.back().first;
    } else if (key == "require") {
      pending_requires.emplace_back(value, ctx.line);
      param_text = &pending_requires.back().first;
    } else if (key == "limit") {
      try {
        long long n = std::stoll(value);
        if (n <= 0) ctx.error("limit must be positive");
        cur->limit = static_cast<std::size_t>(n);
      } catch (const std::logic_error&) {
        ctx.error("bad limit '" + value + "'");
      }
    } else if (key.rfind("variant.", 0) == 0) {
      auto parts = split(key, ".");
      if (parts.size() != 3 || parts[1].empty()) ctx.error("variant keys look like variant.<name>.<field>");
      Reading* r = nullptr;
      for (auto& v : cur->variants) {
        if (v.name == parts[1]) r = &v;
      }
      if (!r) {
        cur->variants.push_back({});
        r = &cur->variants.back();
        r->name = parts[1];
      }
      if (parts[2] == "lhs") target = &r->lhs_text;
      else if (parts[2] == "rhs") target = &r->rhs_text;
      else if (parts[2] == "note") target = &r->note;
      else ctx.error("unknown variant field '" + parts[2] + "'");
      *target = value;
    } else {
      ctx.error("unknown key '" + key + "'");
    }
  }
  flush_pending();
  close();
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open corpus '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), path);
}

std::string binding_key(const dsl::Binding& b) {
  std::string out;
  for (const auto& [name, value] : b) {
    if (!out.empty()) out += ", ";
    out += name + "=" + dsl::to_string(value);
  }
  return out;
}

std::string violated_condition(const IdentityEntry& entry, const dsl::Binding& b) {
  if (entry.preconditions.empty()) return {};
  dsl::Binding scalars = b;
  for (const auto& [name, value] : b) {
    if (const auto* m = std::get_if<Monomial>(&value)) {
      scalars["__ex_" + name] = Coefficient(m->exponent().num(), m->exponent().den());
      scalars["__co_" + name] = m->coeff();
    } else {
      scalars["__ex_" + name] = Coefficient(0);
      scalars["__co_" + name] = std::get<Coefficient>(value);
    }
  }
  for (const auto& c : entry.preconditions) {
    bool ok = false;
    for (const auto& alt : c.alternatives) {
      Coefficient l = dsl::eval_scalar(alt.left, scalars);
      Coefficient r = dsl::eval_scalar(alt.right, scalars);
      int cmp = l < r ? -1 : (l > r ? 1 : 0);
      const std::string& op = alt.op;
      bool holds = (op == "<" && cmp < 0) || (op == "<=" && cmp <= 0) || (op == ">" && cmp > 0) ||
                   (op == ">=" && cmp >= 0) || (op == "==" && cmp == 0) || (op == "!=" && cmp != 0);
      if (holds) {
        ok = true;
        break;
      }
    }
    if (!ok) return c.text;
  }
  return {};
}

std::vector<dsl::Binding> grid_bindings(const IdentityEntry& entry, GridProfile profile,
                                        const dsl::Binding& overrides, bool filter) {
  std::vector<std::vector<dsl::Value>> axes;
  std::vector<std::string> names;
  for (const auto& p : entry.params) {
    names.push_back(p.name);
    std::vector<dsl::Value> axis;
    auto o = overrides.find(p.name);
    if (o != overrides.end()) {
      axis.push_back(o->second);
    } else if (p.kind == Param::Kind::IntRange) {
      for (std::int64_t k = p.lo; k <= p.hi; ++k) axis.emplace_back(Coefficient(k));
    } else {
      axis = p.values;
    }
    axes.push_back(std::move(axis));
  }
  for (const auto& [name, value] : overrides) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      fail(ErrorKind::ConfigError, entry.id + " has no parameter '" + name + "'");
    }
  }

  std::vector<dsl::Binding> all;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    dsl::Binding b;
    for (std::size_t i = 0; i < axes.size(); ++i) b[names[i]] = axes[i][idx[i]];
    all.push_back(std::move(b));
    std::size_t i = axes.size();
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) {
        i = axes.size() + 1;
        break;
      }
    }
    if (axes.empty() || i == axes.size() + 1) break;
  }

  std::vector<dsl::Binding> admissible, violating;
  for (auto& b : all) {
    (violated_condition(entry, b).empty() ? admissible : violating).push_back(std::move(b));
  }
  std::size_t limit = entry.limit;
  if (profile == GridProfile::Quick) limit = std::min<std::size_t>(limit, 6);
  if (profile == GridProfile::Full || !overrides.empty()) limit = std::numeric_limits<std::size_t>::max();
  auto thin = [](std::vector<dsl::Binding> v, std::size_t n) {
    if (v.size() <= n) return v;
    std::vector<dsl::Binding> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(v[i * v.size() / n]);
    return out;
  };
  std::vector<dsl::Binding> out = thin(std::move(admissible), limit);
  if (!filter) {
    // Keep a few inadmissible points so that the gating itself is exercised.
    std::size_t extra = limit == std::numeric_limits<std::size_t>::max() ? violating.size()
                                                                         : std::max<std::size_t>(1, limit / 4);
    for (auto& b : thin(std::move(violating), extra)) out.push_back(std::move(b));
  }
  return out;
}

}  // namespace qrr
