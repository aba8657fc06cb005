#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <json.hpp>
#include <thread>

#include "qrr/corpus.hpp"

namespace qrr {

namespace {

using Clock = std::chrono::steady_clock;

struct Task {
  const IdentityEntry* entry;
  const Reading* reading;
  dsl::Binding binding;
};

std::vector<const Reading*> readings_of(const IdentityEntry& e) {
  std::vector<const Reading*> out;
  if (e.has_variants()) {
    for (const auto& v : e.variants) out.push_back(&v);
  } else {
    out.push_back(&e.reading);
  }
  return out;
}

bool report_less(const Report& a, const Report& b) {
  if (a.id != b.id) return a.id < b.id;
  if (a.variant != b.variant) return a.variant < b.variant;
  return binding_key(a.binding) < binding_key(b.binding);
}

std::vector<Report> run_tasks(const std::vector<Task>& tasks, const VerifyOptions& options) {
  std::vector<Report> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      out[i] = verify_reading(*t.entry, *t.reading, t.binding, options.order, options.eval);
    }
  };
  unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || tasks.size() < 2) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(jobs, tasks.size()); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(out.begin(), out.end(), report_less);
  return out;
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skipped: return "SKIPPED";
    case Status::Error: return "ERROR";
  }
  return "?";
}

Report verify_reading(const IdentityEntry& entry, const Reading& reading, const dsl::Binding& binding,
                      const QExponent& order, const dsl::EvalOptions& eval) {
  Report r;
  r.id = entry.id;
  r.variant = reading.name;
  r.binding = binding;
  r.requested = order;
  r.verified = order;
  auto t0 = Clock::now();
  try {
    std::string why = violated_condition(entry, binding);
    if (!why.empty()) {
      r.status = Status::Skipped;
      r.message = "precondition " + why;
    } else {
      Series lhs = dsl::eval_expr(reading.lhs, binding, order, eval);
      Series rhs = dsl::eval_expr(reading.rhs, binding, order, eval);
      QExponent n = order;
      if (lhs.order() && *lhs.order() < n) n = *lhs.order();
      if (rhs.order() && *rhs.order() < n) n = *rhs.order();
      r.verified = n;
      Comparison c = equal_up_to(lhs, rhs, n);
      r.status = c.equal ? Status::Pass : Status::Fail;
      r.witness = c.witness;
    }
  } catch (const Error& e) {
    r.status = e.kind() == ErrorKind::FormallyDivergent ? Status::Skipped : Status::Error;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = Status::Error;
    r.message = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::vector<Report> verify_entry(const IdentityEntry& entry, const VerifyOptions& options,
                                 const dsl::Binding& overrides) {
  std::vector<Task> tasks;
  auto bindings = grid_bindings(entry, options.profile, overrides);
  for (const Reading* rd : readings_of(entry)) {
    for (const auto& b : bindings) tasks.push_back({&entry, rd, b});
  }
  return run_tasks(tasks, options);
}

ProbeResult summarize_probe(const IdentityEntry& entry, const std::vector<Report>& reports) {
  ProbeResult p;
  p.id = entry.id;
  for (const auto& v : entry.variants) {
    VariantOutcome o;
    o.name = v.name;
    for (const auto& r : reports) {
      if (r.id != entry.id || r.variant != v.name) continue;
      switch (r.status) {
        case Status::Pass: ++o.pass; break;
        case Status::Fail: ++o.fail; break;
        case Status::Skipped: ++o.skipped; break;
        case Status::Error: ++o.error; break;
      }
      if ((r.status == Status::Fail || r.status == Status::Error) && !o.witness) o.witness = r;
    }
    o.passes = o.fail == 0 && o.error == 0 && o.pass > 0;
    p.variants.push_back(std::move(o));
  }
  std::size_t passing = 0;
  for (const auto& o : p.variants) {
    if (o.passes) {
      ++passing;
      p.selected = o.name;
    }
  }
  if (passing != 1) p.selected.reset();
  return p;
}

ProbeResult probe_variants(const IdentityEntry& entry, const VerifyOptions& options) {
  if (!entry.has_variants()) fail(ErrorKind::ConfigError, entry.id + " has no variants to probe");
  return summarize_probe(entry, verify_entry(entry, options));
}

RunResult verify_all(const Corpus& corpus, const VerifyOptions& options, const std::vector<std::string>& ids) {
  auto t0 = Clock::now();
  std::vector<Task> tasks;
  std::vector<const IdentityEntry*> chosen;
  for (const auto& id : ids) {
    if (!corpus.find(id)) fail(ErrorKind::ConfigError, "unknown identity '" + id + "'");
  }
  for (const auto& e : corpus.entries) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), e.id) == ids.end()) continue;
    chosen.push_back(&e);
    auto bindings = grid_bindings(e, options.profile);
    for (const Reading* rd : readings_of(e)) {
      for (const auto& b : bindings) tasks.push_back({&e, rd, b});
    }
  }
  RunResult res;
  res.reports = run_tasks(tasks, options);
  Summary& s = res.summary;
  s.degenerate_order = options.order <= QExponent(0);
  for (const auto& r : res.reports) {
    ++s.counts[r.status];
    const IdentityEntry* e = corpus.find(r.id);
    if (!e->has_variants() && (r.status == Status::Fail || r.status == Status::Error)) ++s.failing_plain;
  }
  std::sort(chosen.begin(), chosen.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* e : chosen) {
    if (e->has_variants()) s.probes.push_back(summarize_probe(*e, res.reports));
  }
  s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

std::string to_record(const Report& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["variant"] = r.variant;
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [k, v] : r.binding) b[k] = dsl::to_string(v);
  j["binding"] = b;
  j["status"] = std::string(to_string(r.status));
  j["order"] = r.requested.str();
  j["verified"] = r.verified.str();
  if (r.witness) {
    j["witness"] = {{"exponent", r.witness->exponent.str()},
                    {"lhs", r.witness->lhs.get_str()},
                    {"rhs", r.witness->rhs.get_str()}};
  } else {
    j["witness"] = nullptr;
  }
  j["message"] = r.message;
  return j.dump();
}

std::string to_human(const Report& r) {
  std::string s = std::string(to_string(r.status));
  s.resize(8, ' ');
  s += r.id;
  if (!r.variant.empty()) s += " {" + r.variant + "}";
  if (!r.binding.empty()) s += " [" + binding_key(r.binding) + "]";
  if (r.status == Status::Pass || r.status == Status::Fail) {
    s += " order " + r.verified.str();
    if (r.verified < r.requested) s += " (requested " + r.requested.str() + ")";
  }
  if (r.witness) {
    s += ": first mismatch at q^" + r.witness->exponent.str() + ", lhs " + r.witness->lhs.get_str() +
         ", rhs " + r.witness->rhs.get_str();
  }
  if (!r.message.empty()) s += ": " + r.message;
  return s;
}

}  // namespace qrr
