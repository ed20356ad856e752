#include "noether/certificate.hpp"

#include <cmath>

#include "pipeline_detail.hpp"

namespace noether {

using nlohmann::json;

namespace {

json vars_json(const VarSpace& vs) {
  json out = json::array();
  for (const auto& v : vs.vars()) out.push_back({{"family", v.family}, {"idx", v.idx}, {"origin", v.origin}});
  return out;
}

VarSpace vars_from(const json& j) {
  std::vector<Variable> out;
  for (const auto& v : j) out.push_back({v.at("family").get<std::string>(), v.at("idx").get<std::vector<i64>>(), v.at("origin").get<std::string>()});
  return VarSpace(std::move(out));
}

json roots_json(const std::vector<Root>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(r.k);
  return out;
}

std::vector<Root> roots_from(const json& j, i64 N) {
  std::vector<Root> out;
  for (const auto& k : j) out.emplace_back(k.get<i64>(), N);
  return out;
}

json map_json(const MonomialMap& f) {
  std::vector<Root> c;
  for (std::size_t v = 0; v < f.size(); ++v) c.push_back(f.coeff(v));
  return {{"coeff", roots_json(c)}, {"exps", f.exps()}};
}

MonomialMap map_from(const json& j, i64 N) { return MonomialMap(roots_from(j.at("coeff"), N), j.at("exps").get<IntMatrix>()); }

json action_json(const GroupAction& a) {
  if (!a.group) return nullptr;
  json gens = json::array();
  for (const auto& f : a.gens) gens.push_back(map_json(f));
  return {{"level", a.level}, {"vars", vars_json(a.vars)}, {"gens", gens}, {"homomorphism", a.homomorphism}, {"faithful", a.faithful}};
}

GroupAction action_from(const json& j, const std::shared_ptr<const PcGroup>& g) {
  GroupAction a;
  if (j.is_null()) return a;
  a.group = g;
  a.level = j.at("level").get<i64>();
  a.vars = vars_from(j.at("vars"));
  for (const auto& f : j.at("gens")) a.gens.push_back(map_from(f, a.level));
  a.homomorphism = j.at("homomorphism").get<bool>();
  a.faithful = j.at("faithful").get<bool>();
  return a;
}

json sum_json(const FormalSum& s) {
  json out = json::array();
  for (const auto& [k, c] : s.terms()) out.push_back(json::array({k, c.str()}));
  return out;
}

FormalSum sum_from(const json& j, i64 N) {
  FormalSum s(N);
  for (const auto& t : j) s.add(Root(t.at(0).get<i64>(), N), Rational(t.at(1).get<std::string>()));
  return s;
}

json linear_json(const LinearMap& m) {
  json rows = json::array();
  for (const auto& row : m.m) {
    json r = json::array();
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (!row[t].is_zero()) r.push_back(json::array({t, sum_json(row[t])}));
    }
    rows.push_back(r);
  }
  return rows;
}

LinearMap linear_from(const json& j, std::size_t cols, i64 N) {
  LinearMap m;
  for (const auto& r : j) {
    std::vector<FormalSum> row(cols, FormalSum(N));
    for (const auto& e : r) row.at(e.at(0).get<std::size_t>()) = sum_from(e.at(1), N);
    m.m.push_back(std::move(row));
  }
  return m;
}

std::string outcome_name(PitVerdict::Outcome o) {
  switch (o) {
    case PitVerdict::Outcome::Equal: return "equal";
    case PitVerdict::Outcome::Unequal: return "unequal";
    default: return "inconclusive";
  }
}

json pit_json(const PitVerdict& v) {
  return {{"outcome", outcome_name(v.outcome)}, {"trials", v.trials},   {"resamples", v.resamples},   {"degree", v.degree},
          {"log2_per_trial", v.log2_per_trial}, {"log2_total", v.log2_total}, {"witness", v.witness}, {"detail", v.detail}};
}

PitVerdict pit_from(const json& j) {
  PitVerdict v;
  const auto o = j.at("outcome").get<std::string>();
  v.outcome = o == "equal" ? PitVerdict::Outcome::Equal : o == "unequal" ? PitVerdict::Outcome::Unequal : PitVerdict::Outcome::Inconclusive;
  v.trials = j.at("trials").get<int>();
  v.resamples = j.at("resamples").get<int>();
  v.degree = j.at("degree").get<i64>();
  v.log2_per_trial = j.at("log2_per_trial").get<double>();
  v.log2_total = j.at("log2_total").get<double>();
  v.witness = j.at("witness").get<std::vector<u64>>();
  v.detail = j.at("detail").get<std::string>();
  return v;
}

json sub_json(const Substitution& s) {
  if (const auto* m = std::get_if<MonomialSub>(&s)) {
    return {{"type", "monomial"}, {"new_vars", vars_json(m->new_vars)}, {"coeff", roots_json(m->coeff)}, {"exps", m->exps}, {"sublattice", m->sublattice}};
  }
  if (const auto* l = std::get_if<LinearSub>(&s)) {
    const std::size_t cols = l->matrix.m.empty() ? 0 : l->matrix.m[0].size();
    return {{"type", "linear"}, {"new_vars", vars_json(l->new_vars)}, {"cols", cols}, {"rows", linear_json(l->matrix)}, {"dft_order", l->dft_order}};
  }
  if (const auto* d = std::get_if<RatioDrop>(&s)) return {{"type", "drop"}, {"dropped", d->dropped}};
  const auto& r = std::get<RationalSub>(s);
  return {{"type", "rational"}, {"new_vars", vars_json(r.new_vars)}, {"label", r.label}};
}

}  // namespace

namespace {

json step_json(const StepRecord& s) {
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json pit = json::array();
  for (const auto& v : s.pit) pit.push_back(pit_json(v));
  json out = {{"kind", s.kind}, {"node", s.node}, {"description", s.description}, {"checks", checks}, {"pit", pit},
              {"passed", s.passed()}, {"result", action_json(s.result)}};
  out["substitution"] = s.sub ? sub_json(*s.sub) : json(nullptr);
  out["drop"] = s.drop ? json{{"dropped", s.drop->dropped}, {"survivors", s.drop->survivors}, {"invariants", s.drop->invariants}} : json(nullptr);
  out["cycle"] = s.cycle ? json{{"n", s.cycle->n}, {"block", s.cycle->block}, {"family", s.cycle->family}, {"prefix", s.cycle->prefix}}
                         : json(nullptr);
  return out;
}

json pattern_json(const MetacyclicPattern& p) {
  json spec = json::array();
  for (const auto& r : p.spectrum) spec.push_back(json::array({r.k, r.N}));
  return {{"form", p.form == MetacyclicPattern::Form::V ? "V" : "U"}, {"p", p.p}, {"m", p.m}, {"n", p.n}, {"r", p.r}, {"k", p.k},
          {"sigma", p.sigma}, {"tau", p.tau}, {"vars", p.vars}, {"spectrum", spec}};
}

MetacyclicPattern pattern_from(const json& j) {
  MetacyclicPattern p;
  p.form = j.at("form").get<std::string>() == "V" ? MetacyclicPattern::Form::V : MetacyclicPattern::Form::U;
  p.p = j.at("p").get<i64>();
  p.m = j.at("m").get<int>();
  p.n = j.at("n").get<int>();
  p.r = j.at("r").get<int>();
  p.k = j.at("k").get<i64>();
  p.sigma = j.at("sigma").get<std::size_t>();
  p.tau = j.at("tau").get<std::size_t>();
  p.vars = j.at("vars").get<std::vector<std::string>>();
  for (const auto& r : j.at("spectrum")) p.spectrum.emplace_back(r.at(0).get<i64>(), r.at(1).get<i64>());
  return p;
}

Terminal::Kind terminal_kind(const std::string& s) {
  for (auto k : {Terminal::Kind::None, Terminal::Kind::LinearAction, Terminal::Kind::DiagonalFixedField, Terminal::Kind::MetacyclicPattern}) {
    if (terminal_name(k) == s) return k;
  }
  throw ArgumentError("certificate: unknown terminal '" + s + "'");
}

Certificate::Status status_from(const std::string& s) {
  for (auto st : {Certificate::Status::Verified, Certificate::Status::Incomplete, Certificate::Status::InputError}) {
    if (status_name(st) == s) return st;
  }
  throw ArgumentError("certificate: unknown status '" + s + "'");
}

}  // namespace

json certificate_to_json(const Certificate& c, const std::string& input) {
  std::string in = input;
  if (in.empty() && c.initial.group) in = format_group_spec(*c.initial.group);
  json j;
  j["schema_version"] = kCertificateSchemaVersion;
  j["input"] = in;
  const GroupSummary& g = c.group;
  j["group"] = {{"name", g.name}, {"p", g.p}, {"order", g.order}, {"rank", g.rank}, {"nilpotency_class", g.nilpotency_class},
                {"a", g.a}, {"h_generators", g.h_generators}, {"top", g.top}, {"family", g.family}};
  j["pipeline"] = c.pipeline;
  j["session"] = {{"seed", c.options.seed}, {"trials", c.options.trials}, {"prime_bits", c.options.prime_bits},
                  {"max_order", c.options.max_order}, {"q1", c.q1}, {"q2", c.q2}, {"level", c.level}};
  j["initial"] = action_json(c.initial);
  j["steps"] = json::array();
  for (const auto& s : c.steps) j["steps"].push_back(step_json(s));
  const Terminal& t = c.terminal;
  j["terminal"] = {{"kind", terminal_name(t.kind)}, {"generators", t.generators}, {"lattice", t.lattice}, {"linear_vars", t.linear_vars},
                   {"pattern", t.pattern ? pattern_json(*t.pattern) : json(nullptr)}};
  j["status"] = status_name(c.status);
  j["message"] = c.message;
  j["notes"] = c.notes;
  const double b = c.log2_error_bound();
  j["summary"] = {{"error_bound_log2", std::isfinite(b) ? json(b) : json(nullptr)},
                  {"ledger_ok", c.transcendence_ledger_ok()},
                  {"steps", c.steps.size()},
                  {"lemma24_nodes", c.count_node(node::kLemma24)}};
  return j;
}

std::string certificate_dump(const Certificate& c, const std::string& input) { return certificate_to_json(c, input).dump(2) + "\n"; }

Certificate certificate_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kCertificateSchemaVersion) throw ArgumentError("certificate: unsupported schema version");
    Certificate c;
    const json& g = j.at("group");
    c.group.name = g.at("name").get<std::string>();
    c.group.p = g.at("p").get<i64>();
    c.group.order = g.at("order").get<i64>();
    c.group.rank = g.at("rank").get<std::size_t>();
    c.group.nilpotency_class = g.at("nilpotency_class").get<int>();
    c.group.a = g.at("a").get<int>();
    c.group.h_generators = g.at("h_generators").get<std::vector<std::string>>();
    c.group.top = g.at("top").get<std::string>();
    c.group.family = g.at("family").get<std::string>();
    c.pipeline = j.at("pipeline").get<std::string>();
    const json& s = j.at("session");
    c.options.seed = s.at("seed").get<u64>();
    c.options.trials = s.at("trials").get<int>();
    c.options.prime_bits = s.at("prime_bits").get<int>();
    c.options.max_order = s.at("max_order").get<i64>();
    c.q1 = s.at("q1").get<u64>();
    c.q2 = s.at("q2").get<u64>();
    c.level = s.at("level").get<i64>();
    std::shared_ptr<const PcGroup> grp;
    const std::string input = j.at("input").get<std::string>();
    if (!j.at("initial").is_null()) grp = std::make_shared<const PcGroup>(parse_group_spec(input));
    c.initial = action_from(j.at("initial"), grp);
    GroupAction prev = c.initial;
    for (const json& sj : j.at("steps")) {
      StepRecord st;
      st.kind = sj.at("kind").get<std::string>();
      st.node = sj.at("node").get<std::string>();
      st.description = sj.at("description").get<std::string>();
      for (const auto& cj : sj.at("checks")) st.checks.push_back({cj.at("name").get<std::string>(), cj.at("passed").get<bool>(), cj.at("detail").get<std::string>()});
      for (const auto& pj : sj.at("pit")) st.pit.push_back(pit_from(pj));
      st.result = action_from(sj.at("result"), grp);
      if (const json& d = sj.at("drop"); !d.is_null()) {
        st.drop = DropRecord{d.at("dropped").get<std::vector<std::string>>(), d.at("survivors").get<std::vector<std::string>>(), d.at("invariants").get<int>()};
      }
      if (const json& cy = sj.at("cycle"); !cy.is_null()) {
        st.cycle = CycleRecord{cy.at("n").get<int>(), cy.at("block").get<std::vector<std::string>>(), cy.at("family").get<std::string>(),
                               cy.at("prefix").get<std::vector<i64>>()};
      }
      if (const json& sub = sj.at("substitution"); !sub.is_null()) {
        const std::string type = sub.at("type").get<std::string>();
        const i64 N = st.result.level;
        if (type == "monomial") {
          MonomialSub m;
          m.new_vars = vars_from(sub.at("new_vars"));
          m.coeff = roots_from(sub.at("coeff"), N);
          m.exps = sub.at("exps").get<IntMatrix>();
          m.sublattice = sub.at("sublattice").get<bool>();
          st.sub = m;
        } else if (type == "linear") {
          LinearSub l;
          l.new_vars = vars_from(sub.at("new_vars"));
          l.matrix = linear_from(sub.at("rows"), sub.at("cols").get<std::size_t>(), N);
          l.dft_order = sub.at("dft_order").get<i64>();
          st.sub = l;
        } else if (type == "drop") {
          st.sub = RatioDrop{sub.at("dropped").get<std::vector<std::size_t>>()};
        } else if (type == "rational") {
          if (!st.cycle) throw ArgumentError("certificate: rational step without cycle parameters");
          std::vector<std::size_t> block;
          for (const auto& name : st.cycle->block) {
            std::size_t v = 0;
            while (v < prev.vars.size() && prev.vars.name(v) != name) ++v;
            if (v == prev.vars.size()) throw ArgumentError("certificate: unknown block variable " + name);
            block.push_back(v);
          }
          st.sub = lemma24_sub(st.cycle->n, prev.level, prev.vars, block, st.cycle->family, st.cycle->prefix);
        } else {
          throw ArgumentError("certificate: unknown substitution type '" + type + "'");
        }
      }
      if (st.result.group) prev = st.result;
      c.steps.push_back(std::move(st));
    }
    const json& t = j.at("terminal");
    c.terminal.kind = terminal_kind(t.at("kind").get<std::string>());
    c.terminal.generators = t.at("generators").get<std::vector<std::string>>();
    c.terminal.lattice = t.at("lattice").get<IntMatrix>();
    c.terminal.linear_vars = t.at("linear_vars").get<std::vector<std::string>>();
    if (!t.at("pattern").is_null()) c.terminal.pattern = pattern_from(t.at("pattern"));
    c.status = status_from(j.at("status").get<std::string>());
    c.message = j.at("message").get<std::string>();
    c.notes = j.at("notes").get<std::vector<std::string>>();
    return c;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("certificate: ") + e.what());
  } catch (const ParseError& e) {
    throw ArgumentError(std::string("certificate input: ") + e.what());
  }
}

namespace {

bool same_action(const GroupAction& a, const GroupAction& b) {
  if (a.level != b.level || a.vars.size() != b.vars.size() || a.gens != b.gens) return false;
  for (std::size_t v = 0; v < a.vars.size(); ++v) {
    if (a.vars.name(v) != b.vars.name(v)) return false;
  }
  return true;
}

bool all_equal(const std::vector<PitVerdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const PitVerdict& v) { return v.equal(); });
}

}  // namespace

RecheckReport recheck_certificate(const json& j) {
  RecheckReport rep;
  Certificate c;
  try {
    c = certificate_from_json(j);
  } catch (const std::exception& e) {
    rep.failures.push_back(e.what());
    return rep;
  }
  bool checks_pass = true;
  if (c.initial.group) {
    const VerifyContext ctx = VerifyContext::make(c.level, c.options.prime_bits, c.options.trials, c.options.seed);
    GroupAction prev = c.initial;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      const StepRecord& s = c.steps[i];
      const std::string where = "step " + std::to_string(i) + " (" + s.kind + ")";
      auto fail = [&](const std::string& msg) { rep.failures.push_back(where + ": " + msg); };
      for (const auto& ch : s.checks) checks_pass &= ch.passed;
      try {
        if (!verify_homomorphism(s.result).ok) fail("result is not a homomorphism");
        if (s.kind == "restriction") {
          if (!same_action(s.result, c.initial)) fail("restriction differs from the initial action");
          if (!verify_faithful(s.result, c.options.max_order).ok) fail("restriction is not faithful");
        } else if (s.kind == "generators" || s.kind == "pattern") {
          if (!same_action(prev, s.result)) fail("action changed without a substitution");
        } else if (!s.sub) {
          if (s.kind != "diagonal") fail("missing substitution");
        } else if (const auto* m = std::get_if<MonomialSub>(&*s.sub)) {
          if (!m->sublattice && !verify_invertible(*m).ok) fail("monomial substitution is not invertible");
          if (!same_action(apply_monomial_sub(prev, *m), s.result)) fail("re-applied monomial substitution disagrees");
        } else if (const auto* l = std::get_if<LinearSub>(&*s.sub)) {
          if (!verify_invertible(*l, ctx).ok) fail("linear substitution is not invertible");
          if (!same_action(apply_linear_sub(prev, *l, s.result.gens, ctx), s.result)) fail("re-applied linear substitution disagrees");
        } else if (const auto* d = std::get_if<RatioDrop>(&*s.sub)) {
          if (!same_action(drop_fibers(prev, d->dropped).first, s.result)) fail("re-applied fiber drop disagrees");
        } else if (const auto* r = std::get_if<RationalSub>(&*s.sub)) {
          const auto inv = verify_invertible(*r, ctx);
          if (!inv.ok) fail("rational substitution is not invertible");
          const auto [next, verdicts] = apply_rational_sub(prev, *r, s.result.gens, ctx);
          if (!all_equal(verdicts) || !same_action(next, s.result)) fail("claimed diagonal action not confirmed");
        }
        if (s.kind == "diagonal") {
          const DiagonalAction D = diagonal_from_action(s.result);
          if (c.terminal.kind == Terminal::Kind::DiagonalFixedField && fixed_generators(D) != c.terminal.lattice) fail("lattice differs");
          if (!brute_check(D, c.terminal.lattice, 1).ok) fail("brute check failed");
        }
        if (s.kind == "pattern" && c.terminal.pattern) {
          const MetacyclicPattern& p = *c.terminal.pattern;
          std::vector<std::size_t> keep;
          for (const auto& name : p.vars) {
            std::size_t v = 0;
            while (v < s.result.vars.size() && s.result.vars.name(v) != name) ++v;
            keep.push_back(v);
          }
          const MatchResult m = match_metacyclic(detail::restrict_action(s.result, keep), p.sigma, p.tau);
          if (!m.pattern || m.pattern->m != p.m || m.pattern->n != p.n || m.pattern->r != p.r || m.pattern->k != p.k) fail("pattern not re-matched");
        }
      } catch (const std::exception& e) {
        fail(e.what());
      }
      if (s.result.group) prev = s.result;
      ++rep.steps_checked;
    }
    if (c.terminal.kind == Terminal::Kind::LinearAction) {
      for (const auto& f : prev.gens) {
        if (!f.is_linear()) rep.failures.push_back("terminal action is not linear");
      }
    }
    if (!c.transcendence_ledger_ok()) rep.failures.push_back("transcendence degree ledger broken");
  }
  const bool verified = c.status == Certificate::Status::Verified;
  if (verified && !checks_pass) rep.failures.push_back("status verified with a failing check");
  if (verified && c.terminal.kind == Terminal::Kind::None) rep.failures.push_back("status verified without a terminal");
  if (!verified && rep.failures.empty() && checks_pass && c.status == Certificate::Status::Incomplete && c.message.empty()) {
    rep.failures.push_back("incomplete status without a message");
  }
  rep.ok = rep.failures.empty();
  return rep;
}

}  // namespace noether
