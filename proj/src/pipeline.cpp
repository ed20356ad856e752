#include "noether/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "pipeline_detail.hpp"

namespace noether {

using boost::multiprecision::cpp_int;

bool StepRecord::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  for (const auto& v : pit) {
    if (!v.equal()) return false;
  }
  return true;
}

namespace {

double union_bound(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0;
  for (double t : terms) acc += std::exp2(t - top);
  return top + std::log2(acc);
}

}  // namespace

double Certificate::log2_error_bound() const {
  std::vector<double> terms;
  for (const auto& st : steps)
    for (const auto& v : st.pit) terms.push_back(v.log2_total);
  return union_bound(terms);
}

double CycleReport::log2_error_bound() const {
  std::vector<double> terms;
  for (const auto& v : pit) terms.push_back(v.log2_total);
  return union_bound(terms);
}

CycleReport verify_cycle_linearization(int n, const PipelineOptions& opt) {
  if (n < 2) throw ArgumentError("cycle length n must be >= 2");
  const auto primes = prime_factors(n);
  if (primes.size() != 1) throw ArgumentError("cycle length n must be a prime power");
  CycleReport rep;
  rep.n = n;
  rep.level = n;
  const auto g = std::make_shared<const PcGroup>(
      parse_group_spec("p = " + std::to_string(primes[0]) + "\ngenerators = t\norders = " + std::to_string(n) + "\nH = t\ntop = 1\n"));
  GroupAction a;
  a.group = g;
  a.level = n;
  std::vector<Variable> vars;
  std::vector<std::size_t> block;
  for (int i = 1; i < n; ++i) {
    vars.push_back({"v", {i}, "cycle"});
    block.push_back(static_cast<std::size_t>(i - 1));
  }
  a.vars = VarSpace(std::move(vars));
  a.gens = {lemma24_cycle(n, n)};
  const VerifyContext ctx = VerifyContext::make(n, opt.prime_bits, opt.trials, opt.seed);
  const RationalSub sub = lemma24_sub(n, n, a.vars, block);
  const InvertibilityEvidence inv = verify_invertible(sub, ctx);
  rep.invertible = inv.ok;
  rep.pit = inv.pit;
  try {
    auto [next, verdicts] = apply_rational_sub(a, sub, {lemma24_claim(n, n, 1)}, ctx);
    rep.diagonal = std::all_of(verdicts.begin(), verdicts.end(), [](const PitVerdict& v) { return v.equal(); });
    rep.pit = std::move(verdicts);
  } catch (const VerificationError& e) {
    rep.detail = e.what();
  }
  return rep;
}

int Certificate::count_node(const std::string& tag) const {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [&](const StepRecord& s) { return s.node == tag; }));
}

int Certificate::count_kind(const std::string& kind) const {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [&](const StepRecord& s) { return s.kind == kind; }));
}

bool Certificate::transcendence_ledger_ok() const {
  const std::size_t n0 = initial.vars.size();
  std::size_t dropped = 0;
  for (const auto& st : steps) {
    if (st.drop) dropped += static_cast<std::size_t>(st.drop->invariants);
    if (st.result.vars.size() + dropped != n0) return false;
  }
  return true;
}

std::string status_name(Certificate::Status s) {
  switch (s) {
    case Certificate::Status::Verified:
      return "verified";
    case Certificate::Status::Incomplete:
      return "incomplete";
    case Certificate::Status::InputError:
      return "input-error";
  }
  return "?";
}

std::string terminal_name(Terminal::Kind k) {
  switch (k) {
    case Terminal::Kind::None:
      return "none";
    case Terminal::Kind::LinearAction:
      return "LinearAction";
    case Terminal::Kind::DiagonalFixedField:
      return "DiagonalFixedField";
    case Terminal::Kind::MetacyclicPattern:
      return "MetacyclicPattern";
  }
  return "?";
}

namespace detail {

StepRecord make_step(std::string kind, std::string node, std::string description, const GroupAction& result) {
  StepRecord st;
  st.kind = std::move(kind);
  st.node = std::move(node);
  st.description = std::move(description);
  st.result = result;
  add_check(st, "homomorphism", result.homomorphism, result.homomorphism ? "relators hold exactly" : "not re-verified");
  return st;
}

void add_check(StepRecord& st, std::string name, bool passed, std::string detail) {
  st.checks.push_back({std::move(name), passed, std::move(detail)});
}

void require(StepRecord& st, const std::string& name, bool passed, const std::string& detail) {
  add_check(st, name, passed, detail);
  if (!passed) throw VerificationError(st.description + ": " + name + " failed: " + detail);
}

std::vector<std::size_t> family_indices(const VarSpace& vars, const std::string& family, const std::vector<i64>& prefix) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const Variable& x = vars[v];
    if (x.family != family || x.idx.size() < prefix.size()) continue;
    if (std::equal(prefix.begin(), prefix.end(), x.idx.begin())) out.push_back(v);
  }
  return out;
}

MonomialSub identity_sub(const VarSpace& vars, i64 N) {
  return MonomialSub{vars, std::vector<Root>(vars.size(), Root::one(N)), identity_matrix(vars.size())};
}

std::optional<i64> cycle_power(const MonomialMap& f, const std::vector<std::size_t>& block, int n) {
  const MonomialMap r = f.restrict(block);
  const MonomialMap cyc = lemma24_cycle(n, f.level());
  MonomialMap acc = MonomialMap::identity(block.size(), f.level());
  for (i64 t = 0; t < n; ++t) {
    if (acc == r) return t;
    acc = compose(cyc, acc);
  }
  return std::nullopt;
}

StepRecord lemma24_step(GroupAction& a, const std::vector<std::size_t>& block, int n, const std::string& family,
                        const std::vector<i64>& prefix, const VerifyContext& ctx) {
  const i64 N = a.level;
  const RationalSub sub = lemma24_sub(n, N, a.vars, block, family, prefix);
  std::vector<bool> in_block(a.vars.size(), false);
  for (auto v : block) in_block[v] = true;
  std::vector<MonomialMap> claimed;
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    const MonomialMap& f = a.gens[k];
    const auto t = cycle_power(f, block, n);
    if (!t) {
      throw VerificationError("cyclic linearization: " + a.group->name(k) + " does not act on " + a.vars.name(block[0]) +
                              ".. as a power of the product-inverse cycle");
    }
    std::vector<Root> c;
    IntMatrix e = f.exps();
    for (std::size_t v = 0; v < a.vars.size(); ++v) {
      c.push_back(f.coeff(v));
      if (in_block[v]) continue;
      for (auto b : block) {
        if (e[v][b] != 0) throw VerificationError("cyclic linearization: " + a.vars.name(v) + " involves the block");
      }
    }
    const MonomialMap claim = lemma24_claim(n, N, *t);
    for (std::size_t i = 0; i < block.size(); ++i) {
      c[block[i]] = claim.coeff(i);
      for (std::size_t u = 0; u < a.vars.size(); ++u) e[block[i]][u] = 0;
      e[block[i]][block[i]] = 1;
    }
    claimed.emplace_back(std::move(c), std::move(e));
  }
  auto [next, verdicts] = apply_rational_sub(a, sub, claimed, ctx);
  StepRecord st = make_step("rational", node::kLemma24,
                            "linearize the product-inverse cycle of length " + std::to_string(n - 1) + " on " +
                                a.vars.name(block.front()) + ".." + a.vars.name(block.back()),
                            next);
  st.sub = sub;
  st.cycle = CycleRecord{n, {}, family, prefix};
  for (auto v : block) st.cycle->block.push_back(a.vars.name(v));
  st.pit = std::move(verdicts);
  add_check(st, "invertibility", true, "forward and inverse compose to the identity (PIT)");
  add_check(st, "claimed diagonal action", true, "tau^t : s_i -> xi^{i t} s_i (PIT)");
  a = std::move(next);
  return st;
}

GroupAction restrict_action(const GroupAction& a, const std::vector<std::size_t>& keep) {
  GroupAction r;
  r.group = a.group;
  r.level = a.level;
  std::vector<Variable> vars;
  for (auto v : keep) vars.push_back(a.vars[v]);
  r.vars = VarSpace(std::move(vars));
  for (const auto& g : a.gens) r.gens.push_back(g.restrict(keep));
  r.homomorphism = verify_homomorphism(r).ok;
  return r;
}

GroupSummary summarize(const PcGroup& g, const std::string& name, i64 max_order) {
  GroupSummary s;
  s.name = name;
  s.p = g.p();
  s.order = g.order();
  s.rank = g.rank();
  s.nilpotency_class = nilpotency_class(g, max_order);
  for (auto h : g.h_generators()) s.h_generators.push_back(g.name(h));
  s.top = g.top() ? g.name(*g.top()) : "1";
  const AbcWitness abc = check_abc(g, max_order);
  s.a = abc.quotient_log;
  if (const auto& f = g.family()) {
    s.family = std::string(f->kind == FamilyParams::Kind::G1 ? "G1 " : "G2 ") + std::to_string(f->p) + "," + std::to_string(f->a) +
               "," + std::to_string(f->b) + "," + std::to_string(f->c) + "," + std::to_string(f->s_or_r) + "," + std::to_string(f->x);
  }
  return s;
}

}  // namespace detail

std::pair<i64, i64> binomial_kl(i64 p, int s, i64 i) {
  if (i < 0) throw ArgumentError("binomial_kl needs i >= 0");
  const cpp_int ps = cpp_int(ipow(p, static_cast<unsigned>(s)));
  cpp_int k = 1, l = 0, binom = 1, pw = 1;  // binom = C(i, t), pw = p^{(t-1)s}
  for (i64 t = 1; t <= i; ++t) {
    binom = binom * (i - t + 1) / t;
    l += binom * pw;
    pw *= ps;
    k *= (1 + ps);
  }
  const cpp_int lim = std::numeric_limits<i64>::max();
  if (k > lim || l > lim) throw ScopeError("binomial_kl: value exceeds 64 bits");
  return {static_cast<i64>(k), static_cast<i64>(l)};
}

namespace {

i64 powmod_i(i64 b, i64 e, i64 m) {
  return static_cast<i64>(powmod(static_cast<u64>(mod(b, m)), static_cast<u64>(e), static_cast<u64>(m)));
}

Root at_level(const Root& r, i64 M) { return Root::lift(r.k, r.N, M); }

struct Candidate {
  int r;
  i64 k;
};

std::vector<Candidate> candidates(i64 p, int max_r) {
  std::vector<Candidate> out;
  for (int r = 1; r <= max_r; ++r) {
    if (!(p == 2 && r == 1)) out.push_back({r, 1 + ipow(p, static_cast<unsigned>(r))});
    if (p == 2 && r >= 2) out.push_back({r, -1 + ipow(2, static_cast<unsigned>(r))});
  }
  return out;
}

}  // namespace

MatchResult match_metacyclic(const GroupAction& a, std::size_t sigma, std::size_t tau) {
  MatchResult res;
  const i64 p = a.group->p();
  const i64 N = a.level;
  const std::size_t L = a.vars.size();
  const MonomialMap& fs = a.gens.at(sigma);
  const MonomialMap& ft = a.gens.at(tau);
  if (L == 0) {
    res.reason = "empty block";
    return res;
  }
  for (std::size_t v = 0; v < L; ++v) {
    if (fs.target(v) != v) {
      res.reason = a.group->name(sigma) + " is not diagonal";
      return res;
    }
  }
  bool shift = true;
  for (std::size_t v = 0; v < L; ++v) shift &= ft.target(v) == (v + 1) % L && ft.coeff(v).is_one();
  const int n_v = log_p_exact(static_cast<i64>(L), p);
  const int n_u = log_p_exact(static_cast<i64>(L) + 1, p);
  const bool v_form = shift && L > 1 && n_v >= 1;
  const bool u_form = n_u >= 1 && ft == lemma24_cycle(static_cast<int>(L) + 1, N);
  if (!v_form && !u_form) {
    res.reason = a.group->name(tau) + " is neither the cyclic shift nor the product-inverse cycle";
    return res;
  }
  const int n = v_form ? n_v : n_u;
  const i64 pn = ipow(p, static_cast<unsigned>(n));
  // other generators act as powers of sigma
  for (std::size_t g = 0; g < a.gens.size(); ++g) {
    if (g == sigma || g == tau) continue;
    bool found = false;
    MonomialMap acc = MonomialMap::identity(L, N);
    for (i64 e = 0; e < N && !found; ++e) {
      found = acc == a.gens[g];
      acc = compose(fs, acc);
    }
    if (!found) {
      res.reason = a.group->name(g) + " does not act as a power of " + a.group->name(sigma);
      return res;
    }
  }
  // first coefficient: zeta (V-form) or zeta^{k-1} (U-form)
  const Root c0 = fs.coeff(0);
  const int e0 = log_p_exact(c0.order(), p);
  std::string last = "no k = 1 + p^r fits the spectrum";
  for (const Candidate& cand : candidates(p, std::max(e0, 1) + 1)) {
    const int v = valuation(cand.k - 1, p);
    const int m = v_form ? e0 : v + e0;
    if (m < 1) continue;
    const i64 pm = ipow(p, static_cast<unsigned>(m));
    if (powmod_i(cand.k, pn, pm) != 1) {
      last = "k = " + std::to_string(cand.k) + " has order larger than p^n modulo p^m";
      continue;
    }
    const i64 M = std::max(N, pm);
    Root zeta;
    if (v_form) {
      zeta = at_level(c0, M);
    } else {
      // zeta^{k-1} = c0 with zeta of order p^m
      const Root c = at_level(c0, M);
      const i64 step = M / pm;
      const i64 w = (cand.k - 1) / ipow(p, static_cast<unsigned>(v));
      i64 u = 1;
      if (!c.is_one()) {
        const i64 unit = c.k / (step * ipow(p, static_cast<unsigned>(v)));
        u = mod(unit * inverse_mod(mod(w, pm), pm), pm);
      }
      zeta = Root(step * u, M);
    }
    if (zeta.order() != pm) continue;
    bool ok = true;
    std::vector<Root> spectrum;
    for (std::size_t i = 0; i < L && ok; ++i) {
      // V_i: k^i; U_{i+1}: k^{i+1} - k^i
      const i64 ki = powmod_i(cand.k, static_cast<i64>(i), M);
      const i64 ex = v_form ? ki : mod(ki * (cand.k - 1), M);
      const Root want = root_pow(zeta, ex);
      ok = want == at_level(fs.coeff(i), M);
      spectrum.push_back(fs.coeff(i));
    }
    if (!ok) continue;
    MetacyclicPattern pat;
    pat.form = v_form ? MetacyclicPattern::Form::V : MetacyclicPattern::Form::U;
    pat.p = p;
    pat.m = m;
    pat.n = n;
    pat.r = cand.r;
    pat.k = cand.k;
    pat.sigma = sigma;
    pat.tau = tau;
    for (std::size_t i = 0; i < L; ++i) pat.vars.push_back(a.vars.name(i));
    pat.spectrum = std::move(spectrum);
    res.pattern = std::move(pat);
    return res;
  }
  res.reason = last;
  return res;
}

Certificate run_pipeline(std::shared_ptr<const PcGroup> g, const std::string& name, const PipelineOptions& opt) {
  Certificate c;
  if (const auto& f = g->family()) {
    c = run_family(*f, opt);
  } else {
    c = run_class2(g, opt);
  }
  c.group.name = name;
  return c;
}

}  // namespace noether
