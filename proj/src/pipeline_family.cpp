#include <algorithm>

#include "noether/pipeline.hpp"
#include "pipeline_detail.hpp"

namespace noether {

using namespace detail;

namespace {

/// k(i) and l(i) reduced modulo M, by the recurrences k(i+1) = k(i)(1 + p^s), l(i+1) = l(i) + k(i).
std::vector<std::pair<i64, i64>> kl_table(i64 p, int s, i64 count, i64 M) {
  std::vector<std::pair<i64, i64>> out;
  const i64 q = mod(1 + ipow(p, static_cast<unsigned>(s)), M);
  i64 k = mod(1, M), l = 0;
  for (i64 i = 0; i < count; ++i) {
    out.emplace_back(k, l);
    l = mod(l + k, M);
    k = static_cast<i64>(mulmod(static_cast<u64>(k), static_cast<u64>(q), static_cast<u64>(M)));
  }
  return out;
}

std::vector<std::size_t> block(const VarSpace& vars, const std::string& family, i64 from, i64 to) {
  std::vector<std::size_t> out;
  for (i64 i = from; i < to; ++i) out.push_back(vars.at(family, {i}));
  return out;
}

bool fixes_all(const MonomialMap& f, const std::vector<std::size_t>& b) {
  return std::all_of(b.begin(), b.end(), [&](std::size_t v) { return f.target(v) == v && f.coeff(v).is_one(); });
}

bool diagonal_with(const MonomialMap& f, const std::vector<std::size_t>& b, const std::vector<Root>& want) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (f.target(b[i]) != b[i] || f.coeff(b[i]) != want[i]) return false;
  }
  return true;
}

}  // namespace

Certificate run_family(const FamilyParams& f, const PipelineOptions& opt) {
  const bool g1 = f.kind == FamilyParams::Kind::G1;
  Certificate cert;
  cert.options = opt;
  cert.pipeline = g1 ? "G1" : "G2";
  std::vector<StepRecord> steps;
  try {
    auto gp = std::make_shared<const PcGroup>(make_family_group(f));
    const PcGroup& g = *gp;
    const ConsistencyReport cons = verify_consistency(g, opt.max_order);
    if (!cons.consistent) {
      cert.status = Certificate::Status::InputError;
      cert.message = "inconsistent presentation: " + cons.witness;
      return cert;
    }
    cert.group = summarize(g, "", opt.max_order);
    const i64 p = f.p;
    const int s = f.s_or_r;
    const i64 pa = ipow(p, static_cast<unsigned>(f.a));
    const i64 pb = ipow(p, static_cast<unsigned>(f.b));
    const i64 pc = ipow(p, static_cast<unsigned>(f.c));
    const i64 x = mod(f.x, pb);
    const int t = x == 0 ? f.b : valuation(x, p);
    const i64 y = x == 0 ? 1 : x / ipow(p, static_cast<unsigned>(t));
    const i64 N = std::max({pa, pb, pc});
    cert.level = N;
    const VerifyContext ctx = VerifyContext::make(N, opt.prime_bits, opt.trials, opt.seed);
    cert.q1 = ctx.e1.q;
    cert.q2 = ctx.e2.q;
    const std::size_t A = 0, B = 1, C = 2;

    // the induced action, compared entry by entry with the closed form
    GroupAction act = induce_representation(gp, N, opt.max_order);
    cert.initial = act;
    StepRecord r = make_step("restriction", node::kRestriction, "induced subspace W from the characters of <beta, gamma>", act);
    require(r, "faithful", act.faithful, "kernel enumeration");
    const auto kl_b = kl_table(p, s, pa, pb);
    const auto kl_c = kl_table(p, s, pa, pc);
    bool cross = true;
    for (i64 i = 0; i < pa; ++i) {
      try {
        const auto [k, l] = binomial_kl(p, s, i);
        cross &= mod(k, pb) == kl_b[static_cast<std::size_t>(i)].first && mod(l, pb) == kl_b[static_cast<std::size_t>(i)].second;
      } catch (const ScopeError&) {
        break;
      }
    }
    require(r, "binomial k(i), l(i) agree with the recurrences", cross, "");
    bool coll = true;
    Element ai = g.identity();
    for (i64 i = 0; i < pa; ++i) {
      const auto [kb, lb] = kl_b[static_cast<std::size_t>(i)];
      const auto [kc, lc] = kl_c[static_cast<std::size_t>(i)];
      (void)lc;
      Element wb, wc;
      if (g1) {
        wb = g.generator(B);
        wc = g.multiply(g.power(g.generator(B), mod(x * lb, pb)), g.power(g.generator(C), kc));
      } else {
        wb = g.power(g.generator(B), kb);
        wc = g.multiply(g.generator(C), g.power(g.generator(B), mod(x * lb, pb)));
      }
      coll &= g.conjugate(g.generator(B), ai) == wb && g.conjugate(g.generator(C), ai) == wc;
      ai = g.multiply(ai, g.generator(A));
    }
    require(r, "collection identity for alpha^-i beta alpha^i and alpha^-i gamma alpha^i", coll, "");
    bool table = true;
    for (i64 i = 0; i < pa; ++i) {
      const auto [kb, lb] = kl_b[static_cast<std::size_t>(i)];
      const auto kc = kl_c[static_cast<std::size_t>(i)].first;
      const std::size_t v1 = act.vars.at("x", {1, i}), v2 = act.vars.at("x", {2, i});
      const Root bet1 = g1 ? Root::lift(1, pb, N) : Root::lift(kb, pb, N);
      const Root gam1 = Root::lift(mod(x * lb, pb), pb, N);
      const Root gam2 = g1 ? Root::lift(kc, pc, N) : Root::lift(1, pc, N);
      table &= act.gens[B].target(v1) == v1 && act.gens[B].coeff(v1) == bet1;
      table &= act.gens[B].target(v2) == v2 && act.gens[B].coeff(v2).is_one();
      table &= act.gens[C].target(v1) == v1 && act.gens[C].coeff(v1) == gam1;
      table &= act.gens[C].target(v2) == v2 && act.gens[C].coeff(v2) == gam2;
      table &= act.gens[A].target(v1) == act.vars.at("x", {1, (i + 1) % pa}) && act.gens[A].coeff(v1).is_one();
    }
    require(r, "action table matches k(i), l(i)", table, "");
    steps.push_back(std::move(r));

    // ratios u[i] = x[2,i]/x[2,i-1], v[i] = x[1,i]/x[1,i-1]
    MonomialSub rs = identity_sub(act.vars, N);
    std::vector<Variable> nv = act.vars.vars();
    for (i64 i = 1; i < pa; ++i) {
      const std::size_t v1 = act.vars.at("x", {1, i}), v2 = act.vars.at("x", {2, i});
      rs.exps[v1][act.vars.at("x", {1, i - 1})] = -1;
      rs.exps[v2][act.vars.at("x", {2, i - 1})] = -1;
      nv[v1] = Variable{"v", {i}, "ratio"};
      nv[v2] = Variable{"u", {i}, "ratio"};
    }
    rs.new_vars = VarSpace(nv);
    act = apply_monomial_sub(act, rs);
    StepRecord rr = make_step("monomial", "", "ratios u[i] = x[2,i]/x[2,i-1], v[i] = x[1,i]/x[1,i-1]", act);
    rr.sub = rs;
    add_check(rr, "invertibility", true, "unimodular exponent matrix");
    auto ub = block(act.vars, "u", 1, pa);
    auto vb = block(act.vars, "v", 1, pa);
    require(rr, "alpha display on u", cycle_power(act.gens[A], ub, static_cast<int>(pa)) == 1, "");
    require(rr, "alpha display on v", cycle_power(act.gens[A], vb, static_cast<int>(pa)) == 1, "");
    std::vector<Root> beta_v, gamma_v, gamma_u;
    for (i64 i = 1; i < pa; ++i) {
      const auto [kb, lb] = kl_b[static_cast<std::size_t>(i)];
      const auto [kb0, lb0] = kl_b[static_cast<std::size_t>(i - 1)];
      const i64 dk = kl_c[static_cast<std::size_t>(i)].first - kl_c[static_cast<std::size_t>(i - 1)].first;
      beta_v.push_back(g1 ? Root::one(N) : Root::lift(mod(kb - kb0, pb), pb, N));
      gamma_v.push_back(Root::lift(mod(x * (lb - lb0), pb), pb, N));
      gamma_u.push_back(g1 ? Root::lift(mod(dk, pc), pc, N) : Root::one(N));
    }
    require(rr, "beta spectrum on v", diagonal_with(act.gens[B], vb, beta_v), "");
    require(rr, "beta fixes u", fixes_all(act.gens[B], ub), "");
    require(rr, "gamma spectrum on v", diagonal_with(act.gens[C], vb, gamma_v), "");
    require(rr, "gamma spectrum on u", diagonal_with(act.gens[C], ub, gamma_u), "");
    steps.push_back(std::move(rr));

    {
      const std::vector<std::size_t> idx{act.vars.at("x", {1, 0}), act.vars.at("x", {2, 0})};
      auto [next, rec] = drop_fibers(act, idx);
      act = std::move(next);
      StepRecord d = make_step("drop", node::kFiberDrop, "fiber drop of x[1,0], x[2,0]", act);
      add_check(d, "fiber form", true, "g . x0 = lambda_g x0 with lambda_g in the surviving variables");
      d.drop = rec;
      d.sub = RatioDrop{idx};
      steps.push_back(std::move(d));
    }

    // the block fixed by H and the block carrying the pattern
    std::string lemma_family = "u", pattern_family = "v";
    std::size_t sigma = C;
    i64 e_other = 0;  // the non-sigma H generator acts on the pattern block as sigma^e_other
    std::string exponent_text;
    if (g1) {
      const int d = f.c - s;
      if (x == 0) {
        lemma_family = "v";
        pattern_family = "u";
      } else if (d > 0 && f.b - t <= d) {
        lemma_family = "v";
        pattern_family = "u";
        exponent_text = "w[i] = v[i] u[i]^{-y p^{c-s-b+t}}";
      } else if (d > 0) {
        exponent_text = "w[i] = u[i] v[i]^{-z p^{b-t-c+s}}";
      }
    } else {
      const int rr_ = s;
      if (x == 0 || rr_ <= t) {
        sigma = B;
        e_other = x == 0 ? 0 : y * ipow(p, static_cast<unsigned>(t - rr_));
      } else {
        e_other = inverse_mod(mod(y, ipow(p, static_cast<unsigned>(f.b - t))), ipow(p, static_cast<unsigned>(f.b - t))) *
                  ipow(p, static_cast<unsigned>(rr_ - t));
      }
    }
    if (!exponent_text.empty()) {
      const bool into_v = lemma_family == "v";
      const int d = f.c - s;
      i64 e;
      if (into_v) {
        e = -y * ipow(p, static_cast<unsigned>(d - f.b + t));
      } else {
        const i64 pd = ipow(p, static_cast<unsigned>(d));
        e = -(pd == 1 ? 0 : inverse_mod(mod(y, pd), pd)) * ipow(p, static_cast<unsigned>(f.b - t - d));
      }
      MonomialSub ws = identity_sub(act.vars, N);
      std::vector<Variable> wv = act.vars.vars();
      for (i64 i = 1; i < pa; ++i) {
        const std::size_t row = act.vars.at(lemma_family, {i});
        ws.exps[row][act.vars.at(into_v ? "u" : "v", {i})] = e;
        wv[row] = Variable{"w", {i}, "invariant"};
      }
      ws.new_vars = VarSpace(wv);
      act = apply_monomial_sub(act, ws);
      StepRecord wr = make_step("monomial", "", exponent_text + ", exponent " + std::to_string(e), act);
      wr.sub = ws;
      add_check(wr, "invertibility", true, "unimodular exponent matrix");
      const auto wb = block(act.vars, "w", 1, pa);
      require(wr, "beta fixes w", fixes_all(act.gens[B], wb), "");
      require(wr, "gamma fixes w", fixes_all(act.gens[C], wb), "");
      require(wr, "alpha display on w", cycle_power(act.gens[A], wb, static_cast<int>(pa)) == 1, "");
      steps.push_back(std::move(wr));
      lemma_family = "w";
    }
    const auto lb = block(act.vars, lemma_family, 1, pa);
    if (!fixes_all(act.gens[B], lb) || !fixes_all(act.gens[C], lb)) {
      throw VerificationError("H does not fix the " + lemma_family + " block");
    }
    steps.push_back(lemma24_step(act, lb, static_cast<int>(pa), "s", {}, ctx));

    const auto pbk = block(act.vars, pattern_family, 1, pa);
    const GroupAction pat_act = restrict_action(act, pbk);
    StepRecord pr = make_step("pattern", node::kMetacyclic, "metacyclic pattern on the " + pattern_family + " block", act);
    const std::size_t other = sigma == B ? C : B;
    if (!g1) {
      const MonomialMap want = map_power(pat_act.gens[sigma], e_other);
      require(pr, g.name(other) + " acts as " + g.name(sigma) + "^" + std::to_string(e_other), want == pat_act.gens[other], "");
    }
    const MatchResult m = match_metacyclic(pat_act, sigma, A);
    if (!m.pattern) throw ScopeError("no metacyclic pattern on the " + pattern_family + " block: " + m.reason);
    const MetacyclicPattern& mp = *m.pattern;
    require(pr, std::string(mp.form == MetacyclicPattern::Form::U ? "U" : "V") + "-form (m, n, r) = (" + std::to_string(mp.m) + ", " +
                    std::to_string(mp.n) + ", " + std::to_string(mp.r) + ")",
            true, "k = " + std::to_string(mp.k));
    steps.push_back(std::move(pr));
    cert.terminal.kind = Terminal::Kind::MetacyclicPattern;
    cert.terminal.pattern = mp;
    for (std::size_t v = 0; v < act.vars.size(); ++v) {
      if (act.vars[v].family == "s") cert.terminal.linear_vars.push_back(act.vars.name(v));
    }
    cert.status = Certificate::Status::Verified;
  } catch (const ArgumentError& e) {
    cert.status = Certificate::Status::InputError;
    cert.message = e.what();
  } catch (const std::exception& e) {
    cert.status = Certificate::Status::Incomplete;
    cert.message = e.what();
  }
  cert.steps = std::move(steps);
  for (const auto& st : cert.steps) {
    if (!st.passed() && cert.status == Certificate::Status::Verified) {
      cert.status = Certificate::Status::Incomplete;
      cert.message = "step '" + st.description + "' has a failing check";
    }
  }
  return cert;
}

Certificate run_g1(i64 p, int a, int b, int c, int s, i64 x, const PipelineOptions& opt) {
  return run_family(FamilyParams{FamilyParams::Kind::G1, p, a, b, c, s, x}, opt);
}

Certificate run_g2(i64 p, int a, int b, int c, int r, i64 x, const PipelineOptions& opt) {
  return run_family(FamilyParams{FamilyParams::Kind::G2, p, a, b, c, r, x}, opt);
}

}  // namespace noether
