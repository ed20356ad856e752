#include <algorithm>
#include <set>
#include <sstream>

#include "noether/pipeline.hpp"
#include "pipeline_detail.hpp"

namespace noether {

using namespace detail;

namespace {

/// rho with c_i = c_0 rho^i along the block, when the map is diagonal there.
std::optional<Root> block_slope(const MonomialMap& f, const std::vector<std::size_t>& block) {
  for (auto v : block) {
    if (f.target(v) != v) return std::nullopt;
  }
  const Root c0 = f.coeff(block[0]);
  const Root rho = block.size() > 1 ? root_mul(f.coeff(block[1]), root_inv(c0)) : Root::one(c0.N);
  Root c = c0;
  for (auto v : block) {
    if (f.coeff(v) != c) return std::nullopt;
    c = root_mul(c, rho);
  }
  return rho;
}

/// e with rho = piv^e, when rho lies in the cyclic group generated by piv.
std::optional<i64> dlog(const Root& rho, const Root& piv) {
  const i64 o = piv.order();
  const i64 step = piv.N / o;
  if (rho.k % step != 0) return std::nullopt;
  const i64 u = piv.k / step;
  return mod((rho.k / step) * inverse_mod(mod(u, o), o), o);
}

std::vector<std::size_t> block_of(const VarSpace& vars, const std::string& family, i64 j) {
  return family_indices(vars, family, {j + 1});
}

std::size_t top_index(const GroupAction& a) {
  if (!a.group->top()) throw ArgumentError("group has no top generator");
  return *a.group->top();
}

std::string root_text(const Root& r) { return r.str(); }

}  // namespace

void normalize_generators(Class2State& st, const CommutatorData& d) {
  const PcGroup& g = *st.action.group;
  const auto& h = g.h_generators();
  const std::size_t s = h.size();
  const i64 N = st.action.level;
  const i64 pa = st.pa;

  std::vector<std::vector<std::size_t>> xb;
  for (std::size_t t = 0; t < s; ++t) xb.push_back(block_of(st.action.vars, "x", static_cast<i64>(t)));

  // rx[j][t]: slope of the H generator j on the x-block t
  std::vector<std::vector<Root>> rx(s, std::vector<Root>(s));
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t t = 0; t < s; ++t) {
      const auto r = block_slope(st.action.gens[h[j]], xb[t]);
      if (!r) throw VerificationError("H generator " + g.name(h[j]) + " is not diagonal with a constant slope on block " + std::to_string(t + 1));
      rx[j][t] = *r;
    }
  }
  std::vector<std::vector<i64>> coef(s, std::vector<i64>(s, 0));  // generator j = prod_i h_i^{coef[j][i]}
  for (std::size_t j = 0; j < s; ++j) coef[j][j] = 1;
  IntMatrix Nm = identity_matrix(s);  // y_m = prod_t x_t^{Nm[m][t]}

  auto slope = [&](std::size_t j, std::size_t m) {
    Root r = Root::one(N);
    for (std::size_t t = 0; t < s; ++t) {
      Root on_t = Root::one(N);
      for (std::size_t i = 0; i < s; ++i) on_t = root_mul(on_t, root_pow(rx[i][t], coef[j][i]));
      r = root_mul(r, root_pow(on_t, Nm[m][t]));
    }
    return r;
  };
  auto assert_bound = [&]() {
    for (std::size_t m = 0; m < s; ++m)
      for (std::size_t j = 0; j < s; ++j) {
        if (slope(j, m).order() > pa) {
          std::ostringstream os;
          os << "slope of generator " << j + 1 << " on block " << m + 1 << " has order " << slope(j, m).order() << " > p^a = " << pa
             << "; state: a = " << st.a << ", a_i = (";
          for (std::size_t i = 0; i < s; ++i) os << (i ? "," : "") << d.h_log_orders[i];
          os << ")";
          throw VerificationError(os.str());
        }
      }
  };

  std::set<std::size_t> R, C;
  for (std::size_t i = 0; i < s; ++i) {
    R.insert(i);
    C.insert(i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (block, generator)
  assert_bound();
  for (std::size_t round = 0;; ++round) {
    if (round > s) throw VerificationError("generator normalization did not terminate after " + std::to_string(s) + " rounds");
    std::size_t bm = 0, bj = 0;
    i64 best = 1;
    for (auto m : R)
      for (auto j : C) {
        const i64 o = slope(j, m).order();
        if (o > best) {
          best = o;
          bm = m;
          bj = j;
        }
      }
    if (best == 1) break;
    ++st.rounds;
    const Root piv = slope(bj, bm);
    for (auto j : C) {
      if (j == bj) continue;
      const auto e = dlog(slope(j, bm), piv);
      if (!e) throw VerificationError("slope outside the pivot subgroup");
      for (std::size_t i = 0; i < s; ++i) coef[j][i] = mod(coef[j][i] - *e * coef[bj][i], g.generator_order(h[i]));
    }
    for (auto m : R) {
      if (m == bm) continue;
      const auto e = dlog(slope(bj, m), piv);
      if (!e) throw VerificationError("slope outside the pivot subgroup");
      for (std::size_t t = 0; t < s; ++t) Nm[m][t] -= *e * Nm[bm][t];
    }
    for (auto j : C)
      if (j != bj && !slope(j, bm).is_one()) throw VerificationError("replacement generator still moves the pivot block");
    for (auto m : R)
      if (m != bm && !slope(bj, m).is_one()) throw VerificationError("pivot generator still moves block " + std::to_string(m + 1));
    assert_bound();
    R.erase(bm);
    C.erase(bj);
    pairs.emplace_back(bm, bj);
  }
  {
    auto ri = R.begin();
    for (auto j : C) pairs.emplace_back(*ri++, j);
  }
  std::sort(pairs.begin(), pairs.end());

  // y substitution
  MonomialSub sub = identity_sub(st.action.vars, N);
  std::vector<Variable> nv;
  for (std::size_t m = 0; m < s; ++m) {
    for (i64 i = 0; i < pa; ++i) {
      const std::size_t row = xb[m][static_cast<std::size_t>(i)];
      nv.push_back({"y", {static_cast<i64>(m) + 1, i}, "normalize"});
      for (std::size_t t = 0; t < s; ++t) sub.exps[row][xb[t][static_cast<std::size_t>(i)]] = Nm[m][t];
    }
  }
  sub.new_vars = VarSpace(nv);
  st.action = apply_monomial_sub(st.action, sub);
  std::string nm_text;
  for (std::size_t m = 0; m < s; ++m) {
    bool first = true;
    std::string row = "y[" + std::to_string(m + 1) + ",i] = ";
    for (std::size_t t = 0; t < s; ++t) {
      if (Nm[m][t] == 0) continue;
      row += std::string(first ? "" : "*") + "x[" + std::to_string(t + 1) + ",i]" + (Nm[m][t] != 1 ? "^" + std::to_string(Nm[m][t]) : "");
      first = false;
    }
    nm_text += (nm_text.empty() ? "" : "; ") + row;
  }
  StepRecord s1 = make_step("monomial", "", "block normalization " + nm_text, st.action);
  s1.sub = sub;
  add_check(s1, "invertibility", true, "unimodular exponent matrix");
  st.steps.push_back(std::move(s1));

  // generator replacement
  st.beta.assign(s, {});
  st.beta_words.assign(s, "");
  st.rho.assign(s, Root::one(N));
  st.b.assign(s, 0);
  st.split.assign(s, false);
  std::vector<std::vector<std::size_t>> yb;
  for (std::size_t m = 0; m < s; ++m) yb.push_back(block_of(st.action.vars, "y", static_cast<i64>(m)));
  StepRecord s2 = make_step("generators", "", "replacement generators of H (" + std::to_string(st.rounds) + " pivot rounds)", st.action);
  std::string bmat;
  for (const auto& [m, j] : pairs) {
    Element e = g.identity();
    for (std::size_t i = 0; i < s; ++i) e = g.multiply(e, g.power(g.generator(h[i]), coef[j][i]));
    st.beta[m] = e;
    st.beta_words[m] = g.format(e);
  }
  for (std::size_t j = 0; j < s; ++j) {
    const MonomialMap f = st.action.element_map(st.beta[j]);
    for (std::size_t m = 0; m < s; ++m) {
      const auto r = block_slope(f, yb[m]);
      require(s2, "beta_" + std::to_string(j + 1) + " diagonal on block " + std::to_string(m + 1), r.has_value(), st.beta_words[j]);
      const int btj = log_p_exact(r->order(), g.p());
      bmat += (bmat.empty() ? "" : " ") + std::to_string(btj);
      require(s2, "b_" + std::to_string(m + 1) + std::to_string(j + 1) + " <= a", btj <= st.a, std::to_string(btj) + " vs a = " + std::to_string(st.a));
      if (m == j) {
        st.rho[j] = *r;
        st.b[j] = btj;
      } else {
        require(s2, "beta_" + std::to_string(j + 1) + " index-independent on block " + std::to_string(m + 1), r->is_one(),
                "slope " + root_text(*r));
      }
    }
  }
  std::string words;
  for (std::size_t j = 0; j < s; ++j) words += (j ? ", " : "") + std::string("beta_") + std::to_string(j + 1) + " = " + st.beta_words[j];
  add_check(s2, "replacement words", true, words);
  add_check(s2, "slope orders log_p (by generator, then block)", true, bmat);
  st.steps.push_back(std::move(s2));
}

void dft_split(Class2State& st, std::size_t j) {
  const int A = st.b.at(j);
  if (A < 1) throw ArgumentError("dft_split needs b_jj >= 1");
  if (A == st.a) return;  // xi has order 1: u = y
  const PcGroup& g = *st.action.group;
  const i64 N = st.action.level;
  const i64 pa = st.pa;
  const i64 pA = ipow(g.p(), static_cast<unsigned>(A));
  const i64 pf = pa / pA;  // order of xi
  const std::vector<std::size_t> yb = block_of(st.action.vars, "y", static_cast<i64>(j));
  auto xi = [&](i64 e) { return Root::lift(e, pf, N); };
  const std::size_t n = st.action.vars.size();

  LinearSub sub;
  sub.dft_order = pf;
  sub.matrix.m.assign(n, std::vector<FormalSum>(n, FormalSum(N)));
  std::vector<Variable> nv = st.action.vars.vars();
  std::vector<bool> in_block(n, false);
  for (auto v : yb) in_block[v] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (!in_block[v]) sub.matrix.m[v][v] = FormalSum::of(Root::one(N));
  }
  auto upos = [&](i64 l, i64 k) { return yb[static_cast<std::size_t>(l * pA + k)]; };
  for (i64 l = 0; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) {
      const std::size_t row = upos(l, k);
      nv[row] = Variable{"u", {static_cast<i64>(j) + 1, l, k}, "dft"};
      for (i64 t = 0; t < pf; ++t) sub.matrix.m[row][yb[static_cast<std::size_t>(k + t * pA)]] = FormalSum::of(xi(l * t));
    }
  sub.new_vars = VarSpace(nv);

  // claimed maps: y_i -> c_i y_{i+t} with c_i = c_0 rho^i, rho^{p^A} = 1, gives u[l,k] -> c_k xi^{-l q} u[l,k'] with k + t = k' + q p^A
  std::vector<MonomialMap> claimed;
  for (std::size_t gk = 0; gk < st.action.gens.size(); ++gk) {
    const MonomialMap& f = st.action.gens[gk];
    const auto t0 = f.target(yb[0]);
    const auto it = t0 ? std::find(yb.begin(), yb.end(), *t0) : yb.end();
    if (it == yb.end()) throw VerificationError("dft_split: " + g.name(gk) + " does not preserve block " + std::to_string(j + 1));
    const i64 t = it - yb.begin();
    const Root c0 = f.coeff(yb[0]);
    const Root rho = root_mul(f.coeff(yb[1]), root_inv(c0));
    if (!root_pow(rho, pA).is_one()) throw VerificationError("dft_split: slope of " + g.name(gk) + " has order above p^A");
    for (i64 i = 0; i < pa; ++i) {
      const std::size_t v = yb[static_cast<std::size_t>(i)];
      if (f.target(v) != yb[static_cast<std::size_t>(mod(i + t, pa))] || f.coeff(v) != root_mul(c0, root_pow(rho, i))) {
        throw VerificationError("dft_split: " + g.name(gk) + " is not a shifted affine-spectrum map on block " + std::to_string(j + 1));
      }
    }
    std::vector<Root> c(n, Root::one(N));
    IntMatrix e = f.exps();
    for (std::size_t v = 0; v < n; ++v) c[v] = f.coeff(v);
    for (i64 l = 0; l < pf; ++l)
      for (i64 k = 0; k < pA; ++k) {
        const i64 K = mod(k + t, pa);
        const i64 kk = K % pA, q = K / pA;
        const std::size_t row = upos(l, k);
        std::fill(e[row].begin(), e[row].end(), 0);
        e[row][upos(l, kk)] = 1;
        c[row] = root_mul(f.coeff(yb[static_cast<std::size_t>(k)]), xi(-l * q));
      }
    claimed.emplace_back(std::move(c), std::move(e));
  }
  st.action = apply_linear_sub(st.action, sub, claimed, st.ctx);
  StepRecord rec = make_step("linear", "",
                             "block DFT on y[" + std::to_string(j + 1) + ",*]: u[l,k] = sum_t xi^{l t} y[k + t p^A], p^A = " +
                                 std::to_string(pA) + ", xi of order " + std::to_string(pf),
                             st.action);
  rec.sub = sub;
  add_check(rec, "invertibility", true, verify_invertible(sub, st.ctx).method);
  add_check(rec, "S G = G' S", true, "claimed maps match under two embeddings");
  // the residual display
  const MonomialMap& al = st.action.gens[top_index(st.action)];
  bool ok = true;
  for (i64 l = 0; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) {
      const std::size_t next = k + 1 < pA ? upos(l, k + 1) : upos(l, 0);
      const Root want = k + 1 < pA ? Root::one(N) : xi(-l);
      ok &= al.target(upos(l, k)) == next && al.coeff(upos(l, k)) == want;
    }
  require(rec, "alpha display u[l,k] -> u[l,k+1], u[l,p^A-1] -> xi^-l u[l,0]", ok, "");
  const MonomialMap bj = st.action.element_map(st.beta[j]);
  const Root c00 = bj.coeff(upos(0, 0));
  ok = true;
  for (i64 l = 0; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) ok &= bj.target(upos(l, k)) == upos(l, k) && bj.coeff(upos(l, k)) == root_mul(c00, root_pow(st.rho[j], k));
  require(rec, "beta display u[l,k] -> c rho^k u[l,k]", ok, "rho = " + root_text(st.rho[j]));
  st.steps.push_back(std::move(rec));
  st.split[j] = true;
}


namespace {

bool fixes(const MonomialMap& f, const std::vector<std::size_t>& block) {
  for (auto v : block) {
    if (f.target(v) != v || !f.coeff(v).is_one()) return false;
  }
  return true;
}

std::vector<std::size_t> named(const VarSpace& vars, const std::string& family, i64 j, i64 l, i64 from, i64 to) {
  std::vector<std::size_t> out;
  for (i64 i = from; i < to; ++i) out.push_back(l < 0 ? vars.at(family, {j, i}) : vars.at(family, {j, l, i}));
  return out;
}

}  // namespace

void ratio_split(Class2State& st, std::size_t j) {
  const PcGroup& g = *st.action.group;
  const i64 N = st.action.level;
  const i64 J = static_cast<i64>(j) + 1;
  const std::size_t al = top_index(st.action);
  const int A = st.b.at(j);
  MonomialSub sub = identity_sub(st.action.vars, N);
  std::vector<Variable> nv = st.action.vars.vars();
  if (A == 0) {
    const std::vector<std::size_t> yb = block_of(st.action.vars, "y", static_cast<i64>(j));
    for (i64 i = 1; i < st.pa; ++i) {
      const std::size_t row = yb[static_cast<std::size_t>(i)];
      sub.exps[row][yb[static_cast<std::size_t>(i - 1)]] = -1;
      nv[row] = Variable{"w", {J, i}, "ratio"};
    }
    sub.new_vars = VarSpace(nv);
    st.fibers.push_back(st.action.vars.name(yb[0]));
    st.action = apply_monomial_sub(st.action, sub);
    StepRecord rec = make_step("monomial", "", "ratios w[" + std::to_string(J) + ",i] = y[" + std::to_string(J) + ",i]/y[" +
                                                   std::to_string(J) + ",i-1]",
                               st.action);
    rec.sub = sub;
    add_check(rec, "invertibility", true, "unimodular exponent matrix");
    const auto wb = named(st.action.vars, "w", J, -1, 1, st.pa);
    require(rec, "alpha display w[1] -> ... -> (w[1]...w[p^a-1])^-1", cycle_power(st.action.gens[al], wb, static_cast<int>(st.pa)) == 1, "");
    for (auto hk : g.h_generators()) require(rec, g.name(hk) + " fixes every w", fixes(st.action.gens[hk], wb), "");
    st.steps.push_back(std::move(rec));
    return;
  }
  const i64 pA = ipow(g.p(), static_cast<unsigned>(A));
  const i64 pf = st.pa / pA;
  const std::vector<std::size_t> yb = st.split[j] ? std::vector<std::size_t>{} : block_of(st.action.vars, "y", static_cast<i64>(j));
  auto pos = [&](i64 l, i64 k) { return st.split[j] ? st.action.vars.at("u", {J, l, k}) : yb[static_cast<std::size_t>(k)]; };
  nv[pos(0, 0)] = Variable{"u", {J, 0, 0}, st.split[j] ? "dft" : "ratio"};
  for (i64 i = 1; i < pA; ++i) {
    sub.exps[pos(0, i)][pos(0, i - 1)] = -1;
    nv[pos(0, i)] = Variable{"v", {J, 0, i}, "ratio"};
  }
  for (i64 l = 1; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) {
      sub.exps[pos(l, k)][pos(0, k)] = -1;
      nv[pos(l, k)] = Variable{"v", {J, l, k}, "ratio"};
    }
  sub.new_vars = VarSpace(nv);
  st.fibers.push_back("u[" + std::to_string(J) + ",0,0]");
  st.action = apply_monomial_sub(st.action, sub);
  StepRecord rec = make_step("monomial", "", "ratios v[" + std::to_string(J) + ",0,i] = u[0,i]/u[0,i-1], v[" + std::to_string(J) +
                                                 ",l,k] = u[l,k]/u[0,k]",
                             st.action);
  rec.sub = sub;
  add_check(rec, "invertibility", true, "unimodular exponent matrix");
  const MonomialMap& fa = st.action.gens[al];
  const auto v0 = named(st.action.vars, "v", J, 0, 1, pA);
  require(rec, "alpha display v[0,1] -> ... -> (v[0,1]...v[0,p^A-1])^-1", cycle_power(fa, v0, static_cast<int>(pA)) == 1, "");
  bool ok = true;
  for (i64 l = 1; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) {
      const std::size_t v = st.action.vars.at("v", {J, l, k});
      const std::size_t next = st.action.vars.at("v", {J, l, (k + 1) % pA});
      ok &= fa.target(v) == next && fa.coeff(v) == (k + 1 < pA ? Root::one(N) : Root::lift(-l, pf, N));
    }
  require(rec, "alpha display v[l,k] -> v[l,k+1], v[l,p^A-1] -> xi^-l v[l,0]", ok, "");
  std::vector<std::size_t> rest;
  for (i64 l = 1; l < pf; ++l)
    for (i64 k = 0; k < pA; ++k) rest.push_back(st.action.vars.at("v", {J, l, k}));
  for (std::size_t m = 0; m < st.beta.size(); ++m) {
    const MonomialMap f = st.action.element_map(st.beta[m]);
    if (m == j) {
      ok = true;
      for (auto v : v0) ok &= f.target(v) == v && f.coeff(v) == st.rho[j];
      require(rec, "beta_" + std::to_string(m + 1) + " scales v[0,i] by rho", ok, "rho = " + root_text(st.rho[j]));
      require(rec, "beta_" + std::to_string(m + 1) + " fixes v[l,k]", fixes(f, rest), "");
    } else {
      ok = fixes(f, rest) && fixes(f, v0);
      require(rec, "beta_" + std::to_string(m + 1) + " fixes block " + std::to_string(J), ok, "");
    }
  }
  st.steps.push_back(std::move(rec));
}

void drop_pending(Class2State& st) {
  if (st.fibers.empty()) return;
  std::vector<std::size_t> idx;
  std::string names;
  for (const auto& nm : st.fibers) {
    bool found = false;
    for (std::size_t v = 0; v < st.action.vars.size() && !found; ++v) {
      if (st.action.vars.name(v) == nm) {
        idx.push_back(v);
        found = true;
      }
    }
    if (!found) throw VerificationError("fiber variable " + nm + " is missing");
    names += (names.empty() ? "" : ", ") + nm;
  }
  auto [next, rec] = drop_fibers(st.action, idx);
  st.action = std::move(next);
  StepRecord step = make_step("drop", node::kFiberDrop, "fiber drop of " + names, st.action);
  add_check(step, "fiber form", true, "g . x0 = lambda_g x0 with lambda_g in the surviving variables");
  step.drop = rec;
  step.sub = RatioDrop{idx};
  st.steps.push_back(std::move(step));
  st.fibers.clear();
}

void kill_torus(Class2State& st) {
  const PcGroup& g = *st.action.group;
  const i64 N = st.action.level;
  const std::size_t s = st.b.size();
  if (s == 0 || !g.top()) return;
  const std::size_t al = *g.top();

  // passage to the H-invariant subfield
  MonomialSub sub = identity_sub(st.action.vars, N);
  sub.sublattice = true;
  std::vector<Variable> nv = st.action.vars.vars();
  i64 det = 1;
  for (std::size_t j = 0; j < s; ++j) {
    if (st.b[j] == 0) continue;
    const i64 J = static_cast<i64>(j) + 1;
    const i64 n = ipow(g.p(), static_cast<unsigned>(st.b[j]));
    const auto v0 = named(st.action.vars, "v", J, 0, 1, n);
    sub.exps[v0[0]][v0[0]] = n;
    nv[v0[0]] = Variable{"w", {J, 1}, "invariant"};
    for (std::size_t i = 1; i < v0.size(); ++i) {
      sub.exps[v0[i]][v0[i - 1]] = -1;
      nv[v0[i]] = Variable{"w", {J, static_cast<i64>(i) + 1}, "invariant"};
    }
    det *= n;
  }
  if (det > 1) {
    sub.new_vars = VarSpace(nv);
    DiagonalAction D;
    for (auto hk : g.h_generators()) {
      const MonomialMap& f = st.action.gens[hk];
      std::vector<i64> row;
      for (std::size_t v = 0; v < f.size(); ++v) {
        if (f.target(v) != v) throw VerificationError(g.name(hk) + " is not diagonal before the H-invariant passage");
        row.push_back(f.coeff(v).k);
      }
      D.chars.push_back(std::move(row));
      D.orders.push_back(N);
    }
    const IntMatrix L = invariant_lattice(D);
    bool rows_ok = true;
    for (const auto& row : sub.exps) rows_ok &= is_invariant(D, row);
    st.action = apply_monomial_sub(st.action, sub);
    StepRecord rec = make_step("sublattice", "", "H-invariant monomials w[j,1] = v[j,0,1]^{p^A}, w[j,i] = v[j,0,i]/v[j,0,i-1]", st.action);
    rec.sub = sub;
    require(rec, "rows H-invariant", rows_ok, "exact root arithmetic");
    require(rec, "index equals the H-invariant lattice index", lattice_index(L) == det,
            std::to_string(det) + " vs " + std::to_string(lattice_index(L)));
    for (auto hk : g.h_generators()) require(rec, g.name(hk) + " acts trivially", st.action.gens[hk].is_identity(), "");
    st.steps.push_back(std::move(rec));
  }

  for (std::size_t j = 0; j < s; ++j) {
    const i64 J = static_cast<i64>(j) + 1;
    if (st.b[j] == 0) {
      if (st.pa < 2) continue;
      st.steps.push_back(lemma24_step(st.action, named(st.action.vars, "w", J, -1, 1, st.pa), static_cast<int>(st.pa), "s", {J}, st.ctx));
      continue;
    }
    const i64 n = ipow(g.p(), static_cast<unsigned>(st.b[j]));
    const auto wb = named(st.action.vars, "w", J, -1, 1, n);
    const MonomialMap fr = st.action.gens[al].restrict(wb);
    std::vector<std::size_t> block = wb;
    if (n >= 3) {
      // alpha : w1 -> w1 w2^n, w_i -> w_{i+1}, w_{n-1} -> (w1 w2^{n-1} ... w_{n-1}^2)^-1
      IntMatrix want(wb.size(), std::vector<i64>(wb.size(), 0));
      want[0][0] = 1;
      want[0][1] = n;
      for (std::size_t i = 1; i + 1 < wb.size(); ++i) want[i][i + 1] = 1;
      want.back()[0] = -1;
      for (std::size_t i = 1; i < wb.size(); ++i) want.back()[i] = -(n - static_cast<i64>(i));
      const bool disp = fr == MonomialMap(std::vector<Root>(wb.size(), Root::one(N)), want);
      std::vector<Variable> wvars;
      for (auto v : wb) wvars.push_back(st.action.vars[v]);
      const std::string disp_text = format_map(fr, VarSpace(wvars));
      MonomialSub zs = identity_sub(st.action.vars, N);
      std::vector<Variable> zv = st.action.vars.vars();
      MonomialMap P = MonomialMap::identity(wb.size(), N);
      for (std::size_t i = 0; i < wb.size(); ++i) {
        const Monomial m = P.image(1);
        zs.coeff[wb[i]] = m.coeff;
        std::fill(zs.exps[wb[i]].begin(), zs.exps[wb[i]].end(), 0);
        for (std::size_t t = 0; t < wb.size(); ++t) zs.exps[wb[i]][wb[t]] = m.exps[t];
        zv[wb[i]] = Variable{"z", {J, static_cast<i64>(i) + 1}, "relabel"};
        P = compose(fr, P);
      }
      zs.new_vars = VarSpace(zv);
      st.action = apply_monomial_sub(st.action, zs);
      StepRecord rec = make_step("monomial", "", "z[" + std::to_string(J) + ",1] = w[" + std::to_string(J) + ",2], z[i] = alpha^{i-1} . w[2]", st.action);
      rec.sub = zs;
      add_check(rec, "invertibility", true, "unimodular exponent matrix");
      require(rec, "alpha display on w", disp, disp_text);
      block = named(st.action.vars, "z", J, -1, 1, n);
      require(rec, "alpha display z[1] -> ... -> (z[1]...z[n-1])^-1", cycle_power(st.action.gens[al], block, static_cast<int>(n)) == 1, "");
      st.steps.push_back(std::move(rec));
    }
    st.steps.push_back(lemma24_step(st.action, block, static_cast<int>(n), "s", {J}, st.ctx));
  }
}

namespace {

void finish_linear(Certificate& cert, const GroupAction& a) {
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    if (!a.gens[k].is_linear()) throw VerificationError("final action of " + a.group->name(k) + " is not linear");
  }
  for (auto hk : a.group->h_generators()) {
    if (!a.gens[hk].is_identity()) throw VerificationError("H generator " + a.group->name(hk) + " still acts");
  }
  cert.terminal.kind = Terminal::Kind::LinearAction;
  for (std::size_t v = 0; v < a.vars.size(); ++v) cert.terminal.linear_vars.push_back(a.vars.name(v));
}

void run_abelian(Certificate& cert, std::vector<StepRecord>& steps, const std::shared_ptr<const PcGroup>& gp, const AbcWitness& abc,
                 const PipelineOptions& opt, i64 N) {
  const PcGroup& g = *gp;
  const HDecomposer dec(g, opt.max_order);
  const int a = abc.quotient_log;
  const i64 pa = ipow(g.p(), static_cast<unsigned>(a));
  std::vector<Variable> vars;
  if (a > 0) vars.push_back({"y", {0}, "character"});
  for (std::size_t j = 0; j < g.h_generators().size(); ++j) vars.push_back({"y", {static_cast<i64>(j) + 1}, "character"});
  GroupAction W;
  W.group = gp;
  W.level = N;
  W.vars = VarSpace(vars);
  for (std::size_t k = 0; k < g.rank(); ++k) {
    const TopSplit ts = split_top(g, dec, g.generator(k), a);
    std::vector<Root> c;
    if (a > 0) c.push_back(Root::lift(ts.t, pa, N));
    for (std::size_t j = 0; j < ts.h.size(); ++j) c.push_back(Root::lift(ts.h[j], dec.orders()[j], N));
    W.gens.emplace_back(std::move(c), identity_matrix(vars.size()));
  }
  const ActionReport hom = verify_homomorphism(W);
  W.homomorphism = hom.ok;
  const ActionReport faith = verify_faithful(W, opt.max_order);
  W.faithful = faith.ok;
  cert.initial = W;
  StepRecord r = make_step("restriction", node::kRestriction, "faithful diagonal subspace spanned by characters of <alpha> and H", W);
  require(r, "faithful", faith.ok, faith.witness);
  steps.push_back(r);
  if (!hom.ok) throw VerificationError("diagonal action is not a homomorphism: " + hom.witness);

  const DiagonalAction D = diagonal_from_action(W);
  const IntMatrix B = fixed_generators(D);
  const i64 box = W.vars.size() <= 3 ? 3 : 2;
  const BruteReport br = brute_check(D, B, box);
  StepRecord f = make_step("diagonal", node::kFischer, "invariant Laurent monomials from the Hermite normal form", W);
  add_check(f, "basis rows invariant", true, "exact root arithmetic");
  require(f, "brute check in box " + std::to_string(box), br.ok, br.witness);
  require(f, "lattice index equals |G|", lattice_index(B) == g.order(), std::to_string(lattice_index(B)));
  steps.push_back(f);
  cert.terminal.kind = Terminal::Kind::DiagonalFixedField;
  cert.terminal.lattice = B;
  for (const auto& row : B) cert.terminal.generators.push_back(format_monomial(Monomial{Root::one(N), row}, W.vars));
}

}  // namespace

Certificate run_class2(std::shared_ptr<const PcGroup> g, const PipelineOptions& opt) {
  Certificate cert;
  cert.options = opt;
  cert.pipeline = "class2";
  Class2State st;
  try {
    const ConsistencyReport cons = verify_consistency(*g, opt.max_order);
    if (!cons.consistent) {
      cert.status = Certificate::Status::InputError;
      cert.message = "inconsistent presentation: " + cons.witness;
      return cert;
    }
    cert.group = summarize(*g, "", opt.max_order);
    const AbcWitness abc = check_abc(*g, opt.max_order);
    if (!abc.ok()) throw ScopeError("not an ABC group: " + format_failure(abc.failure) + " (" + abc.detail + ")");
    if (!abc.split) throw ScopeError("non-split extension out of scope: alpha^{p^a} is a nontrivial element of H");
    if (!abc.h_basis) throw ScopeError("H generators do not form a direct-product basis of H");
    if (cert.group.nilpotency_class > 2) {
      throw ScopeError("nilpotency class " + std::to_string(cert.group.nilpotency_class) + " is outside the class-2 pipeline");
    }
    st.a = abc.quotient_log;
    st.pa = ipow(g->p(), static_cast<unsigned>(st.a));
    const i64 N = std::max(induced_level(*g), st.pa);
    cert.level = N;
    st.ctx = VerifyContext::make(N, opt.prime_bits, opt.trials, opt.seed);
    cert.q1 = st.ctx.e1.q;
    cert.q2 = st.ctx.e2.q;
    if (cert.group.nilpotency_class <= 1) {
      cert.pipeline = "abelian";
      run_abelian(cert, st.steps, g, abc, opt, N);
    } else {
      st.action = induce_representation(g, N, opt.max_order);
      cert.initial = st.action;
      StepRecord r = make_step("restriction", node::kRestriction, "induced subspace W from the characters of H", st.action);
      require(r, "faithful", st.action.faithful, "kernel enumeration");
      require(r, "monomial shape", std::all_of(st.action.gens.begin(), st.action.gens.end(), [](const MonomialMap& f) { return f.is_linear(); }),
              "every generator permutes the variables up to roots of unity");
      st.steps.push_back(std::move(r));
      const CommutatorData d = commutator_data(*g, opt.max_order);
      normalize_generators(st, d);
      for (std::size_t j = 0; j < st.b.size(); ++j)
        if (st.b[j] >= 1) dft_split(st, j);
      for (std::size_t j = 0; j < st.b.size(); ++j) ratio_split(st, j);
      drop_pending(st);
      kill_torus(st);
      finish_linear(cert, st.action);
    }
    cert.status = Certificate::Status::Verified;
  } catch (const std::exception& e) {
    cert.status = Certificate::Status::Incomplete;
    cert.message = e.what();
  }
  cert.steps = std::move(st.steps);
  for (const auto& s : cert.steps) {
    if (!s.passed() && cert.status == Certificate::Status::Verified) {
      cert.status = Certificate::Status::Incomplete;
      cert.message = "step '" + s.description + "' has a failing check";
    }
  }
  return cert;
}

}  // namespace noether
