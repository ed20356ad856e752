#include "noether/transform.hpp"

#include <algorithm>

namespace noether {

VerifyContext VerifyContext::make(i64 N, int prime_bits, int trials, u64 seed) {
  VerifyContext ctx;
  ctx.trials = trials;
  ctx.seed = seed;
  const u64 q1 = find_prime(N, prime_bits, seed);
  u64 q2 = q1;
  for (u64 tag = 1; q2 == q1; ++tag) q2 = find_prime(N, prime_bits, derive_seed(seed, tag));
  ctx.e1 = make_embedding(q1, N, seed);
  ctx.e2 = make_embedding(q2, N, derive_seed(seed, 2));
  return ctx;
}

u64 det_mod(std::vector<std::vector<u64>> m, u64 q) {
  const std::size_t n = m.size();
  u64 det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = (q - det) % q;
    }
    det = mulmod(det, m[c][c], q);
    const u64 inv = powmod(m[c][c], q - 2, q);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const u64 f = mulmod(m[r][c], inv, q);
      for (std::size_t j = c; j < n; ++j) m[r][j] = (m[r][j] + q - mulmod(f, m[c][j], q)) % q;
    }
  }
  return det;
}

InvertibilityEvidence verify_invertible(const MonomialSub& s) {
  InvertibilityEvidence ev;
  const i64 d = determinant(s.exps);
  ev.detail = "det = " + std::to_string(d);
  if (d == 1 || d == -1) {
    ev.ok = true;
    ev.method = "unimodular exponent matrix";
  } else if (s.sublattice && d != 0) {
    ev.ok = true;
    ev.method = "finite-index sublattice";
  } else {
    ev.method = "exponent matrix not unimodular";
  }
  return ev;
}

InvertibilityEvidence verify_invertible(const LinearSub& s, const VerifyContext& ctx) {
  InvertibilityEvidence ev;
  ev.method = s.dft_order ? "block DFT (Vandermonde in distinct powers of a primitive root), det mod q" : "det mod q";
  const u64 d1 = det_mod(s.matrix.eval(ctx.e1), ctx.e1.q);
  if (d1 != 0) {
    ev.ok = true;
    ev.detail = "det = " + std::to_string(d1) + " mod " + std::to_string(ctx.e1.q);
    return ev;
  }
  const u64 d2 = det_mod(s.matrix.eval(ctx.e2), ctx.e2.q);
  ev.ok = d2 != 0;
  ev.detail = ev.ok ? "det = " + std::to_string(d2) + " mod " + std::to_string(ctx.e2.q)
                    : "determinant vanishes under two embeddings";
  return ev;
}

InvertibilityEvidence verify_invertible(const RationalSub& s, const VerifyContext& ctx) {
  InvertibilityEvidence ev;
  ev.method = "round trip inverse(forward(x)) = x by PIT";
  const std::size_t n = s.forward.inputs();
  if (s.inverse.inputs() != s.forward.outputs().size() || s.inverse.outputs().size() != n) {
    ev.detail = "forward and inverse programs do not match in size";
    return ev;
  }
  Slp round(n), ident(n);
  std::vector<Slp::Node> in;
  for (std::size_t i = 0; i < n; ++i) {
    in.push_back(round.input(i));
    ident.output(ident.input(i));
  }
  for (auto node : inline_slp(round, s.inverse, inline_slp(round, s.forward, in))) round.output(node);
  const PitVerdict v = pit_equal(round, ident, ctx.e1, ctx.trials, derive_seed(ctx.seed, 0x726f756e64));
  ev.ok = v.equal();
  ev.detail = v.equal() ? "round trip holds" : v.detail;
  ev.pit.push_back(v);
  return ev;
}

namespace {

GroupAction finish(const GroupAction& a, VarSpace vars, std::vector<MonomialMap> maps, bool faithful) {
  GroupAction r;
  r.group = a.group;
  r.vars = std::move(vars);
  r.level = a.level;
  r.gens = std::move(maps);
  const ActionReport hom = verify_homomorphism(r);
  if (!hom.ok) throw VerificationError("transformed action is not a homomorphism: " + hom.witness);
  r.homomorphism = true;
  r.faithful = faithful;
  return r;
}

}  // namespace

GroupAction apply_monomial_sub(const GroupAction& a, const MonomialSub& s) {
  const std::size_t n = a.vars.size();
  if (s.exps.size() != n || s.coeff.size() != n || s.new_vars.size() != n) throw ArgumentError("monomial substitution has the wrong size");
  const InvertibilityEvidence ev = verify_invertible(s);
  if (!ev.ok) throw VerificationError("monomial substitution: " + ev.method + " (" + ev.detail + ")");
  const MonomialMap S(s.coeff, s.exps);
  std::vector<MonomialMap> maps;
  if (!s.sublattice || ev.method == "unimodular exponent matrix") {
    const MonomialMap Sinv = invert(S);
    for (const auto& g : a.gens) maps.push_back(compose(Sinv, compose(g, S)));
    return finish(a, s.new_vars, std::move(maps), a.faithful);
  }
  for (const auto& c : s.coeff) {
    if (!c.is_one()) throw ArgumentError("sublattice substitution requires trivial coefficients");
  }
  const ScaledInverse si = scaled_inverse(s.exps);
  for (const auto& g : a.gens) {
    const MonomialMap t = compose(g, S);
    std::vector<Root> c;
    IntMatrix e(n, std::vector<i64>(n, 0));
    for (std::size_t v = 0; v < n; ++v) {
      c.push_back(t.coeff(v));
      for (std::size_t u = 0; u < n; ++u) {
        __int128 acc = 0;
        for (std::size_t k = 0; k < n; ++k) acc += static_cast<__int128>(t.exps()[v][k]) * si.numer[k][u];
        if (acc % si.denom != 0) {
          throw VerificationError("sublattice substitution: action does not preserve the sublattice at " + s.new_vars.name(v));
        }
        e[v][u] = static_cast<i64>(acc / si.denom);
      }
    }
    maps.emplace_back(std::move(c), std::move(e));
  }
  return finish(a, s.new_vars, std::move(maps), false);
}

GroupAction apply_linear_sub(const GroupAction& a, const LinearSub& s, const std::vector<MonomialMap>& claimed,
                             const VerifyContext& ctx) {
  if (s.matrix.size() != a.vars.size() || s.new_vars.size() != a.vars.size()) throw ArgumentError("linear substitution has the wrong size");
  if (claimed.size() != a.gens.size()) throw ArgumentError("one claimed map per generator required");
  const InvertibilityEvidence ev = verify_invertible(s, ctx);
  if (!ev.ok) throw VerificationError("linear substitution is singular: " + ev.detail);
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    const LinearMap G = LinearMap::from_monomial(a.gens[k]);
    const LinearMap Gc = LinearMap::from_monomial(claimed[k]);
    // S G = G' S
    if (!linear_equal(compose(G, s.matrix), compose(s.matrix, Gc), ctx.e1, ctx.e2)) {
      throw VerificationError("claimed action of " + a.group->name(k) + " does not match the linear substitution");
    }
  }
  return finish(a, s.new_vars, claimed, a.faithful);
}

std::pair<GroupAction, DropRecord> drop_fibers(const GroupAction& a, const std::vector<std::size_t>& dropped) {
  const std::size_t n = a.vars.size();
  std::vector<bool> is_dropped(n, false);
  for (auto d : dropped) is_dropped.at(d) = true;
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_dropped[v]) keep.push_back(v);
  }
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    const auto& e = a.gens[k].exps();
    for (std::size_t v = 0; v < n; ++v) {
      for (auto d : dropped) {
        const i64 want = (v == d) ? 1 : 0;
        if (e[v][d] != want) {
          throw VerificationError("fiber form violated: " + a.group->name(k) + " . " + a.vars.name(v) + " = " +
                                  format_monomial(a.gens[k].image(v), a.vars));
        }
      }
    }
  }
  DropRecord rec;
  for (auto d : dropped) rec.dropped.push_back(a.vars.name(d));
  std::vector<Variable> vars;
  for (auto v : keep) {
    vars.push_back(a.vars[v]);
    rec.survivors.push_back(a.vars.name(v));
  }
  rec.invariants = static_cast<int>(dropped.size());
  std::vector<MonomialMap> maps;
  for (const auto& g : a.gens) maps.push_back(g.restrict(keep));
  return {finish(a, VarSpace(std::move(vars)), std::move(maps), false), rec};
}

std::pair<GroupAction, std::vector<PitVerdict>> apply_rational_sub(const GroupAction& a, const RationalSub& s,
                                                                  const std::vector<MonomialMap>& claimed,
                                                                  const VerifyContext& ctx) {
  const std::size_t n = a.vars.size();
  if (s.forward.inputs() != n || s.new_vars.size() != n || s.forward.outputs().size() != n) {
    throw ArgumentError("rational substitution has the wrong size");
  }
  if (claimed.size() != a.gens.size()) throw ArgumentError("one claimed map per generator required");
  std::vector<PitVerdict> verdicts;
  const InvertibilityEvidence ev = verify_invertible(s, ctx);
  verdicts.insert(verdicts.end(), ev.pit.begin(), ev.pit.end());
  if (!ev.ok) throw VerificationError("rational substitution " + s.label + " not invertible: " + ev.detail);
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    // g(F(x)) = F(g x) against claimed(F(x))
    Slp lhs(n), rhs(n);
    std::vector<Slp::Node> in_l, in_r;
    for (std::size_t i = 0; i < n; ++i) {
      in_l.push_back(lhs.input(i));
      in_r.push_back(rhs.input(i));
    }
    std::vector<Slp::Node> moved;
    for (std::size_t t = 0; t < n; ++t) moved.push_back(lhs.monomial(a.gens[k].image(t), in_l));
    for (auto node : inline_slp(lhs, s.forward, moved)) lhs.output(node);
    const auto f = inline_slp(rhs, s.forward, in_r);
    for (std::size_t v = 0; v < n; ++v) rhs.output(rhs.monomial(claimed[k].image(v), f));
    PitVerdict vd = pit_equal(lhs, rhs, ctx.e1, ctx.trials, derive_seed(ctx.seed, 0x636c61696d + k));
    if (!vd.equal()) {
      std::string at;
      for (auto x : vd.witness) at += (at.empty() ? "" : ",") + std::to_string(x);
      throw VerificationError("claimed action of " + a.group->name(k) + " under " + s.label + " fails PIT (" + vd.detail +
                              ") at (" + at + ") mod " + std::to_string(ctx.e1.q));
    }
    verdicts.push_back(std::move(vd));
  }
  return {finish(a, s.new_vars, claimed, a.faithful), std::move(verdicts)};
}

RationalSub lemma24_sub(int n, i64 N, const VarSpace& old_vars, const std::vector<std::size_t>& block,
                        const std::string& family, const std::vector<i64>& prefix) {
  if (n < 2) throw ArgumentError("cyclic substitution needs n >= 2");
  if (block.size() != static_cast<std::size_t>(n - 1)) throw ArgumentError("cyclic block must have n - 1 variables");
  if (N % n != 0) throw ArgumentError("level does not contain a primitive n-th root of unity");
  const std::size_t total = old_vars.size();
  const Rational inv_n(1, n);
  auto xi = [&](i64 e) { return Root::lift(e, n, N); };

  RationalSub sub;
  sub.label = "lemma24(n=" + std::to_string(n) + ")";
  std::vector<Variable> vars = old_vars.vars();
  for (int i = 1; i < n; ++i) {
    std::vector<i64> idx = prefix;
    idx.push_back(i);
    vars[block[static_cast<std::size_t>(i - 1)]] = Variable{family, idx, "lemma24"};
  }
  sub.new_vars = VarSpace(std::move(vars));

  // forward: w_0 = sum_j P_j with P_j = v_1...v_j; w_j = P_{j-1}/w_0 - 1/n (j = 1..n); s_i = sum_j xi^{-ij} w_j
  Slp& f = sub.forward = Slp(total);
  std::vector<Slp::Node> P{f.constant(1)};
  for (int i = 1; i < n; ++i) P.push_back(f.mul(P.back(), f.input(block[static_cast<std::size_t>(i - 1)])));
  Slp::Node w0 = P[0];
  for (int j = 1; j < n; ++j) w0 = f.add(w0, P[static_cast<std::size_t>(j)]);
  const Slp::Node c_inv_n = f.constant(inv_n);
  std::vector<Slp::Node> w(static_cast<std::size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) w[static_cast<std::size_t>(j)] = f.sub(f.div(P[static_cast<std::size_t>(j - 1)], w0), c_inv_n);
  std::vector<Slp::Node> out(total);
  for (std::size_t t = 0; t < total; ++t) out[t] = f.input(t);
  for (int i = 1; i < n; ++i) {
    Slp::Node s = f.mul(f.constant(1, xi(-i)), w[1]);
    for (int j = 2; j <= n; ++j) s = f.add(s, f.mul(f.constant(1, xi(-static_cast<i64>(i) * j)), w[static_cast<std::size_t>(j)]));
    out[block[static_cast<std::size_t>(i - 1)]] = s;
  }
  for (auto o : out) f.output(o);

  // inverse: w_j = (1/n) sum_i xi^{ij} s_i; v_i = (w_{i+1} + 1/n)/(w_i + 1/n)
  Slp& g = sub.inverse = Slp(total);
  const Slp::Node g_inv_n = g.constant(inv_n);
  std::vector<Slp::Node> wj(static_cast<std::size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) {
    Slp::Node acc = g.mul(g.constant(inv_n, xi(j)), g.input(block[0]));
    for (int i = 2; i < n; ++i) {
      acc = g.add(acc, g.mul(g.constant(inv_n, xi(static_cast<i64>(i) * j)), g.input(block[static_cast<std::size_t>(i - 1)])));
    }
    wj[static_cast<std::size_t>(j)] = g.add(acc, g_inv_n);  // w_j + 1/n
  }
  std::vector<Slp::Node> back(total);
  for (std::size_t t = 0; t < total; ++t) back[t] = g.input(t);
  for (int i = 1; i < n; ++i) back[block[static_cast<std::size_t>(i - 1)]] = g.div(wj[static_cast<std::size_t>(i + 1)], wj[static_cast<std::size_t>(i)]);
  for (auto o : back) g.output(o);
  return sub;
}

MonomialMap lemma24_cycle(int n, i64 N) {
  if (n < 2) throw ArgumentError("product-inverse cycle needs n >= 2");
  const std::size_t m = static_cast<std::size_t>(n - 1);
  IntMatrix e(m, std::vector<i64>(m, 0));
  for (std::size_t i = 0; i + 1 < m; ++i) e[i][i + 1] = 1;
  for (std::size_t t = 0; t < m; ++t) e[m - 1][t] = -1;
  return MonomialMap(std::vector<Root>(m, Root::one(N)), e);
}

MonomialMap lemma24_claim(int n, i64 N, i64 t) {
  if (n < 2) throw ArgumentError("cyclic claim needs n >= 2");
  std::vector<Root> c;
  for (int i = 1; i < n; ++i) c.push_back(Root::lift(static_cast<i64>(i) * t, n, N));
  return MonomialMap(std::move(c), identity_matrix(static_cast<std::size_t>(n - 1)));
}

}  // namespace noether
