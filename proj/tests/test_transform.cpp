#include <fstream>
#include <sstream>

#include "doctest.h"
#include "noether/transform.hpp"

using namespace noether;

namespace {

std::shared_ptr<const PcGroup> load(const std::string& name) {
  std::ifstream in(std::string(NOETHER_DATA_DIR) + "/groups/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const PcGroup>(parse_group_spec(ss.str()));
}

GroupAction cyclic_action(int n, i64 N) {
  // C_n acting on v_1..v_{n-1} by the product-inverse cycle
  const auto g = std::make_shared<const PcGroup>(parse_group_spec(
      "p = " + std::to_string(prime_factors(n)[0]) + "\ngenerators = t\norders = " + std::to_string(n) + "\nH = t\ntop = 1\n"));
  GroupAction a;
  a.group = g;
  std::vector<Variable> vars;
  for (int i = 1; i < n; ++i) vars.push_back({"v", {i}, "test"});
  a.vars = VarSpace(vars);
  a.level = N;
  a.gens = {lemma24_cycle(n, N)};
  return a;
}

}  // namespace

TEST_CASE("pit_equal basics") {
  const FFEmbedding e = make_embedding(find_prime(1, 62, 3), 1, 3);
  Slp a(1), b(1);
  const auto x = a.input(0);
  a.output(a.pow(a.add(x, a.constant(1)), 2));
  const auto y = b.input(0);
  b.output(b.add(b.add(b.mul(y, y), b.mul(b.constant(2), y)), b.constant(1)));
  const PitVerdict v = pit_equal(a, b, e, 3, 9);
  CHECK(v.equal());
  CHECK(v.trials == 3);
  CHECK(v.log2_total < -150);

  Slp c(1), d(1);
  c.output(c.input(0));
  d.output(d.add(d.input(0), d.constant(1)));
  const PitVerdict u = pit_equal(c, d, e, 3, 9);
  CHECK(u.outcome == PitVerdict::Outcome::Unequal);
  CHECK(u.witness.size() == 1);

  SUBCASE("reproducible under the same seed") {
    CHECK(pit_equal(c, d, e, 3, 9).witness == u.witness);
  }
  SUBCASE("pole resampling exhausts on an identically vanishing denominator") {
    Slp p(1), r(1);
    p.output(p.div(p.constant(1), p.sub(p.input(0), p.input(0))));
    r.output(r.constant(1));
    CHECK(pit_equal(p, r, e, 3, 1).outcome == PitVerdict::Outcome::Inconclusive);
  }
}

TEST_CASE("verify_invertible") {
  MonomialSub shift{VarSpace({{"a", {}, ""}, {"b", {}, ""}}), {Root(), Root()}, {{0, 1}, {1, 0}}};
  CHECK(verify_invertible(shift).ok);
  MonomialSub sq{VarSpace({{"a", {}, ""}}), {Root()}, {{2}}};
  const auto ev = verify_invertible(sq);
  CHECK_FALSE(ev.ok);
  CHECK(ev.method.find("not unimodular") != std::string::npos);

  // size-2 DFT with entries 1, +-1: det -2, nonzero mod 13
  LinearMap dft;
  dft.m = {{FormalSum::of(Root(0, 2)), FormalSum::of(Root(0, 2))}, {FormalSum::of(Root(0, 2)), FormalSum::of(Root(1, 2))}};
  CHECK(det_mod(dft.eval(FFEmbedding{13, 12, 2}), 13) == 11);
  VerifyContext ctx = VerifyContext::make(2, 30, 3, 1);
  CHECK(verify_invertible(LinearSub{VarSpace({{"u", {0}, ""}, {"u", {1}, ""}}), dft, 2}, ctx).ok);
  LinearMap sing;
  sing.m = {{FormalSum::of(Root(0, 2)), FormalSum::of(Root(0, 2))}, {FormalSum::of(Root(0, 2)), FormalSum::of(Root(0, 2))}};
  CHECK_FALSE(verify_invertible(LinearSub{VarSpace({{"u", {0}, ""}, {"u", {1}, ""}}), sing, 0}, ctx).ok);
}

TEST_CASE("cyclic linearization") {
  SUBCASE("n = 1 rejected") {
    CHECK_THROWS_AS(lemma24_cycle(1, 1), ArgumentError);
    CHECK_THROWS_AS(lemma24_sub(1, 1, VarSpace(), {}), ArgumentError);
  }
  for (int n : {2, 3, 4, 5, 8, 9}) {
    CAPTURE(n);
    const i64 N = n;
    const GroupAction a = cyclic_action(n, N);
    REQUIRE(verify_homomorphism(a).ok);
    std::vector<std::size_t> block;
    for (int i = 0; i < n - 1; ++i) block.push_back(static_cast<std::size_t>(i));
    const RationalSub sub = lemma24_sub(n, N, a.vars, block);
    const VerifyContext ctx = VerifyContext::make(N, 62, 3, 17);
    const auto [b, verdicts] = apply_rational_sub(a, sub, {lemma24_claim(n, N, 1)}, ctx);
    CHECK(b.vars.name(0) == "s[1]");
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(n); ++i) {
      CHECK(b.gens[0].target(i) == i);
      CHECK(b.gens[0].coeff(i) == Root::lift(static_cast<i64>(i) + 1, n, N));
    }
    for (const auto& v : verdicts) {
      CHECK(v.equal());
      if (n == 5) CHECK(v.log2_total <= -120);
    }
    // a wrong spectrum is rejected
    CHECK_THROWS_AS(apply_rational_sub(a, sub, {lemma24_claim(n, N, 0)}, ctx), VerificationError);
  }
  SUBCASE("n = 2 closed form: s_1 = (v_1 - 1)/(v_1 + 1)") {
    const GroupAction a = cyclic_action(2, 2);
    const RationalSub sub = lemma24_sub(2, 2, a.vars, {0});
    Slp closed(1);
    const auto v = closed.input(0);
    closed.output(closed.div(closed.sub(v, closed.constant(1)), closed.add(v, closed.constant(1))));
    const VerifyContext ctx = VerifyContext::make(2, 62, 3, 5);
    CHECK(pit_equal(sub.forward, closed, ctx.e1, 3, 1).equal());
  }
}

TEST_CASE("monomial substitution: ratio variables under the alpha shift") {
  const auto g = load("c3xc3.grp");
  const GroupAction a = induce_representation(g);
  // new: x0 = x[1,0], u_i = x[1,i]/x[1,i-1]
  MonomialSub s{VarSpace({{"x", {0}, "ratio"}, {"u", {1}, "ratio"}, {"u", {2}, "ratio"}}),
                std::vector<Root>(3, Root::one(a.level)),
                {{1, 0, 0}, {-1, 1, 0}, {0, -1, 1}}};
  const GroupAction b = apply_monomial_sub(a, s);
  const std::size_t alpha = *g->top();
  // alpha: u1 -> u2 -> (u1 u2)^-1
  CHECK(b.gens[alpha].exps()[1] == std::vector<i64>{0, 0, 1});
  CHECK(b.gens[alpha].exps()[2] == std::vector<i64>{0, -1, -1});
  // round trip
  MonomialSub back{a.vars, std::vector<Root>(3, Root::one(a.level)), invert(MonomialMap(s.coeff, s.exps)).exps()};
  const GroupAction c = apply_monomial_sub(b, back);
  for (std::size_t k = 0; k < a.gens.size(); ++k) CHECK(c.gens[k] == a.gens[k]);

  SUBCASE("fiber drop of x0") {
    const auto [d, rec] = drop_fibers(b, {0});
    CHECK(d.vars.size() == 2);
    CHECK(rec.invariants == 1);
    CHECK(rec.dropped == std::vector<std::string>{"x[0]"});
    CHECK(d.vars.size() + static_cast<std::size_t>(rec.invariants) == a.vars.size());
    CHECK_THROWS_AS(drop_fibers(a, {0}), VerificationError);
  }
  SUBCASE("C_p scaling one variable: drop leaves nothing") {
    const GroupAction cp = induce_representation(load("c3.grp"));
    const auto [d, rec] = drop_fibers(cp, {0});
    CHECK(d.vars.size() == 0);
    CHECK(rec.invariants == 1);
  }
}

TEST_CASE("linear substitution: DFT diagonalizes the alpha shift on C3 x C3") {
  const auto g = load("c3xc3.grp");
  const GroupAction a = induce_representation(g);
  const i64 N = a.level;
  const VerifyContext ctx = VerifyContext::make(N, 62, 3, 8);
  LinearSub s;
  s.dft_order = 3;
  std::vector<Variable> vars;
  for (i64 l = 0; l < 3; ++l) vars.push_back({"u", {l}, "dft"});
  s.new_vars = VarSpace(vars);
  // u_l = sum_t xi^{l t} x_t
  s.matrix.m.assign(3, std::vector<FormalSum>(3, FormalSum(N)));
  for (i64 l = 0; l < 3; ++l)
    for (i64 t = 0; t < 3; ++t) s.matrix.m[l][t] = FormalSum::of(Root::lift(l * t, 3, N));
  std::vector<MonomialMap> claimed;
  for (std::size_t k = 0; k < g->rank(); ++k) {
    std::vector<Root> c;
    for (i64 l = 0; l < 3; ++l) c.push_back(k == *g->top() ? Root::lift(-l, 3, N) : Root::lift(1, 3, N));
    claimed.emplace_back(c, identity_matrix(3));
  }
  const GroupAction b = apply_linear_sub(a, s, claimed, ctx);
  CHECK(b.homomorphism);
  claimed[*g->top()] = MonomialMap::identity(3, N);
  CHECK_THROWS_AS(apply_linear_sub(a, s, claimed, ctx), VerificationError);
}

TEST_CASE("sublattice substitution: H-invariant ratios") {
  // C3 acting by zeta on one variable: w = x^3 is invariant
  const GroupAction a = induce_representation(load("c3.grp"));
  MonomialSub s{VarSpace({{"w", {}, "inv"}}), {Root::one(a.level)}, {{3}}, true};
  const GroupAction b = apply_monomial_sub(a, s);
  CHECK(b.gens[0].is_identity());
  s.sublattice = false;
  CHECK_THROWS_AS(apply_monomial_sub(a, s), VerificationError);
}
