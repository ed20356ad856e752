#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "noether/action.hpp"

using namespace noether;

namespace {

std::shared_ptr<const PcGroup> load(const std::string& name) {
  std::ifstream in(std::string(NOETHER_DATA_DIR) + "/groups/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const PcGroup>(parse_group_spec(ss.str()));
}

MonomialMap random_unimodular(std::mt19937_64& rng, std::size_t n, i64 N) {
  MonomialMap f = MonomialMap::identity(n, N);
  for (int step = 0; step < 6; ++step) {
    // elementary map v -> zeta * v * t^k
    const std::size_t v = rng() % n, t = rng() % n;
    IntMatrix e = identity_matrix(n);
    if (v != t) e[v][t] = static_cast<i64>(rng() % 5) - 2;
    std::vector<Root> c(n, Root::one(N));
    c[v] = Root(static_cast<i64>(rng() % N), N);
    f = compose(f, MonomialMap(c, e));
  }
  return f;
}

}  // namespace

TEST_CASE("compose and invert") {
  const MonomialMap shift = MonomialMap::permutation({1, 2, 0}, {Root(0, 3), Root(0, 3), Root(0, 3)});
  CHECK(compose(MonomialMap::identity(3, 3), shift) == shift);
  CHECK(map_power(shift, 3).is_identity());
  CHECK_FALSE(map_power(shift, 2).is_identity());

  SUBCASE("ratio change u_i = x_i / x_{i-1} inverts integrally") {
    // variables (x0, u1, u2): x0 -> x0, u1 -> x1/x0, u2 -> x2/x1 in the x basis
    IntMatrix e{{1, 0, 0}, {-1, 1, 0}, {0, -1, 1}};
    const MonomialMap f({Root(0, 1), Root(0, 1), Root(0, 1)}, e);
    const MonomialMap g = invert(f);
    CHECK(g.exps() == IntMatrix{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}});
    CHECK(compose(f, g).is_identity());
    CHECK(compose(g, f).is_identity());
  }
  SUBCASE("non-unimodular") {
    const MonomialMap sq({Root(0, 1)}, {{2}});
    CHECK_THROWS_WITH(invert(sq), doctest::Contains("not multiplicatively invertible"));
  }
  SUBCASE("random triples") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const auto f = random_unimodular(rng, 4, 9), g = random_unimodular(rng, 4, 9), h = random_unimodular(rng, 4, 9);
      CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
      CHECK(compose(invert(f), f).is_identity());
      CHECK(compose(f, invert(f)).is_identity());
      CHECK(map_power(f, -2) == invert(compose(f, f)));
    }
  }
  SUBCASE("coefficients pass through") {
    // f: x -> zeta x, y -> y ; g: x -> y, y -> x^2 y
    const MonomialMap f({Root(1, 4), Root(0, 4)}, {{1, 0}, {0, 1}});
    const MonomialMap g({Root(0, 4), Root(0, 4)}, {{0, 1}, {2, 1}});
    const MonomialMap fg = compose(f, g);
    CHECK(fg.coeff(0) == Root(0, 4));
    CHECK(fg.coeff(1) == Root(2, 4));
  }
}

TEST_CASE("restrict") {
  const MonomialMap f({Root(1, 3), Root(0, 3), Root(2, 3)}, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}});
  const MonomialMap r = f.restrict({1, 2});
  CHECK(r.size() == 2);
  CHECK(r.target(0) == 1u);
  CHECK(r.coeff(1) == Root(2, 3));
  const MonomialMap leak({Root(0, 3), Root(0, 3)}, {{1, 1}, {0, 1}});
  CHECK_THROWS_AS(leak.restrict({0}), VerificationError);
}

TEST_CASE("linear maps and formal sums") {
  FormalSum s = FormalSum::of(Root(1, 3)) + FormalSum::of(Root(2, 3)) + FormalSum::of(Root(0, 3));
  CHECK(s.terms().size() == 3);
  const u64 q = find_prime(3, 40, 1);
  const auto e1 = make_embedding(q, 3, 1), e2 = make_embedding(find_prime(3, 40, 2), 3, 2);
  CHECK(s.eval(e1) == 0);  // 1 + zeta + zeta^2 = 0
  CHECK(rational_mod(Rational(1, 2), 7) == 4);
  CHECK(rational_mod(Rational(-1, 3), 7) == 2);

  const MonomialMap shift = MonomialMap::permutation({1, 0}, {Root(1, 3), Root(2, 3)});
  const LinearMap l = LinearMap::from_monomial(shift);
  const LinearMap l2 = compose(l, l);
  CHECK(linear_equal(l2, LinearMap::from_monomial(MonomialMap::identity(2, 3)), e1, e2));
  CHECK_FALSE(linear_equal(l, LinearMap::from_monomial(MonomialMap::identity(2, 3)), e1, e2));
}

TEST_CASE("induce_representation") {
  SUBCASE("C3 with H = G: one variable, zeta_3") {
    const auto act = induce_representation(load("c3.grp"));
    CHECK(act.vars.size() == 1);
    CHECK(act.gens[0].coeff(0) == Root(1, 3));
    CHECK(act.faithful);
  }
  SUBCASE("C3 x C3: H-generator scales every x[1,i] by zeta_3, alpha shifts") {
    const auto g = load("c3xc3.grp");
    const auto act = induce_representation(g);
    REQUIRE(act.vars.size() == 3);
    const std::size_t alpha = *g->top();
    const std::size_t h = g->h_generators()[0];
    for (std::size_t v = 0; v < 3; ++v) {
      CHECK(act.gens[h].coeff(v) == Root(1, 3));
      CHECK(act.gens[h].target(v) == v);
      CHECK(act.gens[alpha].target(v) == (v + 1) % 3);
    }
  }
  SUBCASE("3^{1+2}: 3 x 3 grid, central generator uniform on orbits, faithful") {
    const auto g = load("heisenberg3.grp");
    const auto act = induce_representation(g);
    CHECK(act.vars.size() == 6);
    CHECK(act.homomorphism);
    CHECK(act.faithful);
    // central c is the second H generator; it scales x[2,i] by zeta_3 and fixes x[1,i]
    const std::size_t c = *g->index_of("c");
    for (i64 i = 0; i < 3; ++i) {
      CHECK(act.gens[c].coeff(act.vars.at("x", {2, i})) == Root(1, 3));
      CHECK(act.gens[c].coeff(act.vars.at("x", {1, i})) == Root(0, 3));
    }
  }
  SUBCASE("non-split input rejected") {
    CHECK_THROWS_AS(induce_representation(load("quaternion8.grp")), ScopeError);
    CHECK_THROWS_AS(induce_representation(load("nonsplit.grp")), ScopeError);
  }
  SUBCASE("coefficients agree with the commutator table on class-2 groups") {
    for (const char* f : {"heisenberg3.grp", "heisenberg3_units.grp", "class2_243a.grp", "class2_243b.grp", "class2_81_dft.grp",
                          "dihedral8.grp", "extraspecial27_exp9.grp", "heisenberg3_x_c3.grp"}) {
      CAPTURE(f);
      const auto g = load(f);
      const auto act = induce_representation(g);
      const auto d = commutator_data(*g);
      const auto& h = g->h_generators();
      const i64 pa = ipow(g->p(), static_cast<unsigned>(d.a));
      for (std::size_t j = 0; j < h.size(); ++j) {
        for (std::size_t m = 0; m < h.size(); ++m) {
          const i64 am = ipow(g->p(), static_cast<unsigned>(d.h_log_orders[m]));
          for (i64 i = 0; i < pa; ++i) {
            const Root expect = Root::lift((m == j ? 1 : 0) + i * d.exponent[m][j], am, act.level);
            CHECK(act.gens[h[j]].coeff(act.vars.at("x", {static_cast<i64>(m) + 1, i})) == expect);
          }
        }
      }
    }
  }
}

TEST_CASE("verify_homomorphism and verify_faithful catch defects") {
  const auto g = load("heisenberg3.grp");
  GroupAction act = induce_representation(g);
  SUBCASE("corrupted coefficient") {
    const std::size_t b = *g->index_of("b");
    auto coeffs = std::vector<Root>();
    for (std::size_t v = 0; v < act.vars.size(); ++v) coeffs.push_back(act.gens[b].coeff(v));
    coeffs[0] = root_mul(coeffs[0], Root(1, act.level));
    act.gens[b] = MonomialMap(coeffs, act.gens[b].exps());
    const auto rep = verify_homomorphism(act);
    CHECK_FALSE(rep.ok);
    CHECK(rep.witness.find("relator") != std::string::npos);
  }
  SUBCASE("C9 through zeta_3 is not faithful") {
    const auto c9 = std::make_shared<const PcGroup>(parse_group_spec("p = 3\ngenerators = a\norders = 9\nH = a\ntop = 1\n"));
    GroupAction bad;
    bad.group = c9;
    bad.vars = VarSpace({{"x", {}, "test"}});
    bad.level = 9;
    bad.gens = {MonomialMap({Root(3, 9)}, {{1}})};
    CHECK(verify_homomorphism(bad).ok);
    const auto rep = verify_faithful(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.witness == "kernel element a^3");
  }
  SUBCASE("trivial group") {
    const auto triv = std::make_shared<const PcGroup>(PcGroup(3, {}, {}, {}, {}, {}, std::nullopt));
    GroupAction t;
    t.group = triv;
    CHECK(verify_homomorphism(t).ok);
    CHECK(verify_faithful(t).ok);
  }
}
