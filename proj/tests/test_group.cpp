#include <array>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "noether/group.hpp"

using namespace noether;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(NOETHER_DATA_DIR) + "/groups/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 3x3 unitriangular matrices over F_3: an independent model of 3^{1+2}.
using M3 = std::array<std::array<int, 3>, 3>;
M3 mat_mul(const M3& x, const M3& y) {
  M3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] = (r[i][j] + x[i][k] * y[k][j]) % 3;
  return r;
}
M3 mat_pow(M3 x, i64 e) {
  M3 r{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  e = mod(e, 3);
  for (i64 k = 0; k < e; ++k) r = mat_mul(r, x);
  return r;
}

// Semidirect model (Z/p^b x Z/p^c) : <alpha>, where alpha^-1 h alpha = phi(h).
struct SemidirectModel {
  i64 pa, pb, pc;
  std::array<std::array<i64, 2>, 2> phi;  // phi(beta^u gamma^v) = beta^(phi00 u + phi01 v) gamma^(phi10 u + phi11 v)
  struct E {
    i64 t, u, v;
  };
  std::pair<i64, i64> apply_phi(i64 u, i64 v, i64 times) const {
    for (i64 k = 0; k < times; ++k) {
      const i64 nu = mod(phi[0][0] * u + phi[0][1] * v, pb);
      const i64 nv = mod(phi[1][0] * u + phi[1][1] * v, pc);
      u = nu;
      v = nv;
    }
    return {u, v};
  }
  // (alpha^t h)(alpha^t' h') = alpha^(t+t') phi^t'(h) h'
  E mul(const E& x, const E& y) const {
    auto [u, v] = apply_phi(x.u, x.v, y.t);
    return {mod(x.t + y.t, pa), mod(u + y.u, pb), mod(v + y.v, pc)};
  }
};

}  // namespace

TEST_CASE("parse: abelian C3 x C3 has order 9") {
  const PcGroup g = parse_group_spec(slurp("c3xc3.grp"));
  CHECK(g.order() == 9);
  CHECK(g.rank() == 2);
}

TEST_CASE("parse: extraspecial 3^{1+2} order matches enumeration") {
  const PcGroup g = parse_group_spec(slurp("heisenberg3.grp"));
  CHECK(g.order() == 27);
  std::set<Element> seen;
  for (std::size_t i = 0; i < 27; ++i) seen.insert(g.collect(g.normal_word(g.element_at(i))));
  CHECK(seen.size() == 27);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parse_group_spec(slurp("malformed.grp")), doctest::Contains("not a power of p"), ParseError);
  CHECK_THROWS_AS(parse_group_spec("p = 3\ngenerators = a\norders = 3\nH = a\n"), ParseError);  // no top
  CHECK_THROWS_AS(parse_group_spec("p = 3\ngenerators = a\norders = 3\nH = a\ntop = 1\nbogus = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_group_spec("p = 3\ngenerators = a, b\norders = 3, 3\nH = b\ntop = a\ncommutators:\n [b, a] = q\n"), ParseError);
  try {
    parse_group_spec("p = 3\ngenerators = a\norders = 3\nH = a\ntop = 1\npowers:\n  a^9 = 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
  }
  // Commutator words must live after the lower-indexed generator.
  CHECK_THROWS_AS(parse_group_spec("p = 3\ngenerators = a, b\norders = 3, 3\nH = b\ntop = a\ncommutators:\n [b, a] = a\n"),
                  ParseError);
}

TEST_CASE("collect: empty word is the identity") {
  const PcGroup g = parse_group_spec(slurp("heisenberg3.grp"));
  CHECK(g.collect({}) == g.identity());
}

TEST_CASE("collect: b*a = a*b*c^-1 in 3^{1+2}") {
  const PcGroup g = parse_group_spec(slurp("heisenberg3.grp"));
  const Word ba{{1, 1}, {0, 1}};
  CHECK(g.collect(ba) == Element{1, 1, 2});
}

TEST_CASE("collect agrees with the unitriangular matrix model of 3^{1+2}") {
  const PcGroup g = parse_group_spec(slurp("heisenberg3.grp"));
  const M3 A{{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}};
  const M3 B{{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}};
  // [a, b] = a^-1 b^-1 a b
  const M3 C = mat_mul(mat_mul(mat_pow(A, 2), mat_pow(B, 2)), mat_mul(A, B));
  const std::array<M3, 3> gens{A, B, C};
  auto image = [&](const Element& e) {
    return mat_mul(mat_mul(mat_pow(A, e[0]), mat_pow(B, e[1])), mat_pow(C, e[2]));
  };
  std::set<M3> images;
  for (std::size_t i = 0; i < 27; ++i) images.insert(image(g.element_at(i)));
  CHECK(images.size() == 27);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Word w;
    M3 expect = mat_pow(A, 0);
    const int len = static_cast<int>(rng() % 8);
    for (int k = 0; k < len; ++k) {
      const std::size_t gen = rng() % 3;
      const i64 e = static_cast<i64>(rng() % 5) - 2;
      w.emplace_back(gen, e);
      expect = mat_mul(expect, mat_pow(gens[gen], e));
    }
    CHECK(image(g.collect(w)) == expect);
  }
}

TEST_CASE("collect agrees with the semidirect model of G1 and G2") {
  struct Case {
    FamilyParams f;
  };
  const std::vector<FamilyParams> cases = {
      {FamilyParams::Kind::G1, 3, 2, 2, 2, 1, 1},
      {FamilyParams::Kind::G1, 3, 1, 1, 2, 1, 1},
      {FamilyParams::Kind::G2, 3, 2, 2, 1, 1, 3},
      {FamilyParams::Kind::G2, 3, 2, 2, 2, 1, 2},
  };
  std::mt19937_64 rng(11);
  for (const auto& f : cases) {
    const PcGroup g = make_family_group(f);
    const i64 p = f.p;
    SemidirectModel m{ipow(p, f.a), ipow(p, f.b), ipow(p, f.c), {}};
    const i64 k = 1 + ipow(p, f.s_or_r);
    if (f.kind == FamilyParams::Kind::G1) {
      m.phi = {{{1, f.x}, {0, k}}};
    } else {
      m.phi = {{{k, f.x}, {0, 1}}};
    }
    const std::array<SemidirectModel::E, 3> gens{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    auto inv = [&](const SemidirectModel::E& e) {
      SemidirectModel::E r{0, 0, 0}, cur = e;
      // brute-force inverse by powering
      SemidirectModel::E acc = e;
      while (!(acc.t == 0 && acc.u == 0 && acc.v == 0)) {
        r = acc;
        acc = m.mul(acc, e);
      }
      (void)cur;
      return r.t == 0 && r.u == 0 && r.v == 0 ? e : r;
    };
    for (int trial = 0; trial < 60; ++trial) {
      Word w;
      SemidirectModel::E expect{0, 0, 0};
      const int len = static_cast<int>(rng() % 6);
      for (int j = 0; j < len; ++j) {
        const std::size_t gen = rng() % 3;
        const i64 e = static_cast<i64>(rng() % 5) - 2;
        w.emplace_back(gen, e);
        const auto base = e >= 0 ? gens[gen] : inv(gens[gen]);
        for (i64 t = 0; t < (e >= 0 ? e : -e); ++t) expect = m.mul(expect, base);
      }
      const Element got = g.collect(w);
      CHECK(got == Element{expect.t, expect.u, expect.v});
    }
  }
}

TEST_CASE("collect: gamma*alpha = alpha*gamma^4*beta in G1(p=3,a=2,b=c=2,s=1,x=1)") {
  const PcGroup g = make_family_group({FamilyParams::Kind::G1, 3, 2, 2, 2, 1, 1});
  CHECK(g.collect({{2, 1}, {0, 1}}) == Element{1, 1, 4});
}

TEST_CASE("collect is a homomorphism on random word pairs") {
  const PcGroup g = parse_group_spec(slurp("class2_243a.grp"));
  std::mt19937_64 rng(3);
  auto random_word = [&] {
    Word w;
    for (int k = 0, len = static_cast<int>(rng() % 7); k < len; ++k) {
      w.emplace_back(rng() % g.rank(), static_cast<i64>(rng() % 7) - 3);
    }
    return w;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Word u = random_word(), v = random_word();
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    CHECK(g.collect(uv) == g.multiply(g.collect(u), g.collect(v)));
  }
}

TEST_CASE("verify_consistency") {
  SUBCASE("C9 is consistent with exponent 9") {
    const auto rep = verify_consistency(parse_group_spec("p = 3\ngenerators = a\norders = 9\nH = a\ntop = 1\n"));
    CHECK(rep.consistent);
    CHECK(rep.exponent == 9);
  }
  SUBCASE("3^{1+2} exponent 3") {
    const auto rep = verify_consistency(parse_group_spec(slurp("heisenberg3.grp")));
    CHECK(rep.consistent);
    CHECK(rep.order == 27);
    CHECK(rep.exponent == 3);
  }
  SUBCASE("3^{1+2} exponent 9 and the other bundled groups") {
    CHECK(verify_consistency(parse_group_spec(slurp("extraspecial27_exp9.grp"))).exponent == 9);
    for (const char* f : {"dihedral8.grp", "quaternion8.grp", "heisenberg3_units.grp", "class2_243a.grp", "class2_243b.grp",
                          "class2_81_dft.grp", "nonsplit.grp", "heisenberg3_x_c3.grp"}) {
      CAPTURE(f);
      CHECK(verify_consistency(parse_group_spec(slurp(f))).consistent);
    }
  }
  SUBCASE("incompatible [a,b] = a is detected") {
    // a^b = a^2 is an automorphism of order 2, but b has order 3.
    auto rep = verify_consistency(parse_group_spec("p = 3\ngenerators = b, a\norders = 3, 3\nH = a\ntop = b\ncommutators:\n [a, b] = a\n"));
    CHECK_FALSE(rep.consistent);
    CHECK(rep.witness.find("relator") != std::string::npos);
  }
  SUBCASE("bound exceeded") {
    CHECK_THROWS_AS(verify_consistency(parse_group_spec(slurp("class2_243a.grp")), 100), ScopeError);
  }
}

namespace {
// Brute-force lower central series from a full multiplication table.
int brute_class(const PcGroup& g) {
  const Enumeration en = enumerate(g);
  const std::size_t n = en.size;
  std::vector<std::vector<std::size_t>> mul(n, std::vector<std::size_t>(n));
  std::vector<std::size_t> inv(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      mul[x][y] = en.multiply(g, x, y);
      if (mul[x][y] == 0) inv[x] = y;
    }
  std::vector<std::size_t> cur(n);
  for (std::size_t i = 0; i < n; ++i) cur[i] = i;
  for (int cls = 1; cls < 20; ++cls) {
    std::set<std::size_t> gen;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y : cur) gen.insert(mul[mul[inv[x]][inv[y]]][mul[x][y]]);
    std::set<std::size_t> closure{0};
    std::vector<std::size_t> frontier{0};
    while (!frontier.empty()) {
      const std::size_t a = frontier.back();
      frontier.pop_back();
      for (auto b : gen)
        if (closure.insert(mul[a][b]).second) frontier.push_back(mul[a][b]);
    }
    if (closure.size() == 1) return cls;
    cur.assign(closure.begin(), closure.end());
  }
  return -1;
}
}  // namespace

TEST_CASE("nilpotency_class") {
  CHECK(nilpotency_class(parse_group_spec(slurp("c3xc3.grp"))) == 1);
  CHECK(nilpotency_class(parse_group_spec(slurp("c3.grp"))) == 1);
  for (const char* f : {"heisenberg3.grp", "dihedral8.grp", "extraspecial27_exp9.grp", "class2_243a.grp", "class2_243b.grp"}) {
    CAPTURE(f);
    const PcGroup g = parse_group_spec(slurp(f));
    CHECK(nilpotency_class(g) == 2);
    CHECK(brute_class(g) == 2);
  }
  SUBCASE("G2 with p=3, a=b=c=2, r=1, x=1 has class 3") {
    const PcGroup g = make_family_group({FamilyParams::Kind::G2, 3, 2, 2, 2, 1, 1});
    REQUIRE(verify_consistency(g).consistent);
    const int cls = nilpotency_class(g);
    CHECK(cls == 3);
    CHECK(cls == brute_class(g));
  }
  SUBCASE("groups of order p^2 have class <= 2") {
    CHECK(nilpotency_class(parse_group_spec("p = 2\ngenerators = a\norders = 4\nH = a\ntop = 1\n")) <= 2);
    CHECK(nilpotency_class(parse_group_spec(slurp("c2xc2.grp"))) <= 2);
  }
}

TEST_CASE("check_abc") {
  auto w = check_abc(parse_group_spec(slurp("c3xc3.grp")));
  CHECK(w.ok());
  CHECK(w.split);
  w = check_abc(parse_group_spec(slurp("heisenberg3.grp")));
  CHECK(w.ok());
  CHECK(w.split);
  CHECK(w.quotient_log == 1);
  w = check_abc(parse_group_spec(slurp("quaternion8.grp")));
  CHECK(w.ok());
  CHECK_FALSE(w.split);
  // H = <a, b> in 3^{1+2} is not abelian
  w = check_abc(parse_group_spec("p = 3\ngenerators = a, b, c\norders = 3, 3, 3\nH = a, b\ntop = c\ncommutators:\n [a, b] = c\n"));
  CHECK(w.failure == AbcWitness::Failure::HNotAbelian);
  // H = <b> is not normal
  w = check_abc(parse_group_spec("p = 3\ngenerators = a, b, c\norders = 3, 3, 3\nH = b\ntop = a\ncommutators:\n [a, b] = c\n"));
  CHECK(w.failure == AbcWitness::Failure::HNotNormal);
  // C3 x C3 x C3 with H one factor: quotient not cyclic
  w = check_abc(parse_group_spec("p = 3\ngenerators = a, b, c\norders = 3, 3, 3\nH = c\ntop = a\n"));
  CHECK(w.failure == AbcWitness::Failure::QuotientNotCyclic);
}

TEST_CASE("commutator_data") {
  SUBCASE("abelian: all gamma trivial") {
    const auto d = commutator_data(parse_group_spec(slurp("c3xc3.grp")));
    CHECK(d.gamma[0] == Element{0, 0});
    CHECK(d.valuation[0][0] == -1);
  }
  SUBCASE("3^{1+2}: gamma_b = c^-1 has valuation 0 and unit -1") {
    const PcGroup g = parse_group_spec(slurp("heisenberg3.grp"));
    const auto d = commutator_data(g);
    // H = (b, c); [b, a] = c^-1 = c^2
    CHECK(d.exponent[1][0] == 2);
    CHECK(d.valuation[1][0] == 0);
    CHECK(d.unit[1][0] == 2);
    CHECK(d.gamma[1] == g.identity());
  }
  SUBCASE("G1-shaped class-2 member: gamma_gamma = beta^3 gamma^3") {
    // [gamma, alpha] = beta^3 gamma^3 with b = c = 2 is central, so the group has class 2.
    const PcGroup g = make_family_group({FamilyParams::Kind::G1, 3, 1, 2, 2, 1, 3});
    REQUIRE(verify_consistency(g).consistent);
    REQUIRE(nilpotency_class(g) == 2);
    const auto d = commutator_data(g);
    CHECK(d.exponent[0][1] == 3);
    CHECK(d.exponent[1][1] == 3);
    CHECK(d.valuation[0][1] == 1);
    CHECK(d.valuation[1][1] == 1);
    CHECK(d.unit[0][1] == 1);
    CHECK(d.unit[1][1] == 1);
  }
  SUBCASE("class > 2 rejected") {
    CHECK_THROWS_AS(commutator_data(make_family_group({FamilyParams::Kind::G1, 3, 2, 2, 2, 1, 1})), ScopeError);
  }
  SUBCASE("max (a_m - r_mj) <= a on the class-2 suite") {
    for (const char* f : {"heisenberg3.grp", "dihedral8.grp", "extraspecial27_exp9.grp", "class2_243a.grp", "class2_243b.grp",
                          "class2_81_dft.grp", "heisenberg3_units.grp"}) {
      const auto d = commutator_data(parse_group_spec(slurp(f)));
      for (std::size_t m = 0; m < d.valuation.size(); ++m)
        for (std::size_t j = 0; j < d.valuation.size(); ++j)
          if (d.valuation[m][j] >= 0) CHECK(d.h_log_orders[m] - d.valuation[m][j] <= d.a);
    }
  }
}
