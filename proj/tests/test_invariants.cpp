#include <numeric>
#include <random>

#include "doctest.h"
#include "noether/invariants.hpp"

using namespace noether;

namespace {

bool is_hnf(const IntMatrix& H) {
  std::size_t col = 0;
  bool zero_seen = false;
  for (std::size_t r = 0; r < H.size(); ++r) {
    std::size_t c = 0;
    while (c < H[r].size() && H[r][c] == 0) ++c;
    if (c == H[r].size()) {
      zero_seen = true;
      continue;
    }
    if (zero_seen || (r > 0 && c < col) || H[r][c] <= 0) return false;
    for (std::size_t above = 0; above < r; ++above) {
      if (H[above][c] < 0 || H[above][c] >= H[r][c]) return false;
    }
    col = c + 1;
  }
  return true;
}

}  // namespace

TEST_CASE("hnf") {
  const auto id = hnf(identity_matrix(3));
  CHECK(id.H == identity_matrix(3));
  CHECK(id.U == identity_matrix(3));

  const auto r = hnf({{2, 0}, {1, 1}});
  CHECK(r.H == IntMatrix{{1, 1}, {0, 2}});
  CHECK(determinant(r.H) == 2);
  CHECK(mat_mul(r.U, IntMatrix{{2, 0}, {1, 1}}) == r.H);

  const auto z = hnf({{0, 0}, {0, 0}});
  CHECK(z.H == IntMatrix{{0, 0}, {0, 0}});
  CHECK(z.U == identity_matrix(2));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 5, n = 1 + rng() % 5;
    IntMatrix M(m, std::vector<i64>(n));
    for (auto& row : M)
      for (auto& x : row) x = static_cast<i64>(rng() % 21) - 10;
    const auto h = hnf(M);
    CHECK(is_hnf(h.H));
    CHECK(mat_mul(h.U, M) == h.H);
    const i64 du = determinant(h.U);
    CHECK((du == 1 || du == -1));
    CHECK(hnf(h.H).H == h.H);
  }
}

TEST_CASE("invariant_lattice and fixed_generators") {
  SUBCASE("C2 by -1 on two variables") {
    const DiagonalAction d{{{1, 1}}, {2}};
    const IntMatrix b = invariant_lattice(d);
    CHECK(b == IntMatrix{{1, 1}, {0, 2}});
    CHECK(lattice_index(b) == 2);
    CHECK(fixed_generators(d) == b);
    CHECK(brute_check(d, b, 4).ok);
  }
  SUBCASE("trivial action") {
    const DiagonalAction d{{{0, 0, 0}}, {1}};
    CHECK(invariant_lattice(d) == identity_matrix(3));
    CHECK(brute_check(d, identity_matrix(3), 2).ok);
  }
  SUBCASE("C_p by zeta_p on one variable") {
    for (i64 p : {2, 3, 5, 7}) {
      const DiagonalAction d{{{1}}, {p}};
      CHECK(invariant_lattice(d) == IntMatrix{{p}});
      CHECK(brute_check(d, invariant_lattice(d), 2 * p).ok);
    }
  }
  SUBCASE("C3 by (zeta, zeta^2)") {
    const DiagonalAction d{{{1, 2}}, {3}};
    const IntMatrix b = invariant_lattice(d);
    CHECK(b == IntMatrix{{1, 1}, {0, 3}});
    CHECK(brute_check(d, b, 4).ok);
  }
  SUBCASE("brute check catches a sublattice") {
    const DiagonalAction d{{{1, 1}}, {2}};
    const auto rep = brute_check(d, IntMatrix{{2, 0}, {0, 2}}, 2);
    CHECK_FALSE(rep.ok);
    CHECK(rep.witness.find("outside") != std::string::npos);
  }
  SUBCASE("index times kernel size equals group order") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 60; ++trial) {
      DiagonalAction d;
      const std::size_t r = 1 + rng() % 2, n = 1 + rng() % 3;
      i64 group = 1;
      for (std::size_t j = 0; j < r; ++j) {
        const i64 o = std::vector<i64>{2, 3, 4, 9}[rng() % 4];
        d.orders.push_back(o);
        group *= o;
        std::vector<i64> row;
        for (std::size_t v = 0; v < n; ++v) row.push_back(static_cast<i64>(rng() % static_cast<u64>(o)));
        d.chars.push_back(row);
      }
      const IntMatrix b = invariant_lattice(d);
      CHECK(brute_check(d, b, 3).ok);
      // kernel of the action on the generator group, by enumeration
      i64 kernel = 0;
      std::vector<i64> g(r, 0);
      for (;;) {
        bool trivial = true;
        for (std::size_t v = 0; v < n; ++v) {
          // sum_j g_j chars[j][v] / orders[j] must be integral
          i64 L = 1;
          for (auto o : d.orders) L = std::lcm(L, o);
          i64 acc = 0;
          for (std::size_t j = 0; j < r; ++j) acc += g[j] * d.chars[j][v] * (L / d.orders[j]);
          trivial &= acc % L == 0;
        }
        kernel += trivial;
        std::size_t k = 0;
        while (k < r && g[k] == d.orders[k] - 1) g[k++] = 0;
        if (k == r) break;
        ++g[k];
      }
      CHECK(lattice_index(b) * kernel == group);
    }
  }
}

TEST_CASE("parse_diagonal_spec") {
  const DiagonalAction d = parse_diagonal_spec("# C2\nvars = 2\ngen 2: 1 -1\n");
  CHECK(d.chars == std::vector<std::vector<i64>>{{1, 1}});
  CHECK(d.orders == std::vector<i64>{2});
  CHECK_THROWS_AS(parse_diagonal_spec("gen 2: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_diagonal_spec("vars = 2\ngen 2: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_diagonal_spec("vars = 1\ngen x: 1\n"), ParseError);
  CHECK(parse_diagonal_spec("vars = 2\n").orders == std::vector<i64>{1});
}

TEST_CASE("diagonal_from_action") {
  const auto g = std::make_shared<const PcGroup>(parse_group_spec("p = 3\ngenerators = a\norders = 3\nH = a\ntop = 1\n"));
  GroupAction act;
  act.group = g;
  act.level = 9;
  act.vars = VarSpace({{"y", {1}, ""}, {"y", {2}, ""}});
  act.gens = {MonomialMap({Root(3, 9), Root(6, 9)}, identity_matrix(2))};
  const DiagonalAction d = diagonal_from_action(act);
  CHECK(d.orders == std::vector<i64>{3});
  CHECK(d.chars == std::vector<std::vector<i64>>{{1, 2}});
}
