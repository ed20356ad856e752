#include <fstream>
#include <sstream>

#include "doctest.h"
#include "noether/pipeline.hpp"

using namespace noether;

namespace {

std::shared_ptr<const PcGroup> load(const std::string& name) {
  std::ifstream in(std::string(NOETHER_DATA_DIR) + "/groups/" + name + ".grp");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const PcGroup>(parse_group_spec(ss.str()));
}

Certificate run(const std::string& name) { return run_pipeline(load(name), name); }

bool homomorphism_everywhere(const Certificate& c) {
  for (const auto& s : c.steps) {
    if (!verify_homomorphism(s.result).ok) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("binomial_kl") {
  CHECK(binomial_kl(3, 1, 0) == std::pair<i64, i64>{1, 0});
  CHECK(binomial_kl(3, 1, 2) == std::pair<i64, i64>{16, 5});
  CHECK(binomial_kl(2, 2, 3) == std::pair<i64, i64>{125, 31});
  for (i64 p : {2, 3, 5})
    for (int s = 1; s <= 2; ++s)
      for (i64 i = 1; i < 8; ++i) {
        const auto [k, l] = binomial_kl(p, s, i);
        const auto [k0, l0] = binomial_kl(p, s, i - 1);
        CHECK(k == k0 * (1 + ipow(p, static_cast<unsigned>(s))));
        CHECK(l - l0 == k0);
      }
}

TEST_CASE("abelian groups end at the diagonal terminal") {
  for (const char* n : {"c3", "c2xc2", "c3xc3", "c4xc2", "c9xc3"}) {
    CAPTURE(n);
    const Certificate c = run(n);
    CHECK(c.status == Certificate::Status::Verified);
    CHECK(c.terminal.kind == Terminal::Kind::DiagonalFixedField);
    CHECK(c.count_node(node::kLemma24) == 0);
    CHECK(c.count_node(node::kFischer) == 1);
    CHECK(c.terminal.generators.size() == c.initial.vars.size());
  }
  const Certificate c = run("c3xc3");
  CHECK(lattice_index(c.terminal.lattice) == 9);
}

TEST_CASE("class 2 groups linearize") {
  for (const char* n : {"heisenberg3", "heisenberg3_units", "extraspecial27_exp9", "dihedral8", "heisenberg3_x_c3", "class2_81_dft",
                        "class2_243a", "class2_243b"}) {
    CAPTURE(n);
    const Certificate c = run(n);
    CHECK_MESSAGE(c.status == Certificate::Status::Verified, c.message);
    CHECK(c.terminal.kind == Terminal::Kind::LinearAction);
    CHECK(c.transcendence_ledger_ok());
    CHECK(c.log2_error_bound() <= -40);
    CHECK(homomorphism_everywhere(c));
    CHECK(c.count_node(node::kRestriction) == 1);
    CHECK(c.count_node(node::kFiberDrop) == 1);
    CHECK(c.count_node(node::kLemma24) >= 1);
    for (const auto& f : c.steps.back().result.gens) CHECK(f.is_linear());
  }
  const Certificate h = run("heisenberg3");
  CHECK(h.count_node(node::kLemma24) == 2);
  CHECK(h.terminal.linear_vars.size() == 4);
}

TEST_CASE("out of scope and malformed inputs") {
  for (const char* n : {"nonsplit", "quaternion8"}) {
    const Certificate c = run(n);
    CHECK(c.status == Certificate::Status::Incomplete);
    CHECK(c.message.find("non-split extension out of scope") != std::string::npos);
  }
  // a^b = a^2 has order 2 while b has order 3
  const auto bad = std::make_shared<const PcGroup>(parse_group_spec("p = 3\ngenerators = b, a\norders = 3, 3\nH = a\ntop = b\ncommutators:\n [a, b] = a\n"));
  const Certificate c = run_class2(bad);
  CHECK(c.status == Certificate::Status::InputError);
  CHECK(c.message.find("inconsistent") != std::string::npos);
}

TEST_CASE("G1 and G2 certificates") {
  SUBCASE("U-form (2, 1, 1) on the residual u block") {
    const Certificate c = run_g1(3, 1, 1, 2, 1, 1);
    REQUIRE(c.status == Certificate::Status::Verified);
    REQUIRE(c.terminal.pattern);
    const auto& pat = *c.terminal.pattern;
    CHECK(pat.form == MetacyclicPattern::Form::U);
    CHECK(pat.m == 2);
    CHECK(pat.n == 1);
    CHECK(pat.r == 1);
    CHECK(pat.vars == std::vector<std::string>{"u[1]", "u[2]"});
    // gamma on u_i is zeta_9^{3 k^{i-1}} with k = 4
    CHECK(pat.spectrum[0] == Root(3, 9));
    CHECK(pat.spectrum[1] == Root(12, 9));
    CHECK(c.count_node(node::kLemma24) == 1);
    CHECK(c.count_node(node::kMetacyclic) == 1);
  }
  SUBCASE("x = 0 keeps v fixed outright") {
    const Certificate c = run_g1(3, 1, 1, 2, 1, 0);
    CHECK(c.status == Certificate::Status::Verified);
  }
  SUBCASE("G2 with t >= r") {
    const Certificate c = run_g2(3, 2, 2, 1, 1, 3);
    REQUIRE(c.status == Certificate::Status::Verified);
    bool found = false;
    for (const auto& s : c.steps)
      for (const auto& ch : s.checks) found |= ch.name == "gamma acts as beta^1" && ch.passed;
    CHECK(found);
  }
  SUBCASE("suite files") {
    for (const char* n : {"g1_case_a", "g1_case_b", "g1_case_c", "g1_case_d", "g2_case_a", "g2_case_b", "g2_case_c", "g2_case_d"}) {
      CAPTURE(n);
      const Certificate c = run(n);
      CHECK_MESSAGE(c.status == Certificate::Status::Verified, c.message);
      CHECK(c.terminal.kind == Terminal::Kind::MetacyclicPattern);
      CHECK(c.transcendence_ledger_ok());
      CHECK(c.log2_error_bound() <= -40);
      CHECK(homomorphism_everywhere(c));
    }
  }
  SUBCASE("inconsistent parameters") {
    // (1 + 3)^3 = 64 is not 1 mod 27
    CHECK(run_g1(3, 1, 1, 3, 1, 1).status == Certificate::Status::InputError);
  }
}

TEST_CASE("match_metacyclic") {
  SUBCASE("hand-built V-form p = 2, m = 3, n = 1, r = 2") {
    const auto g = std::make_shared<const PcGroup>(parse_group_spec("p = 2\ngenerators = t, s\norders = 2, 8\nH = s\ntop = t\ncommutators:\n  [s, t] = s^4\n"));
    GroupAction a;
    a.group = g;
    a.level = 8;
    a.vars = VarSpace({{"V", {0}, ""}, {"V", {1}, ""}});
    a.gens = {MonomialMap::permutation({1, 0}, {Root::one(8), Root::one(8)}), MonomialMap({Root(1, 8), Root(5, 8)}, identity_matrix(2))};
    const MatchResult m = match_metacyclic(a, 1, 0);
    REQUIRE(m.pattern);
    CHECK(m.pattern->form == MetacyclicPattern::Form::V);
    CHECK(m.pattern->m == 3);
    CHECK(m.pattern->n == 1);
    CHECK(m.pattern->r == 2);
    CHECK(m.pattern->k == 5);
  }
  SUBCASE("tau trivial is rejected") {
    const auto g = load("c3xc3");
    GroupAction a;
    a.group = g;
    a.level = 3;
    a.vars = VarSpace({{"y", {1}, ""}, {"y", {2}, ""}});
    a.gens = {MonomialMap::identity(2, 3), MonomialMap({Root(1, 3), Root(2, 3)}, identity_matrix(2))};
    const MatchResult m = match_metacyclic(a, 1, 0);
    CHECK_FALSE(m.pattern);
    CHECK_FALSE(m.reason.empty());
  }
}

TEST_CASE("determinism") {
  const Certificate a = run("class2_243a");
  const Certificate b = run("class2_243a");
  CHECK(a.q1 == b.q1);
  CHECK(a.steps.size() == b.steps.size());
  CHECK(a.log2_error_bound() == b.log2_error_bound());
  PipelineOptions o;
  o.seed = 7;
  CHECK(run_pipeline(load("class2_243a"), "x", o).q1 != a.q1);
}
