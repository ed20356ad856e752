#include <fstream>
#include <sstream>

#include "doctest.h"
#include "noether/certificate.hpp"

using namespace noether;
using nlohmann::json;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(NOETHER_DATA_DIR) + "/groups/" + name + ".grp");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* const kGroups[] = {"c3xc3", "c4xc2", "heisenberg3", "dihedral8", "extraspecial27_exp9", "class2_81_dft",
                               "class2_243a", "g1_case_a", "g2_case_a", "nonsplit"};

}  // namespace

TEST_CASE("round trip and recheck") {
  for (const char* n : kGroups) {
    CAPTURE(n);
    const std::string spec = slurp(n);
    const Certificate c = run_pipeline(std::make_shared<const PcGroup>(parse_group_spec(spec)), n);
    const std::string text = certificate_dump(c, spec);
    const json j = json::parse(text);
    CHECK(certificate_dump(certificate_from_json(j), spec) == text);
    const RecheckReport r = recheck_certificate(j);
    CHECK_MESSAGE(r.ok, (r.failures.empty() ? std::string() : r.failures.front()));
    CHECK(r.steps_checked == static_cast<int>(c.steps.size()));
    CHECK(j.at("status") == status_name(c.status));
  }
}

TEST_CASE("byte-identical reruns") {
  const std::string spec = slurp("class2_243a");
  auto once = [&] { return certificate_dump(run_pipeline(std::make_shared<const PcGroup>(parse_group_spec(spec)), "x"), spec); };
  CHECK(once() == once());
}

TEST_CASE("recheck catches tampering") {
  const std::string spec = slurp("heisenberg3");
  const Certificate c = run_pipeline(std::make_shared<const PcGroup>(parse_group_spec(spec)), "heisenberg3");
  const json good = certificate_to_json(c, spec);
  REQUIRE(recheck_certificate(good).ok);

  SUBCASE("coefficient in a monomial step result") {
    json j = good;
    for (auto& s : j["steps"]) {
      if (s["kind"] == "monomial") {
        auto& k = s["result"]["gens"][0]["coeff"][0];
        k = k.get<i64>() + 1;
        break;
      }
    }
    CHECK_FALSE(recheck_certificate(j).ok);
  }
  SUBCASE("claimed diagonal action of a cyclic linearization") {
    json j = good;
    for (auto& s : j["steps"]) {
      if (s["kind"] == "rational") {
        auto& coeff = s["result"]["gens"][0]["coeff"];
        coeff[coeff.size() - 1] = coeff[coeff.size() - 1].get<i64>() + 1;
        break;
      }
    }
    CHECK_FALSE(recheck_certificate(j).ok);
  }
  SUBCASE("verified status with a failing check") {
    json j = good;
    j["steps"][0]["checks"][0]["passed"] = false;
    CHECK_FALSE(recheck_certificate(j).ok);
  }
  SUBCASE("malformed document") {
    json j = good;
    j.erase("session");
    CHECK_THROWS_AS(certificate_from_json(j), ArgumentError);
    CHECK_FALSE(recheck_certificate(j).ok);
  }
}

TEST_CASE("format_group_spec reparses") {
  for (const char* n : kGroups) {
    CAPTURE(n);
    const PcGroup g = parse_group_spec(slurp(n));
    const PcGroup h = parse_group_spec(format_group_spec(g));
    CHECK(format_group_spec(h) == format_group_spec(g));
    CHECK(h.order() == g.order());
  }
}

TEST_CASE("synthesized input for direct runs") {
  const Certificate c = run_g2(3, 2, 2, 1, 1, 3);
  const json j = certificate_to_json(c);
  CHECK(j.at("input").get<std::string>().find("family = G2") != std::string::npos);
  CHECK(recheck_certificate(j).ok);
}
