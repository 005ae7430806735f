#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>

#include "plab/verify.hpp"

using namespace plab;

namespace {

const HalfInt kZero{0};
const HalfInt kHalf{1};

}  // namespace

TEST_CASE("affine solver: forced value, kernel direction, inconsistency") {
  DiffOperator id = DiffOperator::identity(1);
  SECTION("forced value") {
    AffineProblem p(1);
    p.add_condition(id.scaled(GaussRat(-2)), {id});
    AffineSolution sol = p.solve();
    REQUIRE(sol.consistent);
    CHECK(sol.kernel.empty());
    CHECK(sol.particular[0] == GaussRat(2));
  }
  SECTION("one kernel direction") {
    AffineProblem p(2);
    p.add_condition(DiffOperator::zero(1), {id, id.scaled(GaussRat(-1))});
    AffineSolution sol = p.solve();
    REQUIRE(sol.consistent);
    REQUIRE(sol.kernel.size() == 1);
    CHECK(sol.kernel[0][0] == sol.kernel[0][1]);
    CHECK(sol.particular[0].is_zero());
    CHECK(sol.particular[1].is_zero());
  }
  SECTION("inconsistent") {
    AffineProblem p(1);
    p.add_condition(id, {DiffOperator::deriv(0, 1)});
    AffineSolution sol = p.solve();
    CHECK_FALSE(sol.consistent);
  }
}

TEST_CASE("relation suites hold across the catalog") {
  for (const Representation& r : full_catalog()) {
    CheckReport lie = check_lie_algebra(r);
    CheckReport cas = check_casimirs(r);
    CheckReport dis = check_discrete(r);
    INFO(lie.subject << "\n"
         << to_markdown(lie) << "\n" << to_markdown(cas) << "\n" << to_markdown(dis));
    CHECK(lie.ok());
    CHECK(cas.ok());
    CHECK(dis.ok());
  }
}

TEST_CASE("constant matrix shifts match the six-member table at both spins") {
  for (HalfInt s : {kZero, kHalf}) {
    for (int m = 1; m <= 6; ++m) {
      Representation r = rep_sym(s, m);
      CheckReport rep = shift_family_scan(r);
      INFO(rep.subject << "\n" << to_markdown(rep));
      CHECK(rep.ok());
    }
  }
}

TEST_CASE("position scan: every member admits a triple at s = 0") {
  for (const JmVerdict& v : jm_scan(kZero)) {
    INFO(v.label << ": " << v.note);
    CHECK(v.admits);
  }
  CheckReport rep = jm_scan_report(kZero);
  INFO(to_markdown(rep));
  CHECK(rep.ok());
}

TEST_CASE("position scan: exactly three members admit a triple at s = 1/2") {
  std::map<std::string, bool> got;
  std::map<std::string, std::string> notes;
  for (const JmVerdict& v : jm_scan(kHalf)) {
    got[v.label] = v.admits;
    notes[v.label] = v.note;
  }
  for (const auto& [label, note] : notes) INFO(label << ": " << note);
  CHECK_FALSE(got.at("Up"));
  CHECK_FALSE(got.at("Down"));
  CHECK_FALSE(got.at("U1"));
  CHECK(got.at("U2"));
  CHECK(got.at("U3"));
  CHECK_FALSE(got.at("U4"));
  CHECK(got.at("U5"));
  CHECK_FALSE(got.at("U6"));
  CheckReport rep = jm_scan_report(kHalf);
  INFO(to_markdown(rep));
  CHECK(rep.ok());
}

TEST_CASE("commutant dimensions match the irreducibility table") {
  auto expected = [](const Representation& r) {
    if (r.class_id == "DoubledUp")
      return (r.label == "Dbl[T=id]" || r.label == "Dbl[T=rho1]") ? 2 : 1;
    if (r.class_id == "QuadSym") return r.label == "Quad[S2=+1]" ? 3 : 1;
    return 1;
  };
  for (const Representation& r : full_catalog()) {
    CheckReport rep = check_commutant(r, expected(r));
    INFO(rep.subject << "\n" << to_markdown(rep));
    CHECK(rep.ok());
  }
}
