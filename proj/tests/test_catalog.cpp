#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "plab/catalog.hpp"

using namespace plab;

namespace {

int eps(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

OnShellScalar times_i() { return OnShellScalar::i(); }

void require_poincare(const Representation& r) {
  INFO("rep " << r.label << " s=" << to_string(r.s));
  DiffOperator Z = DiffOperator::zero(r.dim);
  std::array<DiffOperator, 4> Pmu{r.P0, r.P[0], r.P[1], r.P[2]};
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = a + 1; b < 4; ++b) CHECK(commutator(Pmu[a], Pmu[b]) == Z);
  for (int j = 0; j < 3; ++j) {
    auto ju = static_cast<size_t>(j);
    CHECK(commutator(r.J[ju], r.P0) == Z);
    CHECK(commutator(r.K[ju], r.P0) == r.P[ju].scaled(times_i()));
    for (int k = 0; k < 3; ++k) {
      auto ku = static_cast<size_t>(k);
      DiffOperator jp = Z, jj = Z, jk = Z, kk = Z;
      for (int l = 0; l < 3; ++l) {
        int e = eps(j, k, l);
        if (e == 0) continue;
        OnShellScalar c = times_i() * OnShellScalar(static_cast<long>(e));
        auto lu = static_cast<size_t>(l);
        jp += r.P[lu].scaled(c);
        jj += r.J[lu].scaled(c);
        jk += r.K[lu].scaled(c);
        kk += r.J[lu].scaled(-c);
      }
      CHECK(commutator(r.J[ju], r.P[ku]) == jp);
      if (k > j) CHECK(commutator(r.J[ju], r.J[ku]) == jj);
      CHECK(commutator(r.J[ju], r.K[ku]) == jk);
      if (k > j) CHECK(commutator(r.K[ju], r.K[ku]) == kk);
      CHECK(commutator(r.K[ju], r.P[ku]) ==
            (j == k ? r.P0.scaled(times_i()) : Z));
    }
  }
}

void require_discrete(const Representation& r) {
  INFO("rep " << r.label << " s=" << to_string(r.s));
  REQUIRE(r.T.antilinear() == r.expected.T_anti);
  REQUIRE(r.S.antilinear() == r.expected.S_anti);
  DiffOperator id = DiffOperator::identity(r.dim);
  CHECK(compose(r.T, r.T) ==
        id.scaled(OnShellScalar(static_cast<long>(r.expected.T2))));
  CHECK(compose(r.S, r.S) ==
        id.scaled(OnShellScalar(static_cast<long>(r.expected.S2))));
  CHECK(compose(r.S, r.T) ==
        compose(r.T, r.S).scaled(
            OnShellScalar(static_cast<long>(r.expected.omega))));

  DiffOperator zl = DiffOperator::zero(r.dim);
  auto comm_or_anti = [&](const DiffOperator& d, const DiffOperator& g,
                          bool commute) {
    return commute ? commutator(d, g) == zl : anticommutator(d, g) == zl;
  };
  bool ta = r.T.antilinear();
  CHECK(comm_or_anti(r.T, r.P0, ta));
  for (size_t j = 0; j < 3; ++j) {
    CHECK(comm_or_anti(r.T, r.P[j], !ta));
    CHECK(comm_or_anti(r.T, r.J[j], !ta));
    CHECK(comm_or_anti(r.T, r.K[j], ta));
  }
  bool sa = r.S.antilinear();
  CHECK(comm_or_anti(r.S, r.P0, !sa));
  for (size_t j = 0; j < 3; ++j) {
    CHECK(comm_or_anti(r.S, r.P[j], sa));
    CHECK(comm_or_anti(r.S, r.J[j], !sa));
    CHECK(comm_or_anti(r.S, r.K[j], sa));
  }
}

}  // namespace

TEST_CASE("catalog enumerates 26 labelled members") {
  auto cat = full_catalog();
  REQUIRE(cat.size() == 26);
  std::set<std::string> seen;
  for (const auto& r : cat) {
    seen.insert(r.label + "/" + to_string(r.s));
    REQUIRE(r.dim == r.blocks * r.s.dim());
    REQUIRE(!r.T.is_zero());
    REQUIRE(!r.S.is_zero());
  }
  REQUIRE(seen.size() == 26);
}

TEST_CASE("all catalog members satisfy the Poincare relations") {
  for (const auto& r : full_catalog()) require_poincare(r);
}

TEST_CASE("all ten generators are formally self-adjoint") {
  for (const auto& r : full_catalog()) {
    INFO("rep " << r.label << " s=" << to_string(r.s));
    CHECK(formal_adjoint(r.P0) == r.P0);
    for (size_t j = 0; j < 3; ++j) {
      CHECK(formal_adjoint(r.P[j]) == r.P[j]);
      CHECK(formal_adjoint(r.J[j]) == r.J[j]);
      CHECK(formal_adjoint(r.K[j]) == r.K[j]);
    }
  }
}

TEST_CASE("discrete pair matches the expected character table") {
  for (const auto& r : full_catalog()) require_discrete(r);
}

TEST_CASE("mass and spin Casimirs") {
  OnShellScalar mu2 = OnShellScalar::mu() * OnShellScalar::mu();
  for (const auto& r : full_catalog()) {
    INFO("rep " << r.label << " s=" << to_string(r.s));
    auto m = as_scalar_identity(mass_casimir(r));
    REQUIRE(m.has_value());
    CHECK(*m == mu2);

    auto w = pauli_lubanski(r);
    std::array<DiffOperator, 4> Pmu{r.P0, r.P[0], r.P[1], r.P[2]};
    for (const auto& wc : w)
      for (const auto& pc : Pmu)
        CHECK(commutator(wc, pc) == DiffOperator::zero(r.dim));

    auto w2 = as_scalar_identity(spin_casimir(r));
    REQUIRE(w2.has_value());
    if (r.s.twice == 0) {
      CHECK(w2->is_zero());
      CHECK(w[0].is_zero());
    } else {
      // - mu^2 s(s+1) at s = 1/2
      OnShellScalar want =
          mu2 * OnShellScalar(GaussRat(Rat(-3, 4), Rat(0)));
      CHECK(*w2 == want);
    }
  }
}

TEST_CASE("factory validates requests") {
  HalfInt h{1}, z{0};
  REQUIRE_NOTHROW(build_rep("Up", h));
  REQUIRE_NOTHROW(build_rep("SymCanonical", z, "4"));
  REQUIRE_NOTHROW(build_rep("DoubledUp", h, "antisym"));
  REQUIRE_NOTHROW(build_rep("QuadSym", z, "-"));
  REQUIRE_THROWS_AS(build_rep("Up", z, "T=unitary"), std::invalid_argument);
  REQUIRE_THROWS_AS(build_rep("Down", z, "S=antiunitary"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(build_rep("QuadSym", h), std::invalid_argument);
  REQUIRE_THROWS_AS(build_rep("Up", HalfInt{2}), std::invalid_argument);
  REQUIRE_THROWS_AS(rep_sym(z, 7), std::invalid_argument);
  REQUIRE_THROWS_AS(build_rep("DoubledUp", z, "bogus"), std::invalid_argument);
  REQUIRE_THROWS_AS(build_rep("Nonesuch", z), std::invalid_argument);
}
