#include <catch2/catch_amalgamated.hpp>

#include "plab/spin.hpp"

using namespace plab;

namespace {

double max_abs(const CMat& m) {
  double v = 0;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) v = std::max(v, std::abs(m.at(i, j)));
  return v;
}

CMat to_cmat(const QMat& q) {
  return q.map([](const GaussRat& g) { return g.to_complex(); });
}

}  // namespace

TEST_CASE("exact spin matrices satisfy su(2) and Casimir") {
  for (int twice : {0, 1}) {
    HalfInt s{twice};
    SpinExact sp = spin_exact(s);
    GaussRat i = GaussRat::i();
    // [S_j, S_k] = i eps_{jkl} S_l
    CHECK(sp.S[0] * sp.S[1] - sp.S[1] * sp.S[0] == sp.S[2].scaled(i));
    CHECK(sp.S[1] * sp.S[2] - sp.S[2] * sp.S[1] == sp.S[0].scaled(i));
    CHECK(sp.S[2] * sp.S[0] - sp.S[0] * sp.S[2] == sp.S[1].scaled(i));
    QMat cas = sp.S[0] * sp.S[0] + sp.S[1] * sp.S[1] + sp.S[2] * sp.S[2];
    GaussRat want(Rat(twice * (twice + 2), 4));  // s(s+1)
    CHECK(cas == QMat::identity(s.dim(), GaussRat(1)).scaled(want));
    for (int j = 0; j < 3; ++j) CHECK(sp.S[j].dagger() == sp.S[j]);
  }
}

TEST_CASE("exact tau pins the phase convention") {
  SpinExact s0 = spin_exact(HalfInt{0});
  CHECK(s0.tau == QMat::identity(1, GaussRat(1)));
  SpinExact sh = spin_exact(HalfInt{1});
  CHECK(sh.tau == qmat2(GaussRat(0L), GaussRat(1), -GaussRat(1), GaussRat(0L)));
  // tau * conj(tau) = (-1)^{2s} Id
  CHECK(sh.tau * sh.tau.conj() == QMat::identity(2, GaussRat(1)).scaled(-GaussRat(1)));
  CHECK(sh.tau.transpose() == sh.tau.scaled(-GaussRat(1)));
  // defining relation: tau conj(S_j) tau^{-1} = -S_j, i.e. tau conj(S_j) = -S_j tau
  for (int j = 0; j < 3; ++j)
    CHECK(sh.tau * sh.S[j].conj() == (sh.S[j] * sh.tau).scaled(-GaussRat(1)));
}

TEST_CASE("numeric spin matrices for higher spins") {
  for (int twice : {0, 1, 2, 3}) {
    HalfInt s{twice};
    SpinNumeric sp = spin_numeric(s);
    std::complex<double> I(0, 1);
    CMat comm = sp.S[0] * sp.S[1] - sp.S[1] * sp.S[0] - sp.S[2].scaled(I);
    CHECK(max_abs(comm) < 1e-12);
    comm = sp.S[1] * sp.S[2] - sp.S[2] * sp.S[1] - sp.S[0].scaled(I);
    CHECK(max_abs(comm) < 1e-12);
    CMat cas = sp.S[0] * sp.S[0] + sp.S[1] * sp.S[1] + sp.S[2] * sp.S[2];
    double sv = s.value();
    CMat want = CMat::identity(s.dim(), 1.0).scaled(sv * (sv + 1));
    CHECK(max_abs(cas - want) < 1e-12);
    // tau relations
    CMat tct = sp.tau * sp.tau.conj();
    double sign = s.is_integer() ? 1.0 : -1.0;
    CHECK(max_abs(tct - CMat::identity(s.dim(), 1.0).scaled(sign)) < 1e-12);
    for (int j = 0; j < 3; ++j)
      CHECK(max_abs(sp.tau * sp.S[j].conj() + sp.S[j] * sp.tau) < 1e-12);
    CHECK(max_abs(sp.tau * sp.tau.dagger() - CMat::identity(s.dim(), 1.0)) < 1e-12);
    CHECK(std::abs(sp.tau.at(0, s.dim() - 1) - std::complex<double>(1, 0)) < 1e-15);
  }
}

TEST_CASE("numeric agrees with exact at low spin") {
  for (int twice : {0, 1}) {
    SpinExact e = spin_exact(HalfInt{twice});
    SpinNumeric n = spin_numeric(HalfInt{twice});
    for (int j = 0; j < 3; ++j) CHECK(max_abs(to_cmat(e.S[j]) - n.S[j]) < 1e-15);
    CHECK(max_abs(to_cmat(e.tau) - n.tau) < 1e-15);
  }
  CHECK_THROWS_AS(spin_exact(HalfInt{2}), std::invalid_argument);
}
