#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "plab/operator.hpp"
#include "plab/spin.hpp"

using namespace plab;

namespace {

struct OpGen {
  std::mt19937 rng{771100u};

  GaussRat coeff() {
    std::uniform_int_distribution<int> d(-3, 3);
    return GaussRat(Rat(d(rng)), Rat(d(rng)));
  }

  OnShellScalar scalar() {
    std::uniform_int_distribution<int> pick(0, 5);
    OnShellScalar base;
    switch (pick(rng)) {
      case 0: base = OnShellScalar(coeff()); break;
      case 1: base = OnShellScalar::var(pick(rng) % 3); break;
      case 2: base = OnShellScalar::p0(); break;
      case 3: base = OnShellScalar::mu(); break;
      case 4: base = (OnShellScalar::p0() + OnShellScalar::mu()).invert(); break;
      default: base = OnShellScalar::var(0) * OnShellScalar::p0(); break;
    }
    return base * OnShellScalar(coeff());
  }

  DiffOperator op(int dim, bool allow_anti, int max_terms = 2, int max_ord = 1) {
    std::uniform_int_distribution<int> nt(1, max_terms);
    std::uniform_int_distribution<int> ax(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> ord(0, max_ord);
    bool anti = allow_anti && coin(rng);
    DiffOperator r(dim, anti);
    int n = nt(rng);
    for (int t = 0; t < n; ++t) {
      Coeff m(dim);
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          if (coin(rng)) m.at(a, b) = scalar();
      DiffOperator piece = DiffOperator::mult(m);
      int o = ord(rng);
      for (int k = 0; k < o; ++k) piece = compose(piece, DiffOperator::deriv(ax(rng), dim));
      if (coin(rng)) piece = compose(piece, DiffOperator::parity_op(dim));
      if (anti) piece = compose(piece, DiffOperator::conj_op(dim));
      if (piece.antilinear() != anti) continue;
      r += piece;
    }
    return r;
  }
};

}  // namespace

TEST_CASE("composition calculus basics") {
  int n = 1;
  DiffOperator d1 = DiffOperator::deriv(0, n);
  DiffOperator p1 = DiffOperator::scalar_mult(OnShellScalar::var(0), n);
  // Leibniz: d1 ∘ p1 = p1 d1 + 1
  CHECK(compose(d1, p1) == compose(p1, d1) + DiffOperator::identity(n));
  CHECK(commutator(d1, p1) == DiffOperator::identity(n));
  // K ∘ (i Id) = (-i Id) ∘ K
  DiffOperator K = DiffOperator::conj_op(n);
  DiffOperator iop = DiffOperator::scalar_mult(OnShellScalar::i(), n);
  CHECK(compose(K, iop) == compose(-iop, K));
  // Ups ∘ d1 = -d1 ∘ Ups;  Ups ∘ p1 = -p1 ∘ Ups
  DiffOperator Y = DiffOperator::parity_op(n);
  CHECK(compose(Y, d1) == compose(-d1, Y));
  CHECK(compose(Y, p1) == compose(-p1, Y));
  // involutions
  CHECK(compose(K, K) == DiffOperator::identity(n));
  CHECK(compose(Y, Y) == DiffOperator::identity(n));
  CHECK(compose(K, Y) == compose(Y, K));
  // K ∘ d = d ∘ K
  CHECK(compose(K, d1) == compose(d1, K));
}

TEST_CASE("antilinearity bookkeeping is XOR") {
  DiffOperator K = DiffOperator::conj_op(1), Y = DiffOperator::parity_op(1);
  CHECK(compose(K, Y).antilinear());
  CHECK_FALSE(compose(K, K).antilinear());
  CHECK(compose(compose(K, Y), Y).antilinear());
  DiffOperator lin = DiffOperator::deriv(0, 1);
  CHECK_FALSE(lin.antilinear());
  CHECK(compose(lin, K).antilinear());
  CHECK_THROWS_AS(lin + K, std::logic_error);
}

TEST_CASE("associativity and Jacobi on random operators") {
  OpGen g;
  for (int it = 0; it < 10; ++it) {
    DiffOperator A = g.op(2, true), B = g.op(2, true), C = g.op(2, true);
    CHECK(compose(compose(A, B), C) == compose(A, compose(B, C)));
  }
  for (int it = 0; it < 6; ++it) {
    DiffOperator A = g.op(2, false), B = g.op(2, false), C = g.op(2, false);
    DiffOperator jac = commutator(commutator(A, B), C) +
                       commutator(commutator(B, C), A) +
                       commutator(commutator(C, A), B);
    CHECK(jac.is_zero());
  }
}

TEST_CASE("quadrature oracle for the derivative adjoint") {
  // <f, d1 g> = <(-d1 + p1/p0^2) f, g> under weight 1/p0, checked with
  // closed-form Gaussians on a truncated grid (independent of the engine).
  double mu = 1.1;
  auto f = [](double x, double y, double z) {
    return std::exp(-0.5 * ((x - 0.4) * (x - 0.4) + y * y + z * z)) *
           std::complex<double>(1.0, 0.3 * x);
  };
  auto g = [](double x, double y, double z) {
    return std::exp(-0.5 * (x * x + (y + 0.2) * (y + 0.2) + z * z)) *
           std::complex<double>(0.7, -0.1);
  };
  auto d1f = [&](double x, double y, double z) {
    return (-(x - 0.4) + std::complex<double>(0, 0.3) /
                             std::complex<double>(1.0, 0.3 * x)) *
           f(x, y, z);
  };
  auto d1g = [&](double x, double y, double z) { return -x * g(x, y, z); };
  int n = 48;
  double L = 6.5, h = 2 * L / n;
  std::complex<double> lhs = 0, rhs = 0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        double x = -L + (ix + 0.5) * h, y = -L + (iy + 0.5) * h,
               z = -L + (iz + 0.5) * h;
        double w = 1.0 / std::sqrt(mu * mu + x * x + y * y + z * z);
        lhs += std::conj(f(x, y, z)) * d1g(x, y, z) * w;
        double wj = x / (mu * mu + x * x + y * y + z * z);
        std::complex<double> adjf = -d1f(x, y, z) + wj * f(x, y, z);
        rhs += std::conj(adjf) * g(x, y, z) * w;
      }
  lhs *= h * h * h;
  rhs *= h * h * h;
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("formal adjoint frozen forms and involution") {
  int n = 1;
  OnShellScalar sg = OnShellScalar::p0() * OnShellScalar::p0();
  for (int j = 0; j < 3; ++j) {
    DiffOperator expect = DiffOperator::scalar_mult(OnShellScalar::var(j) / sg, n) -
                          DiffOperator::deriv(j, n);
    CHECK(formal_adjoint(DiffOperator::deriv(j, n)) == expect);
  }
  // multiplication operators: adjoint = conjugate transpose
  SpinExact sp = spin_exact(HalfInt{1});
  DiffOperator m = DiffOperator::mult(sp.tau);
  CHECK(formal_adjoint(m) == DiffOperator::mult(sp.tau.dagger()));
  // F_1 = i d1 - i p1 / (2 p0^2) is formally self-adjoint
  OnShellScalar half_i = OnShellScalar::i() * OnShellScalar(GaussRat(Rat(1, 2)));
  DiffOperator F1 = DiffOperator::deriv(0, n).scaled(OnShellScalar::i()) -
                    DiffOperator::scalar_mult(half_i * OnShellScalar::var(0) / sg, n);
  CHECK(formal_adjoint(F1) == F1);
  CHECK_THROWS_AS(formal_adjoint(DiffOperator::conj_op(1)), std::logic_error);
  OpGen g;
  for (int it = 0; it < 8; ++it) {
    DiffOperator A = g.op(2, false), B = g.op(2, false);
    CHECK(formal_adjoint(formal_adjoint(A)) == A);
    CHECK(formal_adjoint(compose(A, B)) ==
          compose(formal_adjoint(B), formal_adjoint(A)));
    CHECK(formal_adjoint(A + B) == formal_adjoint(A) + formal_adjoint(B));
  }
}

TEST_CASE("block phase twist") {
  SpinExact s0 = spin_exact(HalfInt{0});
  (void)s0;
  QMat rho1 = qmat2(GaussRat(0L), GaussRat(1), GaussRat(1), GaussRat(0L));
  QMat rho2 = qmat2(GaussRat(0L), -GaussRat::i(), GaussRat::i(), GaussRat(0L));
  QMat rho3 = qmat2(GaussRat(1), GaussRat(0L), GaussRat(0L), -GaussRat(1));
  DiffOperator R1 = DiffOperator::mult(rho1), R2 = DiffOperator::mult(rho2),
               R3 = DiffOperator::mult(rho3);
  // k=1: rho1 -> rho2, rho2 -> -rho1, rho3 fixed
  CHECK(block_phase_twist(R1, 1) == R2);
  CHECK(block_phase_twist(R2, 1) == -R1);
  CHECK(block_phase_twist(R3, 1) == R3);
  // numeric conjugation oracle: W M W^{-1} with w = exp(-i pi/4)
  std::complex<double> w = std::polar(1.0, -M_PI / 4);
  std::complex<double> m01(0.3, -1.2), m10(2.0, 0.7);
  std::complex<double> t01 = w * m01 * std::conj(std::conj(w));  // w m01 w
  std::complex<double> factor01 = t01 / m01;
  CHECK(std::abs(factor01 - std::complex<double>(0, -1)) < 1e-14);
  std::complex<double> t10 = std::conj(w) * m10 * std::conj(w);
  CHECK(std::abs(t10 / m10 - std::complex<double>(0, 1)) < 1e-14);
  OpGen g;
  for (int it = 0; it < 8; ++it) {
    DiffOperator A = g.op(2, true);
    CHECK(block_phase_twist(block_phase_twist(A, 1), 1) == block_phase_twist(A, 2));
    CHECK(block_phase_twist(A, 4) == A);
    DiffOperator B = g.op(2, true);
    if (A.antilinear() == B.antilinear())
      CHECK(block_phase_twist(A + B, 1) ==
            block_phase_twist(A, 1) + block_phase_twist(B, 1));
    CHECK(block_phase_twist(compose(A, B), 1) ==
          compose(block_phase_twist(A, 1), block_phase_twist(B, 1)));
  }
}

TEST_CASE("scalar identity extraction and rendering") {
  DiffOperator A = DiffOperator::scalar_mult(OnShellScalar::mu(), 3);
  auto c = as_scalar_identity(A);
  REQUIRE(c.has_value());
  CHECK(*c == OnShellScalar::mu());
  CHECK(as_scalar_identity(DiffOperator::deriv(0, 2)) == std::nullopt);
  CHECK(as_scalar_identity(DiffOperator::zero(2)).value() == OnShellScalar(0L));
  CHECK(to_string(DiffOperator::zero(1)) == "0");
  std::string s = to_string(compose(DiffOperator::conj_op(2),
                                    DiffOperator::parity_op(2)));
  CHECK(s.find("Y") != std::string::npos);
  CHECK(s.find("K") != std::string::npos);
}
