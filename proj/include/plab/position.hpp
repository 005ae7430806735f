#pragma once

#include "plab/catalog.hpp"

namespace plab {

using PositionTriple = std::array<DiffOperator, 3>;

namespace detail {

// p.S as a fiber matrix.
inline Coeff p_dot_S(const std::array<QMat, 3>& S) {
  Coeff r(S[0].dim());
  for (int a = 0; a < 3; ++a)
    r = r + coeff_from_qmat(S[static_cast<size_t>(a)]).scaled(sc_p(a));
  return r;
}

inline OnShellScalar sc_half_i() {
  return OnShellScalar(GaussRat(Rat(0), Rat(1, 2)));
}

}  // namespace detail

// F_j = i d_j - (i/2) p_j / p0^2: self-adjoint for the 1/p0 weight, mutually
// commuting, canonically conjugate to P_j, and a vector under rotations. On
// multi-component spaces it acts componentwise.
inline PositionTriple newton_wigner(int dim) {
  using detail::sc_i;
  using detail::sc_p;
  using detail::sc_p0;
  OnShellScalar p0sq_inv = (sc_p0() * sc_p0()).invert();
  PositionTriple F;
  for (int j = 0; j < 3; ++j)
    F[static_cast<size_t>(j)] =
        DiffOperator::deriv(j, dim).scaled(sc_i()) -
        DiffOperator::scalar_mult(detail::sc_half_i() * sc_p(j) * p0sq_inv, dim);
  return F;
}

// Q_j = F_j + f p_j with a scalar profile f (a function of p0 in the cases
// of interest, but any ring element is accepted).
inline PositionTriple radial_shift(const PositionTriple& F, const OnShellScalar& f) {
  PositionTriple Q;
  for (int j = 0; j < 3; ++j)
    Q[static_cast<size_t>(j)] =
        F[static_cast<size_t>(j)] +
        DiffOperator::scalar_mult(f * detail::sc_p(j), F[static_cast<size_t>(j)].dim());
  return Q;
}

// Q_j = F_j + M p_j with a constant fiber matrix M.
inline PositionTriple matrix_shift(const PositionTriple& F, const QMat& M) {
  PositionTriple Q;
  for (int j = 0; j < 3; ++j)
    Q[static_cast<size_t>(j)] =
        F[static_cast<size_t>(j)] +
        DiffOperator::mult(coeff_from_qmat(M).scaled(detail::sc_p(j)));
  return Q;
}

// Single-shell spin-s line of candidate positions, parameter a real:
//   Q_j = F_j - a (p.S) p_j / (p0 (p0+mu)) + a S_j - (p x S)_j / (mu (p0+mu)).
// Every member satisfies the canonical pair and vector conditions and the
// boost compatibility relation; the discrete conditions cut the line down.
inline PositionTriple shell_position_family(HalfInt s, const GaussRat& a) {
  using detail::sc_mu;
  using detail::sc_p;
  using detail::sc_p0;
  SpinExact sp = spin_exact(s);
  int n = s.dim();
  PositionTriple F = newton_wigner(n);
  OnShellScalar g1 = (sc_p0() * (sc_p0() + sc_mu())).invert();
  OnShellScalar g2 = (sc_mu() * (sc_p0() + sc_mu())).invert();
  Coeff pds = detail::p_dot_S(sp.S);
  OnShellScalar av{a};
  PositionTriple Q;
  for (int j = 0; j < 3; ++j) {
    Coeff shift = pds.scaled(-(av * g1 * sc_p(j))) +
                  coeff_from_qmat(sp.S[static_cast<size_t>(j)]).scaled(av) +
                  detail::spin_cross_p(sp.S, j).scaled(g2);
    Q[static_cast<size_t>(j)] = F[static_cast<size_t>(j)] + DiffOperator::mult(shift);
  }
  return Q;
}

// Two-shell spin-s family. (sb, cb) is a point on the unit circle carried by
// the rho1/rho2 block directions, A a real amplitude and bp a formal radial
// rate entering only through the mixed terms:
//   Q_j = F_j + rho1 (A sb p_j) + rho2 (A cb p_j)
//       - rho1 (sb h - (2/mu) bp cb) (p.S) p_j
//       - rho2 (cb h + (2/mu) bp sb) (p.S) p_j
//       + rho1 (sb/p0) S_j + rho2 (cb/p0) S_j + (p x S)_j / (p0 (p0+mu)),
// with h = 1/(p0^2 (p0+mu)).
inline PositionTriple paired_position_family(HalfInt s, const GaussRat& A,
                                             const GaussRat& sb, const GaussRat& cb,
                                             const GaussRat& bp) {
  using detail::sc_mu;
  using detail::sc_p;
  using detail::sc_p0;
  SpinExact sp = spin_exact(s);
  int b = s.dim();
  int dim = 2 * b;
  PositionTriple F = newton_wigner(dim);
  Coeff r1 = coeff_from_qmat(detail::rho(1));
  Coeff r2 = coeff_from_qmat(detail::rho(2));
  Coeff idb = coeff_from_qmat(detail::qid(b));
  Coeff id2 = coeff_from_qmat(detail::qid(2));
  Coeff pds = detail::p_dot_S(sp.S);
  OnShellScalar h = (sc_p0() * sc_p0() * (sc_p0() + sc_mu())).invert();
  OnShellScalar g4 = (sc_p0() * (sc_p0() + sc_mu())).invert();
  OnShellScalar p0inv = sc_p0().invert();
  OnShellScalar mu_inv = sc_mu().invert();
  OnShellScalar sbv{sb}, cbv{cb};
  OnShellScalar amp_s{A * sb}, amp_c{A * cb};
  OnShellScalar two_bp_cb{GaussRat(Rat(2)) * bp * cb};
  OnShellScalar two_bp_sb{GaussRat(Rat(2)) * bp * sb};
  OnShellScalar c1 = -(sbv * h) + two_bp_cb * mu_inv;
  OnShellScalar c2 = -(cbv * h) - two_bp_sb * mu_inv;
  PositionTriple Q;
  for (int j = 0; j < 3; ++j) {
    Coeff sj = coeff_from_qmat(sp.S[static_cast<size_t>(j)]);
    Coeff shift = kron(r1, idb).scaled(amp_s * sc_p(j)) +
                  kron(r2, idb).scaled(amp_c * sc_p(j)) +
                  kron(r1, pds).scaled(c1 * sc_p(j)) +
                  kron(r2, pds).scaled(c2 * sc_p(j)) +
                  kron(r1, sj).scaled(sbv * p0inv) +
                  kron(r2, sj).scaled(cbv * p0inv) +
                  kron(id2, detail::spin_cross_p(sp.S, j)).scaled(-g4);
    Q[static_cast<size_t>(j)] = F[static_cast<size_t>(j)] + DiffOperator::mult(shift);
  }
  return Q;
}

// The representative with the spin terms on the rho1 direction (sb = -1).
inline PositionTriple paired_position_rho1(HalfInt s) {
  return paired_position_family(s, GaussRat(0), -GaussRat(1), GaussRat(0),
                                GaussRat(0));
}

// The representative with the spin terms on the rho2 direction (cb = -1),
// the form that arises from the Dirac equation in the canonical picture.
inline PositionTriple paired_position_rho2(HalfInt s) {
  return paired_position_family(s, GaussRat(0), GaussRat(0), -GaussRat(1),
                                GaussRat(0));
}

// Residual of the boost compatibility relation
//   [K_j, Q_k] = (1/2) (Q_j [P0, Q_k] + [P0, Q_k] Q_j).
// With cross = true the right side pairs Q_k with [P0, Q_j] instead (the
// other conceivable index placement; callers check both).
inline DiffOperator boost_position_residual(const Representation& r,
                                            const PositionTriple& Q, int j, int k,
                                            bool cross = false) {
  const DiffOperator& qa = cross ? Q[static_cast<size_t>(k)] : Q[static_cast<size_t>(j)];
  DiffOperator br = commutator(r.P0, cross ? Q[static_cast<size_t>(j)]
                                           : Q[static_cast<size_t>(k)]);
  DiffOperator rhs =
      (compose(qa, br) + compose(br, qa)).scaled(GaussRat(Rat(1, 2)));
  return commutator(r.K[static_cast<size_t>(j)], Q[static_cast<size_t>(k)]) - rhs;
}

}  // namespace plab
