#pragma once

#include <string>
#include <vector>

#include "plab/operator.hpp"
#include "plab/spin.hpp"

namespace plab {

enum class SpectrumClass { Plus, Minus, Union };

inline std::string to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::Plus: return "S+";
    case SpectrumClass::Minus: return "S-";
    default: return "S+uS-";
  }
}

struct ExpectedDiscrete {
  bool T_anti = false;
  bool S_anti = false;
  int T2 = 1;   // sign in T^2 = (+-)Id
  int S2 = 1;   // sign in S^2 = (+-)Id
  int omega = 1;  // S∘T = omega * T∘S
  SpectrumClass spectrum = SpectrumClass::Union;
};

// Constant block structure of T or S (entries are multiples of a fixed
// spin-space matrix, which drops out of commutant equations).
struct BlockFactor {
  QMat cmat;
  bool anti = false;
};

struct Representation {
  std::string class_id;
  std::string label;
  HalfInt s;
  int blocks = 1;
  int dim = 1;
  DiffOperator P0;
  std::array<DiffOperator, 3> P, J, K;
  DiffOperator T, S;
  ExpectedDiscrete expected;
  BlockFactor Tb, Sb;
};

namespace detail {

inline OnShellScalar sc_i() { return OnShellScalar::i(); }
inline OnShellScalar sc_p(int j) { return OnShellScalar::var(j); }
inline OnShellScalar sc_p0() { return OnShellScalar::p0(); }
inline OnShellScalar sc_mu() { return OnShellScalar::mu(); }

// i (p_{k+2} d_{k+1} - p_{k+1} d_{k+2}), indices mod 3; the sign that
// closes the rotation algebra with [J_j, P_k] = i eps_{jkl} P_l.
inline DiffOperator orbital_J(int k, int dim) {
  int l = (k + 1) % 3, j = (k + 2) % 3;
  DiffOperator t1 = DiffOperator::deriv(l, dim).scaled(sc_i() * sc_p(j));
  DiffOperator t2 = DiffOperator::deriv(j, dim).scaled(sc_i() * sc_p(l));
  return t1 - t2;
}

// (S ^ p)_j = S_{j+1} p_{j+2} - S_{j+2} p_{j+1}
inline Coeff spin_cross_p(const std::array<QMat, 3>& S, int j) {
  int a = (j + 1) % 3, b = (j + 2) % 3;
  return coeff_from_qmat(S[static_cast<size_t>(a)]).scaled(sc_p(b)) -
         coeff_from_qmat(S[static_cast<size_t>(b)]).scaled(sc_p(a));
}

// Single-shell generators (the "up" block); sign = +1 for the upper shell,
// -1 for the lower one (P0 -> -p0, K -> -K, J unchanged).
struct BlockGenerators {
  DiffOperator P0;
  std::array<DiffOperator, 3> P, J, K;
};

inline BlockGenerators shell_block(HalfInt s, int sign) {
  SpinExact sp = spin_exact(s);
  int n = s.dim();
  BlockGenerators g;
  OnShellScalar sgn(static_cast<long>(sign));
  g.P0 = DiffOperator::scalar_mult(sc_p0() * sgn, n);
  OnShellScalar inv_mp = (sc_p0() + sc_mu()).invert();
  for (int j = 0; j < 3; ++j) {
    g.P[static_cast<size_t>(j)] = DiffOperator::scalar_mult(sc_p(j), n);
    g.J[static_cast<size_t>(j)] =
        orbital_J(j, n) + DiffOperator::mult(sp.S[static_cast<size_t>(j)]);
    DiffOperator kin = DiffOperator::deriv(j, n).scaled(sc_i() * sc_p0());
    DiffOperator spin_term =
        DiffOperator::mult(spin_cross_p(sp.S, j).scaled(inv_mp));
    g.K[static_cast<size_t>(j)] = (kin - spin_term).scaled(sgn);
  }
  return g;
}

inline DiffOperator term_op(const TermKey& k, const Coeff& M, bool anti) {
  DiffOperator t = DiffOperator::mult(M);
  for (int j = 0; j < 3; ++j)
    for (int r = 0; r < k.d[static_cast<size_t>(j)]; ++r)
      t = compose(t, DiffOperator::deriv(j, M.dim()));
  if (k.parity) t = compose(t, DiffOperator::parity_op(M.dim()));
  if (anti) t = compose(t, DiffOperator::conj_op(M.dim()));
  return t;
}

// Assemble diag(blocks) operators from per-block pieces.
inline DiffOperator block_diag(const std::vector<DiffOperator>& blocks) {
  int sub = blocks.front().dim();
  int dim = sub * static_cast<int>(blocks.size());
  DiffOperator out(dim, blocks.front().antilinear());
  std::map<TermKey, Coeff> acc;
  for (size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& [k, M] : blocks[b].terms()) {
      auto it = acc.find(k);
      if (it == acc.end()) it = acc.emplace(k, Coeff(dim)).first;
      for (int r = 0; r < sub; ++r)
        for (int c = 0; c < sub; ++c)
          it->second.at(static_cast<int>(b) * sub + r,
                        static_cast<int>(b) * sub + c) = M.at(r, c);
    }
  }
  for (const auto& [k, M] : acc) out += term_op(k, M, blocks.front().antilinear());
  return out;
}

inline QMat qid(int n) { return QMat::identity(n, GaussRat(1)); }

inline QMat rho(int which) {  // 1,2,3 -> Pauli block matrices; 4 -> [[0,1],[-1,0]]
  switch (which) {
    case 1: return qmat2(GaussRat(0L), GaussRat(1), GaussRat(1), GaussRat(0L));
    case 2:
      return qmat2(GaussRat(0L), -GaussRat::i(), GaussRat::i(), GaussRat(0L));
    case 3: return qmat2(GaussRat(1), GaussRat(0L), GaussRat(0L), -GaussRat(1));
    default:
      return qmat2(GaussRat(0L), GaussRat(1), -GaussRat(1), GaussRat(0L));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Catalog builders. Exact construction needs s in {0, 1/2}.

inline Representation rep_up(HalfInt s, bool down = false) {
  detail::BlockGenerators g = detail::shell_block(s, down ? -1 : 1);
  SpinExact sp = spin_exact(s);
  int n = s.dim();
  Representation r;
  r.class_id = down ? "Down" : "Up";
  r.label = r.class_id;
  r.s = s;
  r.blocks = 1;
  r.dim = n;
  r.P0 = g.P0;
  r.P = g.P;
  r.J = g.J;
  r.K = g.K;
  r.S = DiffOperator::parity_op(n);
  r.T = compose(compose(DiffOperator::mult(sp.tau), DiffOperator::conj_op(n)),
                DiffOperator::parity_op(n));
  r.expected = {true, false, s.is_integer() ? 1 : -1, 1, 1,
                down ? SpectrumClass::Minus : SpectrumClass::Plus};
  r.Tb = {detail::qid(1), true};
  r.Sb = {detail::qid(1), false};
  return r;
}

inline Representation rep_down(HalfInt s) { return rep_up(s, true); }

// Two-shell canonical form; member in 1..6 picks the discrete pair.
inline Representation rep_sym(HalfInt s, int member) {
  if (member < 1 || member > 6)
    throw std::invalid_argument("rep_sym: member must be 1..6");
  detail::BlockGenerators up = detail::shell_block(s, 1);
  detail::BlockGenerators dn = detail::shell_block(s, -1);
  SpinExact sp = spin_exact(s);
  int n = s.dim(), dim = 2 * n;
  Representation r;
  r.class_id = "SymCanonical";
  r.label = "U" + std::to_string(member);
  r.s = s;
  r.blocks = 2;
  r.dim = dim;
  r.P0 = detail::block_diag({up.P0, dn.P0});
  for (int j = 0; j < 3; ++j) {
    auto ju = static_cast<size_t>(j);
    r.P[ju] = detail::block_diag({up.P[ju], dn.P[ju]});
    r.J[ju] = detail::block_diag({up.J[ju], dn.J[ju]});
    r.K[ju] = detail::block_diag({up.K[ju], dn.K[ju]});
  }
  bool s_int = s.is_integer();
  QMat r1t = kron(detail::rho(1), sp.tau);
  QMat j2t = kron(detail::rho(4), sp.tau);
  switch (member) {
    case 1:
      r.T = DiffOperator::mult(kron(detail::rho(1), detail::qid(n)));
      r.S = DiffOperator::parity_op(dim);
      r.expected = {false, false, 1, 1, 1, SpectrumClass::Union};
      r.Tb = {detail::rho(1), false};
      r.Sb = {detail::qid(2), false};
      break;
    case 2:
      r.T = DiffOperator::mult(kron(detail::rho(1), detail::qid(n)));
      r.S = compose(DiffOperator::mult(kron(detail::rho(3), detail::qid(n))),
                    DiffOperator::parity_op(dim));
      r.expected = {false, false, 1, 1, -1, SpectrumClass::Union};
      r.Tb = {detail::rho(1), false};
      r.Sb = {detail::rho(3), false};
      break;
    case 3:
      r.T = DiffOperator::mult(kron(detail::rho(1), detail::qid(n)));
      r.S = compose(DiffOperator::mult(r1t), DiffOperator::conj_op(dim));
      r.expected = {false, true, 1, s_int ? 1 : -1, 1, SpectrumClass::Union};
      r.Tb = {detail::rho(1), false};
      r.Sb = {detail::rho(1), true};
      break;
    case 4:
      r.T = DiffOperator::mult(kron(detail::rho(1), detail::qid(n)));
      r.S = compose(DiffOperator::mult(j2t), DiffOperator::conj_op(dim));
      r.expected = {false, true, 1, s_int ? -1 : 1, -1, SpectrumClass::Union};
      r.Tb = {detail::rho(1), false};
      r.Sb = {detail::rho(4), true};
      break;
    case 5:
      r.T = compose(compose(DiffOperator::mult(kron(detail::qid(2), sp.tau)),
                            DiffOperator::conj_op(dim)),
                    DiffOperator::parity_op(dim));
      r.S = compose(DiffOperator::mult(r1t), DiffOperator::conj_op(dim));
      r.expected = {true, true, s_int ? 1 : -1, s_int ? 1 : -1, 1,
                    SpectrumClass::Union};
      r.Tb = {detail::qid(2), true};
      r.Sb = {detail::rho(1), true};
      break;
    default:
      r.T = compose(compose(DiffOperator::mult(kron(detail::qid(2), sp.tau)),
                            DiffOperator::conj_op(dim)),
                    DiffOperator::parity_op(dim));
      r.S = compose(DiffOperator::mult(j2t), DiffOperator::conj_op(dim));
      r.expected = {true, true, s_int ? 1 : -1, s_int ? -1 : 1, 1,
                    SpectrumClass::Union};
      r.Tb = {detail::qid(2), true};
      r.Sb = {detail::rho(4), true};
      break;
  }
  return r;
}

enum class DoubledT { Id, Rho1, Rho3, AntiSym };

inline std::vector<DoubledT> doubled_T_variants() {
  return {DoubledT::Id, DoubledT::Rho1, DoubledT::Rho3, DoubledT::AntiSym};
}

inline std::string to_string(DoubledT v) {
  switch (v) {
    case DoubledT::Id: return "id";
    case DoubledT::Rho1: return "rho1";
    case DoubledT::Rho3: return "rho3";
    default: return "antisym";
  }
}

// Two copies of the upper shell: generators diag(g, g); S = Ups * offdiag
// swap; T = tau K Ups That with That a constant unitary matrix.
inline Representation rep_doubled(HalfInt s, DoubledT v) {
  detail::BlockGenerators up = detail::shell_block(s, 1);
  SpinExact sp = spin_exact(s);
  int n = s.dim(), dim = 2 * n;
  Representation r;
  r.class_id = "DoubledUp";
  r.label = "Dbl[T=" + to_string(v) + "]";
  r.s = s;
  r.blocks = 2;
  r.dim = dim;
  r.P0 = detail::block_diag({up.P0, up.P0});
  for (int j = 0; j < 3; ++j) {
    auto ju = static_cast<size_t>(j);
    r.P[ju] = detail::block_diag({up.P[ju], up.P[ju]});
    r.J[ju] = detail::block_diag({up.J[ju], up.J[ju]});
    r.K[ju] = detail::block_diag({up.K[ju], up.K[ju]});
  }
  QMat that;
  int omega;
  switch (v) {
    case DoubledT::Id: that = detail::qid(2); omega = 1; break;
    case DoubledT::Rho1: that = detail::rho(1); omega = 1; break;
    case DoubledT::Rho3: that = detail::rho(3); omega = -1; break;
    default: that = detail::rho(4); omega = -1; break;
  }
  int that2 = (v == DoubledT::AntiSym) ? -1 : 1;
  bool s_int = s.is_integer();
  r.S = compose(DiffOperator::mult(kron(detail::rho(1), detail::qid(n))),
                DiffOperator::parity_op(dim));
  r.T = compose(compose(DiffOperator::mult(kron(that, sp.tau)),
                        DiffOperator::conj_op(dim)),
                DiffOperator::parity_op(dim));
  r.expected = {true, false, (s_int ? 1 : -1) * that2, 1, omega,
                SpectrumClass::Plus};
  r.Tb = {that, true};
  r.Sb = {detail::rho(1), false};
  return r;
}

// Four-shell construction (spin 0 only): shells (+,-,+,-), T = rho1 ⊕ rho1,
// S anti-unitary with S^2 = +Id (checkerboard swap across the two halves)
// or S^2 = -Id (symplectic pairing).
inline Representation rep_quad(int s2_sign) {
  if (s2_sign != 1 && s2_sign != -1)
    throw std::invalid_argument("rep_quad: s2_sign must be +-1");
  HalfInt s{0};
  detail::BlockGenerators up = detail::shell_block(s, 1);
  detail::BlockGenerators dn = detail::shell_block(s, -1);
  Representation r;
  r.class_id = "QuadSym";
  r.label = std::string("Quad[S2=") + (s2_sign > 0 ? "+1]" : "-1]");
  r.s = s;
  r.blocks = 4;
  r.dim = 4;
  r.P0 = detail::block_diag({up.P0, dn.P0, up.P0, dn.P0});
  for (int j = 0; j < 3; ++j) {
    auto ju = static_cast<size_t>(j);
    r.P[ju] = detail::block_diag({up.P[ju], dn.P[ju], up.P[ju], dn.P[ju]});
    r.J[ju] = detail::block_diag({up.J[ju], dn.J[ju], up.J[ju], dn.J[ju]});
    r.K[ju] = detail::block_diag({up.K[ju], dn.K[ju], up.K[ju], dn.K[ju]});
  }
  QMat tmat(4), smat(4);
  tmat.at(0, 1) = GaussRat(1);
  tmat.at(1, 0) = GaussRat(1);
  tmat.at(2, 3) = GaussRat(1);
  tmat.at(3, 2) = GaussRat(1);
  if (s2_sign > 0) {
    for (int k = 0; k < 4; ++k) smat.at(k, 3 - k) = GaussRat(1);
  } else {
    smat.at(0, 3) = GaussRat(1);
    smat.at(1, 2) = GaussRat(1);
    smat.at(2, 1) = -GaussRat(1);
    smat.at(3, 0) = -GaussRat(1);
  }
  r.T = DiffOperator::mult(tmat);
  r.S = compose(DiffOperator::mult(smat), DiffOperator::conj_op(4));
  r.expected = {false, true, 1, s2_sign, 1, SpectrumClass::Union};
  r.Tb = {tmat, false};
  r.Sb = {smat, true};
  return r;
}

// The eight inequivalent single-mass theories at a given spin.
inline std::vector<Representation> enumerate_octet(HalfInt s) {
  std::vector<Representation> v;
  v.push_back(rep_up(s));
  v.push_back(rep_down(s));
  for (int m = 1; m <= 6; ++m) v.push_back(rep_sym(s, m));
  return v;
}

// Everything the exact suites run over.
inline std::vector<Representation> full_catalog() {
  std::vector<Representation> v;
  for (int twice : {0, 1}) {
    HalfInt s{twice};
    for (auto& r : enumerate_octet(s)) v.push_back(std::move(r));
    for (DoubledT t : doubled_T_variants()) v.push_back(rep_doubled(s, t));
  }
  v.push_back(rep_quad(1));
  v.push_back(rep_quad(-1));
  return v;
}

// String-driven factory (CLI front door) with legality validation.
inline Representation build_rep(const std::string& class_id, HalfInt s,
                                const std::string& variant = "") {
  if (s.twice != 0 && s.twice != 1)
    throw std::invalid_argument("build_rep: exact catalog needs s in {0, 1/2}");
  if (class_id == "Up" || class_id == "Down") {
    if (variant == "T=unitary" || variant == "S=antiunitary")
      throw std::invalid_argument(
          "build_rep: single-shell spectra force anti-unitary T and unitary S");
    if (!variant.empty())
      throw std::invalid_argument("build_rep: unknown variant " + variant);
    return class_id == "Up" ? rep_up(s) : rep_down(s);
  }
  if (class_id == "SymCanonical") {
    int m = std::stoi(variant.empty() ? "1" : variant);
    return rep_sym(s, m);
  }
  if (class_id == "DoubledUp") {
    for (DoubledT t : doubled_T_variants())
      if (to_string(t) == variant) return rep_doubled(s, t);
    throw std::invalid_argument("build_rep: unknown doubled variant " + variant);
  }
  if (class_id == "QuadSym") {
    if (s.twice != 0)
      throw std::invalid_argument("build_rep: QuadSym is spin-0 only");
    if (variant == "+" || variant.empty()) return rep_quad(1);
    if (variant == "-") return rep_quad(-1);
    throw std::invalid_argument("build_rep: unknown quad variant " + variant);
  }
  throw std::invalid_argument("build_rep: unknown class " + class_id);
}

// Pauli-Lubanski components: W0 = P.J and W_j = P0 J_j + eps_{jab} P_a K_b,
// the orientation for which the orbital parts cancel and W commutes with
// every momentum component.
inline std::array<DiffOperator, 4> pauli_lubanski(const Representation& r) {
  std::array<DiffOperator, 4> w;
  DiffOperator w0(r.dim);
  for (size_t j = 0; j < 3; ++j) w0 += compose(r.P[j], r.J[j]);
  w[0] = w0;
  for (int j = 0; j < 3; ++j) {
    size_t a = static_cast<size_t>((j + 1) % 3), b = static_cast<size_t>((j + 2) % 3);
    w[static_cast<size_t>(j) + 1] =
        compose(r.P0, r.J[static_cast<size_t>(j)]) +
        (compose(r.P[a], r.K[b]) - compose(r.P[b], r.K[a]));
  }
  return w;
}

// P0^2 - sum P_j^2 (should be mu^2 Id).
inline DiffOperator mass_casimir(const Representation& r) {
  DiffOperator c = compose(r.P0, r.P0);
  for (size_t j = 0; j < 3; ++j) c -= compose(r.P[j], r.P[j]);
  return c;
}

// W0^2 - sum W_j^2 (should be a constant multiple of Id).
inline DiffOperator spin_casimir(const Representation& r) {
  auto w = pauli_lubanski(r);
  DiffOperator c = compose(w[0], w[0]);
  for (size_t j = 1; j < 4; ++j) c -= compose(w[j], w[j]);
  return c;
}

}  // namespace plab
