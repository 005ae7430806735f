#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "plab/smallmat.hpp"

namespace plab {

using Coeff = Mat<OnShellScalar>;

inline Coeff coeff_from_qmat(const QMat& q) {
  return q.map([](const GaussRat& g) { return OnShellScalar(g); });
}

// One normal-form slot: derivative multi-index and parity flag.
struct TermKey {
  std::array<uint8_t, 3> d{0, 0, 0};
  uint8_t parity = 0;

  int order() const { return d[0] + d[1] + d[2]; }
  bool operator<(const TermKey& o) const {
    if (d != o.d) return d < o.d;
    return parity < o.parity;
  }
  bool operator==(const TermKey& o) const { return d == o.d && parity == o.parity; }
};

// Linear or anti-linear differential operator on (2s+1)*blocks component
// momentum-space wavefunctions, kept in the normal form
//   sum_t  M_t(p) ∘ d1^a d2^b d3^c ∘ Ups^u  (∘ K if antilinear)
// with the K flag homogeneous across terms. Composition pushes flags left
// to right through coefficients via the calculus
//   d_j∘M = M∘d_j + (d_j M),  K∘M = conj(M)∘K,  K∘d_j = d_j∘K,
//   Ups∘M(p) = M(-p)∘Ups,     Ups∘d_j = -d_j∘Ups,  K^2 = Ups^2 = Id.
class DiffOperator {
 public:
  DiffOperator() = default;
  explicit DiffOperator(int dim, bool anti = false) : dim_(dim), anti_(anti) {}

  static DiffOperator zero(int dim) { return DiffOperator(dim); }
  static DiffOperator identity(int dim) {
    return mult(Coeff::identity(dim, OnShellScalar(1L)));
  }
  static DiffOperator mult(const Coeff& m) {
    DiffOperator r(m.dim());
    r.add_term(TermKey{}, m);
    return r;
  }
  static DiffOperator mult(const QMat& m) { return mult(coeff_from_qmat(m)); }
  static DiffOperator scalar_mult(const OnShellScalar& s, int dim) {
    return mult(Coeff::identity(dim, OnShellScalar(1L)).scaled(s));
  }
  static DiffOperator deriv(int axis, int dim) {
    DiffOperator r(dim);
    TermKey k;
    k.d[static_cast<size_t>(axis)] = 1;
    r.add_term(k, Coeff::identity(dim, OnShellScalar(1L)));
    return r;
  }
  static DiffOperator parity_op(int dim) {
    DiffOperator r(dim);
    TermKey k;
    k.parity = 1;
    r.add_term(k, Coeff::identity(dim, OnShellScalar(1L)));
    return r;
  }
  static DiffOperator conj_op(int dim) {
    DiffOperator r(dim, true);
    r.add_term(TermKey{}, Coeff::identity(dim, OnShellScalar(1L)));
    return r;
  }

  int dim() const { return dim_; }
  bool antilinear() const { return anti_; }
  const std::map<TermKey, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int max_order() const {
    int m = 0;
    for (const auto& [k, c] : terms_) {
      (void)c;
      m = std::max(m, k.order());
    }
    return m;
  }

  DiffOperator operator-() const {
    DiffOperator r(dim_, anti_);
    for (const auto& [k, c] : terms_) r.terms_[k] = -c;
    return r;
  }

  DiffOperator operator+(const DiffOperator& o) const {
    check_dim(o);
    if (terms_.empty()) return o;
    if (o.terms_.empty()) return *this;
    if (anti_ != o.anti_)
      throw std::logic_error("DiffOperator: sum mixes linear and anti-linear");
    DiffOperator r(*this);
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
  }
  DiffOperator operator-(const DiffOperator& o) const { return *this + (-o); }
  DiffOperator& operator+=(const DiffOperator& o) { return *this = *this + o; }
  DiffOperator& operator-=(const DiffOperator& o) { return *this = *this - o; }

  // c ∘ A (left multiplication by a scalar function).
  DiffOperator scaled(const OnShellScalar& s) const {
    DiffOperator r(dim_, anti_);
    if (s.is_zero()) return r;
    for (const auto& [k, c] : terms_) r.add_term(k, c.scaled(s));
    return r;
  }
  DiffOperator scaled(const GaussRat& g) const { return scaled(OnShellScalar(g)); }

  bool operator==(const DiffOperator& o) const {
    if (dim_ != o.dim_) return false;
    if (terms_.empty() || o.terms_.empty())
      return terms_.empty() && o.terms_.empty();
    if (anti_ != o.anti_) return false;
    return (*this - o).is_zero();
  }
  bool operator!=(const DiffOperator& o) const { return !(*this == o); }

 private:
  void add_term(const TermKey& k, const Coeff& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_[k] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  void check_dim(const DiffOperator& o) const {
    if (dim_ != o.dim_)
      throw std::logic_error("DiffOperator: dimension mismatch");
  }

  int dim_ = 0;
  bool anti_ = false;
  std::map<TermKey, Coeff> terms_;

  friend DiffOperator compose(const DiffOperator&, const DiffOperator&);
  friend DiffOperator formal_adjoint(const DiffOperator&);
  friend DiffOperator block_phase_twist(const DiffOperator&, int);
};

namespace detail {

inline long binom(int n, int k) {
  long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

inline Coeff coeff_conj(const Coeff& m) {
  return m.map([](const OnShellScalar& s) { return s.conj(); });
}
inline Coeff coeff_parity(const Coeff& m) {
  return m.map([](const OnShellScalar& s) { return s.parity(); });
}
inline Coeff coeff_derive(const Coeff& m, int axis) {
  return m.map([axis](const OnShellScalar& s) { return s.derive(axis); });
}

}  // namespace detail

inline DiffOperator compose(const DiffOperator& A, const DiffOperator& B) {
  if (A.dim_ != B.dim_)
    throw std::logic_error("DiffOperator: dimension mismatch in compose");
  DiffOperator R(A.dim_, A.anti_ != B.anti_);
  for (const auto& [ka, Ma] : A.terms_) {
    for (const auto& [kb, Mb] : B.terms_) {
      Coeff M = Mb;
      if (A.anti_) M = detail::coeff_conj(M);
      long sign = 1;
      if (ka.parity) {
        M = detail::coeff_parity(M);
        if (kb.order() % 2 == 1) sign = -sign;
      }
      TermKey base;
      base.parity = static_cast<uint8_t>(ka.parity ^ kb.parity);
      // Leibniz: d^a ∘ M = sum_{g<=a} C(a,g) (d^{a-g} M) ∘ d^g
      for (uint8_t g0 = 0; g0 <= ka.d[0]; ++g0)
        for (uint8_t g1 = 0; g1 <= ka.d[1]; ++g1)
          for (uint8_t g2 = 0; g2 <= ka.d[2]; ++g2) {
            Coeff D = M;
            for (int r = 0; r < ka.d[0] - g0; ++r) D = detail::coeff_derive(D, 0);
            for (int r = 0; r < ka.d[1] - g1; ++r) D = detail::coeff_derive(D, 1);
            for (int r = 0; r < ka.d[2] - g2; ++r) D = detail::coeff_derive(D, 2);
            if (D.is_zero()) continue;
            long c = sign * detail::binom(ka.d[0], g0) * detail::binom(ka.d[1], g1) *
                     detail::binom(ka.d[2], g2);
            TermKey k = base;
            k.d[0] = static_cast<uint8_t>(g0 + kb.d[0]);
            k.d[1] = static_cast<uint8_t>(g1 + kb.d[1]);
            k.d[2] = static_cast<uint8_t>(g2 + kb.d[2]);
            R.add_term(k, (Ma * D).scaled(OnShellScalar(GaussRat(c))));
          }
    }
  }
  return R;
}

inline DiffOperator commutator(const DiffOperator& A, const DiffOperator& B) {
  return compose(A, B) - compose(B, A);
}
inline DiffOperator anticommutator(const DiffOperator& A, const DiffOperator& B) {
  return compose(A, B) + compose(B, A);
}

// Formal adjoint of a linear operator w.r.t. the invariant inner product
// with weight 1/p0 (measure d^3p / sqrt(mu^2+p^2)):
//   (d_j)^+ = -d_j + p_j/p0^2,  (M)^+ = M^dagger,  Ups^+ = Ups.
inline DiffOperator formal_adjoint(const DiffOperator& A) {
  if (A.anti_)
    throw std::logic_error("formal_adjoint: operator must be linear");
  int n = A.dim_;
  DiffOperator R(n);
  std::array<DiffOperator, 3> adj_d;
  for (int j = 0; j < 3; ++j) {
    OnShellScalar w = OnShellScalar::var(j) / (OnShellScalar::p0() * OnShellScalar::p0());
    adj_d[static_cast<size_t>(j)] =
        DiffOperator::scalar_mult(w, n) - DiffOperator::deriv(j, n);
  }
  for (const auto& [k, M] : A.terms_) {
    DiffOperator piece = DiffOperator::mult(M.dagger());
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < k.d[static_cast<size_t>(j)]; ++r)
        piece = compose(adj_d[static_cast<size_t>(j)], piece);
    if (k.parity) piece = compose(DiffOperator::parity_op(n), piece);
    R += piece;
  }
  return R;
}

// Conjugation by W = diag(w, wbar) ⊗ Id_{dim/2}, w = exp(-i pi k / 4).
// Linear terms: upper-right block gains (-i)^k, lower-left (+i)^k.
// Anti-linear terms: upper-left block gains (-i)^k, lower-right (+i)^k.
// All factors are Gaussian rational for every integer k.
inline DiffOperator block_phase_twist(const DiffOperator& A, int k) {
  if (A.dim_ % 2 != 0)
    throw std::logic_error("block_phase_twist: even dimension required");
  int half = A.dim_ / 2;
  auto ipow = [](int kk, bool plus) {  // (+-i)^kk
    static const int re[4] = {1, 0, -1, 0};
    static const int im[4] = {0, 1, 0, -1};
    int m = ((kk % 4) + 4) % 4;
    return GaussRat(Rat(re[m]), Rat(plus ? im[m] : -im[m]));
  };
  GaussRat f_up = ipow(k, false), f_dn = ipow(k, true);
  DiffOperator R(A.dim_, A.anti_);
  for (const auto& [key, M] : A.terms_) {
    Coeff N(A.dim_);
    for (int r = 0; r < A.dim_; ++r)
      for (int c = 0; c < A.dim_; ++c) {
        int br = r / half, bc = c / half;
        GaussRat f(1L);
        if (!A.anti_) {
          if (br < bc)
            f = f_up;
          else if (br > bc)
            f = f_dn;
        } else {
          if (br == 0 && bc == 0)
            f = f_up;
          else if (br == 1 && bc == 1)
            f = f_dn;
        }
        N.at(r, c) = M.at(r, c) * OnShellScalar(f);
      }
    R.add_term(key, N);
  }
  return R;
}

// If A = c * Id with no derivative/parity/K structure, returns c.
inline std::optional<OnShellScalar> as_scalar_identity(const DiffOperator& A) {
  if (A.is_zero()) return OnShellScalar(0L);
  if (A.antilinear() || A.terms().size() != 1) return std::nullopt;
  const auto& [k, M] = *A.terms().begin();
  if (!(k == TermKey{})) return std::nullopt;
  const OnShellScalar& c = M.at(0, 0);
  for (int r = 0; r < A.dim(); ++r)
    for (int j = 0; j < A.dim(); ++j) {
      if (r == j && M.at(r, j) != c) return std::nullopt;
      if (r != j && !M.at(r, j).is_zero()) return std::nullopt;
    }
  return c;
}

inline std::string to_string(const Coeff& m) {
  if (m.dim() == 1) return to_string(m.at(0, 0));
  std::string out = "[";
  for (int r = 0; r < m.dim(); ++r) {
    out += r ? ", [" : "[";
    for (int c = 0; c < m.dim(); ++c) {
      if (c) out += ", ";
      out += to_string(m.at(r, c));
    }
    out += "]";
  }
  return out + "]";
}

inline std::string to_string(const DiffOperator& A) {
  if (A.is_zero()) return "0";
  std::string out;
  for (const auto& [k, M] : A.terms()) {
    std::string piece = "{" + to_string(M) + "}";
    for (int j = 0; j < 3; ++j)
      if (k.d[static_cast<size_t>(j)] > 0) {
        piece += " d" + std::to_string(j + 1);
        if (k.d[static_cast<size_t>(j)] > 1)
          piece += "^" + std::to_string(k.d[static_cast<size_t>(j)]);
      }
    if (k.parity) piece += " Y";
    out += out.empty() ? piece : "  +  " + piece;
  }
  if (A.antilinear()) out += "  then K";
  return out;
}

}  // namespace plab
