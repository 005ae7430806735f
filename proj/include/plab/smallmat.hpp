#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "plab/onshell.hpp"

namespace plab {

inline GaussRat elem_conj(const GaussRat& x) { return x.conj(); }
inline OnShellScalar elem_conj(const OnShellScalar& x) { return x.conj(); }
inline std::complex<double> elem_conj(const std::complex<double>& x) {
  return std::conj(x);
}

inline bool elem_is_zero(const GaussRat& x) { return x.is_zero(); }
inline bool elem_is_zero(const OnShellScalar& x) { return x.is_zero(); }
inline bool elem_is_zero(const std::complex<double>& x) { return x == 0.0; }

// Small dense square matrix over a commutative ring.
template <typename T>
class Mat {
 public:
  Mat() = default;
  explicit Mat(int n) : n_(n), a_(static_cast<size_t>(n) * n, T{}) {}

  static Mat identity(int n, T one) {
    Mat m(n);
    for (int k = 0; k < n; ++k) m.at(k, k) = one;
    return m;
  }

  int dim() const { return n_; }
  T& at(int r, int c) { return a_[static_cast<size_t>(r) * n_ + c]; }
  const T& at(int r, int c) const { return a_[static_cast<size_t>(r) * n_ + c]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!elem_is_zero(x)) return false;
    return true;
  }

  Mat operator+(const Mat& o) const {
    Mat r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
  }
  Mat operator-() const {
    Mat r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = -a_[k];
    return r;
  }
  Mat operator*(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        const T& x = at(i, k);
        if (elem_is_zero(x)) continue;
        for (int j = 0; j < n_; ++j) r.at(i, j) += x * o.at(k, j);
      }
    return r;
  }
  Mat scaled(const T& c) const {
    Mat r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * c;
    return r;
  }

  Mat transpose() const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r.at(j, i) = at(i, j);
    return r;
  }
  Mat conj() const {
    Mat r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = elem_conj(a_[k]);
    return r;
  }
  Mat dagger() const { return conj().transpose(); }

  template <typename F>
  auto map(F f) const -> Mat<decltype(f(std::declval<T>()))> {
    Mat<decltype(f(std::declval<T>()))> r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r.at(i, j) = f(at(i, j));
    return r;
  }

  bool operator==(const Mat& o) const {
    if (n_ != o.n_) return false;
    for (size_t k = 0; k < a_.size(); ++k)
      if (!elem_is_zero(a_[k] - o.a_[k])) return false;
    return true;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

template <typename T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
  int na = a.dim(), nb = b.dim();
  Mat<T> r(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l)
          r.at(i * nb + k, j * nb + l) = a.at(i, j) * b.at(k, l);
  return r;
}

using QMat = Mat<GaussRat>;     // constant matrices over Q(i)
using CMat = Mat<std::complex<double>>;

inline QMat qmat2(GaussRat a, GaussRat b, GaussRat c, GaussRat d) {
  QMat m(2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  m.at(1, 0) = c;
  m.at(1, 1) = d;
  return m;
}

}  // namespace plab
