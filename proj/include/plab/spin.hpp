#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "plab/smallmat.hpp"

namespace plab {

// Spin quantum number as twice its value, so s = 0, 1/2, 1, ... are exact.
struct HalfInt {
  int twice = 0;

  static HalfInt of_twice(int t) { return HalfInt{t}; }
  int dim() const { return twice + 1; }
  bool is_integer() const { return twice % 2 == 0; }
  double value() const { return twice / 2.0; }
  bool operator==(const HalfInt& o) const { return twice == o.twice; }
};

inline std::string to_string(const HalfInt& s) {
  if (s.is_integer()) return std::to_string(s.twice / 2);
  return std::to_string(s.twice) + "/2";
}

struct SpinExact {
  std::array<QMat, 3> S;
  QMat tau;
};

// Exact spin matrices; supported for s in {0, 1/2} (all the catalog needs).
// Basis ordering m = s, s-1, ..., -s. Phase convention for tau: the
// anti-diagonal entry in the first row is +1.
inline SpinExact spin_exact(HalfInt s) {
  if (s.twice == 0) {
    QMat z(1), t(1);
    t.at(0, 0) = GaussRat(1);
    return {{z, z, z}, t};
  }
  if (s.twice == 1) {
    GaussRat h(Rat(1, 2)), z(0L);
    GaussRat ih(Rat(0), Rat(1, 2));  // i/2
    SpinExact r{{qmat2(z, h, h, z), qmat2(z, -ih, ih, z), qmat2(h, z, z, -h)},
                qmat2(z, GaussRat(1), -GaussRat(1), z)};
    return r;
  }
  throw std::invalid_argument("spin_exact: only s = 0 and s = 1/2 are exact");
}

struct SpinNumeric {
  std::array<CMat, 3> S;
  CMat tau;
};

// Ladder-operator construction, any s; same basis and tau phase convention.
inline SpinNumeric spin_numeric(HalfInt s) {
  int n = s.dim();
  double sv = s.value();
  CMat Sp(n), Sm(n), S3(n), tau(n);
  for (int r = 0; r < n; ++r) {
    double m = sv - r;
    S3.at(r, r) = m;
    if (r > 0) Sp.at(r - 1, r) = std::sqrt(sv * (sv + 1) - m * (m + 1));
    if (r + 1 < n) Sm.at(r + 1, r) = std::sqrt(sv * (sv + 1) - m * (m - 1));
    // (-1)^(s-m) on the anti-diagonal; column with m' = -m is index n-1-r
    tau.at(r, n - 1 - r) = (r % 2 == 0) ? 1.0 : -1.0;
  }
  std::complex<double> half(0.5, 0.0), mihalf(0.0, -0.5);
  CMat S1 = (Sp + Sm).scaled(half);
  CMat S2 = (Sp - Sm).scaled(mihalf);
  return {{S1, S2, S3}, tau};
}

}  // namespace plab
