#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "plab/operator.hpp"

namespace plab {

enum class Space { Position, Momentum };
enum class Theory { T1, T2, T3, T4 };

inline int theory_components(Theory t) {
  return (t == Theory::T1 || t == Theory::T2) ? 1 : 2;
}

inline std::string to_string(Theory t) {
  switch (t) {
    case Theory::T1: return "T1";
    case Theory::T2: return "T2";
    case Theory::T3: return "T3";
    default: return "T4";
  }
}

// Uniform periodic grid over [-L, L)^dims, component-major complex samples.
// The same container holds position-space and momentum-space data; `space`
// records which coordinate the axes currently mean.
struct GridState {
  int n = 0;
  int dims = 3;
  int components = 1;
  double L = 0;
  double mu = 0;
  Space space = Space::Position;
  std::vector<std::complex<double>> data;

  long points() const {
    long p = 1;
    for (int d = 0; d < dims; ++d) p *= n;
    return p;
  }
  double step() const { return 2.0 * L / n; }
  double cell() const { return std::pow(step(), dims); }
  double coord(int index) const { return -L + step() * index; }

  std::complex<double>* comp(int c) { return data.data() + c * points(); }
  const std::complex<double>* comp(int c) const {
    return data.data() + c * points();
  }

  double component_norm_sq(int c) const {
    const std::complex<double>* p = comp(c);
    double s = 0;
    for (long i = 0; i < points(); ++i) s += std::norm(p[i]);
    return s * cell();
  }
  double norm_sq() const {
    double s = 0;
    for (int c = 0; c < components; ++c) s += component_norm_sq(c);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }
};

namespace gdetail {

inline std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// In-place unscaled c2c transform of one component slice. FFTW plan
// creation/destruction is serialized; execution is re-entrant.
inline void transform(std::complex<double>* p, int n, int dims, int sign) {
  std::array<int, 3> sizes{n, n, n};
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft(dims, sizes.data(), reinterpret_cast<fftw_complex*>(p),
                         reinterpret_cast<fftw_complex*>(p), sign,
                         FFTW_ESTIMATE);
  }
  if (plan == nullptr)
    throw std::runtime_error("grid: transform plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
}

// Dual frequency of FFT bin `index` for a box of half-width L.
inline double freq(int index, int n, double L) {
  int m = index < n / 2 ? index : index - n;
  return M_PI * m / L;
}

// Derivative frequency: the Nyquist bin is zeroed so that the discrete
// derivative is odd under index reversal and commutes with conjugation,
// which composition against parity and anti-linear operators relies on.
inline double dfreq(int index, int n, double L) {
  return index == n / 2 ? 0.0 : freq(index, n, L);
}

template <typename F>
inline void for_each_point(int n, int dims, F&& f) {
  std::array<int, 3> idx{0, 0, 0};
  long flat = 0;
  if (dims == 1) {
    for (idx[0] = 0; idx[0] < n; ++idx[0]) f(flat++, idx);
  } else if (dims == 2) {
    for (idx[0] = 0; idx[0] < n; ++idx[0])
      for (idx[1] = 0; idx[1] < n; ++idx[1]) f(flat++, idx);
  } else {
    for (idx[0] = 0; idx[0] < n; ++idx[0])
      for (idx[1] = 0; idx[1] < n; ++idx[1])
        for (idx[2] = 0; idx[2] < n; ++idx[2]) f(flat++, idx);
  }
}

inline void check_grid(const GridState& g) {
  if (g.n <= 0 || (g.n & (g.n - 1)) != 0)
    throw std::invalid_argument("grid: n must be a positive power of two");
  if (g.dims < 1 || g.dims > 3)
    throw std::invalid_argument("grid: dims must be 1, 2 or 3");
  if (g.L <= 0) throw std::invalid_argument("grid: L must be positive");
  if (g.components < 1)
    throw std::invalid_argument("grid: needs at least one component");
}

}  // namespace gdetail

inline GridState make_grid(int n, double L, int dims, int components, double mu,
                           Space space) {
  GridState g;
  g.n = n;
  g.dims = dims;
  g.components = components;
  g.L = L;
  g.mu = mu;
  g.space = space;
  gdetail::check_grid(g);
  g.data.assign(static_cast<size_t>(components) * g.points(), {0.0, 0.0});
  return g;
}

// Unit-norm Gaussian packet exp(-|x-c|^2/(4 sigma^2)) exp(i k0.x); component
// m carries an extra 1/(1+m) factor so multi-component states are not
// degenerate copies.
inline GridState gaussian_packet(int n, double L, int dims, int components,
                                 double mu, Space space,
                                 const std::array<double, 3>& center,
                                 double sigma,
                                 const std::array<double, 3>& k0) {
  if (sigma <= 0) throw std::invalid_argument("gaussian_packet: sigma > 0");
  GridState g = make_grid(n, L, dims, components, mu, space);
  gdetail::for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double q = 0, phase = 0;
    for (int d = 0; d < dims; ++d) {
      double x = g.coord(idx[static_cast<size_t>(d)]);
      double r = x - center[static_cast<size_t>(d)];
      q += r * r;
      phase += k0[static_cast<size_t>(d)] * x;
    }
    std::complex<double> v =
        std::exp(-q / (4 * sigma * sigma)) *
        std::complex<double>(std::cos(phase), std::sin(phase));
    for (int c = 0; c < components; ++c) g.comp(c)[flat] = v / double(1 + c);
  });
  double nn = g.norm();
  for (auto& v : g.data) v /= nn;
  return g;
}

// Unit-norm exactly periodic plane wave exp(i (pi/L) mode . x).
inline GridState plane_wave(int n, double L, int dims, int components,
                            double mu, Space space,
                            const std::array<int, 3>& mode) {
  GridState g = make_grid(n, L, dims, components, mu, space);
  gdetail::for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double phase = 0;
    for (int d = 0; d < dims; ++d)
      phase += M_PI * mode[static_cast<size_t>(d)] / L *
               g.coord(idx[static_cast<size_t>(d)]);
    std::complex<double> v(std::cos(phase), std::sin(phase));
    for (int c = 0; c < components; ++c) g.comp(c)[flat] = v;
  });
  double nn = g.norm();
  for (auto& v : g.data) v /= nn;
  return g;
}

struct TrajectoryRecord {
  Theory theory = Theory::T1;
  double dt = 0;
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<std::vector<double>> component_norms;  // [time][component]
  std::vector<std::array<double, 3>> mean_p;         // [time]
  std::vector<double> snapshot_times;
  std::vector<GridState> snapshots;  // position space
};

// Exact-in-time spectral propagation: one forward transform, then a unit
// multiplier exp(-i s_c omega dt) per step and component, with
// omega = sqrt(mu^2 + p^2) and s_c = +1 (T1), -1 (T2), diag(+1,-1) (T3/T4).
inline TrajectoryRecord evolve(Theory th, const GridState& psi0, double dt,
                               int steps, int snapshot_stride = 0) {
  gdetail::check_grid(psi0);
  if (psi0.space != Space::Position)
    throw std::invalid_argument("evolve: expected a position-space state");
  if (psi0.components != theory_components(th))
    throw std::invalid_argument(
        "evolve: component count does not match the theory");
  if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");

  const int n = psi0.n, dims = psi0.dims, comps = psi0.components;
  const long pts = psi0.points();

  GridState spec = psi0;  // raw spectral coefficients
  for (int c = 0; c < comps; ++c)
    gdetail::transform(spec.comp(c), n, dims, FFTW_FORWARD);

  std::vector<double> omega(static_cast<size_t>(pts));
  std::array<std::vector<double>, 3> pval;
  for (int d = 0; d < dims; ++d)
    pval[static_cast<size_t>(d)].resize(static_cast<size_t>(pts));
  gdetail::for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double p2 = 0;
    for (int d = 0; d < dims; ++d) {
      double p = gdetail::freq(idx[static_cast<size_t>(d)], n, psi0.L);
      pval[static_cast<size_t>(d)][static_cast<size_t>(flat)] = p;
      p2 += p * p;
    }
    omega[static_cast<size_t>(flat)] = std::sqrt(psi0.mu * psi0.mu + p2);
  });

  // Unit-modulus step multipliers, one row per component sign.
  std::vector<std::vector<std::complex<double>>> phase(
      static_cast<size_t>(comps));
  for (int c = 0; c < comps; ++c) {
    double sign = 1.0;
    if (th == Theory::T2) sign = -1.0;
    if ((th == Theory::T3 || th == Theory::T4) && c == 1) sign = -1.0;
    phase[static_cast<size_t>(c)].resize(static_cast<size_t>(pts));
    for (long i = 0; i < pts; ++i)
      phase[static_cast<size_t>(c)][static_cast<size_t>(i)] =
          std::polar(1.0, -sign * omega[static_cast<size_t>(i)] * dt);
  }

  const double parseval = spec.cell() / double(pts);
  TrajectoryRecord rec;
  rec.theory = th;
  rec.dt = dt;

  auto record = [&](double t) {
    double total = 0;
    std::vector<double> per(static_cast<size_t>(comps));
    std::array<double, 3> mp{0, 0, 0};
    for (int c = 0; c < comps; ++c) {
      const std::complex<double>* v = spec.comp(c);
      double s = 0;
      for (long i = 0; i < pts; ++i) {
        double w = std::norm(v[i]);
        s += w;
        for (int d = 0; d < dims; ++d)
          mp[static_cast<size_t>(d)] +=
              w * pval[static_cast<size_t>(d)][static_cast<size_t>(i)];
      }
      per[static_cast<size_t>(c)] = s * parseval;
      total += s;
    }
    for (int d = 0; d < dims; ++d)
      mp[static_cast<size_t>(d)] = total > 0
                                       ? mp[static_cast<size_t>(d)] / total
                                       : 0.0;
    rec.times.push_back(t);
    rec.norms.push_back(std::sqrt(total * parseval));
    rec.component_norms.push_back(std::move(per));
    rec.mean_p.push_back(mp);
  };

  auto push_snapshot = [&](double t) {
    GridState s = spec;
    for (int c = 0; c < comps; ++c) {
      gdetail::transform(s.comp(c), n, dims, FFTW_BACKWARD);
      std::complex<double>* v = s.comp(c);
      for (long i = 0; i < pts; ++i) v[i] /= double(pts);
    }
    s.space = Space::Position;
    rec.snapshot_times.push_back(t);
    rec.snapshots.push_back(std::move(s));
  };

  record(0.0);
  if (snapshot_stride > 0) push_snapshot(0.0);
  for (int step = 1; step <= steps; ++step) {
    for (int c = 0; c < comps; ++c) {
      std::complex<double>* v = spec.comp(c);
      const std::complex<double>* ph = phase[static_cast<size_t>(c)].data();
      for (long i = 0; i < pts; ++i) v[i] *= ph[i];
    }
    double t = dt * step;
    record(t);
    if (snapshot_stride > 0 && step % snapshot_stride == 0) push_snapshot(t);
  }
  if (rec.snapshot_times.empty() ||
      rec.snapshot_times.back() != dt * steps)
    push_snapshot(dt * steps);
  return rec;
}

namespace gdetail {

// Spectral Laplacian of one component, in place on a position-space slice.
inline void laplacian(std::complex<double>* p, int n, int dims, double L) {
  transform(p, n, dims, FFTW_FORWARD);
  long pts = 1;
  for (int d = 0; d < dims; ++d) pts *= n;
  for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double k2 = 0;
    for (int d = 0; d < dims; ++d) {
      double k = freq(idx[static_cast<size_t>(d)], n, L);
      k2 += k * k;
    }
    p[flat] *= -k2;
  });
  transform(p, n, dims, FFTW_BACKWARD);
  for (long i = 0; i < pts; ++i) p[i] /= double(pts);
}

// Spectral first derivative along `axis`.
inline void derivative(std::complex<double>* p, int n, int dims, double L,
                       int axis) {
  transform(p, n, dims, FFTW_FORWARD);
  long pts = 1;
  for (int d = 0; d < dims; ++d) pts *= n;
  for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double k = dfreq(idx[static_cast<size_t>(axis)], n, L);
    p[flat] *= std::complex<double>(0.0, k);
  });
  transform(p, n, dims, FFTW_BACKWARD);
  for (long i = 0; i < pts; ++i) p[i] /= double(pts);
}

inline double l2(const std::vector<std::complex<double>>& v, double cell) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s * cell);
}

}  // namespace gdetail

// Relative residual of the second-order wave equation
// d2/dt2 psi - lap psi + mu^2 psi = 0 on the first three stored snapshots,
// with a centered second time difference and the spectral Laplacian.
// Converges at second order in the snapshot spacing.
inline double kg_residual(const TrajectoryRecord& rec) {
  if (rec.snapshots.size() < 3)
    throw std::invalid_argument("kg_residual: need at least three snapshots");
  double h0 = rec.snapshot_times[1] - rec.snapshot_times[0];
  double h1 = rec.snapshot_times[2] - rec.snapshot_times[1];
  if (std::abs(h1 - h0) > 1e-9 * std::max(1.0, std::abs(h0)))
    throw std::invalid_argument("kg_residual: snapshots not uniformly spaced");
  const GridState& a = rec.snapshots[0];
  const GridState& b = rec.snapshots[1];
  const GridState& c = rec.snapshots[2];
  const long pts = b.points();
  double worst = 0;
  for (int comp = 0; comp < b.components; ++comp) {
    std::vector<std::complex<double>> lap(b.comp(comp),
                                          b.comp(comp) + pts);
    gdetail::laplacian(lap.data(), b.n, b.dims, b.L);
    std::vector<std::complex<double>> res(static_cast<size_t>(pts));
    std::vector<std::complex<double>> ref(static_cast<size_t>(pts));
    const std::complex<double>* va = a.comp(comp);
    const std::complex<double>* vb = b.comp(comp);
    const std::complex<double>* vc = c.comp(comp);
    double mu2 = b.mu * b.mu;
    for (long i = 0; i < pts; ++i) {
      std::complex<double> d2t = (va[i] - 2.0 * vb[i] + vc[i]) / (h0 * h0);
      ref[static_cast<size_t>(i)] = lap[static_cast<size_t>(i)] - mu2 * vb[i];
      res[static_cast<size_t>(i)] = d2t - ref[static_cast<size_t>(i)];
    }
    double den = gdetail::l2(ref, b.cell());
    double num = gdetail::l2(res, b.cell());
    if (den == 0) throw std::invalid_argument("kg_residual: trivial snapshot");
    worst = std::max(worst, num / den);
  }
  return worst;
}

// dt psi for a positive-shell scalar state, exact in momentum space:
// multiplication by -i sqrt(mu^2 + k^2).
inline GridState spectral_time_derivative(const GridState& psi) {
  gdetail::check_grid(psi);
  if (psi.components != 1)
    throw std::invalid_argument(
        "spectral_time_derivative: single component only");
  if (psi.space != Space::Position)
    throw std::invalid_argument(
        "spectral_time_derivative: position space only");
  const int n = psi.n, dims = psi.dims;
  const long pts = psi.points();
  GridState out = psi;
  std::vector<std::complex<double>> v(psi.comp(0), psi.comp(0) + pts);
  gdetail::transform(v.data(), n, dims, FFTW_FORWARD);
  gdetail::for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double k2 = 0;
    for (int d = 0; d < dims; ++d) {
      double k = gdetail::freq(idx[static_cast<size_t>(d)], n, psi.L);
      k2 += k * k;
    }
    v[static_cast<size_t>(flat)] *=
        std::complex<double>(0, -std::sqrt(psi.mu * psi.mu + k2));
  });
  gdetail::transform(v.data(), n, dims, FFTW_BACKWARD);
  for (long i = 0; i < pts; ++i)
    out.comp(0)[i] = v[static_cast<size_t>(i)] / double(pts);
  return out;
}

// Relative residual of the printed continuity identity d/dt rho = div j with
//   rho = (i/2mu)(conj(psi) dt psi - psi conj(dt psi)),
//   j_a = (i/2mu)(psi d_a conj(psi) - conj(psi) d_a psi).
// The time derivative of rho uses a centered difference over +-dt with the
// pair (psi, dt psi) propagated exactly in momentum space; spatial
// derivatives are spectral. Single-component position-space states only.
inline double continuity_residual(const GridState& psi, const GridState& dtpsi,
                                  double dt) {
  gdetail::check_grid(psi);
  if (psi.components != 1 || dtpsi.components != 1)
    throw std::invalid_argument("continuity_residual: single component only");
  if (psi.space != Space::Position || dtpsi.space != Space::Position)
    throw std::invalid_argument("continuity_residual: position space only");
  if (psi.n != dtpsi.n || psi.dims != dtpsi.dims || psi.L != dtpsi.L)
    throw std::invalid_argument("continuity_residual: grid mismatch");
  if (psi.mu <= 0)
    throw std::invalid_argument("continuity_residual: mu must be positive");
  if (dt <= 0)
    throw std::invalid_argument("continuity_residual: dt must be positive");

  const int n = psi.n, dims = psi.dims;
  const long pts = psi.points();
  const double mu = psi.mu;

  // Spectral pair propagation of the second-order equation:
  // psi(t+s) = cos(omega s) psi + sin(omega s)/omega dtpsi,
  // dtpsi(t+s) = -omega sin(omega s) psi + cos(omega s) dtpsi.
  std::vector<std::complex<double>> ps(psi.comp(0), psi.comp(0) + pts);
  std::vector<std::complex<double>> dps(dtpsi.comp(0), dtpsi.comp(0) + pts);
  gdetail::transform(ps.data(), n, dims, FFTW_FORWARD);
  gdetail::transform(dps.data(), n, dims, FFTW_FORWARD);

  auto propagate = [&](double s) {
    std::vector<std::complex<double>> p(static_cast<size_t>(pts)),
        dp(static_cast<size_t>(pts));
    gdetail::for_each_point(
        n, dims, [&](long flat, const std::array<int, 3>& idx) {
          double k2 = 0;
          for (int d = 0; d < dims; ++d) {
            double k = gdetail::freq(idx[static_cast<size_t>(d)], n, psi.L);
            k2 += k * k;
          }
          double om = std::sqrt(mu * mu + k2);
          double cs = std::cos(om * s), sn = std::sin(om * s);
          auto i = static_cast<size_t>(flat);
          p[i] = cs * ps[i] + sn / om * dps[i];
          dp[i] = -om * sn * ps[i] + cs * dps[i];
        });
    gdetail::transform(p.data(), n, dims, FFTW_BACKWARD);
    gdetail::transform(dp.data(), n, dims, FFTW_BACKWARD);
    for (long i = 0; i < pts; ++i) {
      p[static_cast<size_t>(i)] /= double(pts);
      dp[static_cast<size_t>(i)] /= double(pts);
    }
    return std::make_pair(std::move(p), std::move(dp));
  };

  auto rho_of = [&](const std::vector<std::complex<double>>& p,
                    const std::vector<std::complex<double>>& dp) {
    std::vector<double> r(static_cast<size_t>(pts));
    for (long i = 0; i < pts; ++i)
      r[static_cast<size_t>(i)] =
          -std::imag(std::conj(p[static_cast<size_t>(i)]) *
                     dp[static_cast<size_t>(i)]) /
          mu;
    return r;
  };

  auto [pp, dpp] = propagate(dt);
  auto [pm, dpm] = propagate(-dt);
  std::vector<double> rho_p = rho_of(pp, dpp), rho_m = rho_of(pm, dpm);

  // div j at time t, built from spectral first derivatives of psi.
  std::vector<double> divj(static_cast<size_t>(pts), 0.0);
  for (int axis = 0; axis < dims; ++axis) {
    std::vector<std::complex<double>> dpsi(psi.comp(0), psi.comp(0) + pts);
    gdetail::derivative(dpsi.data(), n, dims, psi.L, axis);
    std::vector<std::complex<double>> ja(static_cast<size_t>(pts));
    for (long i = 0; i < pts; ++i)
      ja[static_cast<size_t>(i)] = {
          -std::imag(std::conj(psi.comp(0)[i]) * dpsi[static_cast<size_t>(i)]) /
              mu,
          0.0};
    gdetail::derivative(ja.data(), n, dims, psi.L, axis);
    for (long i = 0; i < pts; ++i)
      divj[static_cast<size_t>(i)] += std::real(ja[static_cast<size_t>(i)]);
  }

  std::vector<std::complex<double>> res(static_cast<size_t>(pts));
  std::vector<std::complex<double>> jv(static_cast<size_t>(pts));
  std::vector<std::complex<double>> rv(static_cast<size_t>(pts));
  std::vector<double> rho0 = rho_of(
      std::vector<std::complex<double>>(psi.comp(0), psi.comp(0) + pts),
      std::vector<std::complex<double>>(dtpsi.comp(0), dtpsi.comp(0) + pts));
  for (long i = 0; i < pts; ++i) {
    auto k = static_cast<size_t>(i);
    double dtrho = (rho_p[k] - rho_m[k]) / (2 * dt);
    res[k] = {dtrho - divj[k], 0.0};
    jv[k] = {divj[k], 0.0};
    rv[k] = {rho0[k], 0.0};
  }
  double den = std::max(gdetail::l2(jv, psi.cell()),
                        mu * gdetail::l2(rv, psi.cell()));
  if (den == 0) return 0.0;
  return gdetail::l2(res, psi.cell()) / den;
}

enum class FvVariant { PrintedOverM, ImagOverM };

struct FvResult {
  GridState phi, chi;
  std::vector<double> rho_fv, rho_kg;
  double constant = 0;   // least-squares c in rho_fv ~ c * rho_kg
  double mismatch = 1;   // relative pointwise deviation from c * rho_kg
  bool proportional = false;
};

// Two-component split phi/chi = (psi +- f dtpsi)/sqrt(2) with f = 1/m as
// printed or f = i/m, reporting whether |phi|^2 - |chi|^2 is pointwise
// proportional to the continuity density rho of the wave equation.
inline FvResult fv_split(const GridState& psi, const GridState& dtpsi,
                         double m, FvVariant variant) {
  gdetail::check_grid(psi);
  if (m <= 0) throw std::invalid_argument("fv_split: m must be positive");
  if (psi.components != 1 || dtpsi.components != 1)
    throw std::invalid_argument("fv_split: single component only");
  if (psi.n != dtpsi.n || psi.dims != dtpsi.dims)
    throw std::invalid_argument("fv_split: grid mismatch");
  const long pts = psi.points();
  std::complex<double> f = variant == FvVariant::PrintedOverM
                               ? std::complex<double>(1.0 / m, 0.0)
                               : std::complex<double>(0.0, 1.0 / m);
  FvResult out;
  out.phi = psi;
  out.chi = psi;
  out.rho_fv.resize(static_cast<size_t>(pts));
  out.rho_kg.resize(static_cast<size_t>(pts));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (long i = 0; i < pts; ++i) {
    std::complex<double> a = psi.comp(0)[i], b = dtpsi.comp(0)[i];
    std::complex<double> ph = (a + f * b) * inv_sqrt2;
    std::complex<double> ch = (a - f * b) * inv_sqrt2;
    out.phi.comp(0)[i] = ph;
    out.chi.comp(0)[i] = ch;
    auto k = static_cast<size_t>(i);
    out.rho_fv[k] = std::norm(ph) - std::norm(ch);
    out.rho_kg[k] = -std::imag(std::conj(a) * b) / m;
  }
  double skk = 0, skf = 0, sff = 0;
  for (long i = 0; i < pts; ++i) {
    auto k = static_cast<size_t>(i);
    skk += out.rho_kg[k] * out.rho_kg[k];
    skf += out.rho_kg[k] * out.rho_fv[k];
    sff += out.rho_fv[k] * out.rho_fv[k];
  }
  out.constant = skk > 0 ? skf / skk : 0.0;
  double mis2 = 0;
  for (long i = 0; i < pts; ++i) {
    auto k = static_cast<size_t>(i);
    double d = out.rho_fv[k] - out.constant * out.rho_kg[k];
    mis2 += d * d;
  }
  out.mismatch = sff > 0 ? std::sqrt(mis2 / sff) : 0.0;
  out.proportional =
      sff > 1e-26 * std::max(1.0, skk) && out.mismatch < 1e-10;
  return out;
}

// Eigenvalues of the 4x4 matrix 2 rho1 (S.p) + m rho3 with S = sigma/2
// blocks, i.e. [[m, sigma.p], [sigma.p, -m]]. Returned ascending; must be
// {-E, -E, +E, +E} with E = sqrt(m^2 + |p|^2).
inline std::array<double, 4> dirac_spectrum(const std::array<double, 3>& p,
                                            double m) {
  if (m < 0) throw std::invalid_argument("dirac_spectrum: m must be >= 0");
  using CM = Eigen::Matrix4cd;
  CM H = CM::Zero();
  Eigen::Matrix2cd sp;
  sp << p[2], std::complex<double>(p[0], -p[1]),
      std::complex<double>(p[0], p[1]), -p[2];
  H.block<2, 2>(0, 0) = m * Eigen::Matrix2cd::Identity();
  H.block<2, 2>(2, 2) = -m * Eigen::Matrix2cd::Identity();
  H.block<2, 2>(0, 2) = sp;
  H.block<2, 2>(2, 0) = sp;
  Eigen::SelfAdjointEigenSolver<CM> solver(H);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[static_cast<size_t>(i)] = solver.eigenvalues()[i];
  return out;
}

struct BoostVerdict {
  double rel_err_p1 = 0;
  double rel_err_p0 = 0;
  double max_rel_err = 0;
};

namespace gdetail {

// Spectral rigid shift psi(theta) -> psi(theta + a) on a 1-D grid.
inline std::vector<std::complex<double>> shift_1d(
    const std::vector<std::complex<double>>& in, int n, double L, double a) {
  std::vector<std::complex<double>> v = in;
  if (a == 0) return v;
  transform(v.data(), n, 1, FFTW_FORWARD);
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] *= std::polar(1.0, freq(i, n, L) * a);
  transform(v.data(), n, 1, FFTW_BACKWARD);
  for (auto& x : v) x /= double(n);
  return v;
}

}  // namespace gdetail

// 1-D boost covariance on the rapidity grid: with p1 = mu sinh(theta) and
// p0 = mu cosh(theta), the boost by rapidity phi acts as the rigid shift
// psi(theta) -> psi(theta + phi) (generator K1 = i d/dtheta), and conjugation
// must give U P1 U^-1 = cosh(phi) P1 + sinh(phi) P0 and the same with
// P1 <-> P0. Reports the relative l2 errors of both identities.
inline BoostVerdict boost_action_1d(double phi, const GridState& psi) {
  gdetail::check_grid(psi);
  if (psi.dims != 1 || psi.components != 1)
    throw std::invalid_argument("boost_action_1d: one-dimensional single-component state expected");
  const int n = psi.n;
  const double L = psi.L, mu = psi.mu;
  if (mu <= 0) throw std::invalid_argument("boost_action_1d: mu must be positive");

  std::vector<std::complex<double>> base(psi.comp(0), psi.comp(0) + n);
  double peak = 0;
  for (const auto& v : base) peak = std::max(peak, std::abs(v));
  if (peak == 0) throw std::invalid_argument("boost_action_1d: zero state");
  int margin = std::max(4, static_cast<int>(std::ceil(std::abs(phi) / psi.step())) + 4);
  if (2 * margin >= n)
    throw std::invalid_argument("boost_action_1d: grid too small for the requested shift");
  for (int i = 0; i < margin; ++i) {
    if (std::abs(base[static_cast<size_t>(i)]) > 1e-12 * peak ||
        std::abs(base[static_cast<size_t>(n - 1 - i)]) > 1e-12 * peak)
      throw std::invalid_argument(
          "boost_action_1d: wavepacket support reaches the grid boundary");
  }

  auto mult = [&](const std::vector<std::complex<double>>& v, bool sinh_branch) {
    std::vector<std::complex<double>> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double th = psi.coord(i);
      double w = sinh_branch ? mu * std::sinh(th) : mu * std::cosh(th);
      out[static_cast<size_t>(i)] = w * v[static_cast<size_t>(i)];
    }
    return out;
  };
  auto conjugated = [&](bool sinh_branch) {
    auto v = gdetail::shift_1d(base, n, L, -phi);  // U^-1
    v = mult(v, sinh_branch);                      // P
    return gdetail::shift_1d(v, n, L, phi);        // U
  };
  auto combine = [&](bool sinh_first) {
    auto a = mult(base, true), b = mult(base, false);
    std::vector<std::complex<double>> out(static_cast<size_t>(n));
    double ch = std::cosh(phi), sh = std::sinh(phi);
    for (int i = 0; i < n; ++i) {
      auto k = static_cast<size_t>(i);
      out[k] = sinh_first ? ch * a[k] + sh * b[k] : ch * b[k] + sh * a[k];
    }
    return out;
  };

  auto rel = [&](const std::vector<std::complex<double>>& got,
                 const std::vector<std::complex<double>>& want) {
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
      auto k = static_cast<size_t>(i);
      num += std::norm(got[k] - want[k]);
      den += std::norm(want[k]);
    }
    return std::sqrt(num / den);
  };

  BoostVerdict v;
  v.rel_err_p1 = rel(conjugated(true), combine(true));
  v.rel_err_p0 = rel(conjugated(false), combine(false));
  v.max_rel_err = std::max(v.rel_err_p1, v.rel_err_p0);
  return v;
}

namespace gdetail {

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

inline std::complex<double> gauss_to_complex(const GaussRat& g) {
  return {rat_to_double(g.re), rat_to_double(g.im)};
}

inline std::complex<double> eval_poly(const Poly& p,
                                      const std::array<double, 4>& v) {
  std::complex<double> s = 0;
  for (const auto& [m, c] : p.terms()) {
    double mono = 1;
    for (int k = 0; k < 4; ++k)
      for (int e = 0; e < m[static_cast<size_t>(k)]; ++e)
        mono *= v[static_cast<size_t>(k)];
    s += gauss_to_complex(c) * mono;
  }
  return s;
}

inline std::complex<double> eval_scalar(const OnShellScalar& s,
                                        const std::array<double, 4>& v,
                                        double p0) {
  std::complex<double> num =
      eval_poly(s.even(), v) + eval_poly(s.odd(), v) * p0;
  std::complex<double> den = 1;
  for (const auto& [f, mult] : s.den()) {
    std::complex<double> fv = eval_poly(f, v);
    for (int e = 0; e < mult; ++e) den *= fv;
  }
  if (std::abs(den) < 1e-300)
    throw std::domain_error("grid: operator coefficient denominator vanishes");
  return num / den;
}

}  // namespace gdetail

// Applies the exact normal form of a symbolic operator to a momentum-space
// grid state: per term, parity acts by index reversal, derivatives are
// spectral, and the matrix coefficient is evaluated numerically on shell
// (p0 = +sqrt(p^2 + mu^2)). Anti-linear operators conjugate the input first.
inline GridState apply_operator(const DiffOperator& op, const GridState& in) {
  gdetail::check_grid(in);
  if (in.space != Space::Momentum)
    throw std::invalid_argument("apply_operator: momentum-space state expected");
  if (op.dim() != in.components)
    throw std::invalid_argument("apply_operator: component count mismatch");
  const int n = in.n, dims = in.dims, comps = in.components;
  const long pts = in.points();

  std::vector<std::array<double, 4>> at(static_cast<size_t>(pts),
                                        {0, 0, 0, in.mu});
  std::vector<double> p0(static_cast<size_t>(pts));
  std::vector<long> flip(static_cast<size_t>(pts));
  gdetail::for_each_point(n, dims, [&](long flat, const std::array<int, 3>& idx) {
    double p2 = 0;
    long f = 0;
    for (int d = 0; d < dims; ++d) {
      double p = in.coord(idx[static_cast<size_t>(d)]);
      at[static_cast<size_t>(flat)][static_cast<size_t>(d)] = p;
      p2 += p * p;
      f = f * n + (n - idx[static_cast<size_t>(d)]) % n;
    }
    p0[static_cast<size_t>(flat)] = std::sqrt(in.mu * in.mu + p2);
    flip[static_cast<size_t>(flat)] = f;
  });

  std::vector<std::vector<std::complex<double>>> input(
      static_cast<size_t>(comps));
  for (int c = 0; c < comps; ++c) {
    input[static_cast<size_t>(c)].assign(in.comp(c), in.comp(c) + pts);
    if (op.antilinear())
      for (auto& z : input[static_cast<size_t>(c)]) z = std::conj(z);
  }

  GridState out = make_grid(n, in.L, dims, comps, in.mu, Space::Momentum);
  for (const auto& [key, coeff] : op.terms()) {
    std::vector<std::vector<std::complex<double>>> field = input;
    if (key.parity) {
      for (int c = 0; c < comps; ++c) {
        std::vector<std::complex<double>> rev(static_cast<size_t>(pts));
        for (long i = 0; i < pts; ++i)
          rev[static_cast<size_t>(flip[static_cast<size_t>(i)])] =
              field[static_cast<size_t>(c)][static_cast<size_t>(i)];
        field[static_cast<size_t>(c)] = std::move(rev);
      }
    }
    if (key.order() > 0) {
      for (int c = 0; c < comps; ++c) {
        auto& v = field[static_cast<size_t>(c)];
        gdetail::transform(v.data(), n, dims, FFTW_FORWARD);
        gdetail::for_each_point(
            n, dims, [&](long flat, const std::array<int, 3>& idx) {
              std::complex<double> m = 1;
              for (int d = 0; d < dims; ++d) {
                double k = gdetail::dfreq(idx[static_cast<size_t>(d)], n, in.L);
                for (int e = 0; e < key.d[static_cast<size_t>(d)]; ++e)
                  m *= std::complex<double>(0.0, k);
              }
              v[static_cast<size_t>(flat)] *= m;
            });
        gdetail::transform(v.data(), n, dims, FFTW_BACKWARD);
        for (auto& z : v) z /= double(pts);
      }
    }
    for (int r = 0; r < comps; ++r) {
      for (int c = 0; c < comps; ++c) {
        const OnShellScalar& entry = coeff.at(r, c);
        if (entry.is_zero()) continue;
        std::complex<double>* dst = out.comp(r);
        const auto& src = field[static_cast<size_t>(c)];
        for (long i = 0; i < pts; ++i)
          dst[i] += gdetail::eval_scalar(entry, at[static_cast<size_t>(i)],
                                         p0[static_cast<size_t>(i)]) *
                    src[static_cast<size_t>(i)];
      }
    }
  }
  return out;
}

inline std::function<GridState(const GridState&)> numeric_operator_sample(
    const DiffOperator& op) {
  return [op](const GridState& s) { return apply_operator(op, s); };
}

// Sup-norm deviation between two operator applications on the same test
// state, relative to the larger result.
inline double cross_validate(const DiffOperator& a, const DiffOperator& b,
                             const GridState& test) {
  GridState ra = apply_operator(a, test);
  GridState rb = apply_operator(b, test);
  double dev = 0, scale = 0;
  for (size_t i = 0; i < ra.data.size(); ++i) {
    dev = std::max(dev, std::abs(ra.data[i] - rb.data[i]));
    scale = std::max({scale, std::abs(ra.data[i]), std::abs(rb.data[i])});
  }
  return scale > 0 ? dev / scale : 0.0;
}

// Deviation between the composed normal form and sequential application.
inline double cross_validate_compose(const DiffOperator& a,
                                     const DiffOperator& b,
                                     const GridState& test) {
  GridState lhs = apply_operator(compose(a, b), test);
  GridState rhs = apply_operator(a, apply_operator(b, test));
  double dev = 0, scale = 0;
  for (size_t i = 0; i < lhs.data.size(); ++i) {
    dev = std::max(dev, std::abs(lhs.data[i] - rhs.data[i]));
    scale = std::max({scale, std::abs(lhs.data[i]), std::abs(rhs.data[i])});
  }
  return scale > 0 ? dev / scale : 0.0;
}

// Worst compose-vs-sequential deviation over `trials` pseudo-random pairs of
// order <= 1 two-component operators (small-integer linear coefficients with
// a p0-odd part, optional derivative term, optional parity or conjugation
// factor) applied to a boundary-avoiding momentum Gaussian. The mass sets
// the convergence floor: sequential application transforms p0-weighted
// fields, whose spectra decay like exp(-mu k) off the sqrt branch point.
inline double randomized_compose_scan(int n, double L, double mu, double sigma,
                                      int trials, uint32_t seed) {
  GridState psi = gaussian_packet(n, L, 3, 2, mu, Space::Momentum,
                                  {0.3, -0.1, 0.2}, sigma, {0, 0, 0});
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_int_distribution<int> coin(0, 1);

  auto random_coeff = [&]() {
    Poly even = Poly(GaussRat(small(rng))) +
                Poly::var(axis(rng)) * Poly(GaussRat(small(rng)));
    Poly odd = Poly(GaussRat(Rat(0), Rat(small(rng))));
    return OnShellScalar(even, odd, {});
  };
  auto random_op = [&]() {
    bool anti = coin(rng) == 1;
    Coeff m(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m.at(r, c) = random_coeff();
    DiffOperator base = anti ? compose(DiffOperator::mult(m),
                                       DiffOperator::conj_op(2))
                             : DiffOperator::mult(m);
    if (coin(rng) == 1)
      base = base + compose(DiffOperator::mult(coeff_from_qmat(
                                qmat2(GaussRat(small(rng)), GaussRat(0),
                                      GaussRat(0), GaussRat(small(rng))))),
                            compose(DiffOperator::deriv(axis(rng), 2),
                                    anti ? DiffOperator::conj_op(2)
                                         : DiffOperator::identity(2)));
    if (coin(rng) == 1) base = compose(base, DiffOperator::parity_op(2));
    return base;
  };

  double worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    DiffOperator a = random_op();
    DiffOperator b = random_op();
    worst = std::max(worst, cross_validate_compose(a, b, psi));
  }
  return worst;
}

// Inner product with the invariant measure weight 1/p0 on momentum grids.
inline std::complex<double> weighted_inner(const GridState& a,
                                           const GridState& b) {
  if (a.n != b.n || a.dims != b.dims || a.components != b.components)
    throw std::invalid_argument("weighted_inner: grid mismatch");
  const long pts = a.points();
  std::complex<double> s = 0;
  gdetail::for_each_point(
      a.n, a.dims, [&](long flat, const std::array<int, 3>& idx) {
        double p2 = 0;
        for (int d = 0; d < a.dims; ++d) {
          double p = a.coord(idx[static_cast<size_t>(d)]);
          p2 += p * p;
        }
        double w = 1.0 / std::sqrt(a.mu * a.mu + p2);
        for (int c = 0; c < a.components; ++c)
          s += std::conj(a.comp(c)[flat]) * b.comp(c)[flat] * w;
      });
  (void)pts;
  return s * a.cell();
}

// Raw snapshot dump: magic "PLAB", u32 version 1, u64 {n, components,
// space tag (0 position, 1 momentum), snapshot count}, then per snapshot the
// component-major f64 (re, im) samples. Grids are three-dimensional.
inline void write_snapshots(const std::string& path,
                            const TrajectoryRecord& rec) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_snapshots: cannot open " + path);
  f.write("PLAB", 4);
  uint32_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), sizeof version);
  uint64_t n = 0, comps = 0, tag = 0, count = rec.snapshots.size();
  if (count > 0) {
    n = static_cast<uint64_t>(rec.snapshots[0].n);
    comps = static_cast<uint64_t>(rec.snapshots[0].components);
    tag = rec.snapshots[0].space == Space::Momentum ? 1 : 0;
  }
  for (uint64_t v : {n, comps, tag, count})
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
  for (const GridState& s : rec.snapshots) {
    for (const auto& z : s.data) {
      double re = z.real(), im = z.imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  if (!f) throw std::runtime_error("write_snapshots: write failed " + path);
}

// Reduced observables as CSV: time, total norm, per-component norms, and the
// mean momentum per axis.
inline std::string observables_csv(const TrajectoryRecord& rec) {
  std::string out;
  int comps = rec.component_norms.empty()
                  ? 0
                  : static_cast<int>(rec.component_norms[0].size());
  out += "time,norm";
  for (int c = 0; c < comps; ++c) out += ",norm_c" + std::to_string(c);
  out += ",mean_p1,mean_p2,mean_p3\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (size_t i = 0; i < rec.times.size(); ++i) {
    put(rec.times[i]);
    out += ',';
    put(rec.norms[i]);
    for (int c = 0; c < comps; ++c) {
      out += ',';
      put(rec.component_norms[i][static_cast<size_t>(c)]);
    }
    for (int d = 0; d < 3; ++d) {
      out += ',';
      put(rec.mean_p[i][static_cast<size_t>(d)]);
    }
    out += '\n';
  }
  return out;
}

inline void write_observables_csv(const std::string& path,
                                  const TrajectoryRecord& rec) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_observables_csv: cannot open " + path);
  f << observables_csv(rec);
  if (!f)
    throw std::runtime_error("write_observables_csv: write failed " + path);
}

}  // namespace plab
