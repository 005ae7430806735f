#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plab/catalog.hpp"
#include "plab/grid.hpp"
#include "plab/position.hpp"
#include "plab/report.hpp"
#include "plab/verify.hpp"

// Command layer: reproducible runs over the exact suites, the position scans
// and the numeric laboratory. Shared by the CLI front end and the tests, so
// outputs stay byte-identical between the two.

namespace plab {

struct RunConfig {
  std::string command;
  std::string spin = "1/2";
  std::string rep = "all";
  std::string suite = "all";
  std::string mass = "symbolic";
  std::string format;  // empty: json, except evolve which reports csv
  std::string theory = "T1";
  int n = 64;
  double box = 10.0;
  double dt = 1e-3;
  int steps = 1000;
  int stride = 0;
  double sigma = 1.0;
  double k1 = 1.0;
  std::string out;
  std::string csv;
  std::string dump;
};

inline HalfInt parse_spin(const std::string& s) {
  if (s == "0") return HalfInt{0};
  if (s == "1/2" || s == "0.5") return HalfInt{1};
  throw std::invalid_argument(
      "the exact catalog covers spin 0 and 1/2; pass --spin 0, 0.5 or 1/2 "
      "(got '" + s + "')");
}

inline void require_symbolic_mass(const std::string& m) {
  if (m != "symbolic")
    throw std::invalid_argument(
        "exact suites treat the mass as a symbol and hold for every value at "
        "once; drop --mass (got '" + m + "')");
}

inline double parse_numeric_mass(const std::string& m) {
  if (m == "symbolic")
    throw std::invalid_argument(
        "numeric runs need a concrete mass; pass --mass <positive float>");
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(m, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != m.size() || !(v > 0))
    throw std::invalid_argument("--mass must be a positive float (got '" + m +
                                "')");
  return v;
}

inline Theory parse_theory(const std::string& t) {
  if (t == "T1") return Theory::T1;
  if (t == "T2") return Theory::T2;
  if (t == "T3") return Theory::T3;
  if (t == "T4") return Theory::T4;
  throw std::invalid_argument("--theory must be one of T1 T2 T3 T4 (got '" +
                              t + "')");
}

// PLAB_THREADS caps parallelism over independent suite items; unset or
// invalid values fall back to the hardware concurrency.
inline int thread_cap() {
  if (const char* env = std::getenv("PLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Order-preserving parallel map; results are assembled in input order so
// downstream reports stay deterministic.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, F&& f)
    -> std::vector<decltype(f(items[0]))> {
  using R = decltype(f(items[0]));
  std::vector<R> out(items.size());
  int cap = std::min<int>(thread_cap(), static_cast<int>(items.size()));
  if (cap <= 1) {
    for (size_t i = 0; i < items.size(); ++i) out[i] = f(items[i]);
    return out;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (int t = 0; t < cap; ++t)
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < items.size();) {
        try {
          out[i] = f(items[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

inline std::vector<Representation> catalog_for(HalfInt s) {
  std::vector<Representation> v = enumerate_octet(s);
  for (DoubledT t : doubled_T_variants()) v.push_back(rep_doubled(s, t));
  if (s.twice == 0) {
    v.push_back(rep_quad(1));
    v.push_back(rep_quad(-1));
  }
  return v;
}

inline std::vector<Representation> select_reps(const std::string& sel,
                                               HalfInt s) {
  std::vector<Representation> all = catalog_for(s);
  if (sel == "all") return all;
  for (auto& r : all)
    if (r.label == sel) return {std::move(r)};
  std::string known;
  for (const auto& r : all) known += (known.empty() ? "" : " ") + r.label;
  throw std::invalid_argument("unknown representation '" + sel +
                              "' at spin " + to_string(s) + "; one of: " +
                              known + " or all");
}

inline int expected_commutant_dim(const Representation& r) {
  if (r.class_id == "DoubledUp")
    return (r.label == "Dbl[T=id]" || r.label == "Dbl[T=rho1]") ? 2 : 1;
  if (r.class_id == "QuadSym") return r.expected.S2 > 0 ? 3 : 1;
  return 1;
}

inline std::vector<std::string> suites_for(const Representation& r) {
  std::vector<std::string> v{"lie", "casimir", "discrete", "commutant",
                             "no-time"};
  if (r.blocks == 1) v.push_back("radial");
  if (r.class_id == "SymCanonical") v.push_back("shift");
  return v;
}

inline CheckReport run_suite(const Representation& r,
                             const std::string& name) {
  if (name == "lie") return check_lie_algebra(r);
  if (name == "casimir") return check_casimirs(r);
  if (name == "discrete") return check_discrete(r);
  if (name == "commutant")
    return check_commutant(r, expected_commutant_dim(r));
  if (name == "no-time") return no_time_operator(r);
  if (name == "radial") {
    if (r.blocks != 1)
      throw std::invalid_argument(
          "the radial suite needs a single-shell representation; " + r.label +
          " has " + std::to_string(r.blocks) + " blocks");
    return radial_profile_uniqueness(r);
  }
  if (name == "shift") {
    if (r.class_id != "SymCanonical")
      throw std::invalid_argument(
          "the shift suite scans the canonical two-shell family; " + r.label +
          " is " + r.class_id);
    return shift_family_scan(r);
  }
  std::string avail;
  for (const auto& s : suites_for(r)) avail += (avail.empty() ? "" : " ") + s;
  throw std::invalid_argument("unknown suite '" + name + "'; one of: " +
                              avail + " or all");
}

inline std::vector<CheckReport> run_suites(const Representation& r,
                                           const std::string& suite) {
  std::vector<CheckReport> out;
  if (suite == "all") {
    for (const auto& name : suites_for(r)) out.push_back(run_suite(r, name));
  } else {
    out.push_back(run_suite(r, suite));
  }
  return out;
}

// ---------------------------------------------------------------------------
// command payloads

struct CommandResult {
  ordered_json json;
  bool ok = true;
  std::string csv_text;  // set by commands with a CSV rendering
};

inline CommandResult cmd_catalog(const RunConfig& cfg) {
  require_symbolic_mass(cfg.mass);
  HalfInt s = parse_spin(cfg.spin);
  std::vector<Representation> reps = catalog_for(s);
  std::vector<int> dims =
      parallel_map(reps, [](const Representation& r) {
        return commutant_dimension(r);
      });
  CommandResult res;
  res.json["command"] = "catalog";
  res.json["spin"] = to_string(s);
  ordered_json list = ordered_json::array();
  for (size_t i = 0; i < reps.size(); ++i) {
    const Representation& r = reps[i];
    int expect = expected_commutant_dim(r);
    if (dims[i] != expect) res.ok = false;
    list.push_back(ordered_json{{"label", r.label},
                                {"class", r.class_id},
                                {"spin", to_string(r.s)},
                                {"blocks", r.blocks},
                                {"dim", r.dim},
                                {"T_antilinear", r.T.antilinear()},
                                {"S_antilinear", r.S.antilinear()},
                                {"T2", r.expected.T2},
                                {"S2", r.expected.S2},
                                {"omega", r.expected.omega},
                                {"spectrum", to_string(r.expected.spectrum)},
                                {"commutant_dim", dims[i]},
                                {"commutant_expected", expect}});
  }
  res.json["reps"] = std::move(list);
  res.json["ok"] = res.ok;
  return res;
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
  require_symbolic_mass(cfg.mass);
  HalfInt s = parse_spin(cfg.spin);
  std::vector<Representation> reps = select_reps(cfg.rep, s);
  if (reps.size() > 1 && cfg.suite != "all") {
    // Validate the suite name against every selected class up front.
    for (const auto& r : reps) {
      auto avail = suites_for(r);
      if (std::find(avail.begin(), avail.end(), cfg.suite) == avail.end())
        throw std::invalid_argument(
            "suite '" + cfg.suite + "' is not defined for " + r.label +
            "; select the representation explicitly or use --suite all");
    }
  }
  std::vector<std::vector<CheckReport>> grouped =
      parallel_map(reps, [&](const Representation& r) {
        return run_suites(r, cfg.suite);
      });
  CommandResult res;
  res.json["command"] = "verify";
  res.json["spin"] = to_string(s);
  res.json["rep"] = cfg.rep;
  res.json["suite"] = cfg.suite;
  ordered_json reports = ordered_json::array();
  for (const auto& group : grouped)
    for (const auto& rep : group) {
      if (!rep.ok()) res.ok = false;
      reports.push_back(rep);
    }
  res.json["reports"] = std::move(reports);
  res.json["ok"] = res.ok;
  return res;
}

inline CommandResult cmd_position_scan(const RunConfig& cfg) {
  require_symbolic_mass(cfg.mass);
  HalfInt s = parse_spin(cfg.spin);
  std::vector<Representation> octet = enumerate_octet(s);
  std::vector<JmVerdict> verdicts = jm_scan(s);
  CheckReport scan = jm_scan_report(s);
  CheckReport twist = check_phase_twist(s);
  CommandResult res;
  res.json["command"] = "position-scan";
  res.json["spin"] = to_string(s);
  ordered_json vj = ordered_json::array();
  ordered_json admitting = ordered_json::array();
  ordered_json reports = ordered_json::array({scan, twist});
  res.ok = scan.ok() && twist.ok();
  for (size_t i = 0; i < verdicts.size(); ++i) {
    const JmVerdict& v = verdicts[i];
    ordered_json e{{"label", v.label}, {"admits", v.admits}, {"note", v.note}};
    if (v.admits) {
      admitting.push_back(v.label);
      ordered_json q = ordered_json::array();
      for (size_t j = 0; j < 3; ++j) q.push_back(to_string(v.Q[j]));
      e["position"] = std::move(q);
      // The per-axiom breakdown for the admitted position.
      CheckReport pos = check_position(octet[i], v.Q, v.label);
      CheckReport bst = check_boost_compat(octet[i], v.Q, v.label);
      res.ok = res.ok && pos.ok() && bst.ok();
      reports.push_back(pos);
      reports.push_back(bst);
    }
    vj.push_back(std::move(e));
  }
  res.json["verdicts"] = std::move(vj);
  res.json["admitting"] = std::move(admitting);
  res.json["reports"] = std::move(reports);
  res.json["ok"] = res.ok;
  return res;
}

inline CommandResult cmd_commutant(const RunConfig& cfg) {
  require_symbolic_mass(cfg.mass);
  std::vector<Representation> reps = full_catalog();
  std::vector<int> dims =
      parallel_map(reps, [](const Representation& r) {
        return commutant_dimension(r);
      });
  CommandResult res;
  res.json["command"] = "commutant";
  ordered_json entries = ordered_json::array();
  for (size_t i = 0; i < reps.size(); ++i) {
    int expect = expected_commutant_dim(reps[i]);
    bool ok = dims[i] == expect;
    if (!ok) res.ok = false;
    entries.push_back(ordered_json{{"label", reps[i].label},
                                   {"spin", to_string(reps[i].s)},
                                   {"computed", dims[i]},
                                   {"expected", expect},
                                   {"ok", ok}});
  }
  res.json["entries"] = std::move(entries);
  res.json["ok"] = res.ok;
  return res;
}

namespace rdetail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace rdetail

inline CommandResult cmd_evolve(const RunConfig& cfg) {
  Theory th = parse_theory(cfg.theory);
  double mu = parse_numeric_mass(cfg.mass);
  if (cfg.n < 2 || (cfg.n & (cfg.n - 1)) != 0)
    throw std::invalid_argument("--n must be a power of two >= 2 (got " +
                                std::to_string(cfg.n) + ")");
  if (!(cfg.box > 0)) throw std::invalid_argument("--box must be positive");
  if (!(cfg.dt > 0)) throw std::invalid_argument("--dt must be positive");
  if (cfg.steps < 1) throw std::invalid_argument("--steps must be >= 1");
  if (cfg.stride < 0) throw std::invalid_argument("--stride must be >= 0");
  if (!(cfg.sigma > 0)) throw std::invalid_argument("--sigma must be positive");
  if (cfg.box < 4 * cfg.sigma)
    throw std::invalid_argument(
        "the packet must sit at least four standard deviations inside the "
        "box; raise --box above " + rdetail::fmt(4 * cfg.sigma) +
        " or shrink --sigma");

  int comps = theory_components(th);
  GridState psi0 = gaussian_packet(cfg.n, cfg.box, 3, comps, mu,
                                   Space::Position, {0, 0, 0}, cfg.sigma,
                                   {cfg.k1, 0, 0});
  TrajectoryRecord rec = evolve(th, psi0, cfg.dt, cfg.steps, cfg.stride);

  double drift = 0;
  for (double nn : rec.norms) drift = std::max(drift, std::abs(nn - rec.norms[0]));
  double cdrift = 0;
  for (const auto& row : rec.component_norms)
    for (int c = 0; c < comps; ++c)
      cdrift = std::max(cdrift,
                        std::abs(row[static_cast<size_t>(c)] -
                                 rec.component_norms[0][static_cast<size_t>(c)]));

  CheckReport report("evolve", to_string(th));
  report.add("norm.drift", "the total norm drifts by less than 1e-10",
             drift < 1e-10, true, "measured " + rdetail::fmt(drift));
  if (comps == 2)
    report.add("norm.component",
               "each shell component conserves its own norm to 1e-10",
               cdrift < 1e-10, true, "measured " + rdetail::fmt(cdrift));
  bool monotone = true;
  for (size_t i = 1; i < rec.times.size(); ++i)
    if (!(rec.times[i] > rec.times[i - 1])) monotone = false;
  report.add("times.monotone", "time stamps increase strictly", monotone);

  CommandResult res;
  res.json["command"] = "evolve";
  res.json["theory"] = to_string(th);
  res.json["n"] = cfg.n;
  res.json["box"] = cfg.box;
  res.json["dt"] = cfg.dt;
  res.json["steps"] = cfg.steps;
  res.json["stride"] = cfg.stride;
  res.json["sigma"] = cfg.sigma;
  res.json["k1"] = cfg.k1;
  res.json["mass"] = mu;
  ordered_json obs;
  obs["norm_initial"] = rec.norms.front();
  obs["norm_final"] = rec.norms.back();
  obs["norm_drift"] = drift;
  if (comps == 2) obs["component_drift"] = cdrift;
  ordered_json mp = ordered_json::array();
  for (int d = 0; d < 3; ++d)
    mp.push_back(rec.mean_p.back()[static_cast<size_t>(d)]);
  obs["mean_p_final"] = std::move(mp);
  res.json["observables"] = std::move(obs);

  ordered_json artifacts;
  if (!cfg.csv.empty()) {
    write_observables_csv(cfg.csv, rec);
    artifacts["csv"] = cfg.csv;
  }
  if (!cfg.dump.empty()) {
    write_snapshots(cfg.dump, rec);
    artifacts["snapshots"] = cfg.dump;
  }
  res.json["artifacts"] = std::move(artifacts);
  res.ok = report.ok();
  res.json["report"] = report;
  res.json["ok"] = res.ok;
  res.csv_text = observables_csv(rec);
  return res;
}

// ---------------------------------------------------------------------------
// numeric baselines: every tolerance quoted by the lab is fixed by running
// the stated oracle and freezing the measurement here and in the checked-in
// baseline file.

namespace rdetail {

struct Baseline {
  std::string id;
  ordered_json params;
  double measured = 0;
  double bound = 0;
  std::string sense = "<=";  // "<=" upper bound, ">=" lower bound

  bool within() const {
    return sense == ">=" ? measured >= bound : measured <= bound;
  }
};

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  void reset() { t0 = std::chrono::steady_clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  }
};

inline void push(ordered_json& entries, bool& ok, const Baseline& b) {
  entries.push_back(ordered_json{{"id", b.id},
                                 {"params", b.params},
                                 {"measured", b.measured},
                                 {"sense", b.sense},
                                 {"bound", b.bound},
                                 {"within", b.within()}});
  if (!b.within()) ok = false;
}

inline double max_dev(const GridState& a, const GridState& b) {
  double dev = 0;
  for (size_t i = 0; i < a.data.size(); ++i)
    dev = std::max(dev, std::abs(a.data[i] - b.data[i]));
  return dev;
}

}  // namespace rdetail

inline ordered_json numeric_baselines(
    bool* all_ok = nullptr,
    const std::function<void(const std::string&, double)>& timing = {}) {
  using rdetail::Baseline;
  ordered_json entries = ordered_json::array();
  bool ok = true;
  const double mu = 1.0;
  rdetail::Stopwatch sw;
  auto push = [&](const Baseline& b) {
    rdetail::push(entries, ok, b);
    if (timing) timing(b.id, sw.seconds());
  };

  // Norm conservation, all four theories, the acceptance grid.
  for (Theory th : {Theory::T1, Theory::T2, Theory::T3, Theory::T4}) {
    sw.reset();
    const int n = 64, steps = 1000;
    const double L = 10.0, dt = 1e-3;
    int comps = theory_components(th);
    GridState psi = gaussian_packet(n, L, 3, comps, mu, Space::Position,
                                    {0.5, -0.3, 0.0}, 1.0, {1.0, 0.0, 0.0});
    TrajectoryRecord rec = evolve(th, psi, dt, steps);
    double drift = 0;
    for (double nn : rec.norms)
      drift = std::max(drift, std::abs(nn - rec.norms[0]));
    ordered_json params{{"n", n}, {"box", L}, {"dt", dt},     {"steps", steps},
                        {"sigma", 1.0},      {"mass", mu}};
    push(Baseline{"evolve.norm_drift." + to_string(th), params, drift, 1e-10,
                  "<="});
    if (comps == 2) {
      double cdrift = 0;
      for (const auto& row : rec.component_norms)
        for (int c = 0; c < comps; ++c)
          cdrift = std::max(
              cdrift, std::abs(row[static_cast<size_t>(c)] -
                               rec.component_norms[0][static_cast<size_t>(c)]));
      push(Baseline{"evolve.component_drift." + to_string(th), params, cdrift,
                    1e-10, "<="});
    }
  }

  // Plane-wave eigenmode phases.
  {
    const int n = 64, steps = 10;
    const double L = 16.0, dt = 1e-2;
    GridState w = plane_wave(n, L, 1, 1, mu, Space::Position, {8, 0, 0});
    double k = M_PI * 8 / L;
    double omega = std::sqrt(mu * mu + k * k);
    for (Theory th : {Theory::T1, Theory::T2}) {
      sw.reset();
      TrajectoryRecord rec = evolve(th, w, dt, steps);
      double sign = th == Theory::T1 ? -1.0 : 1.0;
      std::complex<double> phase = std::polar(1.0, sign * omega * dt * steps);
      const GridState& fin = rec.snapshots.back();
      double dev = 0;
      for (long i = 0; i < w.points(); ++i)
        dev = std::max(dev,
                       std::abs(fin.comp(0)[i] - phase * w.comp(0)[i]));
      push(Baseline{"evolve.eigenmode_phase." + to_string(th),
                    ordered_json{{"n", n}, {"box", L}, {"dt", dt}, {"steps",
                    steps}, {"mode", 8}}, dev, 1e-12, "<="});
    }
  }

  // Exact compositionality of the multiplier step.
  {
    sw.reset();
    GridState psi = gaussian_packet(16, 8.0, 3, 2, mu, Space::Position,
                                    {0, 0, 0}, 1.0, {0.5, 0, 0});
    TrajectoryRecord two = evolve(Theory::T3, psi, 1e-2, 2);
    TrajectoryRecord one = evolve(Theory::T3, psi, 2e-2, 1);
    push(Baseline{"evolve.step_composition.T3", ordered_json{{"n", 16}, {"box",
                  8.0}, {"dt", 1e-2}}, rdetail::max_dev(two.snapshots.back(),
                  one.snapshots.back()), 1e-13, "<="});
  }

  // Wave-equation residual and its dt order.
  {
    sw.reset();
    const int n = 64;
    const double L = 10.0;
    GridState psi = gaussian_packet(n, L, 3, 1, mu, Space::Position,
                                    {0, 0, 0}, 1.2, {0.8, 0, 0});
    auto residual_at = [&](double dt) {
      TrajectoryRecord rec = evolve(Theory::T1, psi, dt, 2, 1);
      return kg_residual(rec);
    };
    double r1 = residual_at(2e-3);
    double r2 = residual_at(1e-3);
    ordered_json params{{"n", n}, {"box", L}, {"sigma", 1.2}, {"mass", mu}};
    params["dt"] = 1e-3;
    push(Baseline{"kg.residual.T1", params, r2, 1e-4, "<="});
    push(Baseline{"kg.order.T1", params, std::log2(r1 / r2), 1.9, ">="});
    GridState pair = gaussian_packet(n, L, 3, 2, mu, Space::Position,
                                     {0, 0, 0}, 1.2, {0.8, 0, 0});
    TrajectoryRecord rec3 = evolve(Theory::T3, pair, 1e-3, 2, 1);
    push(Baseline{"kg.residual.T3", params, kg_residual(rec3), 1e-4, "<="});
  }

  // Continuity identity.
  {
    sw.reset();
    const int n = 64;
    const double L = 8.0;
    GridState w1 = plane_wave(n, L, 3, 1, mu, Space::Position, {1, 0, 0});
    GridState w2 = plane_wave(n, L, 3, 1, mu, Space::Position, {2, 1, 0});
    double o1 = std::sqrt(mu * mu + std::pow(M_PI / L, 2));
    double o2 = std::sqrt(mu * mu + std::pow(2 * M_PI / L, 2) +
                          std::pow(M_PI / L, 2));
    GridState psi = w1, dtpsi = w1;
    for (long i = 0; i < psi.points(); ++i) {
      psi.comp(0)[i] = w1.comp(0)[i] + w2.comp(0)[i];
      dtpsi.comp(0)[i] = std::complex<double>(0, -1) *
                         (o1 * w1.comp(0)[i] + o2 * w2.comp(0)[i]);
    }
    double r1 = continuity_residual(psi, dtpsi, 1e-3);
    double r2 = continuity_residual(psi, dtpsi, 5e-4);
    ordered_json params{{"n", n}, {"box", L}, {"dt", 1e-3}, {"mass", mu}};
    push(Baseline{"continuity.residual.two_waves", params, r1, 1e-6, "<="});
    push(Baseline{"continuity.order", params, std::log2(r1 / r2), 1.9, ">="});
    GridState sdt = w1;
    for (long i = 0; i < sdt.points(); ++i)
      sdt.comp(0)[i] = std::complex<double>(0, -o1) * w1.comp(0)[i];
    push(Baseline{"continuity.single_wave", params, continuity_residual(w1, sdt,
                  1e-3), 1e-12, "<="});
  }

  // Feshbach-Villars split.
  {
    sw.reset();
    const int n = 16;
    const double L = 8.0;
    GridState w = plane_wave(n, L, 3, 1, mu, Space::Position, {3, 0, 0});
    double omega = std::sqrt(mu * mu + std::pow(3 * M_PI / L, 2));
    GridState dtw = w;
    for (long i = 0; i < w.points(); ++i)
      dtw.comp(0)[i] = std::complex<double>(0, -omega) * w.comp(0)[i];
    FvResult good = fv_split(w, dtw, mu, FvVariant::ImagOverM);
    FvResult bad = fv_split(w, dtw, mu, FvVariant::PrintedOverM);
    ordered_json params{{"n", n}, {"box", L}, {"mode", 3}, {"mass", mu}};
    push(Baseline{"fv.constant.plane_wave", params,
                  std::abs(good.constant - 2.0), 1e-12, "<="});
    push(Baseline{"fv.printed.proportional", params,
                  bad.proportional ? 1.0 : 0.0, 0.0, "<="});
    GridState g = gaussian_packet(n, L, 3, 1, mu, Space::Position, {0, 0, 0},
                                  1.0, {0.7, 0, 0});
    TrajectoryRecord rec = evolve(Theory::T1, g, 1e-3, 1, 1);
    const GridState& gt = rec.snapshots.back();
    FvResult gen = fv_split(gt, spectral_time_derivative(gt), mu,
                            FvVariant::ImagOverM);
    push(Baseline{"fv.constant.evolved_gaussian", params,
                  std::abs(gen.constant - 2.0), 1e-10, "<="});
  }

  // Free-particle matrix spectrum.
  {
    sw.reset();
    auto dev4 = [](const std::array<double, 4>& got,
                   const std::array<double, 4>& want) {
      double d = 0;
      for (size_t i = 0; i < 4; ++i)
        d = std::max(d, std::abs(got[i] - want[i]));
      return d;
    };
    ordered_json none = ordered_json::object();
    push(Baseline{"dirac.rest", none, dev4(dirac_spectrum({0, 0, 0}, 1.0), {-1,
                  -1, 1, 1}), 1e-12, "<="});
    push(Baseline{"dirac.three_four_five", none, dev4(dirac_spectrum({3, 0, 0},
                  4.0), {-5, -5, 5, 5}), 1e-12, "<="});
    push(Baseline{"dirac.massless", none, dev4(dirac_spectrum({0, 0, 1}, 0.0),
                  {-1, -1, 1, 1}), 1e-12, "<="});
    std::array<double, 3> p{0.3, -1.1, 2.4};
    double e = std::sqrt(1.69 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    push(Baseline{"dirac.generic", none, dev4(dirac_spectrum(p, 1.3), {-e, -e,
                  e, e}), 1e-12, "<="});
  }

  // 1-D boost covariance on the rapidity grid.
  {
    sw.reset();
    const int n = 1024;
    const double L = 8.0;
    GridState psi = gaussian_packet(n, L, 1, 1, mu, Space::Position,
                                    {0, 0, 0}, 0.5, {0, 0, 0});
    ordered_json params{{"n", n}, {"box", L}, {"sigma", 0.5}, {"mass", mu}};
    push(Baseline{"boost.identity", params, boost_action_1d(0.0,
                  psi).max_rel_err, 0.0, "<="});
    push(Baseline{"boost.rapidity_half", params, boost_action_1d(0.5,
                  psi).max_rel_err, 1e-8, "<="});
    auto taylor_err = [&](double phi) {
      auto shift = [&](double a) {
        GridState s = psi;
        std::vector<std::complex<double>> v(psi.comp(0), psi.comp(0) + n);
        v = gdetail::shift_1d(v, n, L, -a);
        for (int i = 0; i < n; ++i) {
          double w = mu * std::cosh(psi.coord(i));
          v[static_cast<size_t>(i)] *= w;
        }
        v = gdetail::shift_1d(v, n, L, a);
        for (int i = 0; i < n; ++i) s.comp(0)[i] = v[static_cast<size_t>(i)];
        return s;
      };
      GridState plus = shift(phi), minus = shift(-phi);
      double num = 0, den = 0;
      for (int i = 0; i < n; ++i) {
        std::complex<double> centered =
            (plus.comp(0)[i] - minus.comp(0)[i]) / (2 * phi);
        std::complex<double> want =
            mu * std::sinh(psi.coord(i)) * psi.comp(0)[i];
        num += std::norm(centered - want);
        den += std::norm(want);
      }
      return std::sqrt(num / den);
    };
    double e1 = taylor_err(1e-3);
    double e2 = taylor_err(5e-4);
    push(Baseline{"boost.taylor_error", params, e1, 1e-4, "<="});
    push(Baseline{"boost.taylor_order", params, std::log2(e1 / e2), 1.8, ">="});
  }

  // Symbolic-to-numeric sampling.
  {
    sw.reset();
    const int n = 16;
    const double L = 6.0;
    GridState psi = gaussian_packet(n, L, 3, 1, mu, Space::Momentum,
                                    {0.4, -0.2, 0.1}, 0.8, {0, 0, 0});
    DiffOperator p1 = DiffOperator::scalar_mult(OnShellScalar(Poly::var(0)), 1);
    GridState got = apply_operator(p1, psi);
    double dev = 0;
    gdetail::for_each_point(n, 3, [&](long flat, const std::array<int, 3>& idx) {
      std::complex<double> want = psi.coord(idx[0]) * psi.comp(0)[flat];
      dev = std::max(dev, std::abs(got.comp(0)[flat] - want));
    });
    ordered_json params{{"n", n}, {"box", L}, {"sigma", 0.8}, {"mass", mu}};
    push(Baseline{"sample.multiplication", params, dev, 1e-14, "<="});
    DiffOperator canon = commutator(DiffOperator::deriv(0, 1), p1);
    push(Baseline{"sample.canonical_pair", params, cross_validate(canon,
                  DiffOperator::identity(1), psi), 1e-10, "<="});
  }
  {
    sw.reset();
    const int n = 64;
    const double L = 8.0;
    GridState a = gaussian_packet(n, L, 3, 1, mu, Space::Momentum,
                                  {0.5, 0.1, -0.2}, 0.8, {0, 0, 0});
    GridState b = gaussian_packet(n, L, 3, 1, mu, Space::Momentum,
                                  {-0.3, 0.4, 0.0}, 0.8, {0, 0, 0});
    PositionTriple f = newton_wigner(1);
    std::complex<double> lhs = weighted_inner(apply_operator(f[0], a), b);
    std::complex<double> rhs = weighted_inner(a, apply_operator(f[0], b));
    push(Baseline{"sample.selfadjoint_defect", ordered_json{{"n", n}, {"box",
                  L}, {"sigma", 0.8}}, std::abs(lhs - rhs), 1e-8, "<="});
  }
  {
    sw.reset();
    ordered_json params{{"n", 32},       {"box", 7.0},  {"mass", 4.0},
                        {"sigma", 0.7},  {"trials", 50}, {"seed", 20260815}};
    push(Baseline{"compose.random50", params, randomized_compose_scan(32, 7.0,
                  4.0, 0.7, 50, 20260815u), 1e-8, "<="});
  }

  if (all_ok) *all_ok = ok;
  return entries;
}

inline CommandResult cmd_report(const RunConfig&) {
  CommandResult res;
  bool ok = true;
  ordered_json entries = numeric_baselines(&ok);
  res.json["command"] = "report";
  res.json["suite"] = "numeric-baselines";
  res.json["entries"] = std::move(entries);
  res.json["ok"] = ok;
  res.ok = ok;
  return res;
}

// ---------------------------------------------------------------------------
// renderers and the CLI front end

inline void from_json(const ordered_json& j, CheckItem& it) {
  j.at("id").get_to(it.id);
  j.at("statement").get_to(it.statement);
  j.at("expected_to_hold").get_to(it.expected_to_hold);
  j.at("holds").get_to(it.holds);
  it.detail = j.value("detail", "");
  it.adjudicated = j.value("adjudicated", false);
}

inline void from_json(const ordered_json& j, CheckReport& r) {
  j.at("suite").get_to(r.suite);
  j.at("subject").get_to(r.subject);
  r.items.clear();
  for (const auto& e : j.at("items")) r.items.push_back(e.get<CheckItem>());
}

inline std::string render_markdown(const ordered_json& j) {
  std::string cmd = j.at("command").get<std::string>();
  std::string out = "## " + cmd + "\n\n";
  auto table = [&](const ordered_json& rows) {
    if (rows.empty()) return std::string();
    std::string t = "|";
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it)
      t += " " + it.key() + " |";
    t += "\n|";
    for (size_t i = 0; i < rows[0].size(); ++i) t += "---|";
    t += "\n";
    for (const auto& row : rows) {
      t += "|";
      for (auto it = row.begin(); it != row.end(); ++it) {
        auto& v = it.value();
        t += " " + (v.is_string() ? v.get<std::string>() : v.dump()) + " |";
      }
      t += "\n";
    }
    return t;
  };
  if (cmd == "catalog") out += table(j.at("reps"));
  if (cmd == "commutant") out += table(j.at("entries"));
  if (cmd == "report") out += table(j.at("entries"));
  if (cmd == "position-scan") {
    ordered_json flat = ordered_json::array();
    for (const auto& v : j.at("verdicts"))
      flat.push_back(ordered_json{{"label", v.at("label")},
                                  {"admits", v.at("admits")},
                                  {"note", v.at("note")}});
    out += table(flat);
    out += "\n";
  }
  if (j.contains("reports"))
    for (const auto& rep : j.at("reports"))
      out += "\n" + to_markdown(rep.get<CheckReport>());
  if (j.contains("report"))
    out += "\n" + to_markdown(j.at("report").get<CheckReport>());
  out += "\nok: " + std::string(j.at("ok").get<bool>() ? "true" : "false") +
         "\n";
  return out;
}

inline CommandResult dispatch(const RunConfig& cfg) {
  if (cfg.command == "catalog") return cmd_catalog(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "position-scan") return cmd_position_scan(cfg);
  if (cfg.command == "commutant") return cmd_commutant(cfg);
  if (cfg.command == "evolve") return cmd_evolve(cfg);
  if (cfg.command == "report") return cmd_report(cfg);
  throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

// Renders a finished command per the configured format. CSV is the evolve
// observable table; other commands have no CSV form.
inline std::string render(const RunConfig& cfg, const CommandResult& res) {
  std::string format = cfg.format;
  if (format.empty()) format = cfg.command == "evolve" ? "csv" : "json";
  if (format == "json") return res.json.dump(2) + "\n";
  if (format == "markdown") return render_markdown(res.json);
  if (format == "csv") {
    if (res.csv_text.empty())
      throw std::invalid_argument(
          "csv output is defined for evolve observables only; use --format "
          "json or markdown for " + cfg.command);
    return res.csv_text;
  }
  throw std::invalid_argument("--format must be json, markdown or csv (got '" +
                              format + "')");
}

// Runs one configured command and emits its report; returns the process
// exit code (0 ok, 1 suite violations, 2 usage).
inline int run_command(const RunConfig& cfg, std::ostream& out_stream,
                       std::ostream& err_stream) {
  try {
    CommandResult res = dispatch(cfg);
    std::string text = render(cfg, res);
    if (cfg.out.empty()) {
      out_stream << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw std::runtime_error("cannot open " + cfg.out);
      f << text;
      if (!f) throw std::runtime_error("write failed " + cfg.out);
    }
    return res.ok ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    err_stream << "plab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err_stream << "plab: " << e.what() << "\n";
    return 1;
  }
}

namespace rdetail {

// JSON config file mirroring the flags; explicit flags override its values.
inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot read config file '" + path + "'");
  ordered_json j;
  f >> j;
  if (!j.is_object())
    throw std::invalid_argument("config file must hold a JSON object");
  auto str = [&](const char* k, std::string& dst) {
    if (j.contains(k)) dst = j.at(k).get<std::string>();
  };
  str("spin", cfg.spin);
  str("rep", cfg.rep);
  str("suite", cfg.suite);
  str("mass", cfg.mass);
  str("format", cfg.format);
  str("theory", cfg.theory);
  str("out", cfg.out);
  str("csv", cfg.csv);
  str("dump", cfg.dump);
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("box")) cfg.box = j.at("box").get<double>();
  if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
  if (j.contains("steps")) cfg.steps = j.at("steps").get<int>();
  if (j.contains("stride")) cfg.stride = j.at("stride").get<int>();
  if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
  if (j.contains("k1")) cfg.k1 = j.at("k1").get<double>();
}

}  // namespace rdetail

inline int cli_main(std::vector<std::string> args, std::ostream& out_stream,
                    std::ostream& err_stream) {
  RunConfig cfg;

  // The config file seeds the defaults before CLI11 binds, so explicit
  // flags win.
  try {
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size())
        rdetail::load_config_file(args[i + 1], cfg);
      else if (args[i].rfind("--config=", 0) == 0)
        rdetail::load_config_file(args[i].substr(9), cfg);
    }
  } catch (const std::exception& e) {
    err_stream << "plab: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{
      "Exact Poincare-representation suites and the spectral wave lab"};
  app.require_subcommand(1);
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "JSON config file mirroring the flags");
    sub->add_option("--format", cfg.format,
                    "json, markdown or csv (evolve defaults to csv)");
    sub->add_option("--out", cfg.out, "write the report here (default stdout)");
  };
  auto add_symbolic = [&](CLI::App* sub) {
    sub->add_option("--spin", cfg.spin, "0 or 1/2");
    sub->add_option("--mass", cfg.mass, "exact suites are symbolic-only");
  };

  CLI::App* cat = app.add_subcommand("catalog",
                                     "list the representation catalog");
  add_common(cat);
  add_symbolic(cat);

  CLI::App* ver = app.add_subcommand("verify", "run the exact relation suites");
  add_common(ver);
  add_symbolic(ver);
  ver->add_option("--rep", cfg.rep, "representation label or all");
  ver->add_option("--suite", cfg.suite,
                  "lie casimir discrete commutant no-time radial shift or all");

  CLI::App* pos = app.add_subcommand(
      "position-scan", "scan the octet for admissible position operators");
  add_common(pos);
  add_symbolic(pos);

  CLI::App* com = app.add_subcommand(
      "commutant", "commutant dimensions across the whole catalog");
  add_common(com);
  com->add_option("--mass", cfg.mass, "exact suites are symbolic-only");

  CLI::App* evo =
      app.add_subcommand("evolve", "spectral time evolution of a wavepacket");
  add_common(evo);
  evo->add_option("--theory", cfg.theory, "T1 T2 T3 or T4");
  evo->add_option("--n", cfg.n, "grid points per axis (power of two)");
  evo->add_option("--box", cfg.box, "box half-width");
  evo->add_option("--dt", cfg.dt, "time step");
  evo->add_option("--steps", cfg.steps, "number of steps");
  evo->add_option("--stride", cfg.stride, "snapshot stride (0: final only)");
  evo->add_option("--sigma", cfg.sigma, "packet width");
  evo->add_option("--k1", cfg.k1, "carrier wavenumber along axis 1");
  evo->add_option("--mass", cfg.mass, "particle mass (positive float)");
  evo->add_option("--csv", cfg.csv, "also write the observables CSV here");
  evo->add_option("--dump", cfg.dump, "also write the raw snapshot dump here");

  CLI::App* repc = app.add_subcommand(
      "report", "run the numeric oracle battery and report the baselines");
  add_common(repc);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out_stream << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err_stream << "plab: " << e.what() << "\n";
    return 2;
  }

  for (CLI::App* sub : {cat, ver, pos, com, evo, repc})
    if (sub->parsed()) cfg.command = sub->get_name();
  // Evolve defaults to unit mass unless the flag or the config file says
  // otherwise.
  if (cfg.command == "evolve" && evo->count("--mass") == 0 &&
      cfg.mass == "symbolic")
    cfg.mass = "1.0";
  return run_command(cfg, out_stream, err_stream);
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(std::move(args), std::cout, std::cerr);
}

}  // namespace plab
