// Acceptance gate: one line per criterion, exit code = number of failures.
// Every tolerance is pinned here; timings print next to each verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "plab/run.hpp"

using namespace plab;

namespace {

struct Gate {
  int failures = 0;

  void line(int number, const std::string& label, bool pass, double seconds,
            const std::string& note = "") {
    std::printf("[%s] criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL",
                number, label.c_str(), seconds);
    if (!note.empty()) std::printf("       %s\n", note.c_str());
    if (!pass) ++failures;
  }
};

double since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool has_adjudicated_item(const CheckReport& rep, const std::string& id) {
  for (const auto& it : rep.items)
    if (it.id == id) return it.adjudicated && !it.violated();
  return false;
}

const CheckItem* find_item(const CheckReport& rep, const std::string& id) {
  for (const auto& it : rep.items)
    if (it.id == id) return &it;
  return nullptr;
}

}  // namespace

int main() {
  Gate gate;
  const HalfInt spin0{0}, spin_half{1};

  // 1. Lie relations reduce to exact zero; the two relations whose right
  // side is recorded against a variant reading carry adjudication marks.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    int count = 0;
    std::string bad;
    for (const Representation& r : full_catalog()) {
      CheckReport rep = check_lie_algebra(r);
      ++count;
      bool this_ok = rep.ok() && has_adjudicated_item(rep, "1.v") &&
                     has_adjudicated_item(rep, "1.ix");
      if (!this_ok) bad += " " + rep.subject;
      pass = pass && this_ok;
    }
    double secs = since(t0);
    pass = pass && secs < 60.0;
    gate.line(1, "exact Lie suite over the full catalog", pass, secs,
              std::to_string(count) +
                  " representations; [K_j,K_k] and [K_j,P0] adjudicated; "
                  "budget 60 s" +
                  (bad.empty() ? "" : "; violations:" + bad));
  }

  // 2. Casimir invariants: mass Casimir mu^2 Id everywhere; W.W reduces to
  // an exact constant, zero at s = 0, -s(s+1) mu^2 at s = 1/2 with the sign
  // recorded against the printed s(s+1) mu (no square) form.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string bad;
    for (const Representation& r : full_catalog()) {
      CheckReport rep = check_casimirs(r);
      bool this_ok = rep.ok();
      if (r.s.twice != 0) this_ok = this_ok && has_adjudicated_item(rep, "4.ii");
      if (!this_ok) bad += " " + rep.subject;
      pass = pass && this_ok;
    }
    gate.line(2, "exact Casimir suite (mass and spin invariants)", pass,
              since(t0),
              "spin constant computed exactly: 0 at s=0, -(3/4) mu^2 at "
              "s=1/2, recorded against the printed s(s+1) mu form" +
                  (bad.empty() ? std::string() : "; violations:" + bad));
  }

  // 3. Discrete pair: characters, exchange relations with the ten
  // generators, T^2, S^2 and the commutation phase omega per octet member.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string bad;
    for (HalfInt s : {spin0, spin_half})
      for (const Representation& r : enumerate_octet(s)) {
        CheckReport rep = check_discrete(r);
        if (!rep.ok()) {
          bad += " " + rep.subject;
          pass = false;
        }
      }
    gate.line(3, "discrete symmetry suite across both octets", pass,
              since(t0),
              bad.empty() ? "T^2, S^2, omega all match the expected table"
                          : "violations:" + bad);
  }

  // 4. Canonical position at s = 0 on a single shell: the full condition
  // set holds for Q = F exactly, and the two witness profiles fail exactly
  // where predicted, forcing the radial shift to zero.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string note;
    for (const Representation& r : {rep_up(spin0), rep_down(spin0)}) {
      CheckReport rep = radial_profile_uniqueness(r);
      const CheckItem* real_witness = find_item(rep, "radial.real.trev");
      const CheckItem* imag_witness = find_item(rep, "radial.imag.sa");
      bool this_ok = rep.ok() && real_witness && !real_witness->violated() &&
                     imag_witness && !imag_witness->violated();
      if (!this_ok) note += " " + rep.subject + " violated";
      pass = pass && this_ok;
    }
    gate.line(4, "canonical position operator at s=0 (up and down shells)",
              pass, since(t0),
              "Q = F passes all conditions; the f=1 profile breaks time "
              "reversal and the f=i profile breaks self-adjointness" +
                  note);
  }

  // 5. Two-shell shift family: solved dimensions over the six canonical
  // members reproduce the case matrix 2/1/0/1/0/1 at both spins.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string dims;
    const std::map<std::string, int> expect{{"U1", 2}, {"U2", 1}, {"U3", 0},
                                            {"U4", 1}, {"U5", 0}, {"U6", 1}};
    for (HalfInt s : {spin0, spin_half}) {
      dims += s.twice == 0 ? "s=0:" : "  s=1/2:";
      for (int m = 1; m <= 6; ++m) {
        Representation r = rep_sym(s, m);
        CheckReport rep = shift_family_scan(r);
        const CheckItem* dim_item = find_item(rep, "dim");
        bool this_ok = rep.ok() && dim_item && !dim_item->violated();
        pass = pass && this_ok;
        std::string computed = "?";
        if (dim_item) {
          computed = dim_item->detail.substr(dim_item->detail.rfind(' ') + 1);
          if (computed != std::to_string(expect.at(r.label))) this_ok = false;
        }
        dims += " " + r.label + "=" + computed + (this_ok ? "" : "(!)");
        pass = pass && this_ok;
      }
    }
    gate.line(5, "admissible shift-family dimensions on the two-shell octet",
              pass, since(t0), dims);
  }

  // 6. Position scan at s = 1/2. The printed exclusion argument leaves a
  // single admitting member (U3, with its position family and the block
  // phase twist onto the one-shell form); the exact scan confirms U3 and
  // additionally clears U2 and U5, whose cross terms cancel identically.
  // The wider verdict is pinned here and adjudicated in the suite items.
  {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<JmVerdict> verdicts = jm_scan(spin_half);
    std::vector<std::string> admitting;
    for (const auto& v : verdicts)
      if (v.admits) admitting.push_back(v.label);
    CheckReport scan = jm_scan_report(spin_half);
    CheckReport twist = check_phase_twist(spin_half);
    const CheckItem* witness = find_item(scan, "nc.single");
    bool pass = scan.ok() && twist.ok() && witness && !witness->violated() &&
                admitting == std::vector<std::string>{"U2", "U3", "U5"};
    gate.line(6, "position scan at s=1/2 with exact verdicts", pass,
              since(t0),
              "single-shell family violates the canonical commutator with a "
              "nonzero exact witness; admitting members {U2, U3, U5}; the "
              "printed argument admits U3 only, and the U2/U5 exclusions "
              "fail under exact cross-term cancellation (adjudicated); "
              "block phase twist fixes all ten generators");
  }

  // 7. Commutant dimensions of the reducibility probes.
  {
    auto t0 = std::chrono::steady_clock::now();
    int d_anti = commutant_dimension(rep_doubled(spin0, DoubledT::AntiSym));
    int d_plus = commutant_dimension(rep_quad(1));
    int d_minus = commutant_dimension(rep_quad(-1));
    double secs = since(t0);
    bool pass = d_anti == 1 && d_plus > 1 && d_minus == 1 && secs < 1.0;
    char note[160];
    std::snprintf(note, sizeof note,
                  "doubled antisymmetric T: %d; quad S^2=+1: %d (reducible); "
                  "quad S^2=-1: %d; budget 1 s",
                  d_anti, d_plus, d_minus);
    gate.line(7, "commutant dimensions by exact linear algebra", pass, secs,
              note);
  }

  // 8 and 9 share the numeric battery; per-entry wall times come from the
  // timing callback so each run is held to the 30 s budget.
  bool battery_ok = true;
  std::map<std::string, double> seconds;
  auto battery_t0 = std::chrono::steady_clock::now();
  ordered_json entries = numeric_baselines(
      &battery_ok,
      [&](const std::string& id, double s) { seconds[id] = s; });
  double battery_secs = since(battery_t0);
  std::map<std::string, ordered_json> by_id;
  for (const auto& e : entries) by_id[e.at("id").get<std::string>()] = e;

  {
    const std::vector<std::string> wanted{
        "evolve.norm_drift.T1",  "evolve.norm_drift.T2",
        "evolve.norm_drift.T3",  "evolve.norm_drift.T4",
        "kg.residual.T1",        "kg.order.T1",
        "continuity.order",      "dirac.rest",
        "dirac.three_four_five", "dirac.massless",
        "dirac.generic",         "boost.rapidity_half"};
    bool pass = true;
    std::string bad;
    double max_run = 0;
    for (const auto& id : wanted) {
      auto it = by_id.find(id);
      bool within = it != by_id.end() && it->second.at("within").get<bool>();
      double run_secs = seconds.count(id) ? seconds[id] : 0.0;
      max_run = std::max(max_run, run_secs);
      if (!within || run_secs >= 30.0) {
        pass = false;
        bad += " " + id;
      }
    }
    char note[200];
    std::snprintf(note, sizeof note,
                  "drift<1e-10 over 1000 steps at n=64; dt orders>=1.9; "
                  "spectrum exact to 1e-12; boost rel err<1e-8 at phi=0.5, "
                  "n=1024; slowest run %.1f s (budget 30 s)%s",
                  max_run, bad.empty() ? "" : ("; failing:" + bad).c_str());
    gate.line(8, "numeric laboratory oracle battery", pass, battery_secs,
              note);
  }

  {
    auto it = by_id.find("compose.random50");
    bool pass = it != by_id.end() && it->second.at("within").get<bool>();
    double measured =
        it == by_id.end() ? 1.0 : it->second.at("measured").get<double>();
    char note[120];
    std::snprintf(note, sizeof note,
                  "worst sup-norm deviation %.2e over 50 seeded random "
                  "operator pairs, bound 1e-8",
                  measured);
    gate.line(9, "composition agrees with sequential application", pass,
              seconds.count("compose.random50") ? seconds["compose.random50"]
                                                : 0.0,
              note);
  }

  if (!battery_ok)
    std::printf("note: a battery entry outside criteria 8-9 reported an "
                "out-of-bounds value; see the report command output\n");

  std::printf("%d of 9 criteria passed\n", 9 - gate.failures);
  return gate.failures;
}
