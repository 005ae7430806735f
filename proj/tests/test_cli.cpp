#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plab/run.hpp"

using namespace plab;

namespace {

struct CliRun {
  int exit_code = 0;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.exit_code = cli_main(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string source_path(const std::string& rel) {
  return std::string(PLAB_SOURCE_DIR) + "/" + rel;
}

ordered_json load_json(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  ordered_json j;
  f >> j;
  return j;
}

// Validator for the subset of JSON Schema the shipped schema uses:
// type, required, properties, items, additionalProperties.
bool type_matches(const ordered_json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

void validate(const ordered_json& schema, const ordered_json& value,
              const std::string& where, std::vector<std::string>& errors) {
  if (schema.contains("type") &&
      !type_matches(value, schema.at("type").get<std::string>())) {
    errors.push_back(where + ": not a " +
                     schema.at("type").get<std::string>());
    return;
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& k : schema.at("required"))
        if (!value.contains(k.get<std::string>()))
          errors.push_back(where + ": missing required key " +
                           k.get<std::string>());
    bool extra_ok = !schema.contains("additionalProperties") ||
                    schema.at("additionalProperties").get<bool>();
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (schema.contains("properties") &&
          schema.at("properties").contains(it.key()))
        validate(schema.at("properties").at(it.key()), it.value(),
                 where + "." + it.key(), errors);
      else if (!extra_ok)
        errors.push_back(where + ": unexpected key " + it.key());
    }
  }
  if (value.is_array() && schema.contains("items"))
    for (size_t i = 0; i < value.size(); ++i)
      validate(schema.at("items"), value[i],
               where + "[" + std::to_string(i) + "]", errors);
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("identical configurations produce byte-identical output") {
  std::vector<std::string> verify_args{"verify", "--rep", "U2", "--spin", "0",
                                       "--suite", "discrete"};
  CliRun a = run_cli(verify_args);
  CliRun b = run_cli(verify_args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  std::vector<std::string> evolve_args{"evolve", "--theory", "T3", "--n", "16",
                                       "--box",  "8",        "--steps", "6"};
  CliRun c = run_cli(evolve_args);
  CliRun d = run_cli(evolve_args);
  REQUIRE(c.exit_code == 0);
  CHECK(c.out == d.out);

  CliRun e = run_cli({"catalog", "--spin", "0", "--format", "markdown"});
  CliRun f = run_cli({"catalog", "--spin", "0", "--format", "markdown"});
  REQUIRE(e.exit_code == 0);
  CHECK(e.out == f.out);
}

TEST_CASE("verify reports validate against the shipped schema") {
  ordered_json schema = load_json(source_path("docs/check_report.schema.json"));

  CliRun run = run_cli({"verify", "--rep", "Up", "--spin", "0", "--suite",
                        "all", "--format", "json"});
  REQUIRE(run.exit_code == 0);
  ordered_json payload = ordered_json::parse(run.out);
  REQUIRE(payload.at("ok").get<bool>());
  REQUIRE(payload.at("reports").is_array());
  REQUIRE(!payload.at("reports").empty());

  std::vector<std::string> errors;
  for (const auto& report : payload.at("reports"))
    validate(schema, report, report.at("suite").get<std::string>(), errors);
  for (const auto& e : errors) INFO(e);
  CHECK(errors.empty());

  // The schema subset exercised above must actually reject malformed input.
  ordered_json broken = payload.at("reports")[0];
  broken["items"][0].erase("holds");
  broken["stray"] = 1;
  errors.clear();
  validate(schema, broken, "broken", errors);
  CHECK(errors.size() == 2);
}

TEST_CASE("exit codes distinguish usage errors from suite results") {
  CHECK(run_cli({"verify", "--rep", "U3", "--spin", "0.5", "--suite",
                 "discrete"})
            .exit_code == 0);

  CliRun unknown_rep = run_cli({"verify", "--rep", "U9", "--spin", "0"});
  CHECK(unknown_rep.exit_code == 2);
  CHECK(unknown_rep.err.find("U9") != std::string::npos);
  CHECK(unknown_rep.err.find("U6") != std::string::npos);

  CHECK(run_cli({"verify", "--spin", "1"}).exit_code == 2);
  CHECK(run_cli({"verify", "--rep", "U1", "--spin", "0", "--mass", "2.0"})
            .exit_code == 2);
  CHECK(run_cli({"catalog", "--format", "csv"}).exit_code == 2);
  CHECK(run_cli({"catalog", "--format", "yaml"}).exit_code == 2);
  CHECK(run_cli({"evolve", "--n", "48"}).exit_code == 2);
  CHECK(run_cli({"evolve", "--mass", "symbolic"}).exit_code == 2);
  CHECK(run_cli({"evolve", "--sigma", "4", "--box", "8"}).exit_code == 2);
  CHECK(run_cli({"verify", "--rep", "Up", "--spin", "0", "--suite", "shift"})
            .exit_code == 2);
  CHECK(run_cli({}).exit_code == 2);

  // Artifact-write failures are runtime errors, not usage errors.
  CHECK(run_cli({"catalog", "--spin", "0", "--out", "/dev/null/x.json"})
            .exit_code == 1);

  CHECK(run_cli({"--help"}).exit_code == 0);
}

TEST_CASE("evolve emits the observables table with bounded norm drift") {
  const int steps = 12;
  CliRun run = run_cli({"evolve", "--theory", "T1", "--n", "16", "--box", "8",
                        "--dt", "1e-3", "--steps", std::to_string(steps)});
  REQUIRE(run.exit_code == 0);
  REQUIRE(run.out.rfind("time,norm,norm_c0,mean_p1,mean_p2,mean_p3\n", 0) ==
          0);
  CHECK(count_lines(run.out) == steps + 2);

  std::istringstream rows(run.out);
  std::string line;
  std::getline(rows, line);
  double norm0 = 0, drift = 0;
  bool first = true;
  while (std::getline(rows, line)) {
    double t, norm;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &t, &norm) == 2);
    if (first) {
      norm0 = norm;
      first = false;
    }
    drift = std::max(drift, std::abs(norm - norm0));
  }
  CHECK(drift < 1e-10);

  CliRun json = run_cli({"evolve", "--theory", "T1", "--n", "16", "--box", "8",
                         "--dt", "1e-3", "--steps", "12", "--format", "json"});
  REQUIRE(json.exit_code == 0);
  ordered_json payload = ordered_json::parse(json.out);
  CHECK(payload.at("ok").get<bool>());
  CHECK(payload.at("observables").at("norm_drift").get<double>() < 1e-10);
}

TEST_CASE("checked-in numeric baselines are complete and within bounds") {
  ordered_json j = load_json(source_path("tests/baselines/numeric.json"));
  REQUIRE(j.at("ok").get<bool>());
  const auto& entries = j.at("entries");

  std::vector<std::string> want{"evolve.norm_drift.T1",
                                "evolve.norm_drift.T2",
                                "evolve.norm_drift.T3",
                                "evolve.component_drift.T3",
                                "evolve.norm_drift.T4",
                                "evolve.component_drift.T4",
                                "evolve.eigenmode_phase.T1",
                                "evolve.eigenmode_phase.T2",
                                "evolve.step_composition.T3",
                                "kg.residual.T1",
                                "kg.order.T1",
                                "kg.residual.T3",
                                "continuity.residual.two_waves",
                                "continuity.order",
                                "continuity.single_wave",
                                "fv.constant.plane_wave",
                                "fv.printed.proportional",
                                "fv.constant.evolved_gaussian",
                                "dirac.rest",
                                "dirac.three_four_five",
                                "dirac.massless",
                                "dirac.generic",
                                "boost.identity",
                                "boost.rapidity_half",
                                "boost.taylor_error",
                                "boost.taylor_order",
                                "sample.multiplication",
                                "sample.canonical_pair",
                                "sample.selfadjoint_defect",
                                "compose.random50"};
  REQUIRE(entries.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    INFO("entry " << i << ": " << want[i]);
    CHECK(entries[i].at("id").get<std::string>() == want[i]);
    CHECK(entries[i].at("within").get<bool>());
    double measured = entries[i].at("measured").get<double>();
    double bound = entries[i].at("bound").get<double>();
    if (entries[i].at("sense").get<std::string>() == ">=")
      CHECK(measured >= bound);
    else
      CHECK(measured <= bound);
  }
}

TEST_CASE("config file seeds the run and explicit flags override it") {
  std::string path = "test_cli_config.json";
  {
    std::ofstream f(path);
    f << R"({"spin": "0", "rep": "U2", "suite": "discrete"})";
  }
  CliRun seeded = run_cli({"verify", "--config", path});
  REQUIRE(seeded.exit_code == 0);
  ordered_json a = ordered_json::parse(seeded.out);
  CHECK(a.at("rep").get<std::string>() == "U2");
  CHECK(a.at("suite").get<std::string>() == "discrete");

  CliRun overridden = run_cli({"verify", "--config", path, "--rep", "U4"});
  REQUIRE(overridden.exit_code == 0);
  ordered_json b = ordered_json::parse(overridden.out);
  CHECK(b.at("rep").get<std::string>() == "U4");

  CHECK(run_cli({"verify", "--config", "no_such_file.json"}).exit_code == 2);
  std::remove(path.c_str());
}

TEST_CASE("position scan names the admitting representations") {
  CliRun run = run_cli({"position-scan", "--spin", "0.5"});
  REQUIRE(run.exit_code == 0);
  ordered_json j = ordered_json::parse(run.out);
  CHECK(j.at("ok").get<bool>());
  std::vector<std::string> admitting;
  for (const auto& l : j.at("admitting"))
    admitting.push_back(l.get<std::string>());
  CHECK(admitting == std::vector<std::string>{"U2", "U3", "U5"});
  for (const auto& v : j.at("verdicts"))
    if (v.at("admits").get<bool>()) {
      REQUIRE(v.contains("position"));
      CHECK(v.at("position").size() == 3);
    }
}
