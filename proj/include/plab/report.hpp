#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace plab {

using ordered_json = nlohmann::ordered_json;

// One verified statement. `expected_to_hold` records the claim under test,
// `holds` what the engine found; the item is a violation iff they disagree.
// Items whose displayed source form had to be corrected before they could
// hold carry `adjudicated = true` and say so in `detail`.
struct CheckItem {
  std::string id;
  std::string statement;
  bool expected_to_hold = true;
  bool holds = false;
  std::string detail;
  bool adjudicated = false;

  bool violated() const { return holds != expected_to_hold; }
};

struct CheckReport {
  std::string suite;
  std::string subject;
  std::vector<CheckItem> items;

  CheckReport() = default;
  CheckReport(std::string suite_, std::string subject_)
      : suite(std::move(suite_)), subject(std::move(subject_)) {}

  void add(std::string id, std::string statement, bool holds,
           bool expected = true, std::string detail = "",
           bool adjudicated = false) {
    items.push_back(CheckItem{std::move(id), std::move(statement), expected,
                              holds, std::move(detail), adjudicated});
  }

  bool ok() const {
    for (const auto& it : items)
      if (it.violated()) return false;
    return true;
  }

  std::vector<CheckItem> violations() const {
    std::vector<CheckItem> v;
    for (const auto& it : items)
      if (it.violated()) v.push_back(it);
    return v;
  }

  void merge(const CheckReport& other) {
    for (const auto& it : other.items) items.push_back(it);
  }
};

inline void to_json(ordered_json& j, const CheckItem& it) {
  j = ordered_json{{"id", it.id},
                   {"statement", it.statement},
                   {"expected_to_hold", it.expected_to_hold},
                   {"holds", it.holds},
                   {"violated", it.violated()}};
  if (!it.detail.empty()) j["detail"] = it.detail;
  if (it.adjudicated) j["adjudicated"] = true;
}

inline void to_json(ordered_json& j, const CheckReport& r) {
  j = ordered_json{{"suite", r.suite},
                   {"subject", r.subject},
                   {"ok", r.ok()},
                   {"items", r.items}};
}

inline std::string to_markdown(const CheckReport& r) {
  std::string out = "### " + r.suite;
  if (!r.subject.empty()) out += " [" + r.subject + "]";
  out += r.ok() ? "  -- ok\n\n" : "  -- VIOLATIONS\n\n";
  out += "| id | statement | expected | holds | note |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& it : r.items) {
    std::string note = it.detail;
    if (it.adjudicated) note = note.empty() ? "adjudicated" : "adjudicated; " + note;
    if (it.violated()) note = note.empty() ? "VIOLATED" : "VIOLATED; " + note;
    out += "| " + it.id + " | " + it.statement + " | " +
           (it.expected_to_hold ? "holds" : "fails") + " | " +
           (it.holds ? "holds" : "fails") + " | " + note + " |\n";
  }
  return out;
}

}  // namespace plab
