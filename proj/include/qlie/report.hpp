// report.hpp -- machine- and human-readable run reports.
//
// Reports always record the pairing order and word length used: pairing
// equality is order-relative, so a pass is only meaningful together with the
// order it was checked at.

#pragma once

#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "qlie/instance.hpp"

namespace qlie {

struct Report {
  std::string command;
  std::string instance_name;
  int n = 0;
  int max_len = 0;
  int pairing_order = 0;
  double timing_ms = 0.0;
  std::string error;  // load/parse failure, when any
  std::vector<CheckEntry> checks;

  bool all_pass() const {
    if (!error.empty()) return false;
    for (const auto& e : checks)
      if (!e.skipped && !e.pass) return false;
    return true;
  }

  /// 0 = pass, 1 = load/parse error, 2 = check failure.
  int exit_code() const {
    if (!error.empty()) return 1;
    return all_pass() ? 0 : 2;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["instance"] = instance_name;
    j["n"] = n;
    j["max_len"] = max_len;
    j["pairing_order"] = pairing_order;
    j["timing_ms"] = timing_ms;
    if (!error.empty()) j["error"] = error;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : this->checks) {
      nlohmann::json c;
      c["id"] = e.id;
      c["description"] = e.description;
      c["residual"] = e.residual;
      c["pass"] = e.pass;
      c["reconstruction"] = e.reconstruction;
      c["skipped"] = e.skipped;
      if (!e.witness.empty()) c["witness"] = e.witness;
      checks.push_back(c);
    }
    j["checks"] = checks;
    j["exit_code"] = exit_code();
    return j;
  }

  static Report from_json(const nlohmann::json& j) {
    Report r;
    r.command = j.value("command", "");
    r.instance_name = j.value("instance", "");
    r.n = j.value("n", 0);
    r.max_len = j.value("max_len", 0);
    r.pairing_order = j.value("pairing_order", 0);
    r.timing_ms = j.value("timing_ms", 0.0);
    r.error = j.value("error", "");
    if (j.contains("checks"))
      for (const auto& c : j.at("checks")) {
        CheckEntry e;
        e.id = c.value("id", "");
        e.description = c.value("description", "");
        e.residual = c.value("residual", 0.0);
        e.pass = c.value("pass", false);
        e.reconstruction = c.value("reconstruction", false);
        e.skipped = c.value("skipped", false);
        e.witness = c.value("witness", "");
        r.checks.push_back(e);
      }
    return r;
  }

  bool operator==(const Report& o) const {
    if (command != o.command || instance_name != o.instance_name || n != o.n ||
        max_len != o.max_len || pairing_order != o.pairing_order || error != o.error ||
        timing_ms != o.timing_ms || checks.size() != o.checks.size())
      return false;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto &a = checks[i], &b = o.checks[i];
      if (a.id != b.id || a.description != b.description || a.residual != b.residual ||
          a.pass != b.pass || a.reconstruction != b.reconstruction || a.skipped != b.skipped ||
          a.witness != b.witness)
        return false;
    }
    return true;
  }

  void print_text(std::ostream& os) const {
    os << "== " << command << " on " << instance_name << " (n=" << n << ")\n";
    os << "   max word length " << max_len << ", pairing order " << pairing_order << "\n";
    if (!error.empty()) {
      os << "ERROR: " << error << "\n";
      return;
    }
    for (const auto& e : checks) {
      const char* tag = e.skipped ? "SKIP" : (e.pass ? "pass" : "FAIL");
      os << "[" << tag << "] " << e.id;
      if (e.reconstruction) os << " (reconstructed reading)";
      os << ": " << e.description;
      if (!e.skipped) os << "  residual=" << e.residual;
      if (!e.witness.empty()) os << "  witness: " << e.witness;
      os << "\n";
    }
    os << (all_pass() ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << " ("
       << timing_ms << " ms)\n";
  }
};

}  // namespace qlie
