#include "hardedge/report.hpp"

#include <algorithm>
#include <cmath>

namespace hardedge {

void DiagnosticReport::add(std::string label, double value, double tolerance, bool pass) {
  entries.push_back({std::move(label), value, tolerance, pass});
}

bool DiagnosticReport::verdict() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

nlohmann::ordered_json DiagnosticReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["params"] = params;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json je;
    je["label"] = e.label;
    // JSON has no inf/nan; those are written as null.
    if (std::isfinite(e.value)) je["value"] = e.value; else je["value"] = nullptr;
    if (std::isfinite(e.tolerance)) je["tolerance"] = e.tolerance; else je["tolerance"] = nullptr;
    je["pass"] = e.pass;
    j["entries"].push_back(je);
  }
  j["verdict"] = verdict() ? "pass" : "fail";
  return j;
}

DiagnosticReport DiagnosticReport::from_json(const nlohmann::ordered_json& j) {
  DiagnosticReport r;
  r.name = j.at("name").get<std::string>();
  r.params = j.at("params");
  for (const auto& je : j.at("entries")) {
    const double v = je.at("value").is_null() ? NAN : je.at("value").get<double>();
    const double t = je.at("tolerance").is_null() ? NAN : je.at("tolerance").get<double>();
    r.add(je.at("label").get<std::string>(), v, t, je.at("pass").get<bool>());
  }
  return r;
}

DiagnosticReport merge_reports(std::string name, const std::vector<DiagnosticReport>& parts) {
  DiagnosticReport out;
  out.name = std::move(name);
  for (const auto& p : parts) {
    out.params[p.name] = p.params;
    for (const auto& e : p.entries) out.add(p.name + "/" + e.label, e.value, e.tolerance, e.pass);
  }
  return out;
}

}  // namespace hardedge
