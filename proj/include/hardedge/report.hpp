#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hardedge {

struct ReportEntry {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Named scalar results with tolerances and pass/fail verdicts.
struct DiagnosticReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<ReportEntry> entries;

  void add(std::string label, double value, double tolerance, bool pass);
  bool verdict() const;
  nlohmann::ordered_json to_json() const;
  static DiagnosticReport from_json(const nlohmann::ordered_json& j);
};

/// Concatenates entries of several reports under one name; labels are
/// prefixed with the source report name.
DiagnosticReport merge_reports(std::string name, const std::vector<DiagnosticReport>& parts);

}  // namespace hardedge
