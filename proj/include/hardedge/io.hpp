#pragma once

// File formats. Text outputs are RFC-4180 CSV (header row, '.' decimal,
// numbers printed with 17 significant digits so they read back exactly)
// and JSON / JSON lines. Trajectories also have a little-endian binary
// frame format, "HEL1", laid out in README.md.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardedge/diagnostics.hpp"
#include "hardedge/dynamics.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/estimators.hpp"

namespace hardedge {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest locale-independent text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& field);

/// Splits CSV text into records. Handles quoted fields, doubled quotes and
/// CRLF line ends.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::string csv_escape(const std::string& field);

std::string read_file(const std::filesystem::path& p);
/// Writes through a temporary file and renames, so readers never see a
/// partial file.
void write_file(const std::filesystem::path& p, const std::string& contents);

// ---------------------------------------------------------------------------
// Configurations: one draw per row, points ascending.

void write_configurations_csv(std::ostream& out, std::span<const PointConfiguration> draws);
std::vector<PointConfiguration> read_configurations_csv(std::istream& in);

/// {"draw": i, "points": [...], "scale": "hardedge", "seed": s} per line.
void write_configurations_jsonl(std::ostream& out, std::span<const PointConfiguration> draws, std::uint64_t seed);
std::vector<PointConfiguration> read_configurations_jsonl(std::istream& in);

std::string to_string(Scale s);
Scale parse_scale(const std::string& name);

// ---------------------------------------------------------------------------
// Trajectories.

inline constexpr char kHel1Magic[4] = {'H', 'E', 'L', '1'};
inline constexpr std::uint32_t kHel1Version = 1;

void write_hel1(std::ostream& out, const TrajectoryBundle& b);
TrajectoryBundle read_hel1(std::istream& in);

/// Rows (trajectory, time, particle, position); the header is written when
/// `header` is set so several bundles can share one file.
void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& b, std::uint64_t trajectory, bool header);

nlohmann::ordered_json telemetry_json(const Telemetry& t);
nlohmann::ordered_json integrator_json(const IntegratorConfig& c);
IntegratorConfig integrator_from_json(const nlohmann::ordered_json& j);

// ---------------------------------------------------------------------------
// Estimates. `exact`, when non-empty, adds a kernel_exact column with one
// value per bin (per cell for the pair density, row-major).

void write_rho1_csv(std::ostream& out, const BinnedDensity& d, std::span<const double> exact = {});
nlohmann::ordered_json rho1_json(const BinnedDensity& d, std::span<const double> exact = {});
void write_rho2_csv(std::ostream& out, const PairDensity2D& d, std::span<const double> exact = {});
nlohmann::ordered_json rho2_json(const PairDensity2D& d, std::span<const double> exact = {});

// ---------------------------------------------------------------------------

void write_table_csv(std::ostream& out, const Table& t);
Table read_table_csv(std::istream& in);

}  // namespace hardedge
