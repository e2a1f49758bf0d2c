#include "hardedge/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hardedge {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& field) {
  std::size_t b = 0, e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
  if (b < e && field[b] == '+') ++b;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data() + b, field.data() + e, v);
  if (ec != std::errc() || ptr != field.data() + e || b == e) throw IoError("not a number: '" + field + "'");
  return v;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  char c;
  auto end_record = [&] {
    rec.push_back(std::move(field));
    field.clear();
    if (!(rec.size() == 1 && rec[0].empty())) records.push_back(std::move(rec));
    rec.clear();
    any = false;
  };
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (any) end_record();
  return records;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, p);
}

// ---------------------------------------------------------------------------

std::string to_string(Scale s) { return s == Scale::hardedge ? "hardedge" : "matrix"; }

Scale parse_scale(const std::string& name) {
  if (name == "hardedge") return Scale::hardedge;
  if (name == "matrix") return Scale::matrix;
  throw IoError("unknown scale '" + name + "'");
}

void write_configurations_csv(std::ostream& out, std::span<const PointConfiguration> draws) {
  const std::size_t n = draws.empty() ? 0 : draws.front().size();
  out << "draw";
  for (std::size_t k = 1; k <= n; ++k) out << ",x" << k;
  out << "\r\n";
  for (std::size_t d = 0; d < draws.size(); ++d) {
    if (draws[d].size() != n) throw IoError("configurations csv: draws differ in size");
    out << d;
    for (double x : draws[d].points) out << ',' << format_double(x);
    out << "\r\n";
  }
}

std::vector<PointConfiguration> read_configurations_csv(std::istream& in) {
  auto recs = parse_csv(in);
  if (recs.empty() || recs[0].empty() || recs[0][0] != "draw") throw IoError("configurations csv: missing header");
  const std::size_t cols = recs[0].size();
  std::vector<PointConfiguration> out;
  out.reserve(recs.size() - 1);
  for (std::size_t r = 1; r < recs.size(); ++r) {
    if (recs[r].size() != cols) throw IoError("configurations csv: row " + std::to_string(r) + " has wrong width");
    PointConfiguration c;
    for (std::size_t k = 1; k < cols; ++k) c.points.push_back(parse_double(recs[r][k]));
    if (!c.valid()) throw IoError("configurations csv: row " + std::to_string(r) + " is not ascending and positive");
    out.push_back(std::move(c));
  }
  return out;
}

void write_configurations_jsonl(std::ostream& out, std::span<const PointConfiguration> draws, std::uint64_t seed) {
  for (std::size_t d = 0; d < draws.size(); ++d) {
    // Points are written by hand so the text matches the CSV digits.
    out << "{\"draw\":" << d << ",\"points\":[";
    for (std::size_t k = 0; k < draws[d].size(); ++k) out << (k ? "," : "") << format_double(draws[d].points[k]);
    out << "],\"scale\":\"" << to_string(draws[d].scale) << "\",\"seed\":" << seed << "}\n";
  }
}

std::vector<PointConfiguration> read_configurations_jsonl(std::istream& in) {
  std::vector<PointConfiguration> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      PointConfiguration c;
      c.points = j.at("points").get<std::vector<double>>();
      c.scale = parse_scale(j.at("scale").get<std::string>());
      if (!c.valid()) throw IoError("points are not ascending and positive");
      out.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw IoError("configurations jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream& in, int count) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), count)) throw IoError("hel1: truncated file");
  std::uint64_t v = 0;
  for (int i = count - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) { return static_cast<std::uint32_t>(get_bytes(in, 4)); }
std::uint64_t get_u64(std::istream& in) { return get_bytes(in, 8); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_hel1(std::ostream& out, const TrajectoryBundle& b) {
  if (b.states.size() != b.times.size()) throw IoError("hel1: times and states differ in length");
  const std::size_t n = b.states.empty() ? static_cast<std::size_t>(b.n) : b.states.front().size();
  out.write(kHel1Magic, 4);
  put_u32(out, kHel1Version);
  put_u32(out, static_cast<std::uint32_t>(n));
  put_u32(out, b.config.scheme == Scheme::euler_maruyama ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(b.n));
  put_u32(out, 0);  // reserved
  put_f64(out, b.alpha);
  put_f64(out, b.config.dt_max);
  put_f64(out, b.config.dt_min);
  put_f64(out, b.config.safety);
  put_f64(out, b.config.origin_floor);
  put_f64(out, b.config.collision_floor);
  put_f64(out, b.config.record_interval);
  put_u64(out, b.times.size());
  for (std::size_t f = 0; f < b.times.size(); ++f) {
    if (b.states[f].size() != n) throw IoError("hel1: frames differ in size");
    put_f64(out, b.times[f]);
    for (double x : b.states[f]) put_f64(out, x);
  }
}

TrajectoryBundle read_hel1(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kHel1Magic, 4) != 0) throw IoError("hel1: bad magic");
  if (get_u32(in) != kHel1Version) throw IoError("hel1: unsupported version");
  TrajectoryBundle b;
  const std::uint32_t n = get_u32(in);
  const std::uint32_t scheme = get_u32(in);
  if (scheme > 1) throw IoError("hel1: unknown scheme code");
  b.config.scheme = scheme == 0 ? Scheme::euler_maruyama : Scheme::tamed_euler;
  b.n = static_cast<int>(get_u32(in));
  get_u32(in);
  b.alpha = get_f64(in);
  b.config.dt_max = get_f64(in);
  b.config.dt_min = get_f64(in);
  b.config.safety = get_f64(in);
  b.config.origin_floor = get_f64(in);
  b.config.collision_floor = get_f64(in);
  b.config.record_interval = get_f64(in);
  const std::uint64_t frames = get_u64(in);
  for (std::uint64_t f = 0; f < frames; ++f) {
    b.times.push_back(get_f64(in));
    std::vector<double> x(n);
    for (auto& v : x) v = get_f64(in);
    b.states.push_back(std::move(x));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("hel1: trailing bytes");
  return b;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryBundle& b, std::uint64_t trajectory, bool header) {
  if (header) out << "trajectory,time,particle,position\r\n";
  for (std::size_t f = 0; f < b.times.size(); ++f)
    for (std::size_t i = 0; i < b.states[f].size(); ++i)
      out << trajectory << ',' << format_double(b.times[f]) << ',' << i << ',' << format_double(b.states[f][i])
          << "\r\n";
}

namespace {
// JSON has no infinities; they are written as strings.
nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}
double denum(const nlohmann::ordered_json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}
}  // namespace

nlohmann::ordered_json telemetry_json(const Telemetry& t) {
  return {{"steps", t.steps},
          {"rejected", t.rejected},
          {"rejected_step_rule", t.rejected_step_rule},
          {"rejected_origin", t.rejected_origin},
          {"rejected_collision", t.rejected_collision},
          {"ordering_violations", t.ordering_violations},
          {"min_gap", num(t.min_gap)},
          {"min_origin", num(t.min_origin)},
          {"smallest_dt", num(t.smallest_dt)}};
}

nlohmann::ordered_json integrator_json(const IntegratorConfig& c) {
  return {{"dt_max", num(c.dt_max)},
          {"dt_min", num(c.dt_min)},
          {"safety", num(c.safety)},
          {"origin_floor", num(c.origin_floor)},
          {"collision_floor", num(c.collision_floor)},
          {"scheme", to_string(c.scheme)},
          {"record_interval", num(c.record_interval)}};
}

IntegratorConfig integrator_from_json(const nlohmann::ordered_json& j) {
  IntegratorConfig c;
  if (j.contains("dt_max")) c.dt_max = denum(j["dt_max"]);
  if (j.contains("dt_min")) c.dt_min = denum(j["dt_min"]);
  if (j.contains("safety")) c.safety = denum(j["safety"]);
  if (j.contains("origin_floor")) c.origin_floor = denum(j["origin_floor"]);
  if (j.contains("collision_floor")) c.collision_floor = denum(j["collision_floor"]);
  if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
  if (j.contains("record_interval")) c.record_interval = denum(j["record_interval"]);
  return c;
}

// ---------------------------------------------------------------------------

namespace {
void check_exact(std::span<const double> exact, std::size_t cells) {
  if (!exact.empty() && exact.size() != cells) throw IoError("kernel_exact column has the wrong length");
}
}  // namespace

void write_rho1_csv(std::ostream& out, const BinnedDensity& d, std::span<const double> exact) {
  check_exact(exact, d.bins());
  out << "bin_lo,bin_hi,estimate,stderr,count" << (exact.empty() ? "" : ",kernel_exact") << "\r\n";
  for (std::size_t i = 0; i < d.bins(); ++i) {
    out << format_double(d.edges[i]) << ',' << format_double(d.edges[i + 1]) << ',' << format_double(d.density(i))
        << ',' << format_double(d.stderr_(i)) << ',' << format_double(d.counts[i]);
    if (!exact.empty()) out << ',' << format_double(exact[i]);
    out << "\r\n";
  }
}

nlohmann::ordered_json rho1_json(const BinnedDensity& d, std::span<const double> exact) {
  check_exact(exact, d.bins());
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < d.bins(); ++i) {
    nlohmann::ordered_json b{{"bin_lo", d.edges[i]},
                             {"bin_hi", d.edges[i + 1]},
                             {"estimate", d.density(i)},
                             {"stderr", d.stderr_(i)},
                             {"count", d.counts[i]}};
    if (!exact.empty()) b["kernel_exact"] = exact[i];
    bins.push_back(std::move(b));
  }
  return {{"draws", d.draws}, {"bins", std::move(bins)}};
}

void write_rho2_csv(std::ostream& out, const PairDensity2D& d, std::span<const double> exact) {
  const std::size_t ny = d.edges_y.size() - 1, nz = d.edges_z.size() - 1;
  check_exact(exact, ny * nz);
  out << "y_lo,y_hi,z_lo,z_hi,estimate,stderr" << (exact.empty() ? "" : ",kernel_exact") << "\r\n";
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      out << format_double(d.edges_y[i]) << ',' << format_double(d.edges_y[i + 1]) << ','
          << format_double(d.edges_z[j]) << ',' << format_double(d.edges_z[j + 1]) << ','
          << format_double(d.density(i, j)) << ',' << format_double(d.stderr_(i, j));
      if (!exact.empty()) out << ',' << format_double(exact[i * nz + j]);
      out << "\r\n";
    }
}

nlohmann::ordered_json rho2_json(const PairDensity2D& d, std::span<const double> exact) {
  const std::size_t ny = d.edges_y.size() - 1, nz = d.edges_z.size() - 1;
  check_exact(exact, ny * nz);
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      nlohmann::ordered_json c{{"y_lo", d.edges_y[i]},     {"y_hi", d.edges_y[i + 1]},
                               {"z_lo", d.edges_z[j]},     {"z_hi", d.edges_z[j + 1]},
                               {"estimate", d.density(i, j)}, {"stderr", d.stderr_(i, j)}};
      if (!exact.empty()) c["kernel_exact"] = exact[i * nz + j];
      cells.push_back(std::move(c));
    }
  return {{"draws", d.draws}, {"cells", std::move(cells)}};
}

// ---------------------------------------------------------------------------

void write_table_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_escape(t.columns[c]);
  out << "\r\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw IoError("table csv: row width differs from header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << "\r\n";
  }
}

Table read_table_csv(std::istream& in) {
  auto recs = parse_csv(in);
  if (recs.empty()) throw IoError("table csv: empty input");
  Table t;
  t.columns = recs[0];
  for (std::size_t r = 1; r < recs.size(); ++r) {
    if (recs[r].size() != t.columns.size()) throw IoError("table csv: row width differs from header");
    std::vector<double> row;
    for (const auto& f : recs[r]) row.push_back(parse_double(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace hardedge
