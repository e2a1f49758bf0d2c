#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hardedge/io.hpp"

using namespace hardedge;

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 4.9e-324, 1.7976931348623157e308, 3.141592653589793}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(std::isinf(parse_double(format_double(std::numeric_limits<double>::infinity()))));
  CHECK(format_double(0.5) == "0.5");
  CHECK(parse_double(" +2 ") == 2.0);
  CHECK_THROWS_AS(parse_double("1,5"), IoError);
  CHECK_THROWS_AS(parse_double(""), IoError);
  CHECK_THROWS_AS(parse_double("2x"), IoError);
}

TEST_CASE("csv parser follows RFC 4180 quoting") {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,2,3\r\n\r\nx,\"multi\nline\",z");
  auto r = parse_csv(in);
  REQUIRE(r.size() == 3);
  CHECK(r[0][1] == "b,c");
  CHECK(r[0][2] == "say \"hi\"");
  CHECK(r[1] == std::vector<std::string>{"1", "2", "3"});
  CHECK(r[2][1] == "multi\nline");
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a\"b") == "\"a\"\"b\"");
  std::istringstream bad("\"open");
  CHECK_THROWS_AS(parse_csv(bad), IoError);
}

TEST_CASE("configurations round-trip through csv and jsonl") {
  std::vector<PointConfiguration> d{{{0.1, 2.0 / 3.0, 7.25}}, {{1e-9, 1.0, 1e6}}};
  std::ostringstream csv;
  write_configurations_csv(csv, d);
  CHECK(csv.str().rfind("draw,x1,x2,x3\r\n0,0.1,", 0) == 0);
  std::istringstream csv_in(csv.str());
  auto back = read_configurations_csv(csv_in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].points == d[0].points);
  CHECK(back[1].points == d[1].points);

  std::ostringstream jl;
  write_configurations_jsonl(jl, d, 7);
  std::istringstream jl_in(jl.str());
  auto back2 = read_configurations_jsonl(jl_in);
  REQUIRE(back2.size() == 2);
  CHECK(back2[1].points == d[1].points);
  CHECK(back2[1].scale == Scale::hardedge);
  const auto first = nlohmann::json::parse(jl.str().substr(0, jl.str().find('\n')));
  CHECK(first["draw"] == 0);
  CHECK(first["seed"] == 7);
  CHECK(first["scale"] == "hardedge");
}

TEST_CASE("unordered or ragged configuration rows are rejected") {
  std::istringstream unordered("draw,x1,x2\r\n0,2,1\r\n");
  CHECK_THROWS_AS(read_configurations_csv(unordered), IoError);
  std::istringstream ragged("draw,x1,x2\r\n0,1\r\n");
  CHECK_THROWS_AS(read_configurations_csv(ragged), IoError);
  std::istringstream headerless("0,1,2\r\n");
  CHECK_THROWS_AS(read_configurations_csv(headerless), IoError);
  std::istringstream jl("{\"draw\":0,\"points\":[1,-1],\"scale\":\"hardedge\",\"seed\":1}\n");
  CHECK_THROWS_AS(read_configurations_jsonl(jl), IoError);
}

TEST_CASE("HEL1 frames round-trip and the header is little-endian") {
  TrajectoryBundle b;
  b.alpha = 1.5;
  b.n = 3;
  b.config.dt_max = 1e-3;
  b.config.scheme = Scheme::tamed_euler;
  b.times = {0.0, 0.25};
  b.states = {{0.5, 1.0, 2.0}, {0.6, 1.1, 2.2}};
  std::ostringstream out;
  write_hel1(out, b);
  const std::string bytes = out.str();
  CHECK(bytes.size() == 88 + 2 * 8 * 4);
  CHECK(bytes.substr(0, 4) == "HEL1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, low byte first
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);  // particles per frame
  CHECK(static_cast<unsigned char>(bytes[12]) == 1);  // tamed Euler

  std::istringstream in(bytes);
  const TrajectoryBundle r = read_hel1(in);
  CHECK(r.alpha == 1.5);
  CHECK(r.n == 3);
  CHECK(r.config.scheme == Scheme::tamed_euler);
  CHECK(r.config.dt_max == 1e-3);
  CHECK(std::isinf(r.config.record_interval));
  CHECK(r.times == b.times);
  CHECK(r.states == b.states);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_hel1(truncated), IoError);
  std::istringstream wrong("HEL2" + bytes.substr(4));
  CHECK_THROWS_AS(read_hel1(wrong), IoError);
}

TEST_CASE("trajectory csv has one row per particle per frame") {
  TrajectoryBundle b;
  b.times = {0.0, 1.0};
  b.states = {{0.5, 1.0}, {0.75, 1.5}};
  std::ostringstream out;
  write_trajectory_csv(out, b, 4, true);
  std::istringstream in(out.str());
  auto r = parse_csv(in);
  REQUIRE(r.size() == 5);
  CHECK(r[0] == std::vector<std::string>{"trajectory", "time", "particle", "position"});
  CHECK(r[4] == std::vector<std::string>{"4", "1", "1", "1.5"});
}

TEST_CASE("integrator config round-trips through json with infinities") {
  IntegratorConfig c;
  c.safety = 0.02;
  c.scheme = Scheme::tamed_euler;
  const auto j = integrator_json(c);
  CHECK(j["record_interval"] == "inf");
  const IntegratorConfig back = integrator_from_json(nlohmann::ordered_json::parse(j.dump()));
  CHECK(back.safety == 0.02);
  CHECK(back.scheme == Scheme::tamed_euler);
  CHECK(std::isinf(back.record_interval));
  Telemetry t;
  CHECK(telemetry_json(t)["min_gap"] == "inf");
}

TEST_CASE("estimate csv columns and overlay") {
  const std::vector<PointConfiguration> d{{{0.5, 1.5}}, {{0.7, 2.5}}};
  const double edges[] = {0.0, 1.0, 3.0};
  const BinnedDensity h = estimate_rho1(d, edges);
  const double exact[] = {1.0, 0.5};
  std::ostringstream out;
  write_rho1_csv(out, h, exact);
  std::istringstream in(out.str());
  auto r = parse_csv(in);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == std::vector<std::string>{"bin_lo", "bin_hi", "estimate", "stderr", "count", "kernel_exact"});
  CHECK(parse_double(r[1][2]) == 1.0);
  CHECK(parse_double(r[2][5]) == 0.5);
  const auto j = rho1_json(h);
  CHECK(j["bins"].size() == 2);
  CHECK_FALSE(j["bins"][0].contains("kernel_exact"));
  const double wrong[] = {1.0};
  CHECK_THROWS_AS(write_rho1_csv(out, h, wrong), IoError);

  const PairDensity2D p = estimate_rho2(d, edges, edges);
  std::ostringstream o2;
  write_rho2_csv(o2, p);
  std::istringstream i2(o2.str());
  auto r2 = parse_csv(i2);
  CHECK(r2.size() == 5);
  CHECK(r2[0][4] == "estimate");
  CHECK(rho2_json(p)["cells"].size() == 4);
}

TEST_CASE("tables round-trip") {
  Table t{{"n", "sup, scaled"}, {{50, 0.125}, {100, 1e-17}}};
  std::ostringstream out;
  write_table_csv(out, t);
  CHECK(out.str().rfind("n,\"sup, scaled\"\r\n", 0) == 0);
  std::istringstream in(out.str());
  const Table back = read_table_csv(in);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
}
