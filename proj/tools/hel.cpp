// hel: sampling, dynamics, correlation estimates and numerical checks for
// the Laguerre hard-edge ensemble, with a manifest beside every output.
//
// Exit codes: 0 success, 1 runtime failure (or a failed verify suite),
// 2 bad flags or inputs, 3 integrator blowup.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hardedge/diagnostics.hpp"
#include "hardedge/dynamics.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/estimators.hpp"
#include "hardedge/io.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/rng.hpp"

#ifndef HEL_VERSION
#define HEL_VERSION "0.0.0"
#endif
#ifndef HEL_PROFILE_DIR
#define HEL_PROFILE_DIR "profiles"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hardedge;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kBlowup = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameters. Every command declares its parameters once; the same table
// drives the flags, the config-file keys and the manifest.

enum class Kind { integer, real, text, int_list, real_list };

struct Param {
  std::string key;
  Kind kind;
  json def;  // null means unset
  std::string help;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

json parse_integer(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size()) return v;
  unsigned long long u = 0;
  auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), u);
  if (ec2 == std::errc() && q == s.data() + s.size()) return u;
  throw UsageError("not an integer: '" + s + "'");
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json coerce_scalar(Kind kind, const json& v) {
  if (kind == Kind::text) {
    if (!v.is_string()) throw UsageError("expected a string");
    return v;
  }
  if (kind == Kind::integer) {
    if (v.is_number_integer()) return v;
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
    if (v.is_string()) return parse_integer(v.get<std::string>());
    throw UsageError("expected an integer");
  }
  if (v.is_number()) return real_json(v.get<double>());
  if (v.is_string()) {
    try {
      return real_json(parse_double(v.get<std::string>()));
    } catch (const IoError& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("expected a number");
}

json coerce(const Param& p, const json& v) {
  if (v.is_null()) return v;
  try {
    if (p.kind == Kind::int_list || p.kind == Kind::real_list) {
      const Kind elem = p.kind == Kind::int_list ? Kind::integer : Kind::real;
      json out = json::array();
      if (v.is_array()) {
        for (const auto& e : v) out.push_back(coerce_scalar(elem, e));
      } else if (v.is_string()) {
        for (const auto& e : split_list(v.get<std::string>())) out.push_back(coerce_scalar(elem, e));
      } else {
        out.push_back(coerce_scalar(elem, v));
      }
      return out;
    }
    return coerce_scalar(p.kind, v);
  } catch (const UsageError& e) {
    throw UsageError("--" + p.key + ": " + e.what());
  }
}

double as_real(const json& v) { return v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>(); }

struct Resolved {
  json cfg;
  bool has(const std::string& k) const { return cfg.contains(k) && !cfg[k].is_null(); }
  const json& need(const std::string& k) const {
    if (!has(k)) throw UsageError("missing required option --" + k);
    return cfg[k];
  }
  long long integer(const std::string& k) const { return need(k).get<long long>(); }
  std::uint64_t u64(const std::string& k) const {
    const json& v = need(k);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.get<long long>() < 0) throw UsageError("--" + k + " must be nonnegative");
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  double real(const std::string& k) const { return as_real(need(k)); }
  std::string text(const std::string& k) const { return need(k).get<std::string>(); }
  std::vector<double> reals(const std::string& k) const {
    std::vector<double> out;
    for (const auto& v : need(k)) out.push_back(as_real(v));
    return out;
  }
  std::vector<int> ints(const std::string& k) const {
    std::vector<int> out;
    for (const auto& v : need(k)) out.push_back(static_cast<int>(v.get<long long>()));
    return out;
  }
};

/// Defaults, then the config file (a plain object of option values, or a
/// manifest written by an earlier run), then flags given on the command line.
Resolved resolve(const std::string& command, const std::vector<Param>& params, const std::string& config_path,
                 const std::map<std::string, std::string>& raw, const std::set<std::string>& given) {
  Resolved r;
  r.cfg = json::object();
  for (const auto& p : params) r.cfg[p.key] = coerce(p, p.def);
  if (!config_path.empty()) {
    json file;
    try {
      file = json::parse(read_file(config_path));
    } catch (const std::exception& e) {
      throw UsageError("cannot read config " + config_path + ": " + e.what());
    }
    if (!file.is_object()) throw UsageError("config " + config_path + " is not a JSON object");
    if (file.contains("config") && file.contains("command")) {
      if (file["command"] != command)
        throw UsageError("config " + config_path + " is a manifest for '" + file["command"].get<std::string>() +
                         "', not '" + command + "'");
      file = file["config"];
    }
    for (const auto& [k, v] : file.items()) {
      auto it = std::find_if(params.begin(), params.end(), [&](const Param& p) { return p.key == k; });
      if (it == params.end()) throw UsageError("config " + config_path + ": unknown key '" + k + "' for " + command);
      r.cfg[k] = coerce(*it, v);
    }
  }
  for (const auto& p : params)
    if (given.count(p.key)) r.cfg[p.key] = coerce(p, json(raw.at(p.key)));
  return r;
}

void write_manifest(const fs::path& dir, const std::string& command, const Resolved& r, json extra = json::object()) {
  json m = {{"tool", "hel"}, {"version", HEL_VERSION}, {"command", command}};
  m["seed"] = r.has("seed") ? r.cfg["seed"] : json(nullptr);
  m["config"] = r.cfg;
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

/// Runs f and reports rejected arguments (invalid_argument, domain errors,
/// unreadable inputs) as usage errors. Other failures pass through.
template <class F>
auto checked(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(what + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(what + ": " + e.what());
  } catch (const IoError& e) {
    throw UsageError(what + ": " + e.what());
  }
}

std::vector<PointConfiguration> load_draws(const fs::path& p) {
  const std::string text = read_file(p);
  std::istringstream in(text);
  return p.extension() == ".jsonl" ? read_configurations_jsonl(in) : read_configurations_csv(in);
}

std::string str(double v) { return format_double(v); }

// ---------------------------------------------------------------------------

std::vector<Param> common_params(bool out_required) {
  return {
      {"out", Kind::text, nullptr, out_required ? "output directory" : "output directory (optional)"},
      {"workers", Kind::integer, default_workers(), "worker threads (default: HEL_WORKERS or 1)"},
  };
}

int workers_of(const Resolved& r) {
  const long long w = r.integer("workers");
  if (w < 1) throw UsageError("--workers must be at least 1");
  return static_cast<int>(w);
}

// ---- sample ---------------------------------------------------------------

std::vector<Param> sample_params() {
  std::vector<Param> p = {
      {"alpha", Kind::real, 1.0, "Laguerre order, alpha > -1"},
      {"n", Kind::integer, 50, "number of particles N"},
      {"draws", Kind::integer, 1000, "number of independent draws"},
      {"seed", Kind::integer, 1, "random seed"},
      {"sampler", Kind::text, "tridiagonal", "tridiagonal | hkpv"},
      {"format", Kind::text, "both", "csv | jsonl | both"},
  };
  for (auto& c : common_params(true)) p.push_back(c);
  return p;
}

int cmd_sample(const Resolved& r) {
  const Order alpha = checked("--alpha", [&] { return Order(r.real("alpha")); });
  const long long n = r.integer("n"), draws = r.integer("draws");
  if (n < 1) throw UsageError("--n must be at least 1");
  if (draws < 1) throw UsageError("--draws must be at least 1");
  const Sampler smp = checked("--sampler", [&] { return parse_sampler(r.text("sampler")); });
  const std::string format = r.text("format");
  if (format != "csv" && format != "jsonl" && format != "both") throw UsageError("--format must be csv, jsonl or both");
  const fs::path out = r.text("out");
  const int workers = workers_of(r);
  const std::uint64_t seed = r.u64("seed");

  const EnsembleSpec spec(alpha, static_cast<int>(n), seed, smp);
  const auto d = sample_batch(spec, static_cast<std::size_t>(draws), workers);
  if (format != "jsonl") {
    std::ostringstream s;
    write_configurations_csv(s, d);
    write_file(out / "draws.csv", s.str());
  }
  if (format != "csv") {
    std::ostringstream s;
    write_configurations_jsonl(s, d, seed);
    write_file(out / "draws.jsonl", s.str());
  }
  write_manifest(out, "sample", r);
  std::cout << "sample: " << draws << " draws, N = " << n << ", alpha = " << str(alpha.value()) << " -> "
            << out.string() << "\n";
  return kOk;
}

// ---- evolve ---------------------------------------------------------------

std::vector<Param> evolve_params() {
  std::vector<Param> p = {
      {"mode", Kind::text, "finite-n", "finite-n | isde"},
      {"alpha", Kind::real, 1.0, "Laguerre order, alpha >= 1 for the dynamics"},
      {"n", Kind::integer, 5, "particles per configuration (the confinement scale in finite-n mode)"},
      {"window", Kind::integer, 0, "isde: number of moving particles (0 = all)"},
      {"cutoff", Kind::real, "inf", "isde: interaction radius R"},
      {"T", Kind::real, 0.1, "time horizon"},
      {"dt-max", Kind::real, 1e-3, "largest step"},
      {"dt-min", Kind::real, 1e-30, "smallest step before a blowup is declared"},
      {"safety", Kind::real, 0.01, "step rule dt <= safety * min(gap^2, x_1^2)"},
      {"origin-floor", Kind::real, 1e-8, "origin floor"},
      {"collision-floor", Kind::real, 1e-10, "collision floor"},
      {"scheme", Kind::text, "euler-maruyama", "euler-maruyama | tamed-euler"},
      {"record-interval", Kind::real, "inf", "spacing of recorded frames (inf: first and last only)"},
      {"trajectories", Kind::integer, 1, "number of independent trajectories"},
      {"seed", Kind::integer, 1, "random seed (initial draws and driving noise)"},
      {"initial", Kind::text, nullptr, "draws file for initial configurations (default: exact ensemble draws)"},
      {"format", Kind::text, "both", "hel1 | csv | both"},
  };
  for (auto& c : common_params(true)) p.push_back(c);
  return p;
}

int cmd_evolve(const Resolved& r) {
  const Order alpha = checked("--alpha", [&] {
    Order a(r.real("alpha"));
    a.require_non_hitting();
    return a;
  });
  const std::string mode = r.text("mode");
  if (mode != "finite-n" && mode != "isde") throw UsageError("--mode must be finite-n or isde");
  const long long n = r.integer("n"), window = r.integer("window"), count = r.integer("trajectories");
  if (n < 1) throw UsageError("--n must be at least 1");
  if (count < 1) throw UsageError("--trajectories must be at least 1");
  if (window < 0 || window > n) throw UsageError("--window must lie in [0, N]");
  const double T = r.real("T");
  if (!(T >= 0.0) || !std::isfinite(T)) throw UsageError("--T must be finite and nonnegative");
  IntegratorConfig cfg;
  cfg.dt_max = r.real("dt-max");
  cfg.dt_min = r.real("dt-min");
  cfg.safety = r.real("safety");
  cfg.origin_floor = r.real("origin-floor");
  cfg.collision_floor = r.real("collision-floor");
  cfg.record_interval = r.real("record-interval");
  cfg.scheme = checked("--scheme", [&] { return parse_scheme(r.text("scheme")); });
  checked("integrator", [&] {
    cfg.validate();
    return 0;
  });
  const DriftSpec ds = checked("drift", [&] {
    return mode == "finite-n" ? DriftSpec::finite(alpha, static_cast<int>(n))
                              : DriftSpec::isde(alpha, static_cast<int>(window), r.real("cutoff"));
  });
  const std::string format = r.text("format");
  if (format != "hel1" && format != "csv" && format != "both") throw UsageError("--format must be hel1, csv or both");
  const fs::path out = r.text("out");
  const int workers = workers_of(r);
  const std::uint64_t seed = r.u64("seed");

  std::vector<PointConfiguration> initial;
  if (r.has("initial")) {
    initial = checked("--initial", [&] { return load_draws(r.text("initial")); });
    if (initial.size() < static_cast<std::size_t>(count))
      throw UsageError("--initial holds " + std::to_string(initial.size()) + " draws, fewer than --trajectories");
    initial.resize(static_cast<std::size_t>(count));
    for (auto& c : initial)
      if (c.size() != static_cast<std::size_t>(n)) throw UsageError("--initial draws do not have N points");
  } else {
    initial = sample_batch(EnsembleSpec(alpha, static_cast<int>(n), seed), static_cast<std::size_t>(count), workers);
  }

  struct Outcome {
    TrajectoryBundle bundle;
    bool blown = false;
    double at = 0.0;
    std::string message;
  };
  std::vector<Outcome> res(initial.size());
  parallel_for(initial.size(), workers, [&](std::size_t k) {
    try {
      res[k].bundle = evolve(initial[k], ds, cfg, T, seed, k);
    } catch (const BlowupError& e) {
      res[k].blown = true;
      res[k].at = e.at;
      res[k].message = e.what();
      res[k].bundle.telemetry = e.telemetry;
    }
  });

  Telemetry total;
  json per = json::array();
  std::ostringstream csv;
  bool header = true;
  long blowups = 0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const Outcome& o = res[k];
    total.absorb(o.bundle.telemetry);
    json t = {{"index", k}, {"status", o.blown ? "blowup" : "completed"}};
    if (o.blown) {
      ++blowups;
      t["time"] = o.at;
      t["message"] = o.message;
    }
    t["telemetry"] = telemetry_json(o.bundle.telemetry);
    per.push_back(std::move(t));
    if (o.blown) continue;
    if (format != "csv") {
      std::ostringstream b;
      write_hel1(b, o.bundle);
      char name[32];
      std::snprintf(name, sizeof name, "traj_%06zu.hel1", k);
      write_file(out / name, b.str());
    }
    if (format != "hel1") {
      write_trajectory_csv(csv, o.bundle, k, header);
      header = false;
    }
  }
  if (format != "hel1") write_file(out / "trajectories.csv", csv.str());
  const json summary = {{"trajectories", res.size()},
                        {"completed", static_cast<long>(res.size()) - blowups},
                        {"blowups", blowups},
                        {"integrator", integrator_json(cfg)},
                        {"total", telemetry_json(total)},
                        {"per_trajectory", std::move(per)}};
  write_file(out / "telemetry.json", summary.dump(2) + "\n");
  write_manifest(out, "evolve", r);

  std::cout << "evolve: " << res.size() - blowups << "/" << res.size() << " trajectories completed; steps "
            << total.steps << ", rejected " << total.rejected << ", min origin distance " << str(total.min_origin)
            << ", min gap " << str(total.min_gap) << ", ordering violations " << total.ordering_violations << "\n";
  if (blowups > 0) {
    for (const auto& o : res)
      if (o.blown) {
        std::cerr << "hel: " << o.message << "\n";
        break;
      }
    std::cerr << "hel: blowups: " << blowups << " of " << res.size() << "; telemetry in " << (out / "telemetry.json").string()
              << "\n";
    return kBlowup;
  }
  return kOk;
}

// ---- correlate ------------------------------------------------------------

std::vector<Param> correlate_params() {
  std::vector<Param> p = {
      {"input", Kind::text, nullptr, "directory written by `hel sample`, or a draws file"},
      {"alpha", Kind::real, nullptr, "Laguerre order (default: from the input manifest)"},
      {"n", Kind::integer, nullptr, "N (default: from the input manifest)"},
      {"bins", Kind::integer, 20, "equal-count bins for the one-point density"},
      {"edges", Kind::real_list, nullptr, "explicit bin edges for the one-point density"},
      {"pair-bins", Kind::integer, 8, "equal-count bins per axis for the pair density"},
      {"pair-edges", Kind::real_list, nullptr, "explicit bin edges per axis for the pair density"},
  };
  for (auto& c : common_params(true)) p.push_back(c);
  return p;
}

/// Gauss-Legendre nodes in u = sqrt(y) over [a, b], for cell averages.
GaussRule bin_rule(double a, double b) {
  static const GaussRule g = gauss_legendre(8);
  const double ua = std::sqrt(a), ub = std::sqrt(b);
  const int panels = std::clamp(static_cast<int>(std::ceil((ub - ua) / 0.5)), 1, 16);
  GaussRule r;
  const double w = (ub - ua) / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double u = ua + w * (p + 0.5 * (g.nodes[k] + 1.0));
      r.nodes.push_back(u * u);
      r.weights.push_back(0.5 * w * g.weights[k] * 2.0 * u / (b - a));  // dy = 2u du, normalized to an average
    }
  return r;
}

std::vector<double> checked_edges(const std::vector<double>& e, const char* flag) {
  if (e.size() < 2) throw UsageError(std::string(flag) + " needs at least two edges");
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    if (!(e[i + 1] > e[i])) throw UsageError(std::string(flag) + " must be strictly increasing");
  if (e.front() < 0.0) throw UsageError(std::string(flag) + " must be nonnegative");
  return e;
}

int cmd_correlate(Resolved r) {
  const fs::path input = r.text("input");
  fs::path draws_file;
  if (fs::is_regular_file(input)) {
    draws_file = input;
  } else if (fs::is_directory(input)) {
    for (const char* name : {"draws.csv", "draws.jsonl"})
      if (fs::is_regular_file(input / name)) {
        draws_file = input / name;
        break;
      }
    if (draws_file.empty()) throw UsageError("no draws.csv or draws.jsonl in " + input.string());
  } else {
    throw UsageError("input " + input.string() + " does not exist");
  }
  const fs::path input_manifest = (fs::is_directory(input) ? input : input.parent_path()) / "manifest.json";
  if ((!r.has("alpha") || !r.has("n")) && fs::is_regular_file(input_manifest)) {
    const json m = json::parse(read_file(input_manifest));
    if (m.contains("config")) {
      if (!r.has("alpha") && m["config"].contains("alpha")) r.cfg["alpha"] = m["config"]["alpha"];
      if (!r.has("n") && m["config"].contains("n")) r.cfg["n"] = m["config"]["n"];
    }
  }
  const Order alpha = checked("--alpha", [&] { return Order(r.real("alpha")); });
  const long long n = r.integer("n");
  if (n < 1) throw UsageError("--n must be at least 1");
  const std::vector<PointConfiguration> draws = checked("input", [&] { return load_draws(draws_file); });
  if (draws.empty()) throw UsageError("input " + draws_file.string() + " holds no draws");
  if (draws.front().size() != static_cast<std::size_t>(n))
    throw UsageError("draws have " + std::to_string(draws.front().size()) + " points but N = " + std::to_string(n));
  const fs::path out = r.text("out");

  std::vector<double> edges, pair_edges;
  if (r.has("edges")) {
    edges = checked_edges(r.reals("edges"), "--edges");
  } else {
    const long long bins = r.integer("bins");
    if (bins < 1) throw UsageError("--bins must be at least 1");
    edges = auto_edges(draws, static_cast<std::size_t>(bins));
  }
  if (r.has("pair-edges")) {
    pair_edges = checked_edges(r.reals("pair-edges"), "--pair-edges");
  } else {
    const long long bins = r.integer("pair-bins");
    if (bins < 1) throw UsageError("--pair-bins must be at least 1");
    pair_edges = auto_edges(draws, static_cast<std::size_t>(bins));
  }

  const LaguerreKernel k(alpha, static_cast<int>(n));
  const BinnedDensity h1 = estimate_rho1(draws, edges);
  std::vector<double> exact1(h1.bins());
  for (std::size_t i = 0; i < h1.bins(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    // integrate the density in u = sqrt(y), where it is smooth at the origin
    const auto q = integrate([&](double u) { return 2.0 * u * k.diagonal(u * u); }, std::sqrt(a), std::sqrt(b),
                             QuadOptions{1e-12, 1e-10, 2000});
    exact1[i] = q.value / (b - a);
  }

  const PairDensity2D h2 = estimate_rho2(draws, pair_edges, pair_edges);
  const std::size_t nb = pair_edges.size() - 1;
  std::vector<GaussRule> rules;
  for (std::size_t i = 0; i < nb; ++i) rules.push_back(bin_rule(pair_edges[i], pair_edges[i + 1]));
  std::vector<double> exact2(nb * nb);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < rules[i].nodes.size(); ++a) {
        const double y = rules[i].nodes[a], kyy = k.diagonal(y);
        for (std::size_t b = 0; b < rules[j].nodes.size(); ++b) {
          const double z = rules[j].nodes[b], kyz = k(y, z);
          s += rules[i].weights[a] * rules[j].weights[b] * (kyy * k.diagonal(z) - kyz * kyz);
        }
      }
      exact2[i * nb + j] = s;
    }

  std::ostringstream c1, c2;
  write_rho1_csv(c1, h1, exact1);
  write_rho2_csv(c2, h2, exact2);
  write_file(out / "rho1.csv", c1.str());
  write_file(out / "rho2.csv", c2.str());
  json j1 = rho1_json(h1, exact1), j2 = rho2_json(h2, exact2);
  j1["alpha"] = j2["alpha"] = alpha.value();
  j1["n"] = j2["n"] = n;
  write_file(out / "rho1.json", j1.dump(2) + "\n");
  write_file(out / "rho2.json", j2.dump(2) + "\n");
  write_manifest(out, "correlate", r, {{"input_draws", draws_file.string()}});

  double worst = 0.0;
  std::size_t populated = 0;
  for (std::size_t i = 0; i < h1.bins(); ++i)
    if (h1.counts[i] >= 100) {
      ++populated;
      worst = std::max(worst, std::abs(h1.density(i) - exact1[i]) / h1.stderr_(i));
    }
  std::cout << "correlate: " << draws.size() << " draws; rho1 over " << h1.bins() << " bins (" << populated
            << " with >= 100 counts, max |estimate - kernel| = " << str(worst) << " SE); rho2 over " << nb << "x"
            << nb << " cells -> " << out.string() << "\n";
  return kOk;
}

// ---- verify ---------------------------------------------------------------

const std::vector<std::string> kSuites = {"kernel-convergence", "lemma52", "tails", "hilb", "ibp", "stationarity"};

std::vector<Param> verify_params() {
  std::vector<Param> p = {
      {"suite", Kind::text, "all", "kernel-convergence | lemma52 | tails | hilb | ibp | stationarity | all"},
      {"profile", Kind::text, "quick", "quick | full | path to a profile file"},
      {"alpha", Kind::real_list, nullptr, "orders to check (default: from the profile)"},
      {"n-list", Kind::int_list, nullptr, "N values (default: from the profile)"},
      {"seed", Kind::integer, nullptr, "seed for Monte Carlo suites (default: from the profile)"},
  };
  for (auto& c : common_params(false)) p.push_back(c);
  return p;
}

json load_profile(const std::string& name) {
  fs::path path;
  if (name.find('/') != std::string::npos || name.ends_with(".json")) {
    path = name;
  } else {
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("HEL_PROFILE_DIR")) dirs.emplace_back(env);
    dirs.emplace_back(HEL_PROFILE_DIR);
    for (const auto& d : dirs)
      if (fs::is_regular_file(d / (name + ".json"))) {
        path = d / (name + ".json");
        break;
      }
    if (path.empty()) throw UsageError("unknown profile '" + name + "'");
  }
  json p;
  try {
    p = json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw UsageError("cannot read profile " + path.string() + ": " + e.what());
  }
  if (!p.contains("suites") || !p["suites"].is_object()) throw UsageError("profile " + path.string() + " has no suites");
  return p;
}

struct SuiteResult {
  DiagnosticReport report;
  Table table;
  std::string table_name;
};

std::vector<double> num_list(const json& j) { return j.get<std::vector<double>>(); }

std::vector<SuiteResult> run_suite(const std::string& suite, json s, int workers) {
  std::vector<SuiteResult> out;
  auto tag = [](const std::string& base, double a) { return base + "_alpha" + str(a) + ".csv"; };
  for (double a : num_list(s.at("alpha"))) {
    const Order alpha = checked("--alpha", [&] { return Order(a); });
    SuiteResult res;
    if (suite == "kernel-convergence") {
      const int pts = s.at("grid_points").get<int>();
      const double hi = s.at("grid_max").get<double>();
      std::vector<double> grid;
      for (int i = 1; i <= pts; ++i) grid.push_back(hi * i / pts);  // (0, hi]: the Bessel kernel needs x > 0
      const auto ns = s.at("n_list").get<std::vector<int>>();
      res.report = checked("kernel-convergence", [&] {
        return kernel_convergence_report(alpha, ns, grid, s.at("target").get<double>());
      });
      res.report.params["alpha"] = a;
      out.push_back(std::move(res));
      SuiteResult ny;
      ny.report = nystrom_report(alpha, s.at("nystrom_length").get<double>(), s.at("nystrom_nodes").get<int>());
      ny.report.params["alpha"] = a;
      out.push_back(std::move(ny));
      continue;
    }
    if (suite == "lemma52") {
      const auto ns = s.at("n_list").get<std::vector<int>>();
      res.report = checked("lemma52", [&] {
        return lemma52_report(alpha, ns, s.at("omega").get<double>(), s.at("rel_tol").get<double>(), &res.table);
      });
      res.table_name = tag("lemma52", a);
    } else if (suite == "tails") {
      TailTrendOptions o;
      o.n_list = s.at("n_list").get<std::vector<int>>();
      o.x_list = num_list(s.at("x_list"));
      o.s_list = num_list(s.at("s_list"));
      o.omega = s.at("omega").get<double>();
      o.r = s.at("r").get<double>();
      o.margin = s.at("margin").get<double>();
      o.workers = workers;
      res.report = checked("tails", [&] { return tail_trend_report(alpha, o, &res.table); });
      res.table_name = tag("tails", a);
    } else if (suite == "hilb") {
      HilbSpec h;
      h.alpha = a;
      h.n_list = s.at("n_list").get<std::vector<int>>();
      h.x_lo = s.at("x_lo").get<double>();
      h.x_hi = s.at("x_hi").get<double>();
      h.points = s.at("points").get<int>();
      h.max_slope = s.at("max_slope").get<double>();
      res.report = checked("hilb", [&] { return hilb_residual(h, &res.table); });
      res.table_name = tag("hilb", a);
    } else if (suite == "ibp") {
      IbpOptions o;
      o.draws = s.at("draws").get<long>();
      o.seed = s.at("seed").get<std::uint64_t>();
      o.workers = workers;
      o.max_z = s.at("max_z").get<double>();
      const int n = s.at("n").get<int>();
      res.report = checked("ibp", [&] { return ibp_family_check(alpha, n, o); });
    } else if (suite == "stationarity") {
      StationarityOptions o;
      o.draws = s.at("draws").get<int>();
      o.T = s.at("T").get<double>();
      o.seed = s.at("seed").get<std::uint64_t>();
      o.workers = workers;
      o.cfg.dt_max = s.at("dt_max").get<double>();
      o.cfg.dt_min = s.at("dt_min").get<double>();
      o.cfg.safety = s.at("safety").get<double>();
      o.cfg.origin_floor = s.at("origin_floor").get<double>();
      o.cfg.collision_floor = s.at("collision_floor").get<double>();
      o.cfg.scheme = parse_scheme(s.at("scheme").get<std::string>());
      const int n = s.at("n").get<int>();
      res.report = checked("stationarity", [&] {
        alpha.require_non_hitting();
        o.cfg.validate();
        return stationarity_test(alpha, n, o);
      });
    }
    out.push_back(std::move(res));
  }
  return out;
}

int cmd_verify(const Resolved& r) {
  const std::string suite = r.text("suite");
  if (suite != "all" && std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end())
    throw UsageError("unknown suite '" + suite + "' (expected kernel-convergence, lemma52, tails, hilb, ibp, "
                     "stationarity or all)");
  const json profile = load_profile(r.text("profile"));
  const int workers = workers_of(r);
  const std::vector<std::string> chosen = suite == "all" ? kSuites : std::vector<std::string>{suite};

  std::vector<SuiteResult> results;
  json resolved_suites = json::object();
  for (const auto& name : chosen) {
    if (!profile["suites"].contains(name)) throw UsageError("profile has no settings for suite '" + name + "'");
    json s = profile["suites"][name];
    if (r.has("alpha")) s["alpha"] = r.cfg["alpha"];
    if (r.has("n-list")) {
      if (s.contains("n_list")) s["n_list"] = r.cfg["n-list"];
      if (s.contains("n")) s["n"] = r.cfg["n-list"][0];
    }
    if (r.has("seed") && s.contains("seed")) s["seed"] = r.cfg["seed"];
    resolved_suites[name] = s;
    try {
      for (auto& res : run_suite(name, s, workers)) results.push_back(std::move(res));
    } catch (const json::exception& e) {
      throw UsageError("profile settings for '" + name + "': " + e.what());
    }
  }

  bool verdict = true;
  json reports = json::array();
  for (const auto& res : results) {
    verdict = verdict && res.report.verdict();
    reports.push_back(res.report.to_json());
  }
  const json doc = {{"suite", suite},
                    {"profile", profile.value("name", r.text("profile"))},
                    {"profile_version", profile.value("version", 0)},
                    {"reports", reports},
                    {"verdict", verdict}};

  if (r.has("out")) {
    const fs::path out = r.text("out");
    write_file(out / "report.json", doc.dump(2) + "\n");
    for (const auto& res : results)
      if (!res.table_name.empty()) {
        std::ostringstream t;
        write_table_csv(t, res.table);
        write_file(out / res.table_name, t.str());
      }
    write_manifest(out, "verify", r, {{"suites", resolved_suites}});
    for (const auto& res : results) {
      std::cout << (res.report.verdict() ? "PASS " : "FAIL ") << res.report.name;
      if (res.report.params.contains("alpha")) std::cout << " alpha=" << res.report.params["alpha"].dump();
      std::cout << "\n";
      for (const auto& e : res.report.entries)
        if (!e.pass) std::cout << "  failed: " << e.label << " = " << str(e.value) << " (tolerance " << str(e.tolerance) << ")\n";
    }
    std::cout << "verify " << suite << ": " << (verdict ? "PASS" : "FAIL") << "\n";
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  return verdict ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  std::string description;
  std::vector<Param> params;
  int (*run)(const Resolved&);
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::string config;
};

int run_correlate(const Resolved& r) { return cmd_correlate(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hel: Laguerre hard-edge ensembles, their dynamics and numerical checks"};
  app.set_version_flag("--version", HEL_VERSION);
  app.require_subcommand(1);

  std::vector<Command> commands;
  commands.push_back({"sample", "draw exact ensemble configurations", sample_params(), cmd_sample});
  commands.push_back({"evolve", "integrate the particle SDE from ensemble draws", evolve_params(), cmd_evolve});
  commands.push_back({"correlate", "estimate correlation functions from saved draws", correlate_params(), run_correlate});
  commands.push_back({"verify", "run a diagnostic suite; exit 0 iff all checks pass", verify_params(), cmd_verify});
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.description);
    c.app->add_option("--config", c.config, "JSON config file or a manifest from an earlier run");
    for (const auto& p : c.params) {
      std::string help = p.help;
      if (!p.def.is_null()) help += " [" + (p.def.is_string() ? p.def.get<std::string>() : p.def.dump()) + "]";
      c.app->add_option("--" + p.key, c.raw[p.key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      std::set<std::string> given;
      for (const auto& p : c.params)
        if (c.app->get_option("--" + p.key)->count() > 0) given.insert(p.key);
      const Resolved r = resolve(c.name, c.params, c.config, c.raw, given);
      return c.run(r);
    } catch (const UsageError& e) {
      std::cerr << "hel " << c.name << ": error: " << e.what() << "\n";
      return kUsage;
    } catch (const BlowupError& e) {
      std::cerr << "hel " << c.name << ": " << e.what() << "\n";
      return kBlowup;
    } catch (const std::exception& e) {
      std::cerr << "hel " << c.name << ": failed: " << e.what() << "\n";
      return kFailure;
    }
  }
  return kUsage;
}
