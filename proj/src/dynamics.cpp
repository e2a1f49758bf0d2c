#include "hardedge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardedge/estimators.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

DriftSpec DriftSpec::finite(Order alpha, int n) {
  if (n < 1) throw std::invalid_argument("finite-N drift needs N >= 1");
  return DriftSpec{alpha.value(), DriftMode::finite_n, n, 0, std::numeric_limits<double>::infinity()};
}

DriftSpec DriftSpec::isde(Order alpha, int window, double cutoff) {
  if (window < 0) throw std::invalid_argument("window must be nonnegative");
  if (!(cutoff > 0.0)) throw std::invalid_argument("interaction cutoff R must be positive");
  return DriftSpec{alpha.value(), DriftMode::isde, 0, window, cutoff};
}

std::size_t DriftSpec::active(std::size_t size) const {
  if (mode == DriftMode::finite_n || window == 0) return size;
  return std::min<std::size_t>(size, static_cast<std::size_t>(window));
}

double drift(const DriftSpec& spec, std::size_t i, std::span<const double> x, double origin_floor,
             double collision_floor) {
  if (i >= x.size()) throw std::out_of_range("drift: particle index out of range");
  const double xi = x[i];
  if (!(xi > origin_floor)) throw SingularDriftError("drift: particle at or below the origin floor");
  double interaction = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == i) continue;
    const double d = xi - x[j];
    if (!(std::abs(d) > collision_floor)) throw SingularDriftError("drift: gap at or below the collision floor");
    if (spec.mode == DriftMode::isde && !(std::abs(d) < spec.cutoff)) continue;
    interaction += 1.0 / d;
  }
  const double confinement = spec.mode == DriftMode::finite_n ? -1.0 / (8.0 * spec.n) : 0.0;
  return confinement + spec.alpha / (2.0 * xi) + interaction;
}

double log_derivative(Order alpha, int n, std::size_t i, std::span<const double> x) {
  return 2.0 * drift(DriftSpec::finite(alpha, n), i, x);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler-maruyama" || name == "euler-maruyama-adaptive") return Scheme::euler_maruyama;
  if (name == "tamed-euler") return Scheme::tamed_euler;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected euler-maruyama or tamed-euler)");
}

std::string to_string(Scheme s) { return s == Scheme::euler_maruyama ? "euler-maruyama" : "tamed-euler"; }

void IntegratorConfig::validate() const {
  if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw std::invalid_argument("need 0 < dt_min <= dt_max");
  if (!(safety > 0.0 && safety < 1.0)) throw std::invalid_argument("safety must lie in (0, 1)");
  if (!(origin_floor > 0.0) || !(collision_floor > 0.0)) throw std::invalid_argument("floors must be positive");
  if (!(record_interval > 0.0)) throw std::invalid_argument("record interval must be positive");
}

void Telemetry::absorb(const Telemetry& o) {
  steps += o.steps;
  rejected += o.rejected;
  rejected_step_rule += o.rejected_step_rule;
  rejected_origin += o.rejected_origin;
  rejected_collision += o.rejected_collision;
  ordering_violations += o.ordering_violations;
  min_gap = std::min(min_gap, o.min_gap);
  min_origin = std::min(min_origin, o.min_origin);
  smallest_dt = std::min(smallest_dt, o.smallest_dt);
}

// ---------------------------------------------------------------------------
// Brownian path by keyed dyadic refinement.

namespace {

double keyed_normal(std::uint64_t key, std::size_t p) {
  const std::uint64_t a = splitmix64(key ^ (0x632be59bd9b4e019ULL * (2 * p + 1)));
  const std::uint64_t b = splitmix64(a ^ 0x9e3779b97f4a7c15ULL);
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Each node of the dyadic tree over [0, T] carries its own key; children
// derive theirs from the parent, so depth is unbounded.
std::uint64_t child_key(std::uint64_t parent, int side) { return splitmix64(parent ^ (side ? 0xa0761d6478bd642fULL : 0xe7037ed1a0b428dbULL)); }

std::uint64_t root_key(std::uint64_t seed, std::uint64_t index) {
  return stream_key(seed, index, static_cast<std::uint64_t>(Stage::dynamics));
}

// The root key also drives the first bridge split, so the endpoint draw
// uses a derived key.
std::vector<double> root_increment(std::uint64_t key, double T, std::size_t count) {
  std::vector<double> w(count);
  const double s = std::sqrt(T);
  const std::uint64_t own = splitmix64(key ^ 0x8ebc6af09c88c6e3ULL);
  for (std::size_t p = 0; p < count; ++p) w[p] = s * keyed_normal(own, p);
  return w;
}

// Left half of the increment over a node of length h; the right half is the rest.
std::vector<double> left_child(std::uint64_t key, double h, const std::vector<double>& parent) {
  const double sd = std::sqrt(0.25 * h);
  std::vector<double> left(parent.size());
  for (std::size_t p = 0; p < parent.size(); ++p) left[p] = 0.5 * parent[p] + sd * keyed_normal(key, p);
  return left;
}

struct Node {
  int level;
  std::uint64_t key;
  double start;
  std::vector<double> dw;
};

}  // namespace

std::vector<double> brownian_increment(std::uint64_t seed, std::uint64_t index, double T, int level, std::uint64_t j,
                                       std::size_t count) {
  std::uint64_t key = root_key(seed, index);
  std::vector<double> w = root_increment(key, T, count);
  for (int l = 0; l < level; ++l) {
    const bool right = (j >> (level - 1 - l)) & 1U;
    std::vector<double> left = left_child(key, std::ldexp(T, -l), w);
    if (right) {
      for (std::size_t p = 0; p < count; ++p) w[p] -= left[p];
    } else {
      w = std::move(left);
    }
    key = child_key(key, right ? 1 : 0);
  }
  return w;
}

// ---------------------------------------------------------------------------

TrajectoryBundle evolve(const PointConfiguration& initial, const DriftSpec& spec, const IntegratorConfig& cfg, double T,
                        std::uint64_t seed, std::uint64_t index) {
  cfg.validate();
  if (!(T >= 0.0)) throw std::invalid_argument("evolve: horizon T must be nonnegative");
  if (initial.points.empty()) throw std::invalid_argument("evolve: empty configuration");
  if (!initial.valid()) throw std::invalid_argument("evolve: initial configuration must be positive and strictly increasing");
  if (spec.mode == DriftMode::finite_n && spec.n < 1) throw std::invalid_argument("evolve: N must be positive");

  std::vector<double> x = initial.points;
  const std::size_t size = x.size();
  const std::size_t m = spec.active(size);

  TrajectoryBundle out;
  out.alpha = spec.alpha;
  out.n = static_cast<int>(size);
  out.config = cfg;
  Telemetry& tel = out.telemetry;

  auto observe = [&](const std::vector<double>& s) {
    tel.min_origin = std::min(tel.min_origin, s[0]);
    const std::size_t last = std::min(m, size - 1);
    for (std::size_t i = 0; i < last; ++i) tel.min_gap = std::min(tel.min_gap, s[i + 1] - s[i]);
  };
  observe(x);
  out.times.push_back(0.0);
  out.states.push_back(x);
  if (T == 0.0) return out;

  int top = 0;
  while (std::ldexp(T, -top) > cfg.dt_max) ++top;

  std::vector<Node> stack;
  const std::uint64_t rk = root_key(seed, index);
  stack.push_back({0, rk, 0.0, root_increment(rk, T, m)});

  double t = 0.0;
  double next_record = cfg.record_interval;
  std::vector<double> b(m), y(size);

  auto split = [&](Node node) {
    const double h = std::ldexp(T, -node.level);
    if (node.level >= top && 0.5 * h < cfg.dt_min) {
      std::ostringstream msg;
      msg << "integrator blowup at t = " << t << ": no acceptable step above dt_min = " << cfg.dt_min
          << " (x_1 = " << x[0] << ", min gap = " << tel.min_gap << ")";
      throw BlowupError(msg.str(), tel, t);
    }
    std::vector<double> left = left_child(node.key, h, node.dw);
    std::vector<double> right(node.dw.size());
    for (std::size_t p = 0; p < right.size(); ++p) right[p] = node.dw[p] - left[p];
    stack.push_back({node.level + 1, child_key(node.key, 1), node.start + 0.5 * h, std::move(right)});
    stack.push_back({node.level + 1, child_key(node.key, 0), node.start, std::move(left)});
  };

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    const double h = std::ldexp(T, -node.level);
    if (node.level < top) {
      split(std::move(node));
      continue;
    }
    // distance to the nearest singularity seen by any moving particle
    double d = x[0];
    for (std::size_t i = 0; i < m; ++i) {
      if (i + 1 < size) d = std::min(d, x[i + 1] - x[i]);
    }
    if (h > cfg.safety * d * d) {
      ++tel.rejected;
      ++tel.rejected_step_rule;
      split(std::move(node));
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double bi = drift(spec, i, x);
      if (cfg.scheme == Scheme::tamed_euler) bi /= 1.0 + h * std::abs(bi);
      b[i] = bi;
    }
    y = x;
    for (std::size_t i = 0; i < m; ++i) y[i] += b[i] * h + node.dw[i];
    bool origin_ok = y[0] > cfg.origin_floor;
    bool order_ok = true;
    for (std::size_t i = 0; i < m && i + 1 < size; ++i)
      if (!(y[i + 1] - y[i] > cfg.collision_floor)) order_ok = false;
    if (!origin_ok || !order_ok) {
      ++tel.rejected;
      if (!origin_ok) ++tel.rejected_origin;
      if (!order_ok) ++tel.rejected_collision;
      split(std::move(node));
      continue;
    }
    x.swap(y);
    t = stack.empty() ? T : node.start + h;
    ++tel.steps;
    tel.smallest_dt = std::min(tel.smallest_dt, h);
    for (std::size_t i = 0; i + 1 < size; ++i)
      if (!(x[i + 1] > x[i])) ++tel.ordering_violations;
    if (!(x[0] > 0.0)) ++tel.ordering_violations;
    observe(x);
    if (t >= next_record * (1.0 - 1e-12)) {
      out.times.push_back(t);
      out.states.push_back(x);
      while (next_record <= t * (1.0 + 1e-12)) next_record += cfg.record_interval;
    }
  }
  if (out.times.back() != T) {
    out.times.push_back(T);
    out.states.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void put_config(nlohmann::ordered_json& j, const IntegratorConfig& c) {
  j["dt_max"] = c.dt_max;
  j["dt_min"] = c.dt_min;
  j["safety"] = c.safety;
  j["origin_floor"] = c.origin_floor;
  j["collision_floor"] = c.collision_floor;
  j["scheme"] = to_string(c.scheme);
}

}  // namespace

DiagnosticReport stationarity_test(Order alpha, int n, const StationarityOptions& o) {
  if (o.draws < 2) throw std::invalid_argument("stationarity_test: need at least two draws");
  const EnsembleSpec es(alpha, n, o.seed);
  const std::vector<PointConfiguration> before = sample_batch(es, o.draws, o.workers);
  std::vector<PointConfiguration> after(before.size());
  std::vector<Telemetry> tels(before.size());
  std::vector<char> blown(before.size(), 0);
  const DriftSpec ds = DriftSpec::finite(alpha, n);
  parallel_for(before.size(), o.workers, [&](std::size_t k) {
    try {
      const TrajectoryBundle tb = evolve(before[k], ds, o.cfg, o.T, o.seed, k);
      after[k] = PointConfiguration{tb.states.back(), Scale::hardedge};
      tels[k] = tb.telemetry;
    } catch (const BlowupError& e) {
      blown[k] = 1;
      tels[k] = e.telemetry;
    }
  });
  Telemetry total;
  for (const auto& t : tels) total.absorb(t);
  const long blowups = std::count(blown.begin(), blown.end(), 1);

  DiagnosticReport r;
  r.name = "stationarity";
  r.params["alpha"] = alpha.value();
  r.params["n"] = n;
  r.params["draws"] = o.draws;
  r.params["T"] = o.T;
  r.params["seed"] = o.seed;
  put_config(r.params, o.cfg);
  r.params["steps"] = total.steps;
  r.params["rejected"] = total.rejected;

  // trajectories stopped at a floor are excluded from both samples and
  // reported separately
  std::vector<PointConfiguration> b_ok, a_ok;
  for (std::size_t k = 0; k < before.size(); ++k)
    if (!blown[k]) {
      b_ok.push_back(before[k]);
      a_ok.push_back(after[k]);
    }
  r.params["completed"] = b_ok.size();
  if (b_ok.size() < 2) {
    r.add("blowups", static_cast<double>(blowups), 0.0, false);
    return r;
  }
  const KsResult ks = ks_distance(smallest_points(b_ok), smallest_points(a_ok));
  r.add("ks_statistic_smallest", ks.statistic, NAN, true);
  r.add("ks_p_smallest", ks.p_value, 0.01, ks.p_value > 0.01);
  // The paired comparison above is conservative because each final state
  // is close to its own start; fresh draws give an independent reference.
  std::vector<PointConfiguration> fresh(b_ok.size());
  parallel_for(fresh.size(), o.workers, [&](std::size_t k) { fresh[k] = sample(es, o.draws + k); });
  const KsResult ks_ind = ks_distance(smallest_points(fresh), smallest_points(a_ok));
  r.add("ks_p_smallest_independent", ks_ind.p_value, 0.01, ks_ind.p_value > 0.01);

  const std::vector<double> edges = auto_edges(b_ok, 10);
  const BinnedDensity hb = estimate_rho1(b_ok, edges), ha = estimate_rho1(a_ok, edges);
  double worst = 0.0;
  for (std::size_t i = 0; i < hb.bins(); ++i) {
    const double c = hb.counts[i] + ha.counts[i];
    if (c > 0.0) worst = std::max(worst, std::abs(ha.counts[i] - hb.counts[i]) / std::sqrt(c));
  }
  r.add("rho1_max_bin_z", worst, 4.0, worst <= 4.0);
  r.add("blowups", static_cast<double>(blowups), 0.0, blowups == 0);
  r.add("ordering_violations", static_cast<double>(total.ordering_violations), 0.0, total.ordering_violations == 0);
  r.add("origin_floor_hits", static_cast<double>(total.rejected_origin), 0.0, total.rejected_origin == 0);
  r.add("min_origin_distance", total.min_origin, o.cfg.origin_floor, total.min_origin > o.cfg.origin_floor);
  r.add("min_gap", total.min_gap, o.cfg.collision_floor, total.min_gap > o.cfg.collision_floor);
  return r;
}

DiagnosticReport isde_window_experiment(Order alpha, int n_outer, int window, double R, const WindowOptions& o) {
  if (window < 1 || window > n_outer) throw std::invalid_argument("isde window must satisfy 1 <= M <= N_outer");
  if (!(R > 0.0)) throw std::invalid_argument("isde cutoff R must be positive");
  if (o.draws < 2) throw std::invalid_argument("isde window experiment: need at least two draws");
  const std::vector<PointConfiguration> init = sample_batch(EnsembleSpec(alpha, n_outer, o.seed), o.draws, o.workers);
  const DriftSpec near = DriftSpec::isde(alpha, window, R), far = DriftSpec::isde(alpha, window, 2.0 * R);
  std::vector<double> a(init.size()), b(init.size());
  std::vector<char> blown(init.size(), 0);
  parallel_for(init.size(), o.workers, [&](std::size_t k) {
    try {
      a[k] = evolve(init[k], near, o.cfg, o.T, o.seed, k).states.back()[0];
      b[k] = evolve(init[k], far, o.cfg, o.T, o.seed, k).states.back()[0];
    } catch (const BlowupError&) {
      blown[k] = 1;
    }
  });
  double ma = 0.0, mb = 0.0, md = 0.0, n = 0.0;
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (blown[k]) continue;
    ma += a[k];
    mb += b[k];
    md += b[k] - a[k];
    n += 1.0;
  }
  const long blowups = std::count(blown.begin(), blown.end(), 1);
  DiagnosticReport r;
  r.name = "isde_window";
  r.params["alpha"] = alpha.value();
  r.params["n_outer"] = n_outer;
  r.params["window"] = window;
  r.params["R"] = R;
  r.params["T"] = o.T;
  r.params["draws"] = o.draws;
  r.params["seed"] = o.seed;
  r.params["confinement_drift_dropped"] = 1.0 / (8.0 * n_outer);
  put_config(r.params, o.cfg);
  if (n < 2.0) {
    r.add("blowups", static_cast<double>(blowups), 0.0, false);
    return r;
  }
  ma /= n;
  mb /= n;
  md /= n;
  double var = 0.0;
  for (std::size_t k = 0; k < init.size(); ++k)
    if (!blown[k]) var += std::pow(b[k] - a[k] - md, 2);
  const double se = std::sqrt(var / (n - 1.0) / n);
  // Monte Carlo error of the mean lowest position itself
  double va = 0.0;
  for (std::size_t k = 0; k < init.size(); ++k)
    if (!blown[k]) va += std::pow(a[k] - ma, 2);
  const double mc_error = std::sqrt(va / (n - 1.0) / n);
  r.add("mean_lowest_R", ma, mc_error, true);
  r.add("mean_lowest_2R", mb, mc_error, true);
  r.add("abs_change_vs_mc_error", std::abs(md), mc_error, std::abs(md) <= mc_error);
  r.add("paired_change_in_se", se > 0.0 ? std::abs(md) / se : 0.0, NAN, true);
  r.add("blowups", static_cast<double>(blowups), 0.0, blowups == 0);
  return r;
}

}  // namespace hardedge
