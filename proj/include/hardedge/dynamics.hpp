#pragma once

// Drift fields and the adaptive integrator for the finite-N hard-edge SDE
//   dX^i = dB^i + ( -1/8N + alpha/(2 X^i) + sum_{j != i} 1/(X^i - X^j) ) dt
// and for a truncated window of the infinite system (no confinement term,
// interaction cut off at radius R, particles outside the window frozen).
//
// The drift is half the logarithmic derivative of the ensemble density.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/ensemble.hpp"
#include "hardedge/report.hpp"

namespace hardedge {

enum class DriftMode { finite_n, isde };

struct DriftSpec {
  double alpha = 1.0;
  DriftMode mode = DriftMode::finite_n;
  int n = 1;                                                  // confinement scale (finite_n)
  int window = 0;                                             // moving particles (isde); 0 means all
  double cutoff = std::numeric_limits<double>::infinity();    // interaction radius (isde)

  static DriftSpec finite(Order alpha, int n);
  static DriftSpec isde(Order alpha, int window, double cutoff);
  /// Number of particles that move for a configuration of the given size.
  std::size_t active(std::size_t size) const;
};

class SingularDriftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Drift of particle i. Throws SingularDriftError when x_i <= origin_floor
/// or a gap to another particle is <= collision_floor.
double drift(const DriftSpec& spec, std::size_t i, std::span<const double> x, double origin_floor = 0.0,
             double collision_floor = 0.0);

/// Full logarithmic derivative -1/4N + alpha/x + sum 2/(x - y) at particle i.
double log_derivative(Order alpha, int n, std::size_t i, std::span<const double> x);

enum class Scheme { euler_maruyama, tamed_euler };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct IntegratorConfig {
  double dt_max = 1e-3;
  double dt_min = 1e-30;
  double safety = 0.01;
  double origin_floor = 1e-8;
  double collision_floor = 1e-10;
  Scheme scheme = Scheme::euler_maruyama;
  /// Spacing of recorded frames; infinity keeps only the initial and final states.
  double record_interval = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct Telemetry {
  long steps = 0;
  long rejected = 0;             // all rejections
  long rejected_step_rule = 0;   // dt > safety * min(gap^2, x_1^2)
  long rejected_origin = 0;      // proposal fell to or below the origin floor
  long rejected_collision = 0;   // proposal broke the ordering or the collision floor
  long ordering_violations = 0;  // accepted states that were not strictly ordered (must stay 0)
  double min_gap = std::numeric_limits<double>::infinity();
  double min_origin = std::numeric_limits<double>::infinity();
  double smallest_dt = std::numeric_limits<double>::infinity();

  void absorb(const Telemetry& other);
};

struct TrajectoryBundle {
  double alpha = 0.0;
  int n = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  Telemetry telemetry;
  IntegratorConfig config;
};

class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, Telemetry t, double time) : std::runtime_error(what), telemetry(t), at(time) {}
  Telemetry telemetry;
  double at;
};

/// Adaptive Euler-Maruyama (or tamed Euler) run to time T. A step of
/// length h is accepted only if h <= safety * min(gap^2, x_1^2) and the
/// proposal stays ordered and above both floors; otherwise it is halved by
/// Brownian-bridge refinement. The driving path is a deterministic
/// function of (seed, index, T): maximal steps are the dyadic fractions
/// T/2^k <= dt_max, so runs with different dt_max share one path.
TrajectoryBundle evolve(const PointConfiguration& initial, const DriftSpec& spec, const IntegratorConfig& cfg, double T,
                        std::uint64_t seed, std::uint64_t index = 0);

/// Brownian increment over the dyadic interval [j T 2^-level, (j+1) T 2^-level]
/// for `count` particles. Exposed for tests of the refinement contract.
std::vector<double> brownian_increment(std::uint64_t seed, std::uint64_t index, double T, int level,
                                       std::uint64_t j, std::size_t count);

struct StationarityOptions {
  int draws = 2000;
  double T = 0.5;
  std::uint64_t seed = 1;
  int workers = 1;
  IntegratorConfig cfg{};
};

/// Evolves exact ensemble draws to time T and compares the laws of the
/// smallest particle before and after (two-sample KS), together with the
/// binned one-point densities and the trajectory telemetry.
DiagnosticReport stationarity_test(Order alpha, int n, const StationarityOptions& opts);

struct WindowOptions {
  int draws = 400;
  double T = 0.5;
  std::uint64_t seed = 1;
  int workers = 1;
  IntegratorConfig cfg{};
};

/// Samples N_outer-point configurations, evolves the lowest `window`
/// particles under the truncated drift with cutoff R and again with 2R on
/// the same noise, and compares the mean lowest position at time T.
DiagnosticReport isde_window_experiment(Order alpha, int n_outer, int window, double R, const WindowOptions& opts);

}  // namespace hardedge
