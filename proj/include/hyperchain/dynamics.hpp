#pragma once

// Right-hand sides and integrators for the absolute system x' = x * (K^T x)
// and the relative system on the simplex.
//
// Both modes integrate log-concentrations y = ln x internally:
//   absolute:  y' = K^T x
//   relative:  y' = K^T x - (x^T K^T x) 1,   x = softmax(y)
// so positivity is exact, species near the boundary keep their relative
// accuracy, and acyclic growth that overflows x itself stays representable.
// Coordinates that start at exactly zero are frozen at zero. In absolute mode
// a species whose ln x passes 700 is retired together with everything
// downstream of it (their x is reported as inf and their ln x is frozen);
// the remaining species keep integrating.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperchain/graph.hpp"

namespace hyperchain {

Vector absolute_rhs(const Matrix& k, const Vector& x);
Vector absolute_rhs(const HyperchainSystem& sys, const Vector& x);
Vector relative_rhs(const Matrix& k, const Vector& x);
Vector relative_rhs(const HyperchainSystem& sys, const Vector& x);

enum class Mode { Absolute, Relative };
enum class Stepper { DormandPrince, FixedRk4 };
enum class Termination { Completed, BlowUp, Converged, StepFailure };

struct IntegrationOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  Stepper stepper = Stepper::DormandPrince;
  double fixed_step = 1e-3;  // FixedRk4 only
  double initial_step = 0.0;  // 0: automatic
  double max_step = 0.0;      // 0: unbounded
  /// Step collapse below h_min * max(1, |t|) ends the run.
  double h_min = 1e-14;
  /// Absolute mode: BlowUp once |x|_inf exceeds this. Disabled by default;
  /// blow-up is recognised by step collapse.
  double blow_up_threshold = std::numeric_limits<double>::infinity();
  /// Relative mode: stop once |relative_rhs|_inf < convergence_tol for
  /// convergence_steps consecutive accepted steps and no coordinate grows.
  bool detect_convergence = true;
  double convergence_tol = 1e-10;
  int convergence_steps = 5;
  std::uint64_t max_steps = 50'000'000;
  bool store_states = true;
  /// Called after every accepted step with t, x and y = ln x.
  std::function<void(double, const Vector&, const Vector&)> observer;
};

struct Trajectory {
  Mode mode = Mode::Relative;
  std::vector<double> times;
  std::vector<Vector> states;      // x; entries may be +inf past double range
  std::vector<Vector> log_states;  // ln x
  Termination termination = Termination::Completed;
  double time_estimate = 0.0;      // BlowUp: last accepted time
  std::optional<Vector> converged_point;
  std::string message;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;
  double final_time = 0.0;
  Vector final_state;
  Vector final_log_state;
};

/// Absolute mode needs x0 >= 0 with a positive entry; relative mode needs a
/// simplex point (sum within 1e-9 of 1). Throws InvalidArgument otherwise.
Trajectory integrate(const Matrix& k, Mode mode, const Vector& x0, double t_end,
                     const IntegrationOptions& opts = {});
Trajectory integrate(const HyperchainSystem& sys, Mode mode, const Vector& x0, double t_end,
                     const IntegrationOptions& opts = {});

/// Generic adaptive integration of y' = rhs(t, y) in plain coordinates with
/// the same Dormand-Prince core; used for auxiliary systems and oracles.
using RhsFunction = std::function<void(double, const Vector&, Vector&)>;
struct GenericResult {
  std::vector<double> times;
  std::vector<Vector> states;
  bool completed = false;
  std::string message;
};
GenericResult integrate_rhs(const RhsFunction& rhs, const Vector& y0, double t0, double t_end,
                            const IntegrationOptions& opts = {});

struct ConjugacyScaling {
  Vector s;
  /// y = s * x maps an orbit of (H, K) to an orbit of (H, K0).
  Vector to_normalized(const Vector& x) const { return s.cwiseProduct(x); }
  Vector from_normalized(const Vector& y) const { return y.cwiseQuotient(s); }
};

struct Nondimensionalized {
  HyperchainSystem system;
  ConjugacyScaling scaling;
  std::vector<int> chosen_head;  // -1 for terminal species
};

/// Rescales each non-terminal species so that its edge to the lowest-numbered
/// head has rate 1: k0_ij = k_ij / s_i with s_i = k_{i,head(i)} (1 if terminal).
Nondimensionalized nondimensionalize(const HyperchainSystem& sys);

struct RelativePoint {
  Vector x;
  double total = 0.0;
};
/// Throws ZeroVector for x == 0 and InvalidArgument for negative entries.
RelativePoint to_relative(const Vector& x);
Vector from_relative(const Vector& x, double total);

std::string_view to_string(Termination t);
std::string_view to_string(Mode m);

/// Header t,x1..xn and one row per stored state, 15 significant digits.
std::string trajectory_csv(const Trajectory& traj);
nlohmann::json trajectory_summary(const Trajectory& traj);

}  // namespace hyperchain
