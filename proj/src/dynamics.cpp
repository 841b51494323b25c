#include "hyperchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hyperchain/network_io.hpp"

namespace hyperchain {

Vector absolute_rhs(const Matrix& k, const Vector& x) {
  return x.cwiseProduct(k.transpose() * x);
}

Vector absolute_rhs(const HyperchainSystem& sys, const Vector& x) { return absolute_rhs(sys.K(), x); }

Vector relative_rhs(const Matrix& k, const Vector& x) {
  const Vector f = k.transpose() * x;
  return x.cwiseProduct(f - Vector::Constant(x.size(), x.dot(f)));
}

Vector relative_rhs(const HyperchainSystem& sys, const Vector& x) { return relative_rhs(sys.K(), x); }

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

enum class CoreStatus { Completed, Stopped, Collapsed, MaxSteps, NonFinite };

struct CoreResult {
  CoreStatus status = CoreStatus::Completed;
  double t = 0.0;
  Vector y;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  bool nonfinite_seen = false;
};

// Returns false to stop after the step. It may adjust y in place only in ways
// that leave the right-hand side unchanged (the stored derivative is reused).
using AcceptFn = std::function<bool(double, Vector&)>;

bool all_finite(const Vector& v, const std::vector<bool>& frozen) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!frozen[i] && !std::isfinite(v[i])) return false;
  return true;
}

class Dopri5 {
 public:
  Dopri5(const RhsFunction& rhs, std::vector<bool> frozen, const IntegrationOptions& opts,
         bool relative_scale)
      : rhs_(rhs), frozen_(std::move(frozen)), opts_(opts), relative_scale_(relative_scale) {}

  CoreResult run(Vector y, double t, double t_end, const AcceptFn& on_accept) {
    const Eigen::Index n = y.size();
    for (Vector* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_})
      v->resize(n);
    CoreResult res;
    rhs_(t, y, k1_);
    if (!all_finite(k1_, frozen_)) {
      res.status = CoreStatus::NonFinite;
      res.t = t;
      res.y = y;
      res.nonfinite_seen = true;
      return res;
    }
    double h = opts_.initial_step > 0.0 ? opts_.initial_step : initial_step(y, t, t_end);
    double facold = 1e-4;
    bool last_rejected = false;

    while (t < t_end) {
      if (res.accepted + res.rejected >= opts_.max_steps) {
        res.status = CoreStatus::MaxSteps;
        break;
      }
      if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
      bool final_step = false;
      if (t + h >= t_end || t + 1.01 * h >= t_end) {
        h = t_end - t;
        final_step = true;
      }
      if (h < opts_.h_min * std::max(1.0, std::abs(t))) {
        res.status = CoreStatus::Collapsed;
        break;
      }

      const double err = attempt(y, t, h);
      if (!std::isfinite(err)) {
        res.nonfinite_seen = true;
        ++res.rejected;
        h *= 0.25;
        last_rejected = true;
        continue;
      }
      const double fac11 = std::pow(err, 0.17);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(facold, 0.04);
        fac = std::clamp(fac / 0.9, 0.2, 10.0);
        double hnew = h / fac;
        if (last_rejected) hnew = std::min(hnew, h);
        facold = std::max(err, 1e-4);
        t = final_step ? t_end : t + h;
        y.swap(ynew_);
        k1_.swap(k7_);  // first-same-as-last
        ++res.accepted;
        last_rejected = false;
        const bool keep_going = on_accept(t, y);
        if (!keep_going) {
          res.status = CoreStatus::Stopped;
          break;
        }
        h = hnew;
      } else {
        ++res.rejected;
        h /= std::min(10.0, fac11 / 0.9);
        last_rejected = true;
      }
    }
    res.t = t;
    res.y = std::move(y);
    return res;
  }

 private:
  double scale(double a, double b) const {
    const double m = std::max(std::abs(a), std::abs(b));
    return relative_scale_ ? opts_.atol + opts_.rtol * std::max(1.0, m) : opts_.atol + opts_.rtol * m;
  }

  double norm(const Vector& v, const Vector& y) const {
    double acc = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (frozen_[i]) continue;
      const double r = v[i] / scale(y[i], y[i] + v[i]);
      acc += r * r;
      ++count;
    }
    return count == 0 ? 0.0 : std::sqrt(acc / count);
  }

  double initial_step(const Vector& y, double t, double t_end) {
    const double d0 = norm(y, Vector::Zero(y.size()));
    const double d1 = norm(k1_, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    tmp_ = y + h0 * k1_;
    rhs_(t + h0, tmp_, k2_);
    const double d2 = all_finite(k2_, frozen_) ? norm(k2_ - k1_, y) / h0 : 1e10;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min(100.0 * h0, h1);
  }

  // One trial step; leaves the proposal in ynew_/k7_ and returns the error norm.
  double attempt(const Vector& y, double t, double h) {
    tmp_ = y + h * a21 * k1_;
    rhs_(t + c2 * h, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(t + c3 * h, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t + c4 * h, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + c5 * h, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, tmp_, k6_);
    ynew_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t + h, ynew_, k7_);
    for (const Vector* k : {&k2_, &k3_, &k4_, &k5_, &k6_, &k7_})
      if (!all_finite(*k, frozen_)) return std::numeric_limits<double>::infinity();
    if (!all_finite(ynew_, frozen_)) return std::numeric_limits<double>::infinity();
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double acc = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (frozen_[i]) continue;
      const double r = err_[i] / scale(y[i], ynew_[i]);
      acc += r * r;
      ++count;
    }
    return count == 0 ? 0.0 : std::sqrt(acc / count);
  }

  const RhsFunction& rhs_;
  std::vector<bool> frozen_;
  const IntegrationOptions& opts_;
  bool relative_scale_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

CoreResult run_rk4(const RhsFunction& rhs, const std::vector<bool>& frozen, Vector y, double t,
                   double t_end, const IntegrationOptions& opts, const AcceptFn& on_accept) {
  if (!(opts.fixed_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fixed step must be positive");
  const Eigen::Index n = y.size();
  Vector k1(n), k2(n), k3(n), k4(n);
  CoreResult res;
  while (t < t_end) {
    if (res.accepted >= opts.max_steps) {
      res.status = CoreStatus::MaxSteps;
      break;
    }
    const double h = std::min(opts.fixed_step, t_end - t);
    rhs(t, y, k1);
    rhs(t + h / 2, y + h / 2 * k1, k2);
    rhs(t + h / 2, y + h / 2 * k2, k3);
    rhs(t + h, y + h * k3, k4);
    Vector next = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!all_finite(next, frozen)) {
      res.status = CoreStatus::NonFinite;
      res.nonfinite_seen = true;
      break;
    }
    y = std::move(next);
    t = t + h >= t_end ? t_end : t + h;
    ++res.accepted;
    if (!on_accept(t, y)) {
      res.status = CoreStatus::Stopped;
      break;
    }
  }
  res.t = t;
  res.y = std::move(y);
  return res;
}

CoreResult run_core(const RhsFunction& rhs, std::vector<bool> frozen, const Vector& y0, double t0,
                    double t_end, const IntegrationOptions& opts, bool relative_scale,
                    const AcceptFn& on_accept) {
  if (opts.stepper == Stepper::FixedRk4) return run_rk4(rhs, frozen, y0, t0, t_end, opts, on_accept);
  Dopri5 stepper(rhs, std::move(frozen), opts, relative_scale);
  return stepper.run(y0, t0, t_end, on_accept);
}

// Largest finite log-coordinate at which exp() is still representable.
constexpr double kLogRange = 700.0;

double log_sum_exp(const Vector& y, const std::vector<bool>& frozen) {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!frozen[i]) m = std::max(m, y[i]);
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!frozen[i]) s += std::exp(y[i] - m);
  return m + std::log(s);
}

Vector exp_or_zero(const Vector& y, const std::vector<bool>& frozen) {
  Vector x(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = frozen[i] ? 0.0 : std::exp(y[i]);
  return x;
}

}  // namespace

Trajectory integrate(const Matrix& k, Mode mode, const Vector& x0, double t_end,
                     const IntegrationOptions& opts) {
  const Eigen::Index n = k.rows();
  if (x0.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "initial state has " + std::to_string(x0.size()) +
                                                  " entries, expected " + std::to_string(n));
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw Error(ErrorCode::InvalidArgument, "t_end must be finite and nonnegative");
  for (double v : x0)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "initial state must be finite and nonnegative");
  if (x0.maxCoeff() <= 0.0) throw Error(ErrorCode::InvalidArgument, "initial state is zero");
  if (mode == Mode::Relative && std::abs(x0.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "relative mode needs a point on the simplex");

  std::vector<bool> frozen(n);
  Vector y0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    frozen[i] = x0[i] == 0.0;
    y0[i] = frozen[i] ? -std::numeric_limits<double>::infinity() : std::log(x0[i]);
  }
  if (mode == Mode::Relative) y0.array() -= log_sum_exp(y0, frozen);

  const Matrix kt = k.transpose();
  // Zero starts plus, in absolute mode, species retired past the double range.
  std::vector<bool> inactive = frozen;
  Vector xbuf(n), fbuf(n);
  RhsFunction rhs;
  if (mode == Mode::Absolute) {
    rhs = [&](double, const Vector& y, Vector& dy) {
      for (Eigen::Index i = 0; i < n; ++i) xbuf[i] = inactive[i] ? 0.0 : std::exp(y[i]);
      dy.noalias() = kt * xbuf;
      for (Eigen::Index i = 0; i < n; ++i)
        if (inactive[i]) dy[i] = 0.0;
    };
  } else {
    rhs = [&](double, const Vector& y, Vector& dy) {
      double m = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i)
        if (!inactive[i]) m = std::max(m, y[i]);
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        xbuf[i] = inactive[i] ? 0.0 : std::exp(y[i] - m);
        s += xbuf[i];
      }
      xbuf /= s;
      fbuf.noalias() = kt * xbuf;
      const double rho = xbuf.dot(fbuf);
      for (Eigen::Index i = 0; i < n; ++i) dy[i] = inactive[i] ? 0.0 : fbuf[i] - rho;
    };
  }

  Trajectory traj;
  traj.mode = mode;
  auto record = [&](double t, const Vector& x, const Vector& y) {
    if (opts.store_states) {
      traj.times.push_back(t);
      traj.states.push_back(x);
      traj.log_states.push_back(y);
    }
    if (opts.observer) opts.observer(t, x, y);
  };

  const double t0 = 0.0;
  Vector x_start = mode == Mode::Relative ? exp_or_zero(y0, frozen) : x0;
  record(t0, x_start, y0);

  int quiet_steps = 0;
  bool threshold_hit = false;
  bool converged = false;
  bool retire_pending = false;
  std::vector<double> max_log_history;  // absolute mode, for the growth test

  AcceptFn on_accept = [&](double t, Vector& y) {
    if (mode == Mode::Relative) {
      const double lse = log_sum_exp(y, frozen);
      for (Eigen::Index i = 0; i < n; ++i)
        if (!frozen[i]) y[i] -= lse;
    }
    Vector x = exp_or_zero(y, frozen);
    for (Eigen::Index i = 0; i < n; ++i)
      if (inactive[i] && !frozen[i]) x[i] = std::numeric_limits<double>::infinity();
    record(t, x, y);
    if (mode == Mode::Absolute) {
      double ymax = -std::numeric_limits<double>::infinity();
      double xmax = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (inactive[i]) continue;
        ymax = std::max(ymax, y[i]);
        xmax = std::max(xmax, x[i]);
      }
      max_log_history.push_back(ymax);
      if (xmax > opts.blow_up_threshold) {
        threshold_hit = true;
        return false;
      }
      if (ymax > kLogRange) {
        retire_pending = true;
        return false;
      }
    } else if (opts.detect_convergence) {
      const Vector f = kt * x;
      const double rho = x.dot(f);
      double field = 0.0, growth = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (frozen[i]) continue;
        field = std::max(field, std::abs(x[i] * (f[i] - rho)));
        growth = std::max(growth, f[i] - rho);
      }
      // A coordinate with a clearly positive growth rate is leaving, even if tiny.
      if (field < opts.convergence_tol && growth <= std::sqrt(opts.convergence_tol))
        ++quiet_steps;
      else
        quiet_steps = 0;
      if (quiet_steps >= opts.convergence_steps) {
        converged = true;
        return false;
      }
    }
    return true;
  };

  // In absolute mode y_j' depends only on the in-neighbours of j, so a species
  // whose x leaves the double range, together with everything downstream of it,
  // can be set aside while the rest of the system keeps integrating.
  std::vector<int> retired;
  double retired_at = 0.0;
  // Near a spiralling equilibrium unbounded steps settle on the edge of the
  // stability region, where the residual stalls above convergence_tol.
  IntegrationOptions core_opts = opts;
  if (mode == Mode::Relative && opts.detect_convergence && opts.max_step == 0.0) {
    const double norm = k.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm > 0.0) core_opts.max_step = 1.0 / norm;
  }
  CoreResult core = run_core(rhs, inactive, y0, t0, t_end, core_opts, true, on_accept);
  std::uint64_t accepted = core.accepted, rejected = core.rejected;
  while (core.status == CoreStatus::Stopped && retire_pending) {
    retire_pending = false;
    std::vector<int> stack;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!inactive[i] && core.y[i] > kLogRange) stack.push_back(static_cast<int>(i));
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (inactive[v]) continue;
      inactive[v] = true;
      retired.push_back(v);
      for (Eigen::Index w = 0; w < n; ++w)
        if (k(v, w) != 0.0 && !inactive[w]) stack.push_back(static_cast<int>(w));
    }
    retired_at = core.t;
    // Restart the growth history from the surviving species.
    max_log_history.clear();
    double surviving = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
      if (!inactive[i]) surviving = std::max(surviving, core.y[i]);
    max_log_history.push_back(surviving);
    if (core.t >= t_end || std::all_of(inactive.begin(), inactive.end(), [](bool b) { return b; })) {
      core.status = CoreStatus::Completed;
      break;
    }
    core = run_core(rhs, inactive, core.y, core.t, t_end, core_opts, true, on_accept);
    accepted += core.accepted;
    rejected += core.rejected;
  }
  std::sort(retired.begin(), retired.end());

  traj.accepted_steps = accepted;
  traj.rejected_steps = rejected;
  traj.final_time = core.t;
  traj.final_log_state = core.y;
  traj.final_state = exp_or_zero(core.y, frozen);
  for (int v : retired) traj.final_state[v] = std::numeric_limits<double>::infinity();

  switch (core.status) {
    case CoreStatus::Completed:
      traj.termination = Termination::Completed;
      break;
    case CoreStatus::Stopped:
      if (threshold_hit) {
        traj.termination = Termination::BlowUp;
        traj.time_estimate = core.t;
        traj.message = "norm exceeded blow-up threshold " + format_shortest(opts.blow_up_threshold);
      } else if (converged) {
        traj.termination = Termination::Converged;
        traj.converged_point = traj.final_state;
      }
      break;
    case CoreStatus::MaxSteps:
      traj.termination = Termination::StepFailure;
      traj.message = "step budget exhausted";
      break;
    case CoreStatus::NonFinite:
      traj.termination = Termination::StepFailure;
      traj.message = "right-hand side is not finite at the initial state";
      break;
    case CoreStatus::Collapsed: {
      const std::size_t hist = max_log_history.size();
      bool growing = mode == Mode::Absolute && hist >= 2 &&
                     max_log_history[hist - 1] > max_log_history[hist >= 10 ? hist - 10 : 0];
      // Right after a retirement there is no history yet; use the field itself.
      if (mode == Mode::Absolute && hist < 2) {
        Vector dy(n);
        rhs(core.t, core.y, dy);
        growing = dy.maxCoeff() > 0.0;
      }
      if (growing) {
        traj.termination = Termination::BlowUp;
        traj.time_estimate = core.t;
        traj.message = "step size collapsed while the norm grows";
      } else {
        traj.termination = Termination::StepFailure;
        traj.message = "step size collapsed";
      }
      break;
    }
  }
  if (!retired.empty()) {
    std::string ids;
    for (int v : retired) ids += (ids.empty() ? "" : ",") + std::to_string(v + 1);
    const std::string note = "species " + ids + " exceeded the floating-point range at t = " +
                             format_shortest(retired_at) + " (reported as inf)";
    traj.message = traj.message.empty() ? note : traj.message + "; " + note;
  }
  return traj;
}

Trajectory integrate(const HyperchainSystem& sys, Mode mode, const Vector& x0, double t_end,
                     const IntegrationOptions& opts) {
  return integrate(sys.K(), mode, x0, t_end, opts);
}

GenericResult integrate_rhs(const RhsFunction& rhs, const Vector& y0, double t0, double t_end,
                            const IntegrationOptions& opts) {
  GenericResult out;
  if (opts.store_states) {
    out.times.push_back(t0);
    out.states.push_back(y0);
  }
  AcceptFn on_accept = [&](double t, Vector& y) {
    if (opts.store_states) {
      out.times.push_back(t);
      out.states.push_back(y);
    }
    if (opts.observer) opts.observer(t, y, y);
    return true;
  };
  const CoreResult core =
      run_core(rhs, std::vector<bool>(y0.size(), false), y0, t0, t_end, opts, false, on_accept);
  out.completed = core.status == CoreStatus::Completed;
  if (!out.completed) out.message = core.status == CoreStatus::Collapsed ? "step size collapsed"
                                                                         : "integration failed";
  if (!opts.store_states) {
    out.times.push_back(core.t);
    out.states.push_back(core.y);
  }
  return out;
}

Nondimensionalized nondimensionalize(const HyperchainSystem& sys) {
  const int n = sys.size();
  Vector s = Vector::Ones(n);
  std::vector<int> head(n, -1);
  for (int i = 0; i < n; ++i) {
    const auto& out = sys.graph().out_neighbors(i);
    if (out.empty()) continue;
    head[i] = out.front();  // neighbours are sorted, so this is the lowest-numbered head
    s[i] = sys.K()(i, head[i]);
  }
  Matrix k0 = s.cwiseInverse().asDiagonal() * sys.K();
  for (int i = 0; i < n; ++i)
    if (head[i] >= 0) k0(i, head[i]) = 1.0;
  return {HyperchainSystem(sys.graph(), RateMatrix(std::move(k0))), ConjugacyScaling{s}, head};
}

RelativePoint to_relative(const Vector& x) {
  for (double v : x)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "vector must be finite and nonnegative");
  const double total = x.sum();
  if (total == 0.0) throw Error(ErrorCode::ZeroVector, "cannot normalize the zero vector");
  return {x / total, total};
}

Vector from_relative(const Vector& x, double total) { return x * total; }

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::BlowUp: return "BlowUp";
    case Termination::Converged: return "Converged";
    case Termination::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

std::string_view to_string(Mode m) { return m == Mode::Absolute ? "abs" : "rel"; }

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  const Eigen::Index n = traj.states.empty() ? traj.final_state.size() : traj.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += '\n';
  char buf[64];
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.15g", traj.times[r]);
    out += buf;
    for (double v : traj.states[r]) {
      std::snprintf(buf, sizeof buf, ",%.15g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
  nlohmann::json j = {{"mode", to_string(traj.mode)},
                      {"termination", to_string(traj.termination)},
                      {"final_time", traj.final_time},
                      {"accepted_steps", traj.accepted_steps},
                      {"rejected_steps", traj.rejected_steps},
                      {"rows", traj.times.size()}};
  if (traj.termination == Termination::BlowUp) j["time_estimate"] = traj.time_estimate;
  if (traj.converged_point) {
    nlohmann::json p = nlohmann::json::array();
    for (double v : *traj.converged_point) p.push_back(round_significant(v, 12));
    j["point"] = std::move(p);
  }
  if (!traj.message.empty()) j["message"] = traj.message;
  nlohmann::json fin = nlohmann::json::array();
  for (double v : traj.final_log_state) fin.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
  j["final_log_state"] = std::move(fin);
  return j;
}

}  // namespace hyperchain
