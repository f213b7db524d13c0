#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "core.hpp"

namespace echolab {

struct FdmOptions {
  double dx = 1e-3;
  double dt = 0.0;      // 0 picks 0.9 * dx (CFL safety factor, max speed 1)
  double margin = 2.0;  // spatial buffer past the causal cone
  std::vector<double> snapshot_times;
  bool track_energy = false;
};

struct FdmResult {
  TimeSeries detector;  // u at the detector position, every time level
  double dx = 0.0;
  double dt = 0.0;
  double x_max = 0.0;
  double max_abs = 0.0;  // sup of |u| over the whole run; stability witness
  std::vector<double> grid;  // abscissae of the snapshot rows
  std::vector<std::pair<double, std::vector<double>>> snapshots;
  std::vector<double> energy;  // per-step discrete energy when tracked
};

struct TraceError {
  double l_inf = 0.0;
  double l2 = 0.0;
};

/**
 * Explicit second-order scheme for u_tt = c(x)^2 u_xx on [0, x_max]:
 *
 *   u_i^{n+1} = 2 u_i^n - u_i^{n-1} + (dt c_i / dx)^2 (u_{i+1}^n - 2 u_i^n + u_{i-1}^n)
 *
 * with u = 0 at x = 0 (fixed wall) and at the truncation end. c_i samples the
 * layer containing node i, right-limit value on interface nodes. The first
 * step encodes u_t(x,0) = 0 through u_i^1 = u_i^0 + (dt^2/2) c_i^2 D2 u^0.
 * x_max = max(source, detector) + T + margin puts the truncation boundary
 * outside every backward cone that can reach the detector within the horizon.
 */
inline FdmResult fdm_solve(const Scene& scene, const InitialPulse& pulse, double T,
                           const FdmOptions& opt = {}) {
  if (pulse.is_delta())
    fail(ErrorCode::unsupported, "finite differences need a twice-differentiable pulse");
  if (!(T > 0.0)) fail(ErrorCode::invalid_horizon, "horizon must be positive");
  if (!(opt.dx > 0.0)) fail(ErrorCode::invalid_config, "dx must be positive");
  const double dx = opt.dx;
  const double dt = opt.dt > 0.0 ? opt.dt : 0.9 * dx;
  if (dt > dx * (1.0 + 1e-12))
    fail(ErrorCode::unstable_step, "CFL violated: dt must not exceed dx (max speed 1)");
  check_compatibility(scene, pulse, 1e-9);

  const double x_det = scene.detector_position();
  const double x_max = std::max(scene.source_position(), x_det) + T + opt.margin;
  const std::size_t M = static_cast<std::size_t>(std::ceil(x_max / dx)) + 1;
  const std::size_t steps = static_cast<std::size_t>(std::floor(T / dt + 1e-9));

  std::vector<double> speed2(M);
  for (std::size_t i = 0; i < M; ++i) {
    double c = scene.speed_at(static_cast<double>(i) * dx);
    speed2[i] = c * c;
  }

  std::vector<double> prev(M), cur(M), next(M);
  for (std::size_t i = 0; i < M; ++i) prev[i] = pulse(static_cast<double>(i) * dx);
  prev[0] = 0.0;
  prev[M - 1] = 0.0;

  const double lam2 = (dt / dx) * (dt / dx);
  for (std::size_t i = 1; i + 1 < M; ++i)
    cur[i] = prev[i] + 0.5 * lam2 * speed2[i] * (prev[i + 1] - 2.0 * prev[i] + prev[i - 1]);
  cur[0] = 0.0;
  cur[M - 1] = 0.0;

  const double ud = x_det / dx;
  const std::size_t id = std::min(static_cast<std::size_t>(ud), M - 2);
  const double wd = ud - static_cast<double>(id);
  auto at_detector = [&](const std::vector<double>& u) {
    return (1.0 - wd) * u[id] + wd * u[id + 1];
  };
  auto sup_abs = [&](const std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  };
  auto energy_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < M; ++i) {
      double vt = (b[i] - a[i]) / dt;
      e += vt * vt + speed2[i] * ((a[i + 1] - a[i]) / dx) * ((b[i + 1] - b[i]) / dx);
    }
    return e;
  };

  FdmResult out;
  out.dx = dx;
  out.dt = dt;
  out.x_max = x_max;
  out.detector.t_start = 0.0;
  out.detector.dt = dt;
  out.detector.values.reserve(steps + 1);
  out.detector.values.push_back(at_detector(prev));
  out.max_abs = sup_abs(prev);

  std::vector<long> snap_steps;
  for (double s : opt.snapshot_times)
    snap_steps.push_back(std::lround(std::clamp(s, 0.0, T) / dt));
  auto maybe_snapshot = [&](long n, const std::vector<double>& u) {
    for (std::size_t k = 0; k < snap_steps.size(); ++k)
      if (snap_steps[k] == n) {
        if (out.grid.empty())
          for (std::size_t i = 0; i < M; ++i) out.grid.push_back(static_cast<double>(i) * dx);
        out.snapshots.emplace_back(static_cast<double>(n) * dt, u);
      }
  };
  maybe_snapshot(0, prev);

  for (std::size_t n = 1; n <= steps; ++n) {
    if (n > 1) {
      for (std::size_t i = 1; i + 1 < M; ++i)
        next[i] = 2.0 * cur[i] - prev[i] + lam2 * speed2[i] * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]);
      next[0] = 0.0;
      next[M - 1] = 0.0;
      std::swap(prev, cur);
      std::swap(cur, next);
    }
    out.detector.values.push_back(at_detector(cur));
    out.max_abs = std::max(out.max_abs, sup_abs(cur));
    if (opt.track_energy) out.energy.push_back(energy_of(prev, cur));
    maybe_snapshot(static_cast<long>(n), cur);
  }
  return out;
}

/**
 * Error norms between two uniformly sampled traces over their common time
 * range; b is resampled onto a's grid by linear interpolation. l2 is the
 * discrete norm sqrt(dt * sum of squared differences).
 */
inline TraceError compare_traces(const TimeSeries& a, const TimeSeries& b) {
  if (a.values.empty() || b.values.empty())
    fail(ErrorCode::no_overlap, "compare_traces: empty series");
  const double lo = std::max(a.t_start, b.t_start);
  const double hi = std::min(a.t_end(), b.t_end());
  if (!(hi > lo)) fail(ErrorCode::no_overlap, "compare_traces: disjoint time ranges");
  TraceError err;
  double sq = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a.time(i);
    if (t < lo - 1e-12 || t > hi + 1e-12) continue;
    double d = std::abs(a.values[i] - b.sample(t));
    err.l_inf = std::max(err.l_inf, d);
    sq += d * d;
    ++used;
  }
  if (used == 0) fail(ErrorCode::no_overlap, "compare_traces: no common samples");
  err.l2 = std::sqrt(a.dt * sq);
  return err;
}

}  // namespace echolab
