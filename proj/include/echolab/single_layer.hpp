#pragma once

#include <cmath>
#include <vector>

#include "echolab/core.hpp"
#include "echolab/parallel.hpp"

namespace echolab {

namespace detail {

inline void check_single_layer_args(double L, double c1) {
  if (!(L > 0.0)) fail(ErrorCode::invalid_length, "medium length must be positive");
  if (!(c1 > 0.0 && c1 < 1.0)) fail(ErrorCode::invalid_speed, "layer speed must lie in (0,1)");
}

}  // namespace detail

/**
 * Boundary trace G(t) = u(L,t) of the single-layer problem, via the closed
 * form: a leading transmitted copy of U0 plus a geometric series of
 * wall/interface round trips,
 *
 *   G(t) = c1/(c1+1) U0(L+t)
 *        - 2 c1/(c1+1)^2 sum_{n=0}^{floor(c1 t / 2L) - 1} q^n U0(L + t - 2(n+1)L/c1),
 *
 * with q = (c1-1)/(c1+1). The sum is empty before the first round trip.
 */
inline double g_closed_form(const InitialPulse& pulse, double L, double c1, double t) {
  detail::check_single_layer_args(L, c1);
  if (t < 0.0) return 0.0;
  double g = c1 / (c1 + 1.0) * pulse(L + t);
  long n_max = detail::floor_snap(c1 * t / (2.0 * L)) - 1;
  if (n_max < 0) return g;
  double q = (c1 - 1.0) / (c1 + 1.0);
  double coeff = -2.0 * c1 / ((c1 + 1.0) * (c1 + 1.0));
  double round_trip = 2.0 * L / c1;
  for (long n = 0; n <= n_max; ++n) {
    g += coeff * pulse(L + t - static_cast<double>(n + 1) * round_trip);
    coeff *= q;
  }
  return g;
}

/**
 * Same trace via the delay recursion
 *   G(t) = c1/(c1+1) U0(L+t) - 2/(c1+1) sum_{n=1}^{floor(c1 t / 2L)} G(t - 2nL/c1),
 * resolved bottom-up on the shifted-time lattice t - 2kL/c1 (memoised by k).
 */
inline double g_recursive(const InitialPulse& pulse, double L, double c1, double t,
                          long horizon_cap = 10000) {
  detail::check_single_layer_args(L, c1);
  if (t < 0.0) return 0.0;
  double round_trip = 2.0 * L / c1;
  long depth = detail::floor_snap(c1 * t / (2.0 * L));
  if (depth > horizon_cap)
    fail(ErrorCode::horizon_exceeded, "recursion depth exceeds the configured horizon cap");
  std::vector<double> memo(static_cast<std::size_t>(depth) + 1, 0.0);
  double lead = c1 / (c1 + 1.0);
  double feedback = -2.0 / (c1 + 1.0);
  for (long k = depth; k >= 0; --k) {
    double tau = t - static_cast<double>(k) * round_trip;
    double g = lead * pulse(L + tau);
    long n_max = detail::floor_snap(c1 * tau / (2.0 * L));
    for (long n = 1; n <= n_max && k + n <= depth; ++n)
      g += feedback * memo[static_cast<std::size_t>(k + n)];
    memo[static_cast<std::size_t>(k)] = g;
  }
  return memo[0];
}

/**
 * Interval-split evaluation: on 2(N+1)L/c1 < t < 2(N+2)L/c1 the trace is the
 * leading term plus N+1 reflected copies with coefficients
 * -2 c1 (c1-1)^n / (c1+1)^{n+2}. Identical contract to g_closed_form.
 */
inline double g_sectional(const InitialPulse& pulse, double L, double c1, double t) {
  detail::check_single_layer_args(L, c1);
  if (t < 0.0) return 0.0;
  double g = c1 / (c1 + 1.0) * pulse(L + t);
  long N = detail::floor_snap(c1 * t / (2.0 * L)) - 1;
  double round_trip = 2.0 * L / c1;
  for (long n = 0; n <= N; ++n) {
    double coeff = -2.0 * c1 * std::pow(c1 - 1.0, static_cast<double>(n)) /
                   std::pow(c1 + 1.0, static_cast<double>(n) + 2.0);
    g += coeff * pulse(L + t - static_cast<double>(n + 1) * round_trip);
  }
  return g;
}

/**
 * Displacement W(x,t) of the single-layer problem. Outside the medium the
 * solution is the free d'Alembert pair with the reflected branch replaced by
 * the boundary trace; inside it is the image sum over wall and interface
 * reflections of G.
 */
inline double field_eval(const Scene& scene, const InitialPulse& pulse, double x, double t) {
  if (scene.layer_count() != 1)
    fail(ErrorCode::unsupported, "field_eval handles single-layer scenes; see field_eval_double");
  if (x < 0.0) fail(ErrorCode::out_of_domain, "field_eval: x < 0");
  if (t < 0.0) fail(ErrorCode::out_of_domain, "field_eval: t < 0");
  double L = scene.total_length();
  double c1 = scene.layers()[0].speed;

  if (x > L) {
    double u = 0.5 * pulse(x + t);
    if (x >= L + t)
      u += 0.5 * pulse(x - t);
    else
      u += g_closed_form(pulse, L, c1, t - x + L) - 0.5 * pulse(t - x + 2.0 * L);
    return u;
  }
  if (x == L) return g_closed_form(pulse, L, c1, t);

  double v = 0.0;
  long n1 = detail::floor_snap((c1 * t + x - L) / (2.0 * L));
  for (long n = 0; n <= n1; ++n)
    v += g_closed_form(pulse, L, c1, t + (x - static_cast<double>(2 * n + 1) * L) / c1);
  long n2 = detail::floor_snap((c1 * t - x - L) / (2.0 * L));
  for (long n = 0; n <= n2; ++n)
    v -= g_closed_form(pulse, L, c1, t - (x + static_cast<double>(2 * n + 1) * L) / c1);
  return v;
}

/**
 * Detector trace m(t) = u(L+D, t). Before the first reflection arrives the
 * signal is the free-space pair; afterwards the echo train appears with
 * coefficients matching the boundary trace series.
 */
inline double measure_at(const Scene& scene, const InitialPulse& pulse, double t) {
  if (scene.layer_count() != 1)
    fail(ErrorCode::unsupported, "measure handles single-layer scenes; see synth_continuous");
  double L = scene.total_length();
  double D = scene.detector_offset();
  double c1 = scene.layers()[0].speed;
  if (t < 0.0) fail(ErrorCode::invalid_horizon, "measure: t < 0");
  double m = 0.5 * pulse(L + D + t);
  if (t <= D) return m + 0.5 * pulse(L + D - t);
  m += 0.5 * (c1 - 1.0) / (c1 + 1.0) * pulse(L - D + t);
  long n_max = detail::floor_snap(c1 * (t - D) / (2.0 * L)) - 1;
  double round_trip = 2.0 * L / c1;
  for (long n = 0; n <= n_max; ++n) {
    double coeff = -2.0 * c1 * std::pow(c1 - 1.0, static_cast<double>(n)) /
                   std::pow(c1 + 1.0, static_cast<double>(n) + 2.0);
    m += coeff * pulse(L - D - static_cast<double>(n + 1) * round_trip + t);
  }
  return m;
}

inline TimeSeries measure(const Scene& scene, const InitialPulse& pulse, double t_max, double dt) {
  if (!(t_max >= 0.0)) fail(ErrorCode::invalid_horizon, "measure: t_max must be >= 0");
  if (!(dt > 0.0)) fail(ErrorCode::invalid_horizon, "measure: dt must be positive");
  check_compatibility(scene, pulse);
  TimeSeries out;
  out.t_start = 0.0;
  out.dt = dt;
  std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  out.values.resize(n);
  parallel_for(n, [&](std::size_t i) { out.values[i] = measure_at(scene, pulse, out.time(i)); });
  return out;
}

/**
 * Echo table for a delta-like pulse fired from the detector position:
 * arrivals at t_k = 2D + k 2L/c1 with
 *   m_0 = (c1-1)/(2(c1+1)),   m_k = -2 c1 (c1-1)^{k-1}/(c1+1)^{k+1} (k >= 1);
 * successive echoes decay by the fixed ratio (c1-1)/(c1+1).
 */
inline EventSeries delta_peaks_single(double c1, double L, double D, int k_max) {
  detail::check_single_layer_args(L, c1);
  if (!(D > 0.0)) fail(ErrorCode::invalid_scene, "detector offset must be positive");
  if (k_max < 0) fail(ErrorCode::invalid_input, "k_max must be >= 0");
  EventSeries out;
  double step = 2.0 * L / c1;
  out.add(2.0 * D, 0.5 * (c1 - 1.0) / (c1 + 1.0));
  double amp = -2.0 * c1 / ((c1 + 1.0) * (c1 + 1.0));
  double ratio = (c1 - 1.0) / (c1 + 1.0);
  for (int k = 1; k <= k_max; ++k) {
    out.add(2.0 * D + static_cast<double>(k) * step, amp);
    amp *= ratio;
  }
  return out;
}

}  // namespace echolab
