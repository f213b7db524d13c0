#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "core.hpp"
#include "multi_layer.hpp"

namespace echolab {

/**
 * Peak extraction from an impulse train: keep events with |amplitude| above
 * min_height, drop the t = 0 source event (the non-reflected initial wave)
 * and anything at or before t_min.
 */
inline PeakList extract_peaks(const EventSeries& series, double min_height,
                              bool magnitude_only = false, double t_min = 0.0) {
  if (!(min_height > 0.0)) fail(ErrorCode::invalid_input, "min_height must be positive");
  PeakList out;
  out.magnitude_only = magnitude_only;
  for (const Event& e : series.events()) {
    if (e.time <= t_min + 1e-9 * std::max(1.0, std::abs(t_min))) continue;
    if (std::abs(e.amplitude) < min_height) continue;
    out.peaks.push_back({e.time, magnitude_only ? std::abs(e.amplitude) : e.amplitude});
  }
  if (out.peaks.empty()) fail(ErrorCode::empty_peaks, "no peaks above min_height");
  return out;
}

/**
 * Peak extraction from a sampled trace: strict local extrema of |m| above
 * min_height, with peak time and height refined by the 3-point parabola
 * through the extremum and its neighbours. Heights approximate delta-pulse
 * amplitudes for narrow pulses; see invert_* for the exact algebra.
 */
inline PeakList extract_peaks(const TimeSeries& series, double min_height,
                              bool magnitude_only = false, double t_min = 0.0) {
  if (!(min_height > 0.0)) fail(ErrorCode::invalid_input, "min_height must be positive");
  PeakList out;
  out.magnitude_only = magnitude_only;
  const std::vector<double>& y = series.values;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    double a = std::abs(y[i]);
    if (a < min_height) continue;
    if (!(a >= std::abs(y[i - 1]) && a > std::abs(y[i + 1]))) continue;
    double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double delta = denom != 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / denom : 0.0;
    if (!(delta > -1.0 && delta < 1.0)) delta = 0.0;
    double t = series.time(i) + delta * series.dt;
    double h = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta;
    if (t <= t_min + 1e-9 * std::max(1.0, std::abs(t_min))) continue;
    out.peaks.push_back({t, magnitude_only ? std::abs(h) : h});
  }
  if (out.peaks.empty()) fail(ErrorCode::empty_peaks, "no peaks above min_height");
  return out;
}

/// Travel-time ratios l_j / c_j = (t_{j+1} - t_j) / 2 from the peak schedule.
inline std::vector<double> recover_ratios(const PeakList& peaks) {
  if (peaks.size() < 2) fail(ErrorCode::invalid_peaks, "need at least two peaks");
  std::vector<double> ratios;
  ratios.reserve(peaks.size() - 1);
  for (std::size_t j = 1; j < peaks.size(); ++j) {
    double gap = peaks.peaks[j].time - peaks.peaks[j - 1].time;
    if (!(gap > 0.0)) fail(ErrorCode::invalid_peaks, "peak times must increase strictly");
    ratios.push_back(0.5 * gap);
  }
  return ratios;
}

/// l_j = ratio_j * c_j once the speeds are known.
inline std::vector<double> recover_lengths(const std::vector<double>& ratios,
                                           const std::vector<double>& speeds) {
  if (ratios.size() != speeds.size())
    fail(ErrorCode::invalid_input, "ratio/speed lists must have equal length");
  std::vector<double> lengths;
  lengths.reserve(ratios.size());
  for (std::size_t j = 0; j < ratios.size(); ++j) lengths.push_back(ratios[j] * speeds[j]);
  return lengths;
}

/// Diagnostic residual |rho_{N+1}(speeds)| - |h_last| of the wall reflection.
inline double wall_consistency(const std::vector<double>& speeds, double h_last) {
  std::vector<double> rho = reflection_chain(speeds);
  return std::abs(rho.back()) - std::abs(h_last);
}

namespace detail {

/// Solve rho_n = h for c_n given the partial chain: r = 2 h / K_{n-1},
/// c_n = c_{n-1} (1 + r) / (1 - r). Returns nullopt outside (0, 1).
inline std::optional<double> next_speed(double c_prev, double K_prev, double h) {
  double r = 2.0 * h / K_prev;
  if (!(r > -1.0 && r < 1.0)) return std::nullopt;
  double c = c_prev * (1.0 + r) / (1.0 - r);
  if (!(c > 0.0 && c < 1.0)) return std::nullopt;
  return c;
}

inline double chain_factor(double c_prev, double c) {
  return 4.0 * c_prev * c / ((c + c_prev) * (c + c_prev));
}

}  // namespace detail

/**
 * Sequential inversion from signed peak heights h_1..h_{N+1} (the last one is
 * the wall reflection): c_1 = (1 + 2 h_1) / (1 - 2 h_1), then each h_n fixes
 * c_n uniquely through the reflection chain. Lengths follow from the
 * travel-time ratios. Exactly one candidate; the wall peak adds no equation
 * and is reported as a residual diagnostic.
 */
inline ReconstructionResult invert_full(const PeakList& peaks) {
  if (peaks.magnitude_only)
    fail(ErrorCode::invalid_peaks, "full inversion needs signed heights");
  if (peaks.size() < 2) fail(ErrorCode::invalid_peaks, "need at least two peaks");
  std::vector<double> ratios = recover_ratios(peaks);
  const std::size_t N = peaks.size() - 1;

  double h1 = peaks.peaks[0].height;
  if (!(std::abs(h1) < 0.5)) fail(ErrorCode::infeasible, "leading height must satisfy |h1| < 1/2");
  double c1 = (1.0 + 2.0 * h1) / (1.0 - 2.0 * h1);
  if (!(c1 > 0.0 && c1 < 1.0))
    fail(ErrorCode::infeasible, "leading height maps outside 0 < c1 < 1");

  std::vector<double> speeds{c1};
  double K = detail::chain_factor(1.0, c1);
  for (std::size_t n = 1; n < N; ++n) {
    std::optional<double> c = detail::next_speed(speeds.back(), K, peaks.peaks[n].height);
    if (!c) fail(ErrorCode::infeasible, "peak heights are inconsistent with any speed in (0, 1)");
    K *= detail::chain_factor(speeds.back(), *c);
    speeds.push_back(*c);
  }

  Candidate cand;
  cand.speeds = speeds;
  cand.lengths = recover_lengths(ratios, speeds);
  cand.length_sum = 0.0;
  for (std::size_t j = 0; j < N; ++j) cand.length_sum += 2.0 * ratios[j] * speeds[j];

  ReconstructionResult res;
  res.candidates.push_back(std::move(cand));
  res.selected_index = 0;
  res.ambiguous = false;
  res.wall_residuals.push_back(wall_consistency(speeds, peaks.peaks[N].height));
  return res;
}

/**
 * Phaseless inversion from peak magnitudes |h_1|..|h_{N+1}| plus the known
 * total length L. The leading reflection is negative for any c_1 in (0, 1),
 * so c_1 = (1 - 2|h_1|) / (1 + 2|h_1|) is unique; every later magnitude
 * splits into two sign branches, explored depth-first (minus first, so the
 * candidate list is ordered lexicographically by branch labels) and pruned
 * when the speed leaves (0, 1). Zero magnitudes collapse their two branches.
 * Each surviving leaf is scored by sum (t_{j+1} - t_j) c_j against 2L:
 * exactly one inside the tolerance selects it; several set the ambiguity
 * flag with no selection; none selects the closest and flags ambiguity.
 * The wall magnitude is a diagnostic only (it is branch-independent).
 *
 * tol <= 0 picks the default 1e-6 * 2L. Media with c_1 >= 1 are outside
 * scope: assume_slow_medium = false rejects the call explicitly instead of
 * mis-signing the leading peak.
 */
inline ReconstructionResult invert_phaseless(const PeakList& peaks, double total_length,
                                             double tol = -1.0, bool assume_slow_medium = true) {
  if (peaks.size() < 2) {
    if (peaks.peaks.empty()) fail(ErrorCode::empty_peaks, "no peaks supplied");
    fail(ErrorCode::invalid_peaks, "need at least two peaks");
  }
  if (!(total_length > 0.0)) fail(ErrorCode::invalid_length, "total length must be positive");
  if (!assume_slow_medium)
    fail(ErrorCode::unsupported, "media with c1 >= 1 are out of scope; no sign rule applies");
  std::vector<double> ratios = recover_ratios(peaks);
  const std::size_t N = peaks.size() - 1;
  const double target = 2.0 * total_length;
  const double eps = tol > 0.0 ? tol : 1e-6 * target;

  double h1 = std::abs(peaks.peaks[0].height);
  if (!(h1 < 0.5)) fail(ErrorCode::infeasible, "leading magnitude must satisfy |h1| < 1/2");
  double c1 = (1.0 - 2.0 * h1) / (1.0 + 2.0 * h1);
  if (!(c1 > 0.0 && c1 < 1.0)) fail(ErrorCode::infeasible, "leading magnitude maps outside (0, 1)");

  ReconstructionResult res;
  std::vector<double> speeds{c1};

  // depth-first over the sign choices of h_2..h_N, minus branch first
  auto emit = [&]() {
    Candidate cand;
    cand.speeds = speeds;
    cand.lengths = recover_lengths(ratios, speeds);
    cand.length_sum = 0.0;
    for (std::size_t j = 0; j < N; ++j) cand.length_sum += 2.0 * ratios[j] * speeds[j];
    res.candidates.push_back(std::move(cand));
  };
  auto dfs = [&](auto&& self, std::size_t n, double K) -> void {
    if (n == N) {
      emit();
      return;
    }
    double mag = std::abs(peaks.peaks[n].height);
    for (double sign : {-1.0, 1.0}) {
      if (mag == 0.0 && sign > 0.0) break;  // both branches coincide
      std::optional<double> c = detail::next_speed(speeds.back(), K, sign * mag);
      if (!c) continue;
      double K_next = K * detail::chain_factor(speeds.back(), *c);
      speeds.push_back(*c);
      self(self, n + 1, K_next);
      speeds.pop_back();
    }
  };
  dfs(dfs, 1, detail::chain_factor(1.0, c1));

  if (res.candidates.empty())
    fail(ErrorCode::infeasible, "every sign branch leaves the admissible speed range");

  const double h_last = peaks.peaks[N].height;
  std::vector<std::size_t> inside;
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    res.wall_residuals.push_back(wall_consistency(res.candidates[i].speeds, h_last));
    double dist = std::abs(res.candidates[i].length_sum - target);
    if (dist <= eps) inside.push_back(i);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  if (inside.size() == 1) {
    res.selected_index = inside.front();
    res.ambiguous = false;
  } else if (inside.size() > 1) {
    res.selected_index = std::nullopt;
    res.ambiguous = true;
  } else {
    res.selected_index = best;  // nothing within tolerance: closest, flagged
    res.ambiguous = true;
  }
  return res;
}

}  // namespace echolab
