#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "core.hpp"
#include "single_layer.hpp"

namespace echolab {

enum class MarchMode { automatic, interpolated, exact_lattice };
enum class SynthMode { delta_major, delta_with_minor, continuous };

namespace detail {

/// Euclidean gcd over positive reals with relative tolerance. Returns 0 when
/// the inputs share no common unit within the iteration budget.
inline double float_gcd(double a, double b, double rel_tol = 1e-9) {
  if (!(a > 0.0) || !(b > 0.0)) return 0.0;
  const double tol = rel_tol * std::max(a, b);
  double x = a, y = b;
  for (int iter = 0; iter < 64; ++iter) {
    if (y <= tol) break;
    double r = std::fmod(x, y);
    if (r <= tol || y - r <= tol) r = 0.0;
    x = y;
    y = r;
  }
  if (y > tol) return 0.0;
  double na = a / x, nb = b / x;
  if (std::abs(na - std::nearbyint(na)) > 1e-6) return 0.0;
  if (std::abs(nb - std::nearbyint(nb)) > 1e-6) return 0.0;
  return x;
}

}  // namespace detail

/**
 * Impulse-response ledger of the two-layer coupled boundary system for a
 * delta-like pulse. The boundary trace at x = L is the impulse train
 *
 *   G0(t) = sum over (a,b) of  g0(a,b) * delta(t - t_src - a*tau1 - b*tau2),
 *
 * and likewise G1 at the internal interface, where a and b count half
 * round-trips across the outer and inner layer (tau1 = l1/c1, tau2 = l2/c2)
 * and t_src is the arrival time of the incident front at x = L. The
 * coefficients satisfy the same delay recursion as the traces themselves,
 * restated per lattice index:
 *
 *   g0(a,b) = c1/(c1+1) [a=b=0] - 2/(c1+1) sum_{n>=1} g0(a-2n,b)
 *                               + 2/(c1+1) sum_{n>=0} g1(a-2n-1,b)
 *   g1(a,b) = 2c2/(c2+c1) sum_{n>=0} g0(a-2n-1,b)
 *           - 2c2/(c2+c1) sum_{n>=1} g1(a-2n,b)
 *           - 2c1/(c2+c1) sum_{n>=1} g1(a,b-2n)
 *
 * with out-of-range indices contributing zero. Keeping the ledger indexed by
 * (a,b) rather than by arrival time leaves every coefficient addressable even
 * when distinct lattice points share an arrival time (commensurate delays);
 * the merged_* accessors sum everything landing at a given instant, which is
 * what a detector actually sees.
 */
class DeltaLattice {
 public:
  DeltaLattice(double c1, double c2, double l1, double l2, double t_src, double horizon)
      : c1_(c1), c2_(c2), tau1_(l1 / c1), tau2_(l2 / c2), t_src_(t_src) {
    if (!(c1 > 0.0 && c1 < 1.0) || !(c2 > 0.0 && c2 < 1.0))
      fail(ErrorCode::invalid_speed, "layer speeds must lie in (0, 1)");
    if (!(l1 > 0.0 && l2 > 0.0)) fail(ErrorCode::invalid_length, "layer lengths must be positive");
    if (!(t_src > 0.0))
      fail(ErrorCode::invalid_pulse, "delta pulse must sit strictly outside the medium");
    if (horizon >= t_src) {
      amax_ = detail::floor_snap((horizon - t_src) / tau1_);
      bmax_ = detail::floor_snap((horizon - t_src) / tau2_);
    }
    if (amax_ >= 0 && bmax_ >= 0) {
      if ((amax_ + 1) * (bmax_ + 1) > (1L << 22))
        fail(ErrorCode::invalid_horizon, "delta lattice too large for the requested horizon");
      compute();
    }
  }

  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }
  double t_src() const { return t_src_; }
  long a_max() const { return amax_; }
  long b_max() const { return bmax_; }

  /// Coefficient at lattice index (a,b); zero outside the tabulated range.
  double g0(long a, long b) const { return fetch(g0_, a, b); }
  double g1(long a, long b) const { return fetch(g1_, a, b); }

  double event_time(long a, long b) const {
    return t_src_ + static_cast<double>(a) * tau1_ + static_cast<double>(b) * tau2_;
  }

  /// Sum of every g0 coefficient whose arrival time coincides with t.
  double merged_g0_at(double t) const { return merged(g0_, t); }
  double merged_g1_at(double t) const { return merged(g1_, t); }

  /// Time-ordered nonzero events (unmerged; one entry per lattice index).
  std::vector<Event> g0_event_list() const { return list(g0_); }
  std::vector<Event> g1_event_list() const { return list(g1_); }

 private:
  void compute() {
    const std::size_t cells = static_cast<std::size_t>((amax_ + 1) * (bmax_ + 1));
    g0_.assign(cells, 0.0);
    g1_.assign(cells, 0.0);
    const double p0 = 2.0 / (c1_ + 1.0);
    const double p1 = 2.0 * c2_ / (c2_ + c1_);
    const double p2 = 2.0 * c1_ / (c2_ + c1_);
    for (long b = 0; b <= bmax_; ++b) {
      for (long a = 0; a <= amax_; ++a) {
        double self0 = 0.0, cross0 = 0.0;
        for (long n = 1; 2 * n <= a; ++n) self0 += fetch(g0_, a - 2 * n, b);
        for (long n = 0; 2 * n + 1 <= a; ++n) cross0 += fetch(g1_, a - 2 * n - 1, b);
        double v0 = (a == 0 && b == 0) ? c1_ / (c1_ + 1.0) : 0.0;
        cell(g0_, a, b) = v0 - p0 * self0 + p0 * cross0;

        double cross1 = 0.0, self1 = 0.0, inner1 = 0.0;
        for (long n = 0; 2 * n + 1 <= a; ++n) cross1 += fetch(g0_, a - 2 * n - 1, b);
        for (long n = 1; 2 * n <= a; ++n) self1 += fetch(g1_, a - 2 * n, b);
        for (long n = 1; 2 * n <= b; ++n) inner1 += fetch(g1_, a, b - 2 * n);
        cell(g1_, a, b) = p1 * cross1 - p1 * self1 - p2 * inner1;
      }
    }
  }

  double& cell(std::vector<double>& v, long a, long b) {
    return v[static_cast<std::size_t>(b * (amax_ + 1) + a)];
  }
  double fetch(const std::vector<double>& v, long a, long b) const {
    if (a < 0 || b < 0 || a > amax_ || b > bmax_ || v.empty()) return 0.0;
    return v[static_cast<std::size_t>(b * (amax_ + 1) + a)];
  }
  double merged(const std::vector<double>& v, double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    double s = 0.0;
    for (long b = 0; b <= bmax_; ++b)
      for (long a = 0; a <= amax_; ++a)
        if (std::abs(event_time(a, b) - t) <= tol) s += fetch(v, a, b);
    return s;
  }
  std::vector<Event> list(const std::vector<double>& v) const {
    std::vector<Event> ev;
    for (long b = 0; b <= bmax_; ++b)
      for (long a = 0; a <= amax_; ++a) {
        double amp = fetch(v, a, b);
        if (amp != 0.0) ev.push_back({event_time(a, b), amp});
      }
    std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.time < y.time; });
    return ev;
  }

  double c1_, c2_, tau1_, tau2_, t_src_;
  long amax_ = -1, bmax_ = -1;
  std::vector<double> g0_, g1_;
};

/**
 * Boundary traces of the double-layer system. Continuous pulses produce the
 * sampled g0/g1 grids (exact == true when every delayed lookup landed on a
 * grid node, so the nodal values carry no interpolation error); delta-like
 * pulses produce the event ledger instead.
 */
struct CoupledTraces {
  Scene scene;
  InitialPulse pulse;
  TimeSeries g0;
  TimeSeries g1;
  std::optional<DeltaLattice> lattice;
  bool exact = false;
  double horizon = 0.0;

  double g0_at(double t) const { return lattice ? lattice->merged_g0_at(t) : g0.sample(t); }
  double g1_at(double t) const { return lattice ? lattice->merged_g1_at(t) : g1.sample(t); }
};

/**
 * Causal time marching of the coupled delay system
 *
 *   G0(t) = c1/(c1+1) U0(L+t) - 2/(c1+1) sum_{n=1..[c1 t/2l1]} G0(t - 2n l1/c1)
 *                             + 2/(c1+1) sum_{n=0..[(c1 t - l1)/2l1]} G1(t - (2n+1) l1/c1)
 *   G1(t) = 2c2/(c2+c1) sum_{n=0..[(c1 t - l1)/2l1]} G0(t - (2n+1) l1/c1)
 *         - 2c2/(c2+c1) sum_{n=1..[c1 t/2l1]} G1(t - 2n l1/c1)
 *         - 2c1/(c2+c1) sum_{n=1..[c2 t/2l2]} G1(t - 2n l2/c2).
 *
 * Every right-hand-side term is strictly retarded (delays l1/c1, 2l1/c1,
 * 2l2/c2 > 0), so a single forward sweep fills the grid. Off-grid delays are
 * resolved by linear interpolation; when the delays share a common unit the
 * grid is aligned to it and every lookup is exact. dt = 0 picks the default
 * step (smallest delay)/64. Delta pulses skip sampling entirely and return
 * the event ledger.
 */
inline CoupledTraces march_double_layer(const Scene& scene, const InitialPulse& pulse, double T,
                                        double dt = 0.0, MarchMode mode = MarchMode::automatic) {
  if (scene.layer_count() != 2)
    fail(ErrorCode::unsupported, "march_double_layer requires exactly two layers");
  if (!(T > 0.0)) fail(ErrorCode::invalid_horizon, "marching horizon must be positive");
  check_compatibility(scene, pulse);

  const double l1 = scene.layers()[0].length, c1 = scene.layers()[0].speed;
  const double l2 = scene.layers()[1].length, c2 = scene.layers()[1].speed;
  const double tau1 = l1 / c1;         // outer-layer half round trip
  const double tau22 = 2.0 * l2 / c2;  // inner-layer full round trip
  const double min_delay = std::min(tau1, tau22);

  CoupledTraces traces{scene, pulse, {}, {}, std::nullopt, false, T};

  if (pulse.is_delta()) {
    if (mode == MarchMode::interpolated)
      fail(ErrorCode::unsupported, "delta-like pulses march on the event lattice, not a sampled grid");
    traces.lattice.emplace(c1, c2, l1, l2, pulse.delta_center() - scene.total_length(), T);
    traces.exact = true;
    return traces;
  }

  if (dt > 0.0 && dt > min_delay * (1.0 + 1e-12))
    fail(ErrorCode::step_too_coarse, "dt exceeds the smallest delay of the coupled system");

  const double target = dt > 0.0 ? dt : min_delay / 64.0;
  double step = target;
  long m1 = 0, m22 = 0;  // delays in grid units (exact mode)
  bool exact = false;
  if (mode != MarchMode::interpolated) {
    double unit = detail::float_gcd(tau1, tau22);
    if (unit > 0.0) {
      long refine = std::max(1L, static_cast<long>(std::ceil(unit / target - 1e-9)));
      double cand = unit / static_cast<double>(refine);
      if (T / cand <= 2e7) {
        step = cand;
        m1 = std::lround(tau1 / step);
        m22 = std::lround(tau22 / step);
        exact = true;
      }
    }
    if (!exact && mode == MarchMode::exact_lattice)
      fail(ErrorCode::invalid_config, "delays share no usable common unit; exact-lattice marching unavailable");
  }

  const std::size_t n = static_cast<std::size_t>(std::ceil(T / step - 1e-9)) + 1;
  std::vector<double> g0(n, 0.0), g1(n, 0.0);
  const double L = scene.total_length();
  const double p0 = 2.0 / (c1 + 1.0);
  const double p1 = 2.0 * c2 / (c2 + c1);
  const double p2 = 2.0 * c1 / (c2 + c1);

  if (exact) {
    for (std::size_t i = 0; i < n; ++i) {
      const long li = static_cast<long>(i);
      double self0 = 0.0, cross01 = 0.0, cross10 = 0.0, self1 = 0.0, inner1 = 0.0;
      for (long k = 1; 2 * k * m1 <= li; ++k) {
        self0 += g0[i - static_cast<std::size_t>(2 * k * m1)];
        self1 += g1[i - static_cast<std::size_t>(2 * k * m1)];
      }
      for (long k = 0; (2 * k + 1) * m1 <= li; ++k) {
        cross01 += g1[i - static_cast<std::size_t>((2 * k + 1) * m1)];
        cross10 += g0[i - static_cast<std::size_t>((2 * k + 1) * m1)];
      }
      for (long k = 1; k * m22 <= li; ++k) inner1 += g1[i - static_cast<std::size_t>(k * m22)];
      const double t = static_cast<double>(i) * step;
      g0[i] = c1 / (c1 + 1.0) * pulse(L + t) - p0 * self0 + p0 * cross01;
      g1[i] = p1 * cross10 - p1 * self1 - p2 * inner1;
    }
  } else {
    auto look = [&](const std::vector<double>& v, double tq) -> double {
      if (tq < 0.0) return 0.0;
      double u = tq / step;
      std::size_t k = static_cast<std::size_t>(u);
      if (k + 1 >= v.size()) return v.back();
      double w = u - static_cast<double>(k);
      return (1.0 - w) * v[k] + w * v[k + 1];
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) * step;
      const long k_self = detail::floor_snap(t / (2.0 * tau1));
      const long k_cross = detail::floor_snap((t - tau1) / (2.0 * tau1));
      const long k_inner = detail::floor_snap(t / tau22);
      double self0 = 0.0, cross01 = 0.0, cross10 = 0.0, self1 = 0.0, inner1 = 0.0;
      for (long k = 1; k <= k_self; ++k) {
        self0 += look(g0, t - 2.0 * static_cast<double>(k) * tau1);
        self1 += look(g1, t - 2.0 * static_cast<double>(k) * tau1);
      }
      for (long k = 0; k <= k_cross; ++k) {
        cross01 += look(g1, t - static_cast<double>(2 * k + 1) * tau1);
        cross10 += look(g0, t - static_cast<double>(2 * k + 1) * tau1);
      }
      for (long k = 1; k <= k_inner; ++k) inner1 += look(g1, t - static_cast<double>(k) * tau22);
      g0[i] = c1 / (c1 + 1.0) * pulse(L + t) - p0 * self0 + p0 * cross01;
      g1[i] = p1 * cross10 - p1 * self1 - p2 * inner1;
    }
  }

  traces.g0 = TimeSeries{0.0, step, std::move(g0)};
  traces.g1 = TimeSeries{0.0, step, std::move(g1)};
  traces.exact = exact;
  return traces;
}

/**
 * Field of the double-layer problem from marched traces. Regions:
 *   x > L           exterior d'Alembert form driven by G0
 *   x = L           G0(t) by continuity
 *   l2 < x < L      four retarded/advanced image sums over G0 and G1
 *   x = l2          G1(t) by continuity
 *   0 < x < l2      two image sums over G1 (odd reflections off the wall)
 *   x = 0           0 (fixed wall)
 */
inline double field_eval_double(const Scene& scene, const CoupledTraces& traces, double x, double t) {
  if (scene.layer_count() != 2)
    fail(ErrorCode::unsupported, "field_eval_double requires exactly two layers");
  if (traces.lattice)
    fail(ErrorCode::unsupported, "field evaluation needs sampled traces; delta ledgers carry events only");
  if (x < 0.0) fail(ErrorCode::out_of_domain, "field_eval_double: x < 0");
  if (t < 0.0) fail(ErrorCode::out_of_domain, "field_eval_double: t < 0");
  if (t > traces.horizon * (1.0 + 1e-12) + 1e-12)
    fail(ErrorCode::horizon_exceeded, "field_eval_double: t beyond the marching horizon");

  const double l1 = scene.layers()[0].length, c1 = scene.layers()[0].speed;
  const double l2 = scene.layers()[1].length, c2 = scene.layers()[1].speed;
  const double L = scene.total_length();
  const InitialPulse& U0 = traces.pulse;

  if (x == 0.0) return 0.0;
  if (x > L) {
    double u = 0.5 * U0(x + t);
    if (x >= L + t)
      u += 0.5 * U0(x - t);
    else
      u += traces.g0.sample(t - x + L) - 0.5 * U0(t - x + 2.0 * L);
    return u;
  }
  if (x == L) return traces.g0.sample(t);
  if (x > l2) {
    double v = 0.0;
    long b = detail::floor_snap((c1 * t + x - l2 - l1) / (2.0 * l1));
    for (long n = 0; n <= b; ++n)
      v += traces.g0.sample(t + (x - l2 - static_cast<double>(2 * n + 1) * l1) / c1);
    b = detail::floor_snap((c1 * t - x + l2 - l1) / (2.0 * l1));
    for (long n = 0; n <= b; ++n)
      v -= traces.g0.sample(t - (x - l2 + static_cast<double>(2 * n + 1) * l1) / c1);
    b = detail::floor_snap((c1 * t + x - l2 - 2.0 * l1) / (2.0 * l1));
    for (long n = 0; n <= b; ++n)
      v -= traces.g1.sample(t + (x - l2 - 2.0 * static_cast<double>(n + 1) * l1) / c1);
    b = detail::floor_snap((c1 * t - x + l2) / (2.0 * l1));
    for (long n = 0; n <= b; ++n)
      v += traces.g1.sample(t - (x - l2 + 2.0 * static_cast<double>(n) * l1) / c1);
    return v;
  }
  if (x == l2) return traces.g1.sample(t);
  double w = 0.0;
  long b = detail::floor_snap((c2 * t + x - l2) / (2.0 * l2));
  for (long n = 0; n <= b; ++n)
    w += traces.g1.sample(t + (x - static_cast<double>(2 * n + 1) * l2) / c2);
  b = detail::floor_snap((c2 * t - x - l2) / (2.0 * l2));
  for (long n = 0; n <= b; ++n)
    w -= traces.g1.sample(t - (x + static_cast<double>(2 * n + 1) * l2) / c2);
  return w;
}

/**
 * Arrival schedule of the major reflections at the detector:
 * t_{n+1} = 2D + sum_{j=1..n} 2 l_j / c_j for n = 0..N.
 */
inline std::vector<double> peak_times(const Scene& scene) {
  std::vector<double> times;
  times.reserve(scene.layer_count() + 1);
  double t = 2.0 * scene.detector_offset();
  times.push_back(t);
  for (const Layer& layer : scene.layers()) {
    t += 2.0 * layer.length / layer.speed;
    times.push_back(t);
  }
  return times;
}

/**
 * Signed amplitudes of the N+1 major reflections for speeds c_1..c_N
 * (exterior speed c_0 = 1):
 *
 *   rho_n    = K_{n-1} (c_n - c_{n-1}) / (2 (c_n + c_{n-1})),  n = 1..N
 *   rho_{N+1} = -K_N / 2                                        (wall)
 *
 * with the transmission product K_m = prod_{j=1..m} 4 c_{j-1} c_j / (c_j + c_{j-1})^2.
 * Each interface contributes one reflection; everything in front of it
 * attenuates the echo by the two-way transmission factor.
 */
inline std::vector<double> reflection_chain(const std::vector<double>& speeds) {
  for (double c : speeds)
    if (!(c > 0.0 && c < 1.0)) fail(ErrorCode::invalid_speed, "layer speeds must lie in (0, 1)");
  std::vector<double> rho;
  rho.reserve(speeds.size() + 1);
  double K = 1.0, prev = 1.0;
  for (double c : speeds) {
    rho.push_back(K * (c - prev) / (2.0 * (c + prev)));
    K *= 4.0 * prev * c / ((c + prev) * (c + prev));
    prev = c;
  }
  rho.push_back(-K / 2.0);
  return rho;
}

inline std::vector<double> scene_speeds(const Scene& scene) {
  std::vector<double> speeds;
  speeds.reserve(scene.layer_count());
  for (const Layer& layer : scene.layers()) speeds.push_back(layer.speed);
  return speeds;
}

/**
 * The (2k,0) echo family of the double layer: pulses that rattle inside the
 * outer layer only. Amplitudes
 *
 *   2 c1 (-1)^{k+1} (c1-1)^{k-1} (c2-c1)^k / ((c1+1)^{k+1} (c2+c1)^k)
 *
 * at times 2D + k * 2 l1 / c1, k = 1..k_max. k = 1 is the major reflection
 * off the internal interface; k >= 2 are the minor peaks.
 */
inline EventSeries minor_peaks_double(double c1, double c2, double l1, double D, int k_max) {
  if (!(c1 > 0.0 && c1 < 1.0) || !(c2 > 0.0 && c2 < 1.0))
    fail(ErrorCode::invalid_speed, "layer speeds must lie in (0, 1)");
  if (!(l1 > 0.0)) fail(ErrorCode::invalid_length, "layer length must be positive");
  if (!(D > 0.0)) fail(ErrorCode::invalid_input, "detector offset must be positive");
  EventSeries out;
  double amp = 2.0 * c1 * (c2 - c1) / ((c1 + 1.0) * (c1 + 1.0) * (c2 + c1));
  const double ratio = -(c1 - 1.0) * (c2 - c1) / ((c1 + 1.0) * (c2 + c1));
  for (int k = 1; k <= k_max; ++k) {
    out.add(2.0 * D + 2.0 * static_cast<double>(k) * l1 / c1, amp);
    amp *= ratio;
  }
  return out;
}

struct SynthOptions {
  double sample_dt = 0.0;    // continuous output grid step; 0 picks a default
  double march_dt = 0.0;     // marching step override (double layer)
  MarchMode march_mode = MarchMode::automatic;
  double min_amplitude = 1e-14;  // delta events below this magnitude are dropped
};

using Measurement = std::variant<EventSeries, TimeSeries>;

namespace detail {

inline void require_delta_at_detector(const Scene& scene, const InitialPulse& pulse) {
  if (!pulse.is_delta())
    fail(ErrorCode::invalid_pulse, "peak-table synthesis needs a delta-like pulse");
  double want = scene.detector_position();
  double tol = std::max(pulse.point_tolerance(), 1e-9 * std::max(1.0, std::abs(want)));
  if (std::abs(pulse.delta_center() - want) > tol)
    fail(ErrorCode::invalid_pulse, "delta pulse must sit at the detector for peak-table synthesis");
}

inline EventSeries filter_events(const EventSeries& in, double t_max, double min_amplitude) {
  EventSeries out;
  for (const Event& e : in.events()) {
    if (e.time > t_max * (1.0 + 1e-12) + 1e-12) break;
    if (std::abs(e.amplitude) < min_amplitude) continue;
    out.add(e.time, e.amplitude);
  }
  return out;
}

}  // namespace detail

/**
 * Detector measurement synthesis.
 *  - delta_major: impulse train of the N+1 major reflections (plus the unit
 *    event at t = 0 where the incident and mirrored fronts coincide).
 *  - delta_with_minor: every echo, not just the majors. Single layer: the
 *    full geometric echo train. Double layer: the whole event ledger,
 *    coincident arrivals merged. Three or more layers: unsupported.
 *  - continuous: sampled m(t); single layer via the closed form, double layer
 *    via marching + field evaluation at the detector, N >= 3 unsupported.
 */
inline Measurement synth_measurement(const Scene& scene, const InitialPulse& pulse, SynthMode mode,
                                     double t_max, const SynthOptions& opt = {}) {
  if (!(t_max > 0.0)) fail(ErrorCode::invalid_horizon, "synthesis horizon must be positive");
  const double D = scene.detector_offset();
  const std::size_t N = scene.layer_count();

  if (mode == SynthMode::continuous) {
    if (N == 1) {
      double dt = opt.sample_dt > 0.0 ? opt.sample_dt : t_max / 4096.0;
      return measure(scene, pulse, t_max, dt);
    }
    if (N != 2) fail(ErrorCode::unsupported, "continuous synthesis covers one- and two-layer media");
    CoupledTraces traces = march_double_layer(scene, pulse, t_max, opt.march_dt, opt.march_mode);
    double dt = opt.sample_dt > 0.0 ? opt.sample_dt : traces.g0.dt;
    std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    TimeSeries out{0.0, dt, std::vector<double>(n, 0.0)};
    const double xd = scene.detector_position();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = field_eval_double(scene, traces, xd, out.time(i));
    return out;
  }

  detail::require_delta_at_detector(scene, pulse);
  EventSeries raw;
  raw.add(0.0, 1.0);  // incident front and its mirror image coincide at t = 0

  if (mode == SynthMode::delta_major) {
    std::vector<double> times = peak_times(scene);
    std::vector<double> rho = reflection_chain(scene_speeds(scene));
    for (std::size_t j = 0; j < times.size(); ++j) raw.add(times[j], rho[j]);
    return detail::filter_events(raw, t_max, opt.min_amplitude);
  }

  // delta_with_minor
  if (N == 1) {
    const double L = scene.total_length();
    const double c1 = scene.layers()[0].speed;
    if (t_max >= 2.0 * D) {
      int k_max = static_cast<int>(detail::floor_snap((t_max - 2.0 * D) * c1 / (2.0 * L)));
      EventSeries train = delta_peaks_single(c1, L, D, k_max);
      for (const Event& e : train.events()) raw.add(e.time, e.amplitude);
    }
    return detail::filter_events(raw, t_max, opt.min_amplitude);
  }
  if (N != 2) fail(ErrorCode::unsupported, "minor-event enumeration covers one- and two-layer media");

  const double l1 = scene.layers()[0].length, c1 = scene.layers()[0].speed;
  const double l2 = scene.layers()[1].length, c2 = scene.layers()[1].speed;
  DeltaLattice lattice(c1, c2, l1, l2, D, std::max(t_max - D, 0.0));
  std::vector<Event> events = lattice.g0_event_list();
  for (Event& e : events) {
    e.time += D;  // trace event at s arrives at the detector at s + D
    if (std::abs(e.time - 2.0 * D) <= 1e-9 * std::max(1.0, 2.0 * D))
      e.amplitude -= 0.5;  // the mirrored incident front subtracts here
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.time < y.time; });
  for (const Event& e : events) raw.add(e.time, e.amplitude);
  return detail::filter_events(raw, t_max, opt.min_amplitude);
}

}  // namespace echolab
