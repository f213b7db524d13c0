#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace echolab {

inline constexpr const char* version_string = "0.1.0";

enum class ErrorCode {
  invalid_scene,
  invalid_speed,
  invalid_pulse,
  invalid_config,
  invalid_input,
  invalid_length,
  invalid_peaks,
  empty_peaks,
  infeasible,
  out_of_domain,
  horizon_exceeded,
  invalid_horizon,
  step_too_coarse,
  unstable_step,
  no_overlap,
  unsupported,
};

/** Single error type for the whole library; the code drives CLI exit status. */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/** One homogeneous slab. Speeds are relative to the exterior speed (== 1). */
struct Layer {
  double length = 0.0;  // > 0
  double speed = 0.0;   // in (0,1)
};

/**
 * Layered half-line medium. Layer 1 is adjacent to the exterior boundary
 * x = L (L = sum of lengths); the last layer touches the reflecting wall
 * at x = 0. The detector sits at x = L + detector_offset, the initial pulse
 * is supported in (L, inf) around source_position.
 */
class Scene {
 public:
  Scene(std::vector<Layer> layers, double detector_offset, double source_position)
      : layers_(std::move(layers)), detector_offset_(detector_offset), source_position_(source_position) {
    if (layers_.empty()) fail(ErrorCode::invalid_scene, "scene needs at least one layer");
    double total = 0.0;
    for (const Layer& layer : layers_) {
      if (!(layer.length > 0.0)) fail(ErrorCode::invalid_scene, "layer length must be positive");
      if (!(layer.speed > 0.0 && layer.speed < 1.0))
        fail(ErrorCode::invalid_speed, "layer speed must lie in (0,1)");
      total += layer.length;
    }
    total_length_ = total;
    if (!(detector_offset_ > 0.0)) fail(ErrorCode::invalid_scene, "detector offset must be positive");
    if (!(source_position_ > total_length_))
      fail(ErrorCode::invalid_scene, "source must lie outside the medium (x0 > L)");
  }

  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }
  double total_length() const { return total_length_; }
  double detector_offset() const { return detector_offset_; }
  double detector_position() const { return total_length_ + detector_offset_; }
  double source_position() const { return source_position_; }

  /// Right edge of layer j (0-based); layer j occupies (right_edge - length, right_edge).
  double right_edge(std::size_t j) const {
    double edge = total_length_;
    for (std::size_t i = 0; i < j; ++i) edge -= layers_[i].length;
    return edge;
  }

  /// Wave speed at position x with the right-limit convention at interfaces.
  double speed_at(double x) const {
    if (x < 0.0) fail(ErrorCode::out_of_domain, "speed_at: x < 0");
    if (x >= total_length_) return 1.0;
    double edge = total_length_;
    for (const Layer& layer : layers_) {
      edge -= layer.length;
      if (x >= edge) return layer.speed;
    }
    return layers_.back().speed;
  }

 private:
  std::vector<Layer> layers_;
  double detector_offset_;
  double source_position_;
  double total_length_ = 0.0;
};

inline double scene_total_length(const Scene& scene) { return scene.total_length(); }

/**
 * Initial displacement U0. Supported variants:
 *  - delta-like: unit point value at x0 (amplitude ledger semantics, not a density)
 *  - gaussian: exp(-sharpness * (x - x0)^2)
 *  - tabulated: piecewise-linear through samples, zero outside the abscissae
 *  - analytic: arbitrary callable
 */
class InitialPulse {
 public:
  static InitialPulse delta(double x0, double point_tolerance = 1e-12) {
    InitialPulse p;
    p.impl_ = Delta{x0, point_tolerance};
    return p;
  }

  static InitialPulse gaussian(double x0, double sharpness) {
    if (!(sharpness > 0.0)) fail(ErrorCode::invalid_pulse, "gaussian sharpness must be positive");
    InitialPulse p;
    p.impl_ = Gaussian{x0, sharpness};
    return p;
  }

  static InitialPulse tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
      fail(ErrorCode::invalid_pulse, "tabulated pulse needs matching x/y arrays with >= 2 samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) fail(ErrorCode::invalid_pulse, "tabulated abscissae must increase");
    InitialPulse p;
    p.impl_ = Tabulated{std::move(xs), std::move(ys)};
    return p;
  }

  static InitialPulse analytic(std::function<double(double)> fn) {
    if (!fn) fail(ErrorCode::invalid_pulse, "analytic pulse needs a callable");
    InitialPulse p;
    p.impl_ = Analytic{std::move(fn)};
    return p;
  }

  double operator()(double x) const {
    if (const Delta* d = std::get_if<Delta>(&impl_))
      return std::abs(x - d->x0) <= d->tol ? 1.0 : 0.0;
    if (const Gaussian* g = std::get_if<Gaussian>(&impl_))
      return std::exp(-g->sharpness * (x - g->x0) * (x - g->x0));
    if (const Tabulated* t = std::get_if<Tabulated>(&impl_)) {
      if (x <= t->xs.front() || x >= t->xs.back()) return 0.0;
      std::size_t hi = 1;
      while (t->xs[hi] < x) ++hi;
      double w = (x - t->xs[hi - 1]) / (t->xs[hi] - t->xs[hi - 1]);
      return (1.0 - w) * t->ys[hi - 1] + w * t->ys[hi];
    }
    return std::get<Analytic>(impl_).fn(x);
  }

  bool is_delta() const { return std::holds_alternative<Delta>(impl_); }
  double delta_center() const {
    if (!is_delta()) fail(ErrorCode::invalid_pulse, "pulse is not delta-like");
    return std::get<Delta>(impl_).x0;
  }
  double point_tolerance() const {
    return is_delta() ? std::get<Delta>(impl_).tol : 0.0;
  }

 private:
  struct Delta {
    double x0;
    double tol;
  };
  struct Gaussian {
    double x0;
    double sharpness;
  };
  struct Tabulated {
    std::vector<double> xs, ys;
  };
  struct Analytic {
    std::function<double(double)> fn;
  };

  InitialPulse() = default;
  std::variant<Delta, Gaussian, Tabulated, Analytic> impl_{Delta{0.0, 0.0}};
};

inline double pulse_eval(const InitialPulse& pulse, double x) { return pulse(x); }

/// Pulses must vanish at the medium boundary (support inside (L, inf)).
inline void check_compatibility(const Scene& scene, const InitialPulse& pulse, double tol = 1e-12) {
  if (std::abs(pulse(scene.total_length())) > tol)
    fail(ErrorCode::invalid_pulse, "pulse does not vanish at the medium boundary x = L");
}

/** Uniformly sampled signal starting at t_start with step dt. */
struct TimeSeries {
  double t_start = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
  double t_end() const { return values.empty() ? t_start : time(values.size() - 1); }

  /// Linear interpolation; zero outside the sampled range on the left, error-free clamp on the right edge.
  double sample(double t) const {
    if (values.empty()) return 0.0;
    double u = (t - t_start) / dt;
    if (u <= 0.0) return u < -1e-9 ? 0.0 : values.front();
    if (u >= static_cast<double>(values.size() - 1)) return values.back();
    std::size_t i = static_cast<std::size_t>(u);
    double w = u - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
  }
};

struct Event {
  double time = 0.0;
  double amplitude = 0.0;
};

/** Sparse impulse train with strictly increasing times; coincident arrivals merge. */
class EventSeries {
 public:
  void add(double time, double amplitude) {
    double tol = 1e-9 * std::max(1.0, std::abs(time));
    if (!events_.empty()) {
      if (std::abs(time - events_.back().time) <= tol) {
        events_.back().amplitude += amplitude;
        return;
      }
      if (time < events_.back().time)
        fail(ErrorCode::invalid_input, "event times must be non-decreasing");
    }
    events_.push_back({time, amplitude});
  }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  bool empty() const { return events_.empty(); }

 private:
  std::vector<Event> events_;
};

struct Peak {
  double time = 0.0;
  double height = 0.0;  // magnitude if the owning list is magnitude-only
};

struct PeakList {
  std::vector<Peak> peaks;
  bool magnitude_only = false;

  std::size_t size() const { return peaks.size(); }
};

/** One admissible medium produced by an inversion. */
struct Candidate {
  std::vector<double> speeds;
  std::vector<double> lengths;
  double length_sum = 0.0;  // sum over j of (t_{j+1} - t_j) * c_j == 2 * sum of lengths
};

struct ReconstructionResult {
  std::vector<Candidate> candidates;
  std::optional<std::size_t> selected_index;
  bool ambiguous = false;
  std::vector<double> wall_residuals;  // |rho_{N+1}(candidate)| - |h_last|, one per candidate
};

namespace detail {

/// floor with a snap window: values within eps of an integer round to it
/// (lattice times land on interval edges; the left-closed convention applies).
inline long floor_snap(double a, double eps = 1e-9) {
  double r = std::nearbyint(a);
  if (std::abs(a - r) <= eps) return static_cast<long>(r);
  return static_cast<long>(std::floor(a));
}

}  // namespace detail

}  // namespace echolab
