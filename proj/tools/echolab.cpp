// echolab: wave scattering on the layered half line.
//
// Subcommands: simulate (field tables), measure (detector traces),
// invert (medium reconstruction from peaks), verify (analytic vs FDM).
// Exit codes: 0 success, 1 infeasible or ambiguous reconstruction,
// 2 input error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <echolab/echolab.hpp>

namespace {

using Clock = std::chrono::steady_clock;

int exit_code_for(echolab::ErrorCode code) {
  using echolab::ErrorCode;
  switch (code) {
    case ErrorCode::infeasible:
      return 1;
    case ErrorCode::horizon_exceeded:
    case ErrorCode::step_too_coarse:
    case ErrorCode::unstable_step:
    case ErrorCode::no_overlap:
      return 3;
    default:
      return 2;  // malformed scenes, pulses, configs, peaks, domains
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

echolab::MarchMode parse_march_mode(const std::string& name) {
  if (name == "auto") return echolab::MarchMode::automatic;
  if (name == "interpolated") return echolab::MarchMode::interpolated;
  if (name == "exact") return echolab::MarchMode::exact_lattice;
  echolab::fail(echolab::ErrorCode::invalid_config, "unknown march mode \"" + name + "\"");
}

struct SimulateArgs {
  std::string config, out;
  double xmin = 0.0, xmax = -1.0, tmax = 0.0, march_dt = 0.0;
  std::size_t nx = 201, nt = 301;
  std::string march_mode = "auto";
};

int run_simulate(const SimulateArgs& a) {
  auto t0 = Clock::now();
  echolab::SceneConfig cfg = echolab::load_config(a.config);
  double xmax = a.xmax > 0.0 ? a.xmax : cfg.scene.detector_position() + 2.0;
  std::vector<double> xs = linspace(a.xmin, xmax, a.nx);
  std::vector<double> ts = linspace(0.0, a.tmax, a.nt);
  std::vector<double> values(xs.size() * ts.size(), 0.0);

  if (cfg.scene.layer_count() == 1) {
    echolab::parallel_for(xs.size(), [&](std::size_t i) {
      for (std::size_t j = 0; j < ts.size(); ++j)
        values[i * ts.size() + j] = echolab::field_eval(cfg.scene, cfg.pulse, xs[i], ts[j]);
    });
  } else if (cfg.scene.layer_count() == 2) {
    echolab::CoupledTraces traces = echolab::march_double_layer(
        cfg.scene, cfg.pulse, a.tmax, a.march_dt, parse_march_mode(a.march_mode));
    echolab::parallel_for(xs.size(), [&](std::size_t i) {
      for (std::size_t j = 0; j < ts.size(); ++j)
        values[i * ts.size() + j] =
            echolab::field_eval_double(cfg.scene, traces, xs[i], ts[j]);
    });
  } else {
    echolab::fail(echolab::ErrorCode::unsupported,
                  "field tables are implemented for one or two layers");
  }

  echolab::detail::write_text_file(a.out, echolab::field_grid_csv(xs, ts, values));
  echolab::RunManifest m;
  m.subcommand = "simulate";
  m.parameters = {{"xmin", echolab::format_g17(a.xmin)},
                  {"xmax", echolab::format_g17(xmax)},
                  {"nx", std::to_string(a.nx)},
                  {"tmax", echolab::format_g17(a.tmax)},
                  {"nt", std::to_string(a.nt)},
                  {"march_dt", echolab::format_g17(a.march_dt)},
                  {"march_mode", a.march_mode}};
  m.inputs = {a.config};
  m.outputs = {a.out};
  m.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  echolab::write_manifest(m, a.out);
  return 0;
}

struct MeasureArgs {
  std::string config, out, mode;  // mode empty: continuous, or delta-major for delta pulses
  double tmax = 0.0, dt = 0.0, march_dt = 0.0, min_amplitude = 1e-14;
  std::string march_mode = "auto";
};

int run_measure(const MeasureArgs& a) {
  auto t0 = Clock::now();
  echolab::SceneConfig cfg = echolab::load_config(a.config);
  std::string mode = a.mode;
  if (mode.empty()) mode = cfg.pulse.is_delta() ? "delta-major" : "continuous";

  echolab::SynthMode synth_mode;
  if (mode == "continuous")
    synth_mode = echolab::SynthMode::continuous;
  else if (mode == "delta-major")
    synth_mode = echolab::SynthMode::delta_major;
  else if (mode == "delta-with-minor")
    synth_mode = echolab::SynthMode::delta_with_minor;
  else
    echolab::fail(echolab::ErrorCode::invalid_config, "unknown measure mode \"" + mode + "\"");

  std::string csv;
  if (a.tmax == 0.0) {
    // empty trace: header only, still a well-formed run
    csv = synth_mode == echolab::SynthMode::continuous ? "t,m\n" : "t,amplitude\n";
  } else {
    echolab::SynthOptions opt;
    opt.sample_dt = a.dt;
    opt.march_dt = a.march_dt;
    opt.march_mode = parse_march_mode(a.march_mode);
    opt.min_amplitude = a.min_amplitude;
    echolab::Measurement result =
        echolab::synth_measurement(cfg.scene, cfg.pulse, synth_mode, a.tmax, opt);
    if (const auto* series = std::get_if<echolab::TimeSeries>(&result))
      csv = echolab::time_series_csv(*series, "m");
    else
      csv = echolab::event_series_csv(std::get<echolab::EventSeries>(result));
  }

  echolab::detail::write_text_file(a.out, csv);
  echolab::RunManifest m;
  m.subcommand = "measure";
  m.parameters = {{"mode", mode},
                  {"tmax", echolab::format_g17(a.tmax)},
                  {"dt", echolab::format_g17(a.dt)},
                  {"march_dt", echolab::format_g17(a.march_dt)},
                  {"march_mode", a.march_mode},
                  {"min_amplitude", echolab::format_g17(a.min_amplitude)}};
  m.inputs = {a.config};
  m.outputs = {a.out};
  m.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  echolab::write_manifest(m, a.out);
  return 0;
}

struct InvertArgs {
  std::string peaks, out, mode;
  double total_length = 0.0, tol = -1.0;
};

int run_invert(const InvertArgs& a) {
  auto t0 = Clock::now();
  echolab::ReconstructionResult result;
  if (a.mode == "full") {
    result = echolab::invert_full(echolab::load_peaks(a.peaks, false));
  } else if (a.mode == "phaseless") {
    if (!(a.total_length > 0.0))
      echolab::fail(echolab::ErrorCode::invalid_input,
                    "phaseless inversion requires --total-length > 0");
    result = echolab::invert_phaseless(echolab::load_peaks(a.peaks, true), a.total_length, a.tol);
  } else {
    echolab::fail(echolab::ErrorCode::invalid_input,
                  "--mode must be \"full\" or \"phaseless\"");
  }

  echolab::detail::write_text_file(a.out, echolab::reconstruction_json(result));
  echolab::RunManifest m;
  m.subcommand = "invert";
  m.parameters = {{"mode", a.mode},
                  {"total_length", echolab::format_g17(a.total_length)},
                  {"tol", echolab::format_g17(a.tol)}};
  m.inputs = {a.peaks};
  m.outputs = {a.out};
  m.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  echolab::write_manifest(m, a.out);

  if (result.ambiguous) {
    std::fprintf(stderr, "echolab: reconstruction is ambiguous (%zu candidates)\n",
                 result.candidates.size());
    return 1;
  }
  return 0;
}

struct VerifyArgs {
  std::string config, out, oracle = "fdm";
  double dx0 = 8e-3, tmax = 30.0, lambda = 0.9;
  std::size_t levels = 3;
};

int run_verify(const VerifyArgs& a) {
  auto t0 = Clock::now();
  if (a.oracle != "fdm")
    echolab::fail(echolab::ErrorCode::invalid_config, "only --oracle fdm is available");
  if (a.levels < 2)
    echolab::fail(echolab::ErrorCode::invalid_config, "need at least 2 refinement levels");
  echolab::SceneConfig cfg = echolab::load_config(a.config);
  if (cfg.scene.layer_count() > 2)
    echolab::fail(echolab::ErrorCode::unsupported,
                  "analytic reference is implemented for one or two layers");

  std::optional<echolab::CoupledTraces> traces;
  if (cfg.scene.layer_count() == 2)
    traces = echolab::march_double_layer(cfg.scene, cfg.pulse, a.tmax);

  std::vector<double> dxs, dts, linfs, l2s;
  for (std::size_t level = 0; level < a.levels; ++level) {
    double dx = a.dx0 / static_cast<double>(1u << level);
    echolab::FdmOptions opt;
    opt.dx = dx;
    opt.dt = a.lambda * dx;
    echolab::FdmResult fdm = echolab::fdm_solve(cfg.scene, cfg.pulse, a.tmax, opt);

    echolab::TimeSeries reference;
    reference.t_start = fdm.detector.t_start;
    reference.dt = fdm.detector.dt;
    reference.values.resize(fdm.detector.size());
    echolab::parallel_for(reference.size(), [&](std::size_t i) {
      double t = reference.time(i);
      reference.values[i] =
          traces ? echolab::field_eval_double(cfg.scene, *traces, cfg.scene.detector_position(), t)
                 : echolab::measure_at(cfg.scene, cfg.pulse, t);
    });
    echolab::TraceError err = echolab::compare_traces(fdm.detector, reference);
    dxs.push_back(dx);
    dts.push_back(opt.dt);
    linfs.push_back(err.l_inf);
    l2s.push_back(err.l2);
  }

  std::string json = "{\n  \"oracle\": \"fdm\",\n";
  json += "  \"tmax\": " + echolab::format_g17(a.tmax) + ",\n";
  json += "  \"dt_over_dx\": " + echolab::format_g17(a.lambda) + ",\n";
  json += "  \"levels\": [\n";
  for (std::size_t i = 0; i < dxs.size(); ++i) {
    json += "    {\"dx\": " + echolab::format_g17(dxs[i]) + ", \"dt\": " +
            echolab::format_g17(dts[i]) + ", \"l_inf\": " + echolab::format_g17(linfs[i]) +
            ", \"l2\": " + echolab::format_g17(l2s[i]) + "}";
    json += i + 1 < dxs.size() ? ",\n" : "\n";
  }
  json += "  ],\n  \"pairwise_orders\": [";
  for (std::size_t i = 1; i < linfs.size(); ++i) {
    if (i > 1) json += ",";
    json += echolab::format_g17(std::log2(linfs[i - 1] / linfs[i]));
  }
  double order = std::log2(linfs.front() / linfs.back()) / static_cast<double>(a.levels - 1);
  json += "],\n  \"estimated_order\": " + echolab::format_g17(order) + "\n}\n";

  echolab::detail::write_text_file(a.out, json);
  echolab::RunManifest m;
  m.subcommand = "verify";
  m.parameters = {{"oracle", a.oracle},
                  {"dx0", echolab::format_g17(a.dx0)},
                  {"levels", std::to_string(a.levels)},
                  {"tmax", echolab::format_g17(a.tmax)},
                  {"dt_over_dx", echolab::format_g17(a.lambda)}};
  m.inputs = {a.config};
  m.outputs = {a.out};
  m.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  echolab::write_manifest(m, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave scattering on the layered half line"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "tabulate the field W(x,t) on a grid");
  simulate->add_option("--config", sim.config, "scene/pulse JSON")->required();
  simulate->add_option("--out", sim.out, "output CSV path")->required();
  simulate->add_option("--xmin", sim.xmin, "grid start (default 0)");
  simulate->add_option("--xmax", sim.xmax, "grid end (default detector + 2)");
  simulate->add_option("--nx", sim.nx, "grid points in x (default 201)");
  simulate->add_option("--tmax", sim.tmax, "time horizon")->required();
  simulate->add_option("--nt", sim.nt, "grid points in t (default 301)");
  simulate->add_option("--dt", sim.march_dt, "marching step override (two layers)");
  simulate->add_option("--march-mode", sim.march_mode, "auto | interpolated | exact");

  MeasureArgs mea;
  CLI::App* measure = app.add_subcommand("measure", "detector trace m(t)");
  measure->add_option("--config", mea.config, "scene/pulse JSON")->required();
  measure->add_option("--out", mea.out, "output CSV path")->required();
  measure->add_option("--tmax", mea.tmax, "time horizon (0 emits an empty trace)")->required();
  measure->add_option("--mode", mea.mode,
                      "continuous | delta-major | delta-with-minor (default by pulse type)");
  measure->add_option("--dt", mea.dt, "sample step for continuous traces");
  measure->add_option("--march-dt", mea.march_dt, "marching step override (two layers)");
  measure->add_option("--march-mode", mea.march_mode, "auto | interpolated | exact");
  measure->add_option("--min-amplitude", mea.min_amplitude, "drop delta events below this");

  InvertArgs inv;
  CLI::App* invert = app.add_subcommand("invert", "reconstruct the medium from peak data");
  invert->add_option("--peaks", inv.peaks, "peak list (CSV \"t,h\" or JSON)")->required();
  invert->add_option("--out", inv.out, "output JSON path")->required();
  invert->add_option("--mode", inv.mode, "full | phaseless")->required();
  invert->add_option("--total-length", inv.total_length, "known total length L (phaseless)");
  invert->add_option("--tol", inv.tol, "selection tolerance on 2L (default 1e-6 * 2L)");

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand("verify", "compare analytic solvers against the FDM oracle");
  verify->add_option("--config", ver.config, "scene/pulse JSON")->required();
  verify->add_option("--out", ver.out, "error-report JSON path")->required();
  verify->add_option("--oracle", ver.oracle, "oracle name (fdm)");
  verify->add_option("--dx0", ver.dx0, "coarsest spatial step (default 8e-3)");
  verify->add_option("--levels", ver.levels, "refinement levels (default 3)");
  verify->add_option("--tmax", ver.tmax, "time horizon (default 30)");
  verify->add_option("--dt-over-dx", ver.lambda, "Courant ratio (default 0.9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (measure->parsed()) return run_measure(mea);
    if (invert->parsed()) return run_invert(inv);
    return run_verify(ver);
  } catch (const echolab::Error& e) {
    std::fprintf(stderr, "echolab: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "echolab: %s\n", e.what());
    return 3;
  }
}
