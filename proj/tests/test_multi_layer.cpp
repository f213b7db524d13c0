#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include <echolab/core.hpp>
#include <echolab/multi_layer.hpp>
#include <echolab/single_layer.hpp>

using namespace echolab;

namespace {

// example 3 geometry: lengths (1, 2), detector offset 2, delta source at x = 5
const Scene case_a({{1.0, 0.5}, {2.0, 0.2}}, 2.0, 5.0);  // tau1 = 2, tau2 = 10
const Scene case_b({{1.0, 0.2}, {2.0, 0.5}}, 2.0, 5.0);  // tau1 = 5, tau2 = 4

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an echolab::Error");
  return ErrorCode::invalid_input;
}

}  // namespace

TEST_CASE("delta lattice reproduces the printed coefficients") {
  DeltaLattice lat(0.5, 0.2, 1.0, 2.0, 2.0, 40.0);
  CHECK(lat.tau1() == 2.0);
  CHECK(lat.tau2() == 10.0);
  CHECK(lat.g0(0, 0) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(lat.g0(2, 0) == Catch::Approx(-4.0 / 21.0).epsilon(1e-14));
  CHECK(lat.g0(2, 2) == Catch::Approx(-160.0 / 441.0).epsilon(1e-14));
  CHECK(lat.g0(4, 0) == Catch::Approx(4.0 / 147.0).epsilon(1e-13));
  CHECK(lat.g1(1, 0) == Catch::Approx(4.0 / 21.0).epsilon(1e-14));
  CHECK(lat.g1(1, 2) == Catch::Approx(-40.0 / 147.0).epsilon(1e-13));
  CHECK(lat.g0(5, 0) == 0.0);  // outside the stored window is zero
  CHECK(lat.g0(100, 100) == 0.0);
}

TEST_CASE("lattice parity: interface trace even-even, inner trace odd-even") {
  DeltaLattice lat(0.5, 0.2, 1.0, 2.0, 2.0, 40.0);
  for (long a = 0; a <= lat.a_max(); ++a)
    for (long b = 0; b <= lat.b_max(); ++b) {
      if (a % 2 != 0 || b % 2 != 0) CHECK(lat.g0(a, b) == 0.0);
      if (a % 2 != 1 || b % 2 != 0) CHECK(lat.g1(a, b) == 0.0);
    }
}

TEST_CASE("repeated-reflection family follows the sign-alternating geometric law") {
  double c1 = 0.5, c2 = 0.2;
  DeltaLattice lat(c1, c2, 1.0, 2.0, 2.0, 60.0);
  double ratio = -(c1 - 1.0) * (c2 - c1) / ((c1 + 1.0) * (c2 + c1));
  for (int k = 1; k <= 6; ++k) {
    double expect = 2.0 * c1 * std::pow(-1.0, k + 1) * std::pow(c1 - 1.0, k - 1) *
                    std::pow(c2 - c1, k) /
                    (std::pow(c1 + 1.0, k + 1) * std::pow(c2 + c1, k));
    CHECK(lat.g0(2 * k, 0) == Catch::Approx(expect).epsilon(1e-12));
    if (k > 1)
      CHECK(lat.g0(2 * k, 0) / lat.g0(2 * (k - 1), 0) == Catch::Approx(ratio).epsilon(1e-12));
  }
  // the k = 1 member is the second major peak of the reflection chain
  std::vector<double> rho = reflection_chain({c1, c2});
  CHECK(lat.g0(2, 0) == Catch::Approx(rho[1]).epsilon(1e-14));
}

TEST_CASE("coincident lattice events merge additively") {
  // tau2/tau1 = 5, so indices (12,0) and (2,2) land on the same instant t = 26
  DeltaLattice lat(0.5, 0.2, 1.0, 2.0, 2.0, 40.0);
  CHECK(lat.event_time(12, 0) == Catch::Approx(26.0).epsilon(1e-14));
  CHECK(lat.event_time(2, 2) == Catch::Approx(26.0).epsilon(1e-14));
  double merged = lat.merged_g0_at(26.0);
  CHECK(merged == Catch::Approx(lat.g0(12, 0) + lat.g0(2, 2)).epsilon(1e-14));
  CHECK(merged == Catch::Approx(-0.362800458237).epsilon(1e-10));
  // the event list keeps per-index entries so the merge stays addressable
  int hits = 0;
  for (const auto& e : lat.g0_event_list())
    if (std::abs(e.time - 26.0) < 1e-9) ++hits;
  CHECK(hits == 2);
}

TEST_CASE("lattice validation") {
  CHECK(code_of([] { DeltaLattice(1.2, 0.2, 1.0, 2.0, 2.0, 10.0); }) == ErrorCode::invalid_speed);
  CHECK(code_of([] { DeltaLattice(0.5, 0.2, -1.0, 2.0, 2.0, 10.0); }) ==
        ErrorCode::invalid_length);
  CHECK(code_of([] { DeltaLattice(0.5, 0.2, 1.0, 2.0, 2.0, 1e9); }) == ErrorCode::invalid_horizon);
}

TEST_CASE("delta marching returns the event ledger") {
  InitialPulse delta = InitialPulse::delta(5.0);
  CoupledTraces tr = march_double_layer(case_a, delta, 30.0);
  CHECK(tr.exact);
  REQUIRE(tr.lattice.has_value());
  CHECK(tr.g0_at(2.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(tr.g0_at(6.0) == Catch::Approx(-4.0 / 21.0).epsilon(1e-14));
  CHECK(tr.g0_at(3.14) == 0.0);
  CHECK(code_of([&] { march_double_layer(case_a, delta, 30.0, 0.01, MarchMode::interpolated); }) ==
        ErrorCode::unsupported);
}

TEST_CASE("sampled marching: exact-lattice and interpolated modes agree in the limit") {
  InitialPulse pulse = InitialPulse::gaussian(5.0, 40.0);
  CoupledTraces ref = march_double_layer(case_a, pulse, 20.0, 0.002, MarchMode::exact_lattice);
  CHECK(ref.exact);
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    CoupledTraces tr = march_double_layer(case_a, pulse, 20.0, dt, MarchMode::interpolated);
    CHECK_FALSE(tr.exact);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.g0.size(); ++i)
      err = std::max(err, std::abs(tr.g0.sample(ref.g0.time(i)) - ref.g0.values[i]));
    if (prev > 0.0) CHECK(std::log2(prev / err) > 1.7);  // second-order interpolation
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("marching argument validation") {
  InitialPulse pulse = InitialPulse::gaussian(5.0, 40.0);
  Scene one({{3.0, 0.5}}, 5.0, 6.0);
  CHECK(code_of([&] { march_double_layer(one, pulse, 10.0); }) == ErrorCode::unsupported);
  CHECK(code_of([&] { march_double_layer(case_a, pulse, 0.0); }) == ErrorCode::invalid_horizon);
  // smallest delay of case_a is 2 l1/c1 part: tau1 = 2 (vs 2 l2/c2 = 20)
  CHECK(code_of([&] { march_double_layer(case_a, pulse, 10.0, 3.0); }) ==
        ErrorCode::step_too_coarse);
  // incommensurable delays reject the exact mode
  Scene irr({{1.0, 0.5}, {M_SQRT2, 0.2}}, 2.0, 5.0);
  CHECK(code_of([&] {
          march_double_layer(irr, pulse, 10.0, 0.01, MarchMode::exact_lattice);
        }) == ErrorCode::invalid_config);
  // but the automatic mode falls back to interpolation
  CHECK_FALSE(march_double_layer(irr, pulse, 10.0, 0.01).exact);
}

TEST_CASE("double-layer field: continuity at both interfaces on lattice-aligned times") {
  InitialPulse pulse = InitialPulse::gaussian(5.0, 40.0);
  CoupledTraces tr = march_double_layer(case_a, pulse, 28.0);
  for (std::size_t i = 0; i < tr.g0.size(); i += 11) {
    double t = tr.g0.time(i);
    CHECK(std::abs(field_eval_double(case_a, tr, 3.0 - 1e-13, t) -
                   field_eval_double(case_a, tr, 3.0 + 1e-13, t)) < 1e-9);
    CHECK(std::abs(field_eval_double(case_a, tr, 2.0 - 1e-13, t) -
                   field_eval_double(case_a, tr, 2.0 + 1e-13, t)) < 1e-9);
  }
}

TEST_CASE("double-layer field: wall condition, domain checks, horizon guard") {
  InitialPulse pulse = InitialPulse::gaussian(5.0, 40.0);
  CoupledTraces tr = march_double_layer(case_a, pulse, 12.0);
  CHECK(field_eval_double(case_a, tr, 0.0, 5.0) == 0.0);
  // exterior ahead of every return is pure free propagation
  CHECK(field_eval_double(case_a, tr, 6.0, 0.5) ==
        Catch::Approx(0.5 * pulse(6.5) + 0.5 * pulse(5.5)).margin(1e-15));
  CHECK(code_of([&] { field_eval_double(case_a, tr, -0.5, 1.0); }) == ErrorCode::out_of_domain);
  CHECK(code_of([&] { field_eval_double(case_a, tr, 0.5, -1.0); }) == ErrorCode::out_of_domain);
  CHECK(code_of([&] { field_eval_double(case_a, tr, 0.5, 13.0); }) ==
        ErrorCode::horizon_exceeded);
  CoupledTraces ledger = march_double_layer(case_a, InitialPulse::delta(5.0), 12.0);
  CHECK(code_of([&] { field_eval_double(case_a, ledger, 0.5, 1.0); }) == ErrorCode::unsupported);
}

TEST_CASE("major peak times accumulate round trips inward") {
  std::vector<double> times = peak_times(case_a);
  REQUIRE(times.size() == 3);
  CHECK(times[0] == Catch::Approx(4.0));
  CHECK(times[1] == Catch::Approx(8.0));
  CHECK(times[2] == Catch::Approx(28.0));
  Scene four_layer({{2.5, 3.0 / 7.0}, {1.5, 0.4}, {1.0, 0.5}, {2.0, 0.8}}, 2.0, 9.0);
  std::vector<double> tt = peak_times(four_layer);
  REQUIRE(tt.size() == 5);
  CHECK(tt[0] == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(tt[1] == Catch::Approx(47.0 / 3.0).epsilon(1e-14));
  CHECK(tt[2] == Catch::Approx(139.0 / 6.0).epsilon(1e-14));
  CHECK(tt[3] == Catch::Approx(163.0 / 6.0).epsilon(1e-14));
  CHECK(tt[4] == Catch::Approx(193.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("reflection chain: exact fractions for the four-layer reference medium") {
  std::vector<double> rho = reflection_chain({3.0 / 7.0, 2.0 / 5.0, 0.5, 4.0 / 5.0});
  REQUIRE(rho.size() == 5);
  CHECK(rho[0] == Catch::Approx(-1.0 / 5.0).epsilon(1e-15));
  CHECK(rho[1] == Catch::Approx(-21.0 / 1450.0).epsilon(1e-14));
  CHECK(rho[2] == Catch::Approx(196.0 / 4205.0).epsilon(1e-14));
  CHECK(rho[3] == Catch::Approx(3136.0 / 32799.0).epsilon(1e-14));
  CHECK(rho[4] == Catch::Approx(-501760.0 / 1279161.0).epsilon(1e-14));
  // single layer: the chain reduces to the delta table heads
  std::vector<double> single = reflection_chain({0.5});
  CHECK(single[0] == Catch::Approx(-1.0 / 6.0).epsilon(1e-15));
  CHECK(single[1] == Catch::Approx(-4.0 / 9.0).epsilon(1e-15));
  CHECK(code_of([] { reflection_chain({0.5, 1.5}); }) == ErrorCode::invalid_speed);
}

TEST_CASE("minor-event enumeration matches the lattice family") {
  EventSeries minors = minor_peaks_double(0.5, 0.2, 1.0, 2.0, 4);
  DeltaLattice lat(0.5, 0.2, 1.0, 2.0, 2.0, 40.0);
  REQUIRE(minors.size() == 4);
  for (std::size_t k = 1; k <= minors.size(); ++k) {
    const Event& e = minors[k - 1];
    CHECK(e.time == Catch::Approx(4.0 + 4.0 * static_cast<double>(k)).epsilon(1e-14));
    CHECK(e.amplitude ==
          Catch::Approx(lat.g0(2 * static_cast<long>(k), 0)).epsilon(1e-12));
  }
}

TEST_CASE("measurement synthesis: major table equals times x chain plus the unit event") {
  Scene four_layer({{2.5, 3.0 / 7.0}, {1.5, 0.4}, {1.0, 0.5}, {2.0, 0.8}}, 2.0, 9.0);
  InitialPulse delta = InitialPulse::delta(9.0);
  Measurement m = synth_measurement(four_layer, delta, SynthMode::delta_major, 40.0);
  const EventSeries& ev = std::get<EventSeries>(m);
  std::vector<double> times = peak_times(four_layer);
  std::vector<double> rho = reflection_chain({3.0 / 7.0, 2.0 / 5.0, 0.5, 4.0 / 5.0});
  REQUIRE(ev.size() == 6);
  CHECK(ev[0].time == 0.0);
  CHECK(ev[0].amplitude == 1.0);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(ev[j + 1].time == Catch::Approx(times[j]).epsilon(1e-14));
    CHECK(ev[j + 1].amplitude == Catch::Approx(rho[j]).epsilon(1e-14));
  }
  // horizon filter drops late events
  Measurement short_m = synth_measurement(four_layer, delta, SynthMode::delta_major, 20.0);
  CHECK(std::get<EventSeries>(short_m).size() == 3);  // unit, t=4, t=47/3
}

TEST_CASE("measurement synthesis: single layer with minors delegates to the delta table") {
  Scene sc({{3.0, 0.5}}, 5.0, 8.0);
  InitialPulse delta = InitialPulse::delta(8.0);
  Measurement m = synth_measurement(sc, delta, SynthMode::delta_with_minor, 60.0);
  const EventSeries& ev = std::get<EventSeries>(m);
  EventSeries table = delta_peaks_single(0.5, 3.0, 5.0, 4);  // events up to t = 58
  REQUIRE(ev.size() == table.size() + 1);
  CHECK(ev[0].time == 0.0);
  for (std::size_t k = 0; k < table.size(); ++k) {
    CHECK(ev[k + 1].time == Catch::Approx(table[k].time).epsilon(1e-14));
    CHECK(ev[k + 1].amplitude == Catch::Approx(table[k].amplitude).epsilon(1e-14));
  }
}

TEST_CASE("measurement synthesis: double layer emits majors and interleaved minors") {
  InitialPulse delta = InitialPulse::delta(5.0);
  Measurement m = synth_measurement(case_a, delta, SynthMode::delta_with_minor, 29.0);
  const EventSeries& ev = std::get<EventSeries>(m);
  // unit event, then detector-time events: 4, 8, 12, 16, 20, 24, 28(collision)
  REQUIRE(ev.size() == 8);
  CHECK(ev[1].time == Catch::Approx(4.0));
  CHECK(ev[1].amplitude == Catch::Approx(-1.0 / 6.0).epsilon(1e-13));  // 1/3 - 1/2
  CHECK(ev[2].time == Catch::Approx(8.0));
  CHECK(ev[2].amplitude == Catch::Approx(-4.0 / 21.0).epsilon(1e-13));
  CHECK(ev[7].time == Catch::Approx(28.0));
  CHECK(ev[7].amplitude == Catch::Approx(-0.362800458237).epsilon(1e-9));
  // continuous synthesis on a delta pulse cannot sample the field
  CHECK(code_of([&] { synth_measurement(case_a, delta, SynthMode::continuous, 10.0); }) ==
        ErrorCode::unsupported);
  // three layers have no coupled marching
  Scene three({{1.0, 0.5}, {1.0, 0.3}, {1.0, 0.6}}, 2.0, 5.0);
  CHECK(code_of([&] {
          synth_measurement(three, InitialPulse::delta(5.0), SynthMode::delta_with_minor, 10.0);
        }) == ErrorCode::unsupported);
  CHECK(code_of([&] { synth_measurement(case_a, delta, SynthMode::delta_major, 0.0); }) ==
        ErrorCode::invalid_horizon);
}

TEST_CASE("minor events interleave majors exactly when the outer round trip is shorter") {
  InitialPulse delta = InitialPulse::delta(5.0);
  // case a: tau1 = 2 < tau2 = 10; minors at 12, 16, 20, 24 sit inside (t2, t3) = (8, 28)
  std::vector<double> ta = peak_times(case_a);
  Measurement ma = synth_measurement(case_a, delta, SynthMode::delta_with_minor, 30.0);
  int inside_a = 0;
  for (const Event& e : std::get<EventSeries>(ma).events())
    if (e.time > ta[1] + 1e-9 && e.time < ta[2] - 1e-9) ++inside_a;
  CHECK(inside_a == 4);
  // case b: tau1 = 5 > tau2 = 4; the first repeated reflection lands at
  // t = 4 + 4*5 = 24 > t3 = 22, and parity leaves nothing inside (14, 22)
  std::vector<double> tb = peak_times(case_b);
  CHECK(tb[1] == Catch::Approx(14.0));
  CHECK(tb[2] == Catch::Approx(22.0));
  Measurement mb = synth_measurement(case_b, delta, SynthMode::delta_with_minor, 30.0);
  int inside_b = 0;
  for (const Event& e : std::get<EventSeries>(mb).events())
    if (e.time > tb[1] + 1e-9 && e.time < tb[2] - 1e-9) ++inside_b;
  CHECK(inside_b == 0);
}

TEST_CASE("continuous synthesis samples the detector field") {
  InitialPulse pulse = InitialPulse::gaussian(5.0, 40.0);
  SynthOptions opt;
  opt.sample_dt = 0.01;
  Measurement m = synth_measurement(case_a, pulse, SynthMode::continuous, 12.0, opt);
  const TimeSeries& tr = std::get<TimeSeries>(m);
  CHECK(tr.dt == 0.01);
  CHECK(tr.t_end() == Catch::Approx(12.0).margin(0.011));
  // transit peak at t = 0 has the full pulse (source at the detector)
  CHECK(tr.values[0] == Catch::Approx(1.0).epsilon(1e-12));
  // first reflected extremum near t = 2D = 4 carries about rho1 = -1/6
  double lo = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.time(i) > 3.0 && tr.time(i) < 5.0) lo = std::min(lo, tr.values[i]);
  CHECK(lo == Catch::Approx(-1.0 / 6.0).margin(5e-3));
}
