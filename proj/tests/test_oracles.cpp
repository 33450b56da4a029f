// Oracle checks against closed forms computed here, independently of the
// library implementation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <set>

#include "doctest.h"
#include "invdes/oracles/alloy.hpp"
#include "invdes/oracles/controls.hpp"
#include "invdes/oracles/filter.hpp"
#include "invdes/oracles/heatx.hpp"
#include "invdes/oracles/perturbation.hpp"
#include "invdes/oracles/pkpd.hpp"
#include "invdes/oracles/quantum.hpp"
#include "invdes/oracles/reactor.hpp"
#include "invdes/oracles/ssa.hpp"
#include "invdes/oracles/thinfilm.hpp"
#include "invdes/model.hpp"
#include "invdes/rng.hpp"

using namespace invdes;
using namespace invdes::oracles;
using std::numbers::pi;

namespace {

double norm2(const std::vector<cplx>& s) {
  double n = 0.0;
  for (auto a : s) n += std::norm(a);
  return n;
}

// Single homogeneous layer at normal incidence (Airy summation).
double airy_reflectance(double n0, double n1, double ns, double d_nm, double lambda_nm) {
  const double r01 = (n0 - n1) / (n0 + n1);
  const double r12 = (n1 - ns) / (n1 + ns);
  const std::complex<double> ph = std::exp(std::complex<double>(0.0, -4.0 * pi * n1 * d_nm / lambda_nm));
  const auto r = (r01 + r12 * ph) / (1.0 + r01 * r12 * ph);
  return std::norm(r);
}

// One-compartment oral model by superposition of Bateman terms.
double bateman(double t, double dose, double tau, const PkParameters& pk) {
  const double k = pk.CL / pk.V;
  double c = 0.0;
  for (double td = 0.0; td <= t; td += tau) {
    const double s = t - td;
    c += pk.F * dose * pk.ka / (pk.V * (pk.ka - k)) * (std::exp(-k * s) - std::exp(-pk.ka * s));
  }
  return c;
}

double db(std::complex<double> h) { return 20.0 * std::log10(std::abs(h)); }

}  // namespace

TEST_SUITE("quantum") {
  TEST_CASE("empty circuit on |0> has fidelity 1 against |0>") {
    const auto o = simulate_quantum({1, {}}, {1.0, 0.0});
    CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.probabilities[0] == doctest::Approx(1.0));
  }

  TEST_CASE("RX(pi) maps |0> to |1>") {
    const auto o = simulate_quantum({1, {{GateName::RX, {0}, pi}}}, {0.0, 1.0});
    CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.probabilities[1] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("Bell state has fidelity 1 and one bit of entanglement") {
    const double h = 1.0 / std::sqrt(2.0);
    QuantumCircuitDesign c{2, {{GateName::H, {0}, {}}, {GateName::CNOT, {0, 1}, {}}}};
    const auto o = simulate_quantum(c, {h, 0.0, 0.0, h});
    CHECK(std::abs(o.fidelity - 1.0) < 1e-9);
    CHECK(std::abs(o.entanglement_entropy - 1.0) < 1e-9);
  }

  TEST_CASE("product states carry no entanglement") {
    QuantumCircuitDesign c{2, {{GateName::H, {0}, {}}, {GateName::H, {1}, {}}}};
    const auto o = simulate_quantum(c, {0.5, 0.5, 0.5, 0.5});
    CHECK(o.entanglement_entropy == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("gates preserve the norm and are undone by their inverse") {
    CounterRng rng{42};
    const std::vector<GateName> self_inverse{GateName::H, GateName::X, GateName::Y, GateName::Z,
                                             GateName::CNOT, GateName::CZ, GateName::SWAP};
    for (int trial = 0; trial < 50; ++trial) {
      const int n = static_cast<int>(rng.integer(2, kMaxQubits));
      std::vector<cplx> s(std::size_t{1} << n);
      for (auto& a : s) a = {rng.normal(), rng.normal()};
      const double n0 = std::sqrt(norm2(s));
      for (auto& a : s) a /= n0;
      const auto orig = s;

      Gate g;
      if (rng.bernoulli(0.5)) {
        g.name = self_inverse[static_cast<std::size_t>(rng.integer(0, 6))];
      } else {
        g.name = std::vector<GateName>{GateName::RX, GateName::RY, GateName::RZ}[rng.integer(0, 2)];
        g.angle = rng.uniform(-pi, pi);
      }
      const int q0 = static_cast<int>(rng.integer(0, n - 1));
      g.qubits = {q0};
      if (gate_arity(g.name) == 2) g.qubits.push_back((q0 + 1 + static_cast<int>(rng.integer(0, n - 2))) % n);
      apply_gate(s, n, g);
      CHECK(norm2(s) == doctest::Approx(1.0).epsilon(1e-12));
      Gate inv = g;
      if (g.angle) inv.angle = -*g.angle;
      apply_gate(s, n, inv);
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - orig[i]) < 1e-12);
    }
  }

  TEST_CASE("malformed circuits are reported") {
    CHECK_FALSE(circuit_errors({2, {{GateName::CNOT, {0, 0}, {}}}}).empty());
    CHECK_FALSE(circuit_errors({1, {{GateName::H, {3}, {}}}}).empty());
    CHECK_FALSE(circuit_errors({kMaxQubits + 1, {}}).empty());
    CHECK_FALSE(circuit_errors({1, {{GateName::RX, {0}, {}}}}).empty());
    CHECK(circuit_errors({1, {{GateName::RZ, {0}, 0.3}}}).empty());
  }
}

TEST_SUITE("thinfilm") {
  TEST_CASE("bare glass reflects the Fresnel value") {
    ThinFilmConfig cfg;
    cfg.substrate_index = {1.5, 0.0};
    cfg.wavelengths_nm = {550.0};
    const auto s = simulate_thinfilm({}, cfg);
    CHECK(std::abs(s.reflectance[0] - 0.04) < 1e-9);
  }

  TEST_CASE("quarter-wave MgF2 on crown glass") {
    ThinFilmConfig cfg;
    cfg.wavelengths_nm = {550.0};
    const double d = 550.0 / (4.0 * 1.38);
    const auto s = simulate_thinfilm({{{"MgF2", d}}}, cfg);
    const double expect = std::pow((1.52 - 1.38 * 1.38) / (1.52 + 1.38 * 1.38), 2);
    CHECK(std::abs(s.reflectance[0] - expect) < 1e-9);
    CHECK(std::abs(s.reflectance[0] - 0.0126) < 1e-3);
  }

  TEST_CASE("single layer matches the Airy sum across the band") {
    ThinFilmConfig cfg;
    for (double w = 400.0; w <= 700.0; w += 25.0) cfg.wavelengths_nm.push_back(w);
    const auto s = simulate_thinfilm({{{"TiO2", 137.0}}}, cfg);
    for (std::size_t i = 0; i < s.reflectance.size(); ++i) {
      CHECK(std::abs(s.reflectance[i] - airy_reflectance(1.0, 2.35, 1.52, 137.0, cfg.wavelengths_nm[i])) < 1e-12);
    }
  }

  TEST_CASE("index-matched stack does not reflect") {
    ThinFilmConfig cfg;
    cfg.ambient_index = {1.5, 0.0};
    cfg.substrate_index = {1.5, 0.0};
    cfg.wavelengths_nm = {450.0, 550.0, 650.0};
    const MaterialTable table{{"glass", {1.5, 0.0}}};
    const auto s = simulate_thinfilm({{{"glass", 321.0}, {"glass", 45.0}}}, cfg, table);
    for (double r : s.reflectance) CHECK(r == doctest::Approx(0.0).epsilon(1e-14));
  }

  TEST_CASE("lossless stacks conserve energy at oblique incidence") {
    CounterRng rng{7};
    const std::vector<std::string> mats{"MgF2", "SiO2", "TiO2", "Ta2O5", "Al2O3"};
    for (int trial = 0; trial < 25; ++trial) {
      ThinFilmDesign d;
      const auto n = rng.integer(1, 6);
      for (int i = 0; i < n; ++i) d.layers.push_back({mats[rng.integer(0, 4)], rng.uniform(20.0, 400.0)});
      ThinFilmConfig cfg;
      cfg.incidence_deg = rng.uniform(0.0, 60.0);
      cfg.wavelengths_nm = {420.0, 533.0, 690.0};
      const auto s = simulate_thinfilm(d, cfg);
      for (std::size_t i = 0; i < 3; ++i) CHECK(s.reflectance[i] + s.transmittance[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_SUITE("controls") {
  const TransferFunction first_order{{1.0}, {1.0, 1.0}};

  TEST_CASE("proportional control leaves 1/(1+Kp) offset on a type-0 plant") {
    for (double kp : {0.5, 1.0, 2.0, 4.0}) {
      const auto m = simulate_controls({kp, 0.0, 0.0, {}}, first_order);
      REQUIRE(m.stable);
      CHECK(std::abs(m.steady_state_error - 1.0 / (1.0 + kp)) < 1e-3);
      CHECK(m.overshoot_pct >= 0.0);
    }
  }

  TEST_CASE("integral action removes the offset") {
    const auto m = simulate_controls({1.0, 0.5, 0.0, {}}, first_order);
    REQUIRE(m.stable);
    CHECK(m.steady_state_error == doctest::Approx(0.0).epsilon(1e-3));
  }

  TEST_CASE("second-order loop overshoot matches the damping ratio") {
    // 4 / (s^2 + 2 s + 4): wn = 2, zeta = 0.5.
    const auto m = simulate_controls({4.0, 0.0, 0.0, {}}, {{1.0}, {1.0, 2.0, 0.0}});
    REQUIRE(m.stable);
    const double zeta = 0.5;
    const double expect = 100.0 * std::exp(-pi * zeta / std::sqrt(1.0 - zeta * zeta));
    CHECK(std::abs(m.overshoot_pct - expect) < 0.5);
    CHECK(std::abs(m.overshoot_pct - 16.3) < 0.5);
    CHECK(m.settling_time_s <= m.horizon_s);
    CHECK(m.steady_state_error == doctest::Approx(0.0).epsilon(1e-3));
  }

  TEST_CASE("unstable loops report the sentinel") {
    // 1 / (s - 1) with Kp = 0.5 leaves a right half-plane pole.
    const auto m = simulate_controls({0.5, 0.0, 0.0, {}}, {{1.0}, {1.0, -1.0}});
    CHECK_FALSE(m.stable);
    CHECK(m.overshoot_pct == kUnstableSentinel);
  }

  TEST_CASE("closed_loop polynomial algebra") {
    const auto cl = closed_loop({2.0, 0.0, 0.0, {}}, first_order);
    CHECK(poly_eval(cl.num, 0.0) / poly_eval(cl.den, 0.0) == doctest::Approx(2.0 / 3.0));
    CHECK(poly_mul({1.0, 1.0}, {1.0, -1.0}) == Poly{1.0, 0.0, -1.0});
  }
}

TEST_SUITE("filter") {
  TEST_CASE("butterworth passes DC and is 3 dB down at the cutoff") {
    for (int order : {1, 2, 4, 7}) {
      const auto z = design_iir({FilterFamily::Butterworth, order, FilterResponse::Lowpass, {0.3}, {}, {}});
      CHECK(std::abs(db(frequency_response(z, 0.0))) < 1e-9);
      CHECK(std::abs(db(frequency_response(z, 0.3)) + 3.0103) < 0.05);
    }
  }

  TEST_CASE("bilinear prewarping places attenuation at the warped frequency") {
    const auto z = design_iir({FilterFamily::Butterworth, 2, FilterResponse::Lowpass, {0.2}, {}, {}});
    // Analog ratio 2 corresponds to tan(pi f / 2) = 2 tan(pi 0.2 / 2).
    const double f2 = 2.0 / pi * std::atan(2.0 * std::tan(pi * 0.1));
    CHECK(-db(frequency_response(z, f2)) == doctest::Approx(10.0 * std::log10(17.0)).epsilon(1e-9));
    CHECK(-db(frequency_response(z, 0.4)) > 12.3);
  }

  TEST_CASE("butterworth lowpass magnitude is monotone") {
    const auto z = design_iir({FilterFamily::Butterworth, 5, FilterResponse::Lowpass, {0.25}, {}, {}});
    double prev = 2.0;
    for (int i = 0; i <= 400; ++i) {
      const double m = std::abs(frequency_response(z, i / 400.0));
      CHECK(m <= prev + 1e-12);
      prev = m;
    }
  }

  TEST_CASE("chebyshev I ripple stays within the requested value") {
    const auto m = design_filter({FilterFamily::Chebyshev1, 5, FilterResponse::Lowpass, {0.3}, 1.0, {}});
    CHECK(m.passband_ripple_db <= 1.05);
    CHECK(m.passband_ripple_db > 0.9);
  }

  TEST_CASE("highpass is the mirror of lowpass") {
    const auto lp = design_iir({FilterFamily::Butterworth, 3, FilterResponse::Lowpass, {0.4}, {}, {}});
    const auto hp = design_iir({FilterFamily::Butterworth, 3, FilterResponse::Highpass, {0.6}, {}, {}});
    for (double f : {0.1, 0.3, 0.5, 0.8}) {
      CHECK(std::abs(frequency_response(lp, f)) == doctest::Approx(std::abs(frequency_response(hp, 1.0 - f))).epsilon(1e-9));
    }
  }

  TEST_CASE("unknown families are rejected") {
    CHECK_THROWS_AS(filter_family_from_string("elliptic"), UnsupportedFeature);
    CHECK_THROWS_AS(filter_family_from_string("bessel2"), std::invalid_argument);
  }
}

TEST_SUITE("reactor") {
  ReactorKinetics fixed_k(ReactionSystem sys, double k1, double k2) {
    return {sys, k1, 0.0, k2, 0.0, 0.0};
  }

  TEST_CASE("first-order CSTR at k tau = 1 converts half") {
    const auto o = simulate_reactor({100.0, 2.0, 1.0, 350.0, 300.0}, fixed_k(ReactionSystem::Single, 0.02, 0.0));
    CHECK(std::abs(o.conversion - 0.5) < 1e-9);
    CHECK(o.productivity == doctest::Approx(2.0 * 0.5));
  }

  TEST_CASE("series reaction with k1 = k2 and k tau = 1 yields a quarter") {
    const auto o = simulate_reactor({100.0, 2.0, 1.0, 350.0, 300.0}, fixed_k(ReactionSystem::Series, 0.02, 0.02));
    CHECK(o.yield == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(o.selectivity == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("parallel selectivity is k1 / (k1 + k2)") {
    const auto o = simulate_reactor({50.0, 1.0, 2.0, 350.0, 300.0}, fixed_k(ReactionSystem::Parallel, 0.03, 0.01));
    CHECK(o.selectivity == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(o.conversion == doctest::Approx(0.04 * 50.0 / (1.0 + 0.04 * 50.0)).epsilon(1e-12));
  }

  TEST_CASE("arrhenius temperature dependence and jacket mixing") {
    ReactorKinetics k{ReactionSystem::Single, 1e6, 60000.0, 0.0, 0.0, 0.0};
    const auto o = simulate_reactor({100.0, 1.0, 1.0, 360.0, 300.0}, k);
    CHECK(o.reactor_temperature_K == doctest::Approx(360.0));
    CHECK(o.k1 == doctest::Approx(1e6 * std::exp(-60000.0 / (kGasConstant * 360.0))).epsilon(1e-12));
    k.ua_over_rho_cp_L_s = 1.0;
    const auto cooled = simulate_reactor({100.0, 1.0, 1.0, 360.0, 300.0}, k);
    CHECK(cooled.reactor_temperature_K < 360.0);
    CHECK(cooled.reactor_temperature_K > 300.0);
  }

  TEST_CASE("yield <= conversion, both in [0, 1], conversion monotone in residence time") {
    CounterRng rng{11};
    for (int trial = 0; trial < 50; ++trial) {
      ReactorKinetics k{static_cast<ReactionSystem>(rng.integer(0, 2)), rng.uniform(1e4, 1e7), rng.uniform(4e4, 7e4),
                        rng.uniform(1e4, 1e7), rng.uniform(4e4, 7e4), rng.uniform(0.0, 0.5)};
      ReactorDesign d{rng.uniform(50.0, 500.0), rng.uniform(0.5, 5.0), rng.uniform(0.5, 2.0), rng.uniform(320.0, 380.0),
                      rng.uniform(300.0, 360.0)};
      const auto o = simulate_reactor(d, k);
      CHECK(o.yield >= 0.0);
      CHECK(o.yield <= o.conversion + 1e-12);
      CHECK(o.conversion <= 1.0);
      auto bigger = d;
      bigger.volume_L *= 1.5;
      CHECK(simulate_reactor(bigger, k).conversion >= o.conversion - 1e-12);
    }
  }
}

TEST_SUITE("heatx") {
  TEST_CASE("counterflow effectiveness matches the closed form") {
    CHECK(std::abs(effectiveness_ntu(1.0, 0.0, 1) - (1.0 - std::exp(-1.0))) < 1e-6);
    for (double c : {0.25, 0.5, 0.9}) {
      for (double n : {0.3, 1.0, 3.0}) {
        const double e = std::exp(-n * (1.0 - c));
        CHECK(effectiveness_ntu(n, c, 1) == doctest::Approx((1.0 - e) / (1.0 - c * e)).epsilon(1e-9));
        const double r = std::sqrt(1.0 + c * c);
        const double g = std::exp(-n * r);
        const double shell = 2.0 / (1.0 + c + r * (1.0 + g) / (1.0 - g));
        CHECK(effectiveness_ntu(n, c, 2) == doctest::Approx(shell).epsilon(1e-9));
      }
    }
    CHECK(effectiveness_ntu(2.0, 1.0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }

  TEST_CASE("log-mean temperature difference") {
    CHECK(lmtd_counterflow(30.0, 10.0) == doctest::Approx(20.0 / std::log(3.0)));
    CHECK(lmtd_counterflow(15.0, 15.0) == doctest::Approx(15.0));
  }

  HeatExchangerConfig water(double hot_in, double cold_in) {
    HeatExchangerConfig c;
    c.hot = {2.0, hot_in, 4180.0, 4e-4, 0.66};
    c.cold = {3.0, cold_in, 4180.0, 8e-4, 0.6};
    return c;
  }

  TEST_CASE("equal inlet temperatures exchange nothing") {
    const auto o = simulate_heatx({60, 2.0, 0.016, 0.02, 0.3, 1}, water(330.0, 330.0));
    CHECK(o.duty_W == doctest::Approx(0.0));
    CHECK(o.hot_out_K == doctest::Approx(330.0));
  }

  TEST_CASE("energy balance and outlet bracketing") {
    CounterRng rng{5};
    for (int trial = 0; trial < 40; ++trial) {
      const double od = rng.uniform(0.016, 0.03);
      HeatExchangerDesign d{static_cast<int>(rng.integer(20, 150)), rng.uniform(1.0, 4.0), od * rng.uniform(0.6, 0.9), od,
                            rng.uniform(0.1, 0.5), rng.bernoulli(0.5) ? 1 : 2};
      const auto cfg = water(rng.uniform(340.0, 400.0), rng.uniform(280.0, 320.0));
      const auto o = simulate_heatx(d, cfg);
      const double q_hot = cfg.hot.mass_flow_kg_s * cfg.hot.cp_J_kgK * (cfg.hot.inlet_K - o.hot_out_K);
      const double q_cold = cfg.cold.mass_flow_kg_s * cfg.cold.cp_J_kgK * (o.cold_out_K - cfg.cold.inlet_K);
      CHECK(std::abs(q_hot - o.duty_W) <= 1e-6 * std::max(1.0, o.duty_W));
      CHECK(std::abs(q_cold - o.duty_W) <= 1e-6 * std::max(1.0, o.duty_W));
      CHECK(o.hot_out_K >= cfg.cold.inlet_K);
      CHECK(o.hot_out_K <= cfg.hot.inlet_K);
      CHECK(o.cold_out_K <= cfg.hot.inlet_K);
      CHECK(o.effectiveness > 0.0);
      CHECK(o.effectiveness < 1.0);
    }
  }
}

TEST_SUITE("pkpd") {
  const PkParameters one{0.8, 0.65, 5.0, 100.0, {}, {}};

  TEST_CASE("one-compartment traces follow the Bateman superposition") {
    const auto o = simulate_pkpd({1356.4, 12.0}, one);
    double cmax = 0.0, cmin = 1e300, auc = 0.0;
    const int n = 24000;
    for (int i = 0; i <= n; ++i) {
      const double t = kTreatmentWindowStartHr + kMetricWindowHr * i / n;
      const double c = bateman(t, 1356.4, 12.0, one);
      cmax = std::max(cmax, c);
      cmin = std::min(cmin, c);
      if (i > 0) auc += 0.5 * (c + bateman(t - kMetricWindowHr / n, 1356.4, 12.0, one)) * kMetricWindowHr / n;
    }
    CHECK(o.cmax_mg_L == doctest::Approx(cmax).epsilon(2e-3));
    CHECK(o.cmin_mg_L == doctest::Approx(cmin).epsilon(2e-3));
    CHECK(o.auc_0_24 == doctest::Approx(auc).epsilon(2e-3));
    CHECK(std::abs(o.cmax_mg_L - 13.42) <= 0.10 * 13.42);
  }

  TEST_CASE("half-life is 0.693 V / CL") {
    CHECK(simulate_pkpd({500.0, 12.0}, one).half_life_hr == doctest::Approx(13.86).epsilon(1e-12));
  }

  TEST_CASE("two-compartment reference trace") {
    const PkParameters two{1.5, 0.75, 10.0, 60.0, 0.3, 0.15};
    const auto o = simulate_pkpd({635.1, 12.0}, two);
    CHECK(std::abs(o.cmax_mg_L - 6.47) <= 0.15 * 6.47);
    CHECK(o.cmin_mg_L <= o.cmax_mg_L);
  }

  TEST_CASE("metrics are linear in dose") {
    const auto a = simulate_pkpd({200.0, 8.0}, one);
    const auto b = simulate_pkpd({600.0, 8.0}, one);
    CHECK(b.cmax_mg_L == doctest::Approx(3.0 * a.cmax_mg_L).epsilon(1e-9));
    CHECK(b.auc_0_24 == doctest::Approx(3.0 * a.auc_0_24).epsilon(1e-9));
  }

  TEST_CASE("halving clearance doubles steady-state exposure") {
    auto slow = one;
    slow.CL = one.CL / 2.0;
    const auto a = simulate_pkpd({300.0, 12.0}, one, PkWindow::SteadyState);
    const auto b = simulate_pkpd({300.0, 12.0}, slow, PkWindow::SteadyState);
    CHECK(std::abs(b.auc_0_24 / a.auc_0_24 - 2.0) < 1e-3 * 2.0);
  }

  TEST_CASE("dosing frequencies") {
    for (double h : {4.0, 6.0, 8.0, 12.0, 24.0}) CHECK(allowed_dosing_frequency(h));
    CHECK_FALSE(allowed_dosing_frequency(10.0));
  }
}

TEST_SUITE("ssa") {
  SsaNetworkDesign birth_death() {
    SsaNetworkDesign d;
    d.species = {{"A", 0}};
    d.reactions = {{{}, {{"A", 1}}, 10.0}, {{{"A", 1}}, {}, 1.0}};
    return d;
  }

  TEST_CASE("birth-death stationary moments are Poisson(b/d)") {
    SsaConfig cfg;
    cfg.n_runs = 1000;
    cfg.t_end_s = 200.0;
    const auto o = simulate_ssa(birth_death(), cfg);
    CHECK(std::abs(o.mean[0] - 10.0) < 0.05 * 10.0);
    CHECK(std::abs(o.variance[0] - 10.0) < 0.10 * 10.0);
    CHECK(o.capped_runs == 0);
  }

  TEST_CASE("identical seeds give bit-identical results") {
    SsaConfig cfg;
    cfg.n_runs = 100;
    cfg.t_end_s = 50.0;
    cfg.seed = 9;
    const auto a = simulate_ssa(birth_death(), cfg);
    const auto b = simulate_ssa(birth_death(), cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
    CHECK(a.total_events == b.total_events);
    cfg.seed = 10;
    CHECK(simulate_ssa(birth_death(), cfg).total_events != a.total_events);
  }

  TEST_CASE("a network without reactions keeps its counts") {
    SsaNetworkDesign d;
    d.species = {{"A", 7}, {"B", 3}};
    SsaConfig cfg;
    cfg.n_runs = 10;
    const auto o = simulate_ssa(d, cfg);
    CHECK(o.mean == std::vector<double>{7.0, 3.0});
    CHECK(o.variance == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("structural errors") {
    auto d = birth_death();
    d.reactions.push_back({{{"Z", 1}}, {}, 1.0});
    CHECK_FALSE(network_errors(d).empty());
    auto third = birth_death();
    third.reactions.push_back({{{"A", 3}}, {}, 1.0});
    CHECK_FALSE(network_errors(third).empty());
    CHECK(network_errors(birth_death()).empty());
  }
}

TEST_SUITE("alloy") {
  TEST_CASE("a pure element reproduces its table row") {
    const auto& fe = alloy_table().elements.at("Fe");
    const auto o = evaluate_alloy({{{"Fe", 1.0}}, 1e9});
    CHECK(o.density_g_cc == doctest::Approx(fe.density_g_cc));
    CHECK(o.melting_point_K == doctest::Approx(fe.melting_K));
    CHECK(o.cost_per_kg == doctest::Approx(fe.cost_per_kg));
    CHECK(o.base_element == "Fe");
  }

  TEST_CASE("equimolar Fe-Al follows the rule of mixtures") {
    const auto& t = alloy_table().elements;
    const auto o = evaluate_alloy({{{"Fe", 0.5}, {"Al", 0.5}}, 900.0});
    CHECK(o.density_g_cc == doctest::Approx(0.5 * (t.at("Fe").density_g_cc + t.at("Al").density_g_cc)));
    const double tm = 0.5 * (t.at("Fe").melting_K + t.at("Al").melting_K) -
                      alloy_table().melting_depression_fraction * 2.0 * 0.25 * t.at("Al").melting_K;
    CHECK(o.melting_point_K == doctest::Approx(tm));
  }

  TEST_CASE("compositions must sum to one") {
    CHECK_THROWS_AS(evaluate_alloy({{{"Fe", 0.5}, {"Ni", 0.48}}, 900.0}), ValidationError);
    CHECK_THROWS_AS(evaluate_alloy({{{"Xx", 1.0}}, 900.0}), ValidationError);
  }
}

TEST_SUITE("perturbation") {
  TEST_CASE("every zero-noise knockout equals the dense linear solve") {
    const auto& m = grn_model();
    const auto n = m.genes.size();
    REQUIRE(n == 51);
    const auto w = m.dense_weights();
    Eigen::MatrixXd W(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) W(i, j) = w[i * n + j];
    for (std::size_t k = 0; k < n; ++k) {
      // Clamp gene k; solve (I - W_uu) d_u = W_uk * floor on the rest.
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - W;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      A.row(k).setZero();
      A(k, k) = 1.0;
      b(k) = m.knockout_log2_floor;
      const Eigen::VectorXd d = A.partialPivLu().solve(b);
      const auto fp = knockout_fixed_point(m, k);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fp[i] - d(i)) < 1e-9);
    }
  }

  TEST_CASE("TP53 loss lowers CDKN1A") {
    const auto& m = grn_model();
    const auto fc = simulate_knockout({"TP53"}, m, {"CDKN1A", "TP53"}, 3);
    CHECK(fc.at("CDKN1A") < -m.noise_scale);
    CHECK(fc.at("TP53") == m.knockout_log2_floor);
  }

  TEST_CASE("markers unreachable from the knockout only see noise") {
    const auto& m = grn_model();
    const std::size_t k = m.index_of("EGFR");
    std::set<std::string> reach{"EGFR"};
    std::deque<std::string> q{"EGFR"};
    while (!q.empty()) {
      const auto g = q.front();
      q.pop_front();
      for (const auto& e : m.edges) {
        if (e.source == g && reach.insert(e.target).second) q.push_back(e.target);
      }
    }
    std::vector<std::string> far;
    for (const auto& g : m.genes) {
      if (!reach.count(g)) far.push_back(g);
    }
    REQUIRE_FALSE(far.empty());
    const auto fc = simulate_knockout({"EGFR"}, m, far, 17);
    for (const auto& g : far) CHECK(std::abs(fc.at(g)) <= 3.0 * m.noise_scale);
    const auto fp = knockout_fixed_point(m, k);
    for (const auto& g : far) CHECK(fp[m.index_of(g)] == 0.0);
  }

  TEST_CASE("noise is keyed by seed and bounded") {
    const auto& m = grn_model();
    const auto a = simulate_knockout({"MYC"}, m, {"CDK4", "LDHA"}, 1);
    CHECK(a == simulate_knockout({"MYC"}, m, {"CDK4", "LDHA"}, 1));
    const auto clean = simulate_knockout({"MYC"}, m, {"CDK4", "LDHA"}, 1, 0.0);
    for (const auto& [g, v] : a) CHECK(std::abs(v - clean.at(g)) <= m.noise_scale);
    CHECK_THROWS_AS(simulate_knockout({"NOPE"}, m, {"CDK4"}, 1), ValidationError);
  }
}
