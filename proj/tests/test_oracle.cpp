#include <chrono>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "dabss/errors.hpp"
#include "dabss/oracle.hpp"
#include "support/test_support.hpp"

using namespace dabss;

namespace {

SimConfig with_injection(double f, std::optional<double> amplitude = std::nullopt) {
    SimConfig cfg;
    InjectionConfig inj;
    inj.f = f;
    inj.amplitude = amplitude;
    cfg.injection = inj;
    return cfg;
}

double phase_diff_deg(Complex a, Complex b) { return std::abs(std::arg(a / b)) * 180.0 / std::numbers::pi; }

}  // namespace

TEST_CASE("zero input converges after one period") {
    auto p = test::reference_params();
    p.Vin = 0.0;
    const auto run = run_to_steady_state(build_dab(p), SimConfig{});
    CHECK(run.periods == 1);
    CHECK(run.residual == 0.0);
    CHECK(run.x0.norm() == 0.0);
}

TEST_CASE("reference steady state by iteration") {
    const auto dab = build_dab(test::reference_params());
    const auto start = std::chrono::steady_clock::now();
    const auto run = run_to_steady_state(dab, SimConfig{});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(run.periods <= 2000);
    CHECK(run.residual <= 1e-10);
    CHECK(test::rel_err(run.x0, solve_periodic_fixed_point(dab.schedule)) <= 1e-6);
    CHECK(seconds <= 5.0);
}

TEST_CASE("iteration agrees with the closed form on random converters") {
    test::Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto dab = build_dab(test::random_params(rng));
        SimConfig cfg;
        cfg.periods = 200000;
        const auto run = run_to_steady_state(dab, cfg);
        CHECK(test::rel_err(run.x0, solve_periodic_fixed_point(dab.schedule)) <= 1e-6);
    }
}

TEST_CASE("period budget exhaustion reports the last residual") {
    const auto dab = build_dab(test::reference_params());
    SimConfig cfg;
    cfg.periods = 10;
    try {
        (void)run_to_steady_state(dab, cfg);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual() > cfg.convergence_tol);
    }
}

TEST_CASE("steady waveform has half-wave symmetry") {
    const auto dab = build_dab(test::reference_params());
    const auto run = run_to_steady_state(dab, SimConfig{});
    const auto& w = run.waveform;
    const std::size_t half = 2 * 16;
    REQUIRE(w.t.size() == 2 * half + 1);
    const Matrix Dp = SymmetryConstants::Dprime();
    for (std::size_t i = 0; i <= half; ++i) {
        CHECK(w.t[i + half] - w.t[i] == doctest::Approx(dab.half_period()).epsilon(1e-9));
        CHECK((w.x[i + half] - Dp * w.x[i]).norm() <= 1e-6 * (1.0 + w.x[i].norm()));
    }
    for (std::size_t i = 1; i < w.t.size(); ++i) {
        CHECK(w.t[i] > w.t[i - 1]);
    }
    CHECK(w.interval.front() == 1);
    CHECK(w.interval[half] == 3);
}

TEST_CASE("waveform samples align with subinterval boundaries") {
    const auto dab = build_dab(test::reference_params());
    const Vector X0 = solve_half_cycle(dab);
    const auto w = sample_period(dab, X0, 4);
    const auto states = propagate(dab.schedule, X0);
    for (int i = 0; i < 4; ++i) {
        const auto idx = static_cast<std::size_t>(4 * (i + 1));
        CHECK(test::rel_err(w.x[idx], states[static_cast<std::size_t>(i)]) <= 1e-12);
        CHECK(test::rel_err(w.y[idx - 1], output(dab, w.x[idx - 1], w.interval[idx - 1])) <= 1e-15);
    }
}

TEST_CASE("zero amplitude yields a zero phasor") {
    const auto dab = build_dab(test::reference_params());
    const auto m = measure_frequency_response(dab, Surface::PPlus, with_injection(1000.0, 0.0));
    CHECK(m.amplitude == 0.0);
    CHECK(m.output_phasor.norm() <= 1e-12);
}

TEST_CASE("injection measurement is linear in amplitude") {
    const auto dab = build_dab(test::reference_params());
    const auto full = measure_frequency_response(dab, Surface::PPlus, with_injection(1000.0, 1e-4));
    const auto half = measure_frequency_response(dab, Surface::PPlus, with_injection(1000.0, 0.5e-4));
    const ComplexVector ratio = full.output_phasor.cwiseQuotient(half.output_phasor);
    CHECK(std::abs(ratio(0) - 2.0) <= 2.0 * 1e-3);
    CHECK(std::abs(ratio(1) - 2.0) <= 2.0 * 1e-3);
}

TEST_CASE("measurement does not depend on waveform resolution or settle length") {
    const auto dab = build_dab(test::reference_params());
    const auto base = measure_frequency_response(dab, Surface::PPlus, with_injection(1000.0));
    auto fine = with_injection(1000.0);
    fine.substeps_per_interval = 32;
    const auto m_fine = measure_frequency_response(dab, Surface::PPlus, fine);
    CHECK(test::rel_err(Vector(m_fine.gain.cwiseAbs()), Vector(base.gain.cwiseAbs())) <= 5e-3);
    CHECK((m_fine.gain - base.gain).norm() <= 5e-3 * base.gain.norm());

    auto longer = with_injection(1000.0);
    longer.injection->settle_periods *= 2;
    const auto m_long = measure_frequency_response(dab, Surface::PPlus, longer);
    CHECK((m_long.gain - base.gain).norm() <= 1e-3 * base.gain.norm());
}

TEST_CASE("injection preconditions") {
    const auto dab = build_dab(test::reference_params());
    // kappa * A must stay below the shortest subinterval (1.5 us)
    CHECK_THROWS_AS((void)measure_frequency_response(dab, Surface::PPlus, with_injection(1000.0, 0.5)),
                    AmplitudeError);
    CHECK_THROWS_AS((void)measure_frequency_response(dab, Surface::PPlus, with_injection(1234.5)), ConfigError);
    CHECK_THROWS_AS((void)measure_frequency_response(dab, Surface::PPlus, SimConfig{}), ConfigError);
    CHECK(coherent_frequency(1234.5, 2000, 1e-5) == doctest::Approx(1250.0));
    CHECK(coherent_frequency(1000.0, 2000, 1e-5) == doctest::Approx(1000.0));

    // default amplitude halves itself on a narrow subinterval
    auto p = test::reference_params();
    p.D_phase = 5e-5;
    p.Vr = 1e-3;
    const auto narrow = build_dab(p);
    const auto m = measure_frequency_response(narrow, Surface::PPlus, with_injection(1000.0));
    const double kappa = narrow.half_period() / p.Vr;
    CHECK(m.amplitude < 1e-4 * p.Vr);
    CHECK(kappa * m.amplitude <= narrow.segment(1).T);
}

TEST_CASE("measured response matches the fixed-frequency model at fs/100") {
    const auto dab = build_dab(test::reference_params());
    const double f = dab.params.fs / 100.0;
    for (Surface s : kAllSurfaces) {
        const auto meas = measure_frequency_response(dab, s, with_injection(f));
        const auto model = build_half_cycle(dab, s);
        const ComplexVector H = H_fix(model, dab.C_phys, frequency_to_z(f, dab.half_period()));
        for (int ch = 0; ch < 2; ++ch) {
            CAPTURE(to_string(s));
            CAPTURE(ch);
            CHECK(std::abs(std::abs(meas.gain(ch)) / std::abs(H(ch)) - 1.0) <= 0.02);
            CHECK(phase_diff_deg(meas.gain(ch), H(ch)) <= 2.0);
        }
    }
}
