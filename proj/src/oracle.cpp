#include "dabss/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

// Exact affine step over duration t, computed independently of segment_map.
struct Step {
    Matrix Phi;
    Vector Gamma;

    [[nodiscard]] Vector apply(const Vector& x) const { return Phi * x + Gamma; }
};

Step exact_step(const Segment& seg, const Vector& U, double t) {
    const auto n = seg.A.rows();
    Matrix M = Matrix::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = seg.A;
    M.col(n).head(n) = seg.B * U;
    const Matrix E = expm(M, t);
    return {E.topLeftCorner(n, n), E.col(n).head(n)};
}

int wrap_interval(int i) { return ((i - 1) % 4 + 4) % 4 + 1; }

}  // namespace

void SimConfig::validate() const {
    if (periods <= 0) {
        throw ConfigError("sim.periods must be positive");
    }
    if (substeps_per_interval <= 0) {
        throw ConfigError("sim.substeps_per_interval must be positive");
    }
    if (!(convergence_tol > 0.0)) {
        throw ConfigError("sim.convergence_tol must be positive");
    }
    if (injection) {
        const auto& inj = *injection;
        if (inj.settle_periods < 0 || inj.measure_periods <= 0) {
            throw ConfigError("sim.injection: settle_periods >= 0 and measure_periods > 0 required");
        }
        if (inj.amplitude && !(*inj.amplitude >= 0.0)) {
            throw ConfigError("sim.injection.amplitude must be >= 0");
        }
    }
}

void SimConfig::require_coherent_injection(double Ts) const {
    validate();
    if (!injection) {
        throw ConfigError("no injection configured");
    }
    const auto& inj = *injection;
    const double cycles = inj.f * inj.measure_periods * Ts;
    if (!(inj.f > 0.0) || std::round(cycles) < 1.0 ||
        std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles)) {
        throw ConfigError("sim.injection: f * measure_periods * Ts = " + std::to_string(cycles) +
                          " is not a positive integer (non-coherent window)");
    }
}

double coherent_frequency(double f, int measure_periods, double Ts) {
    const double window = measure_periods * Ts;
    return std::max(1.0, std::round(f * window)) / window;
}

Waveform sample_period(const DabSchedule& dab, const Vector& x0, int substeps_per_interval) {
    Waveform w;
    const Vector& U = dab.input();
    Vector x = x0;
    double t0 = 0.0;
    for (int i = 1; i <= 4; ++i) {
        const auto& seg = dab.segment(i);
        if (seg.T > 0.0) {
            for (int j = 0; j < substeps_per_interval; ++j) {
                const double dt = seg.T * j / substeps_per_interval;
                const Vector xs = exact_step(seg, U, dt).apply(x);
                w.t.push_back(t0 + dt);
                w.x.push_back(xs);
                w.y.push_back(dab.C[static_cast<std::size_t>(i - 1)] * xs);
                w.interval.push_back(i);
            }
        }
        x = exact_step(seg, U, seg.T).apply(x);
        t0 += seg.T;
    }
    w.t.push_back(t0);
    w.x.push_back(x);
    w.y.push_back(dab.C[3] * x);
    w.interval.push_back(4);
    return w;
}

SteadyStateRun run_to_steady_state(const DabSchedule& dab, const SimConfig& cfg) {
    cfg.validate();
    const Vector& U = dab.input();
    std::vector<Step> steps;
    for (int i = 1; i <= 4; ++i) {
        steps.push_back(exact_step(dab.segment(i), U, dab.segment(i).T));
    }

    SteadyStateRun run;
    Vector x = Vector::Zero(2);
    for (int k = 1; k <= cfg.periods; ++k) {
        Vector next = x;
        for (const auto& s : steps) {
            next = s.apply(next);
        }
        run.residual = (next - x).norm() / (1.0 + next.norm());
        x = next;
        run.periods = k;
        if (run.residual <= cfg.convergence_tol) {
            run.x0 = x;
            run.waveform = sample_period(dab, x, cfg.substeps_per_interval);
            return run;
        }
    }

    Matrix Pi = Matrix::Identity(2, 2);
    for (const auto& s : steps) {
        Pi = s.Phi * Pi;
    }
    throw ConvergenceError("oracle: no periodic convergence after " + std::to_string(cfg.periods) +
                               " periods (last residual " + std::to_string(run.residual) +
                               ", spectral radius " + std::to_string(spectral_radius(Pi)) + ")",
                           run.residual);
}

FrequencyMeasurement measure_frequency_response(const DabSchedule& dab, Surface surface, const SimConfig& cfg,
                                                const SmallSignalOptions& opt) {
    cfg.require_coherent_injection(dab.schedule.period());
    const InjectionConfig& inj = *cfg.injection;
    const auto info = surface_info(surface);
    const int rho = opt.rho(surface);
    const double Th = dab.half_period();
    const double kappa = Th / dab.params.Vr;
    const double Ta = dab.segment(info.a).T;
    const double Tb = dab.segment(info.b).T;

    // |v_c| <= amplitude, so the worst-case duration is T - kappa * amplitude.
    double amplitude = inj.amplitude.value_or(1e-4 * dab.params.Vr);
    const double shortest = std::min(Ta, Tb);
    if (kappa * amplitude > shortest) {
        if (inj.amplitude) {
            throw AmplitudeError("injection amplitude " + std::to_string(amplitude) +
                                 " V drives a subinterval duration negative");
        }
        while (kappa * amplitude > shortest && amplitude > 0.0) {
            amplitude *= 0.5;
        }
    }

    // Period-start steady state, advanced to the start of subinterval a.
    const SteadyStateRun steady = run_to_steady_state(dab, cfg);
    const Vector& U = dab.input();
    Vector raw = steady.x0;
    for (int i = 1; i < info.a; ++i) {
        raw = exact_step(dab.segment(i), U, dab.segment(i).T).apply(raw);
    }

    const Matrix Dr = SymmetryConstants::Dr();
    const Vector y_ref = dab.C_phys * raw;
    const double omega_th = 2.0 * std::numbers::pi * inj.f * Th;
    const long first = 2L * inj.settle_periods;
    const long last = first + 2L * inj.measure_periods;
    auto vc = [&](long k) { return amplitude * std::cos(omega_th * static_cast<double>(k)); };

    ComplexVector Y = ComplexVector::Zero(2);
    Complex V = 0.0;
    Vector sample = raw;  // rectified x_k = Dr^k raw_k
    for (long k = 0; k < last; ++k) {
        if (k >= first) {
            const Complex w = std::polar(1.0, -omega_th * static_cast<double>(k));
            Y += (dab.C_phys * sample - y_ref).cast<Complex>() * w;
            V += vc(k) * w;
        }
        const int shift = static_cast<int>(k % 2) * 2;
        const int ia = wrap_interval(info.a + shift);
        const int ib = wrap_interval(info.b + shift);
        const double ta = Ta + rho * kappa * vc(k);
        const double tb = Tb - rho * kappa * vc(k + 1);
        raw = exact_step(dab.segment(ib), U, tb).apply(exact_step(dab.segment(ia), U, ta).apply(raw));
        sample = (k % 2 == 0) ? Vector(Dr * raw) : raw;
    }

    FrequencyMeasurement out;
    out.f = inj.f;
    out.amplitude = amplitude;
    const double n_samples = static_cast<double>(last - first);
    out.output_phasor = Y * (2.0 / n_samples);
    out.gain = amplitude > 0.0 ? ComplexVector(Y / V) : ComplexVector(ComplexVector::Zero(2));
    return out;
}

}  // namespace dabss
