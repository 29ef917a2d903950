#pragma once

#include <optional>
#include <vector>

#include "dabss/dab_model.hpp"
#include "dabss/linalg.hpp"
#include "dabss/small_signal.hpp"

namespace dabss {

/// Sinusoidal control-voltage injection v_c[k] = amplitude cos(2 pi f k T_h).
struct InjectionConfig {
    double f = 0.0;  ///< [Hz]
    /// Explicit amplitude [V]. Unset selects 1e-4 Vr, halved automatically
    /// while it would drive a duration negative.
    std::optional<double> amplitude;
    int settle_periods = 2000;
    int measure_periods = 2000;
};

struct SimConfig {
    /// Period budget for steady-state convergence.
    int periods = 5000;
    /// Waveform samples per subinterval (output resolution only).
    int substeps_per_interval = 16;
    /// Stop when |X_k - X_{k-1}| <= convergence_tol (1 + |X_k|).
    double convergence_tol = 1e-10;
    std::optional<InjectionConfig> injection;

    /// Throws ConfigError on non-positive counts or tolerances.
    void validate() const;

    /// Throws ConfigError unless an injection is configured whose window is
    /// coherent: f * measure_periods * Ts must be a positive integer.
    void require_coherent_injection(double Ts) const;
};

struct Waveform {
    std::vector<double> t;
    std::vector<Vector> x;     ///< [i_L, v_C]
    std::vector<Vector> y;     ///< C_interval x
    std::vector<int> interval; ///< 1..4, the subinterval each sample opens
};

struct SteadyStateRun {
    Vector x0;            ///< period-start state (start of subinterval 1)
    Waveform waveform;    ///< final period
    int periods = 0;      ///< periods iterated
    double residual = 0;  ///< last period-to-period change, relative
};

/// Iterate whole periods of exact subinterval maps from X = 0 until the
/// period-to-period change falls below tolerance. Throws ConvergenceError
/// with the last residual when the budget runs out.
[[nodiscard]] SteadyStateRun run_to_steady_state(const DabSchedule& dab, const SimConfig& cfg);

/// Sample one period starting from x0, substeps_per_interval points per
/// subinterval plus the closing point at t = Ts.
[[nodiscard]] Waveform sample_period(const DabSchedule& dab, const Vector& x0, int substeps_per_interval);

struct FrequencyMeasurement {
    double f = 0.0;
    double amplitude = 0.0;  ///< amplitude actually injected
    /// Complex gain [I_rec, V_out] per volt of control; zero when amplitude is zero.
    ComplexVector gain;
    /// Single-bin phasor of the sampled output deviation.
    ComplexVector output_phasor;
};

/// Inject a sinusoidal control perturbation through the comparator timing
/// law (T_a += rho kappa v_c[k], T_b -= rho kappa v_c[k+1]), simulate every
/// half-cycle with exact maps at the perturbed durations, sample C_phys x in
/// the rectified coordinate of `surface`, and extract the response at f.
///
/// Throws ConfigError without injection settings, AmplitudeError when an
/// explicit amplitude makes a duration negative.
[[nodiscard]] FrequencyMeasurement measure_frequency_response(const DabSchedule& dab, Surface surface,
                                                              const SimConfig& cfg,
                                                              const SmallSignalOptions& opt = {});

/// Nearest frequency completing a whole number (>= 1) of cycles in
/// measure_periods switching periods.
[[nodiscard]] double coherent_frequency(double f, int measure_periods, double Ts);

}  // namespace dabss
