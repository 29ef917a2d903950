#pragma once

#include <array>
#include <optional>

#include "dabss/linalg.hpp"
#include "dabss/pwlti.hpp"
#include "dabss/report.hpp"
#include "dabss/tolerances.hpp"

namespace dabss {

/// Physical and modulation parameters of a single-phase-shift DAB converter.
/// SI units throughout.
struct DabParams {
    double n_turns = 1.0;  ///< transformer ratio
    double L = 10e-6;      ///< series inductance [H]
    double Co = 100e-6;    ///< output capacitance [F]
    double Rt = 50e-3;     ///< total series resistance [ohm]
    double Rc = 10e-3;     ///< capacitor ESR [ohm]
    double Ro = 10.0;      ///< load [ohm]
    double Vin = 100.0;    ///< input voltage [V]
    double fs = 100e3;     ///< switching frequency [Hz]
    double D_phase = 0.3;  ///< phase-shift ratio, 0 < D < 1
    double Vr = 1.0;       ///< modulator ramp amplitude [V]

    /// Throws ParameterError naming the first violated bound.
    void validate() const;

    [[nodiscard]] double period() const { return 1.0 / fs; }
    [[nodiscard]] double half_period() const { return 0.5 / fs; }
};

/// Deliberate departures from the symmetric timing map, used for negative tests.
struct DabOverrides {
    /// Replace the duration of subinterval 3 (seconds).
    std::optional<double> t3;
};

/// Fixed involutions on the state ordering [i_L, v_C].
struct SymmetryConstants {
    [[nodiscard]] static Matrix S();       ///< diag(1, -1)
    [[nodiscard]] static Matrix Dprime();  ///< diag(-1, 1)
    [[nodiscard]] static Matrix Dr();      ///< diag(-1, 1), the half-cycle rectification
};

/// The four-interval DAB schedule with its output maps.
struct DabSchedule {
    DabParams params;
    Schedule schedule;
    /// Per-interval output maps C_1..C_4 (index 0..3).
    std::array<Matrix, 4> C;
    /// Physical output map x -> [I_rec, V_out], identical on every sampling surface.
    Matrix C_phys;

    /// 1-based subinterval accessors.
    [[nodiscard]] const Segment& segment(int i) const { return schedule.segments().at(static_cast<std::size_t>(i - 1)); }
    [[nodiscard]] const SegmentMap& map(int i) const { return schedule.maps().at(static_cast<std::size_t>(i - 1)); }
    [[nodiscard]] const Vector& input() const { return schedule.input(); }
    [[nodiscard]] double half_period() const { return params.half_period(); }
};

/// Build A_1..A_4, B_1..B_4, C_1..C_4, C_phys and the single-phase-shift timing
/// T_1 = T_3 = D T_h, T_2 = T_4 = (1 - D) T_h.
[[nodiscard]] DabSchedule build_dab(const DabParams& params, const DabOverrides& overrides = {});

/// A_1 for the given parameters (A_4 = A_1, A_2 = A_3 = S A_1 S).
[[nodiscard]] Matrix dab_a1(const DabParams& p);

/// Residuals of the construction relations A_4 = A_1, A_2 = A_3 = S A_1 S,
/// B_1 = B_2, B_3 = B_4 = -B_1, T_1 = T_3, T_2 = T_4.
[[nodiscard]] IdentityReport check_construction(const DabSchedule& dab, double tolerance = 1e-15);

/// Residuals of the segment-map sign/similarity relations:
///   Phi_3 = S Phi_1 S, Phi_4 = S Phi_2 S, Gamma_3 = -S Gamma_1, Gamma_4 = -S Gamma_2,
///   Phi_3 = Dr Phi_1 Dr, Phi_4 = Dr Phi_2 Dr.
/// Phi residuals are scaled by 1 + |Phi_1| (resp. |Phi_2|), Gamma residuals by
/// 1 + |Gamma_1| (resp. |Gamma_2|).
[[nodiscard]] IdentityReport verify_symmetry(const DabSchedule& dab, double tolerance = 1e-12);

/// Steady-state X_0 from the half-cycle condition Phi_2 Phi_1 X_0 + Phi_2 Gamma_1 + Gamma_2 = D' X_0.
[[nodiscard]] Vector solve_half_cycle(const DabSchedule& dab, const Tolerances& tol = {});

/// y = C_interval x, interval in 1..4.
[[nodiscard]] Vector output(const DabSchedule& dab, const Vector& x, int interval);

/// [I_rec, V_out] = C_phys x.
[[nodiscard]] Vector output_phys(const DabSchedule& dab, const Vector& x);

}  // namespace dabss
