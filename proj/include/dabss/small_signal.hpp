#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dabss/dab_model.hpp"
#include "dabss/linalg.hpp"
#include "dabss/report.hpp"
#include "dabss/tolerances.hpp"

namespace dabss {

/// Half-cycle sampling surfaces. Each is a pair of consecutive subintervals
/// (a, b) with T_a + T_b = T_h.
enum class Surface { PPlus, SPlus, PMinus, SMinus };

inline constexpr std::array<Surface, 4> kAllSurfaces = {Surface::PPlus, Surface::SPlus, Surface::PMinus,
                                                        Surface::SMinus};

struct SurfaceInfo {
    std::string_view label;
    int a;
    int b;
    /// Modulator polarity: -1 for primary-side (P), +1 for secondary-side (S).
    int rho;
};

[[nodiscard]] SurfaceInfo surface_info(Surface s);
[[nodiscard]] std::string_view to_string(Surface s);
/// Accepts "P+", "S+", "P-", "S-". Throws ParameterError otherwise.
[[nodiscard]] Surface parse_surface(std::string_view label);

struct SmallSignalOptions {
    Tolerances tol;
    /// Replaces the polarity of a surface (index = Surface). Breaks the
    /// primary/secondary equivalence on purpose; only for negative tests.
    std::array<std::optional<int>, 4> unsafe_polarity{};

    [[nodiscard]] int rho(Surface s) const;
};

/// Linearized rectified half-cycle map on one surface:
///   x_{k+1} = Phi_ab x_k + beta_minus v_c[k] + beta_plus v_c[k+1].
struct HalfCycleModel {
    Surface surface = Surface::PPlus;
    int a = 1;
    int b = 2;
    int rho = -1;
    double Ta = 0.0;
    double Tb = 0.0;
    double Th = 0.0;

    Matrix Phi_ab;     ///< Dr Phi_b Phi_a
    Vector g_ab;       ///< Dr (Phi_b Gamma_a + Gamma_b)
    Vector x_star;     ///< surface fixed point (rectified coordinate)
    Vector x_a_end;    ///< Phi_a x* + Gamma_a
    Vector x_b_end;    ///< Phi_b x_a_end + Gamma_b (raw coordinate)
    Vector eta_a;      ///< d x_{k+1} / d T_a  [state / s]
    Vector eta_b;      ///< d x_{k+1} / d T_b  [state / s]
    double kappa = 0;  ///< T_h / V_r  [s / V]
    Vector beta_minus; ///< rho kappa eta_a  [state / V]
    Vector beta_plus;  ///< -rho kappa eta_b [state / V]
    std::vector<Complex> poles;  ///< eigenvalues of Phi_ab

    /// z-weighted input vector beta_minus + z beta_plus.
    [[nodiscard]] ComplexVector b_vector(Complex z) const;
};

[[nodiscard]] HalfCycleModel build_half_cycle(const DabSchedule& dab, Surface surface,
                                              const SmallSignalOptions& opt = {});

/// (zI - Phi_ab)^{-1} v. Throws ResolventSingularityError when z lies within
/// `guard` of a pole.
[[nodiscard]] ComplexVector resolvent_apply(const HalfCycleModel& model, Complex z, const ComplexVector& v,
                                            double guard = 1e-12);

/// C_phys (zI - Phi_ab)^{-1} (beta_minus + z beta_plus), entries [I_rec, V_out].
[[nodiscard]] ComplexVector H_fix(const HalfCycleModel& model, const Matrix& C_phys, Complex z,
                                  double guard = 1e-12);

/// Same-cycle approximation C_phys (zI - Phi_ab)^{-1} (beta_minus + beta_plus).
[[nodiscard]] ComplexVector H_sc(const HalfCycleModel& model, const Matrix& C_phys, Complex z,
                                 double guard = 1e-12);

/// C_phys (zI - Phi_ab)^{-1} (z - 1) beta_plus, cross-checked against
/// H_fix - H_sc. Throws IdentityError when the two paths disagree beyond
/// `tol.identity` relative to |H_fix|.
[[nodiscard]] ComplexVector delta_H(const HalfCycleModel& model, const Matrix& C_phys, Complex z,
                                    const Tolerances& tol = {});

/// 2|sin(w T_h / 2)| |C_phys| |(zI - Phi_ab)^{-1}| |beta_plus| with z = e^{j w T_h}.
[[nodiscard]] double delta_H_bound(const HalfCycleModel& model, const Matrix& C_phys, double f_hz);

/// z = exp(j 2 pi f T_h).
[[nodiscard]] Complex frequency_to_z(double f_hz, double Th);

/// |(zI - T^{-1} A T)^{-1} - T^{-1} (zI - A)^{-1} T| / |(zI - T^{-1} A T)^{-1}|.
[[nodiscard]] double resolvent_similarity_residual(const Matrix& T, const Matrix& A, Complex z);

enum class SurfacePair { Plus, Minus };  ///< P+ <-> S+ and P- <-> S-

struct SurfaceEquivalence {
    IdentityReport report;
    /// max_z |b_p - T^{-1} b_s| / scale
    double b_residual = 0.0;
    /// max_z |b_p + T^{-1} b_s| / scale, i.e. the residual after a global sign flip
    double b_flipped_residual = 0.0;
    /// The b-vector relation holds only after a global sign flip.
    bool sign_mismatch = false;
};

/// Check the primary/secondary surface similarity with T = Phi_1 (Plus) or
/// T = Phi_3 (Minus):
///   (i)   T^{-1} Phi_s T = Phi_p
///   (ii)  b_p(z) = T^{-1} b_s(z)
///   (iii) H_p(z) = (C_phys T^{-1}) (zI - Phi_s)^{-1} b_s(z)
/// where p is the P surface and s the S surface of the pair.
[[nodiscard]] SurfaceEquivalence verify_surface_equivalence(const DabSchedule& dab, SurfacePair pair,
                                                            std::span<const Complex> z_grid,
                                                            const SmallSignalOptions& opt = {});

/// n points evenly spaced on the unit circle, starting at z = 1.
[[nodiscard]] std::vector<Complex> unit_circle_grid(std::size_t n);

enum class ModelKind { Fix, SameCycle };
enum class Spacing { Log, Linear };

struct FrequencyResponseRow {
    double f = 0.0;
    Complex H_irec;
    Complex H_vout;
    /// z landed on a pole; H values are not meaningful.
    bool singular = false;
};

/// Evaluate H_fix or H_sc at n_points frequencies in [f_min, f_max], ascending.
/// Requires 0 < f_min < f_max <= 1/(2 T_h) and n_points >= 2.
[[nodiscard]] std::vector<FrequencyResponseRow> bode_sweep(const DabSchedule& dab, Surface surface,
                                                           ModelKind kind, double f_min, double f_max,
                                                           std::size_t n_points, Spacing spacing,
                                                           const SmallSignalOptions& opt = {});

/// Frequencies used by bode_sweep.
[[nodiscard]] std::vector<double> sweep_frequencies(double f_min, double f_max, std::size_t n_points,
                                                    Spacing spacing);

}  // namespace dabss
