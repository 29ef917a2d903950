#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dabss/linalg.hpp"
#include "dabss/tolerances.hpp"

namespace dabss {

/// One constant-topology subinterval: x' = A x + B u for a duration T (seconds).
struct Segment {
    Matrix A;
    Matrix B;
    double T = 0.0;
};

/// Exact affine update across one segment: x+ = Phi x- + Gamma.
struct SegmentMap {
    Matrix Phi;
    Vector Gamma;
};

/// Ordered segments sharing a constant input over one period.
class Schedule {
public:
    /// Throws ParameterError for an empty list or negative duration and
    /// DimensionError for inconsistent A/B/U shapes.
    Schedule(std::vector<Segment> segments, Vector U);

    /// As above, additionally requiring the durations to sum to `period`
    /// within 1e-12 relative.
    Schedule(std::vector<Segment> segments, Vector U, double period);

    [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }
    [[nodiscard]] const Vector& input() const noexcept { return U_; }
    [[nodiscard]] std::size_t size() const noexcept { return segments_.size(); }
    [[nodiscard]] Eigen::Index state_dim() const noexcept { return segments_.front().A.rows(); }
    /// Sum of segment durations.
    [[nodiscard]] double period() const noexcept { return Ts_; }

    /// Exact maps of every segment, in schedule order.
    [[nodiscard]] const std::vector<SegmentMap>& maps() const noexcept { return maps_; }

private:
    std::vector<Segment> segments_;
    Vector U_;
    double Ts_ = 0.0;
    std::vector<SegmentMap> maps_;
};

/// Phi = e^{A T} and Gamma = int_0^T e^{A(T - tau)} B U dtau.
///
/// Gamma is read from the top-right block of exp([[A, B U], [0, 0]] T), which
/// stays exact when A is singular.
[[nodiscard]] SegmentMap segment_map(const Segment& seg, const Vector& U);

/// Gamma = A^{-1} (Phi - I) B U; only meaningful for well-conditioned A.
[[nodiscard]] Vector gamma_by_inverse(const Segment& seg, const Vector& U);

/// Phi_b Phi_{b-1} ... Phi_a over 1-based inclusive indices, 1 <= a <= b <= size.
[[nodiscard]] Matrix reverse_product(std::span<const Matrix> phis, std::size_t a, std::size_t b);

/// Convenience overload over the Phi of each map.
[[nodiscard]] Matrix reverse_product(std::span<const SegmentMap> maps, std::size_t a, std::size_t b);

/// X_1 .. X_n from X_i = Phi_i X_{i-1} + Gamma_i.
[[nodiscard]] std::vector<Vector> propagate(const Schedule& schedule, const Vector& X0);

/// X_n from the closed form
///   (prod_{j=1..n} Phi_j) X0 + sum_{i<n} (prod_{j=i+1..n} Phi_j) Gamma_i + Gamma_n,
/// with products taken in reverse order.
[[nodiscard]] Vector closed_form_state(const Schedule& schedule, const Vector& X0);

/// Monodromy matrix Pi = Phi_n ... Phi_1.
[[nodiscard]] Matrix monodromy(const Schedule& schedule);

/// Forcing term sum_{i<n} (prod_{j=i+1..n} Phi_j) Gamma_i + Gamma_n.
[[nodiscard]] Vector periodic_forcing(const Schedule& schedule);

/// Solve (I - Pi) X* = forcing for the periodic steady state.
///
/// Throws MarginalSystemError (carrying the eigenvalues of Pi) when the
/// condition estimate of I - Pi exceeds `tol.condition_limit`.
[[nodiscard]] Vector solve_periodic_fixed_point(const Schedule& schedule, const Tolerances& tol = {});

/// Solve M x = rhs with partial-pivoting LU, guarding on the reciprocal
/// condition estimate. `transition` supplies the eigenvalues for the error.
[[nodiscard]] Vector solve_guarded(const Matrix& M, const Vector& rhs, const Matrix& transition,
                                   const Tolerances& tol, const char* what);

}  // namespace dabss
