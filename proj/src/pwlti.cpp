#include "dabss/pwlti.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

void check_segment(const Segment& seg, const Vector& U) {
    if (seg.A.rows() != seg.A.cols() || seg.A.rows() == 0) {
        throw DimensionError("segment: A must be square and non-empty");
    }
    if (seg.B.rows() != seg.A.rows()) {
        throw DimensionError("segment: B rows must match state dimension");
    }
    if (seg.B.cols() != U.size()) {
        throw DimensionError("segment: B columns must match input length");
    }
    if (!std::isfinite(seg.T)) {
        throw NumericInputError("segment: non-finite duration");
    }
    if (seg.T < 0.0) {
        throw ParameterError("segment: negative duration " + std::to_string(seg.T));
    }
}

}  // namespace

Schedule::Schedule(std::vector<Segment> segments, Vector U)
    : segments_(std::move(segments)), U_(std::move(U)) {
    if (segments_.empty()) {
        throw ParameterError("schedule: at least one segment required");
    }
    const auto n = segments_.front().A.rows();
    maps_.reserve(segments_.size());
    for (const auto& seg : segments_) {
        check_segment(seg, U_);
        if (seg.A.rows() != n) {
            throw DimensionError("schedule: segments disagree on state dimension");
        }
        Ts_ += seg.T;
        maps_.push_back(segment_map(seg, U_));
    }
}

Schedule::Schedule(std::vector<Segment> segments, Vector U, double period)
    : Schedule(std::move(segments), std::move(U)) {
    if (!(std::abs(Ts_ - period) <= 1e-12 * std::abs(period))) {
        throw ParameterError("schedule: durations sum to " + std::to_string(Ts_) + " s, expected " +
                             std::to_string(period) + " s");
    }
}

SegmentMap segment_map(const Segment& seg, const Vector& U) {
    check_segment(seg, U);
    const auto n = seg.A.rows();
    Matrix augmented = Matrix::Zero(n + 1, n + 1);
    augmented.topLeftCorner(n, n) = seg.A;
    augmented.topRightCorner(n, 1) = seg.B * U;
    const Matrix E = expm(augmented, seg.T);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, 1)};
}

Vector gamma_by_inverse(const Segment& seg, const Vector& U) {
    check_segment(seg, U);
    const auto n = seg.A.rows();
    const Matrix Phi = expm(seg.A, seg.T);
    return seg.A.partialPivLu().solve((Phi - Matrix::Identity(n, n)) * seg.B * U);
}

Matrix reverse_product(std::span<const Matrix> phis, std::size_t a, std::size_t b) {
    if (a < 1 || a > b || b > phis.size()) {
        throw RangeError("reverse_product: need 1 <= a <= b <= " + std::to_string(phis.size()) + ", got a=" +
                         std::to_string(a) + " b=" + std::to_string(b));
    }
    Matrix product = phis[a - 1];
    for (std::size_t j = a + 1; j <= b; ++j) {
        if (phis[j - 1].cols() != product.rows()) {
            throw DimensionError("reverse_product: dimension mismatch");
        }
        product = phis[j - 1] * product;
    }
    return product;
}

Matrix reverse_product(std::span<const SegmentMap> maps, std::size_t a, std::size_t b) {
    std::vector<Matrix> phis;
    phis.reserve(maps.size());
    for (const auto& m : maps) {
        phis.push_back(m.Phi);
    }
    return reverse_product(std::span<const Matrix>(phis), a, b);
}

std::vector<Vector> propagate(const Schedule& schedule, const Vector& X0) {
    if (X0.size() != schedule.state_dim()) {
        throw DimensionError("propagate: initial state has wrong length");
    }
    std::vector<Vector> states;
    states.reserve(schedule.size());
    Vector x = X0;
    for (const auto& m : schedule.maps()) {
        x = m.Phi * x + m.Gamma;
        states.push_back(x);
    }
    return states;
}

Vector closed_form_state(const Schedule& schedule, const Vector& X0) {
    if (X0.size() != schedule.state_dim()) {
        throw DimensionError("closed_form_state: initial state has wrong length");
    }
    const auto n = schedule.size();
    std::span<const SegmentMap> maps(schedule.maps());
    return reverse_product(maps, 1, n) * X0 + periodic_forcing(schedule);
}

Matrix monodromy(const Schedule& schedule) {
    return reverse_product(std::span<const SegmentMap>(schedule.maps()), 1, schedule.size());
}

Vector periodic_forcing(const Schedule& schedule) {
    const auto n = schedule.size();
    std::span<const SegmentMap> maps(schedule.maps());
    Vector sum = maps[n - 1].Gamma;
    for (std::size_t i = 1; i < n; ++i) {
        sum += reverse_product(maps, i + 1, n) * maps[i - 1].Gamma;
    }
    return sum;
}

Vector solve_guarded(const Matrix& M, const Vector& rhs, const Matrix& transition, const Tolerances& tol,
                     const char* what) {
    const Eigen::PartialPivLU<Matrix> lu(M);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > tol.condition_limit) {
        auto ev = eigenvalues(transition);
        std::ostringstream msg;
        msg << what << ": marginal system (condition estimate "
            << (rcond > 0.0 ? 1.0 / rcond : INFINITY) << "), transition eigenvalues:";
        for (const auto& l : ev) {
            msg << ' ' << l.real() << (l.imag() < 0 ? "" : "+") << l.imag() << 'j';
        }
        throw MarginalSystemError(msg.str(), std::move(ev), rcond > 0.0 ? 1.0 / rcond : INFINITY);
    }
    return lu.solve(rhs);
}

Vector solve_periodic_fixed_point(const Schedule& schedule, const Tolerances& tol) {
    const Matrix Pi = monodromy(schedule);
    const auto n = Pi.rows();
    return solve_guarded(Matrix::Identity(n, n) - Pi, periodic_forcing(schedule), Pi, tol,
                         "solve_periodic_fixed_point");
}

}  // namespace dabss
