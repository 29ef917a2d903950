#include "dabss/dab_model.hpp"

#include <cmath>
#include <string>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ParameterError(std::string("DabParams: ") + what);
    }
}

Matrix diag2(double a, double b) {
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = a;
    M(1, 1) = b;
    return M;
}

double rel_residual(const Matrix& diff, double scale) {
    return diff.norm() / (1.0 + scale);
}

}  // namespace

void DabParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(n_turns) && n_turns > 0.0, "n_turns must be > 0");
    require(finite(L) && L > 0.0, "L must be > 0");
    require(finite(Co) && Co > 0.0, "Co must be > 0");
    require(finite(Ro) && Ro > 0.0, "Ro must be > 0");
    require(finite(Vr) && Vr > 0.0, "Vr must be > 0");
    require(finite(fs) && fs > 0.0, "fs must be > 0");
    require(finite(Rt) && Rt >= 0.0, "Rt must be >= 0");
    require(finite(Rc) && Rc >= 0.0, "Rc must be >= 0");
    require(finite(Vin), "Vin must be finite");
    require(finite(D_phase) && D_phase > 0.0 && D_phase < 1.0, "D_phase must lie in (0, 1)");
}

Matrix SymmetryConstants::S() { return diag2(1.0, -1.0); }
Matrix SymmetryConstants::Dprime() { return diag2(-1.0, 1.0); }
Matrix SymmetryConstants::Dr() { return diag2(-1.0, 1.0); }

Matrix dab_a1(const DabParams& p) {
    const double n = p.n_turns;
    const double rsum = p.Ro + p.Rc;
    Matrix A(2, 2);
    A(0, 0) = -(n * n * p.Rt + p.Ro * p.Rc / rsum) / (n * n * p.L);
    A(0, 1) = p.Ro / (n * p.L * rsum);
    A(1, 0) = -p.Ro / (n * p.Co * rsum);
    A(1, 1) = -1.0 / (p.Co * rsum);
    return A;
}

DabSchedule build_dab(const DabParams& params, const DabOverrides& overrides) {
    params.validate();
    const double n = params.n_turns;
    const double rsum = params.Ro + params.Rc;
    const double r_par = params.Rc * params.Ro / rsum;
    const double Th = params.half_period();

    const Matrix A1 = dab_a1(params);
    Matrix A2 = A1;
    A2(0, 1) = -A1(0, 1);
    A2(1, 0) = -A1(1, 0);

    Matrix B1(2, 1);
    B1 << 1.0 / params.L, 0.0;
    const Matrix B3 = -B1;

    const double T13 = params.D_phase * Th;
    const double T24 = (1.0 - params.D_phase) * Th;
    double T3 = T13;
    if (overrides.t3) {
        if (!std::isfinite(*overrides.t3) || *overrides.t3 < 0.0) {
            throw ParameterError("override t3 must be a finite non-negative duration");
        }
        T3 = *overrides.t3;
    }

    std::vector<Segment> segs{{A1, B1, T13}, {A2, B1, T24}, {A2, B3, T3}, {A1, B3, T24}};
    Vector U(1);
    U << params.Vin;

    Matrix C1(2, 2);
    C1 << -1.0 / n, 0.0, -r_par / n, params.Ro / rsum;
    Matrix C2(2, 2);
    C2 << 1.0 / n, 0.0, r_par / n, params.Ro / rsum;
    Matrix C_phys(2, 2);
    C_phys << 1.0 / n, 0.0, r_par / n, params.Ro / rsum;

    if (overrides.t3) {
        return DabSchedule{params, Schedule(std::move(segs), std::move(U)), {C1, C2, C2, C1}, C_phys};
    }
    return DabSchedule{params, Schedule(std::move(segs), std::move(U), params.period()), {C1, C2, C2, C1},
                       C_phys};
}

IdentityReport check_construction(const DabSchedule& dab, double tolerance) {
    const Matrix S = SymmetryConstants::S();
    const auto& s1 = dab.segment(1);
    const auto& s2 = dab.segment(2);
    const auto& s3 = dab.segment(3);
    const auto& s4 = dab.segment(4);
    const double a_scale = s1.A.norm();
    const double b_scale = s1.B.norm();
    const double t_scale = dab.half_period();

    IdentityReport r;
    r.add("A4 = A1", (s4.A - s1.A).norm() / a_scale, tolerance);
    r.add("A2 = S A1 S", (s2.A - S * s1.A * S).norm() / a_scale, tolerance);
    r.add("A3 = S A1 S", (s3.A - S * s1.A * S).norm() / a_scale, tolerance);
    r.add("B2 = B1", (s2.B - s1.B).norm() / b_scale, tolerance);
    r.add("B3 = -B1", (s3.B + s1.B).norm() / b_scale, tolerance);
    r.add("B4 = -B1", (s4.B + s1.B).norm() / b_scale, tolerance);
    r.add("T3 = T1", std::abs(s3.T - s1.T) / t_scale, tolerance);
    r.add("T4 = T2", std::abs(s4.T - s2.T) / t_scale, tolerance);
    return r;
}

IdentityReport verify_symmetry(const DabSchedule& dab, double tolerance) {
    const Matrix S = SymmetryConstants::S();
    const Matrix Dr = SymmetryConstants::Dr();
    const auto& m1 = dab.map(1);
    const auto& m2 = dab.map(2);
    const auto& m3 = dab.map(3);
    const auto& m4 = dab.map(4);

    IdentityReport r;
    r.add("Phi3 = S Phi1 S", rel_residual(m3.Phi - S * m1.Phi * S, m1.Phi.norm()), tolerance);
    r.add("Phi4 = S Phi2 S", rel_residual(m4.Phi - S * m2.Phi * S, m2.Phi.norm()), tolerance);
    r.add("Gamma3 = -S Gamma1", rel_residual(m3.Gamma + S * m1.Gamma, m1.Gamma.norm()), tolerance);
    r.add("Gamma4 = -S Gamma2", rel_residual(m4.Gamma + S * m2.Gamma, m2.Gamma.norm()), tolerance);
    r.add("Phi3 = Dr Phi1 Dr", rel_residual(m3.Phi - Dr * m1.Phi * Dr, m1.Phi.norm()), tolerance);
    r.add("Phi4 = Dr Phi2 Dr", rel_residual(m4.Phi - Dr * m2.Phi * Dr, m2.Phi.norm()), tolerance);
    return r;
}

Vector solve_half_cycle(const DabSchedule& dab, const Tolerances& tol) {
    const auto& m1 = dab.map(1);
    const auto& m2 = dab.map(2);
    const Matrix Dp = SymmetryConstants::Dprime();
    const Matrix half = m2.Phi * m1.Phi;
    const Vector forcing = m2.Phi * m1.Gamma + m2.Gamma;
    return solve_guarded(Dp - half, forcing, Dp * half, tol, "solve_half_cycle");
}

Vector output(const DabSchedule& dab, const Vector& x, int interval) {
    if (interval < 1 || interval > 4) {
        throw RangeError("output: interval must be in 1..4, got " + std::to_string(interval));
    }
    if (x.size() != 2) {
        throw DimensionError("output: state must have length 2");
    }
    return dab.C[static_cast<std::size_t>(interval - 1)] * x;
}

Vector output_phys(const DabSchedule& dab, const Vector& x) {
    if (x.size() != 2) {
        throw DimensionError("output_phys: state must have length 2");
    }
    return dab.C_phys * x;
}

}  // namespace dabss
