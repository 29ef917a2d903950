#include "dabss/small_signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

constexpr std::array<SurfaceInfo, 4> kSurfaces = {{
    {"P+", 1, 2, -1},
    {"S+", 2, 3, +1},
    {"P-", 3, 4, -1},
    {"S-", 4, 1, +1},
}};

std::size_t index_of(Surface s) { return static_cast<std::size_t>(s); }

ComplexMatrix shifted(const Matrix& Phi, Complex z) {
    const auto n = Phi.rows();
    return z * ComplexMatrix::Identity(n, n) - Phi.cast<Complex>();
}

}  // namespace

SurfaceInfo surface_info(Surface s) { return kSurfaces.at(index_of(s)); }

std::string_view to_string(Surface s) { return surface_info(s).label; }

Surface parse_surface(std::string_view label) {
    for (auto s : kAllSurfaces) {
        if (surface_info(s).label == label) {
            return s;
        }
    }
    throw ParameterError("unknown surface '" + std::string(label) + "' (expected P+, S+, P- or S-)");
}

int SmallSignalOptions::rho(Surface s) const {
    if (const auto& forced = unsafe_polarity.at(index_of(s))) {
        if (*forced != 1 && *forced != -1) {
            throw ParameterError("polarity override must be +1 or -1");
        }
        return *forced;
    }
    return surface_info(s).rho;
}

ComplexVector HalfCycleModel::b_vector(Complex z) const {
    return beta_minus.cast<Complex>() + z * beta_plus.cast<Complex>();
}

HalfCycleModel build_half_cycle(const DabSchedule& dab, Surface surface, const SmallSignalOptions& opt) {
    const auto info = surface_info(surface);
    const Matrix Dr = SymmetryConstants::Dr();
    const auto& seg_a = dab.segment(info.a);
    const auto& seg_b = dab.segment(info.b);
    const auto& map_a = dab.map(info.a);
    const auto& map_b = dab.map(info.b);
    const Vector& U = dab.input();

    HalfCycleModel m;
    m.surface = surface;
    m.a = info.a;
    m.b = info.b;
    m.rho = opt.rho(surface);
    m.Ta = seg_a.T;
    m.Tb = seg_b.T;
    m.Th = dab.half_period();
    if (!(std::abs(m.Ta + m.Tb - m.Th) <= 1e-12 * m.Th)) {
        throw ParameterError("surface " + std::string(info.label) + ": T_a + T_b = " +
                             std::to_string(m.Ta + m.Tb) + " s differs from T_h = " + std::to_string(m.Th) + " s");
    }

    m.Phi_ab = Dr * map_b.Phi * map_a.Phi;
    m.g_ab = Dr * (map_b.Phi * map_a.Gamma + map_b.Gamma);
    const auto n = m.Phi_ab.rows();
    m.x_star = solve_guarded(Matrix::Identity(n, n) - m.Phi_ab, m.g_ab, m.Phi_ab, opt.tol, "build_half_cycle");
    m.x_a_end = map_a.Phi * m.x_star + map_a.Gamma;
    m.x_b_end = map_b.Phi * m.x_a_end + map_b.Gamma;

    m.eta_a = Dr * map_b.Phi * (seg_a.A * m.x_a_end + seg_a.B * U);
    m.eta_b = Dr * (seg_b.A * m.x_b_end + seg_b.B * U);
    m.kappa = m.Th / dab.params.Vr;
    m.beta_minus = m.rho * m.kappa * m.eta_a;
    m.beta_plus = -m.rho * m.kappa * m.eta_b;
    m.poles = eigenvalues(m.Phi_ab);
    return m;
}

ComplexVector resolvent_apply(const HalfCycleModel& model, Complex z, const ComplexVector& v, double guard) {
    for (const auto& p : model.poles) {
        if (std::abs(z - p) <= guard) {
            throw ResolventSingularityError("resolvent: z = " + std::to_string(z.real()) + "+" +
                                            std::to_string(z.imag()) + "j coincides with a pole of the " +
                                            std::string(to_string(model.surface)) + " half-cycle map");
        }
    }
    return shifted(model.Phi_ab, z).partialPivLu().solve(v);
}

ComplexVector H_fix(const HalfCycleModel& model, const Matrix& C_phys, Complex z, double guard) {
    return C_phys.cast<Complex>() * resolvent_apply(model, z, model.b_vector(z), guard);
}

ComplexVector H_sc(const HalfCycleModel& model, const Matrix& C_phys, Complex z, double guard) {
    const ComplexVector beta_sc = (model.beta_minus + model.beta_plus).cast<Complex>();
    return C_phys.cast<Complex>() * resolvent_apply(model, z, beta_sc, guard);
}

ComplexVector delta_H(const HalfCycleModel& model, const Matrix& C_phys, Complex z, const Tolerances& tol) {
    const ComplexVector closed =
        C_phys.cast<Complex>() *
        resolvent_apply(model, z, (z - 1.0) * model.beta_plus.cast<Complex>(), tol.resolvent_guard);
    const ComplexVector fix = H_fix(model, C_phys, z, tol.resolvent_guard);
    const ComplexVector sc = H_sc(model, C_phys, z, tol.resolvent_guard);
    const double scale = std::max(fix.norm(), sc.norm());
    const double mismatch = (closed - (fix - sc)).norm();
    if (mismatch > tol.identity * scale + tol.abs_floor) {
        throw IdentityError("delta_H: closed form and H_fix - H_sc differ by " + std::to_string(mismatch));
    }
    return closed;
}

Complex frequency_to_z(double f_hz, double Th) {
    return std::polar(1.0, 2.0 * std::numbers::pi * f_hz * Th);
}

double delta_H_bound(const HalfCycleModel& model, const Matrix& C_phys, double f_hz) {
    const Complex z = frequency_to_z(f_hz, model.Th);
    const double omega_th = 2.0 * std::numbers::pi * f_hz * model.Th;
    const ComplexMatrix R = shifted(model.Phi_ab, z).inverse();
    return 2.0 * std::abs(std::sin(omega_th / 2.0)) * norm2(C_phys) * norm2(R) * model.beta_plus.norm();
}

double resolvent_similarity_residual(const Matrix& T, const Matrix& A, Complex z) {
    const auto lu = T.partialPivLu();
    const Matrix Tinv = lu.inverse();
    const ComplexMatrix lhs = shifted(Tinv * A * T, z).inverse();
    const ComplexMatrix rhs = Tinv.cast<Complex>() * shifted(A, z).inverse() * T.cast<Complex>();
    return (lhs - rhs).norm() / lhs.norm();
}

std::vector<Complex> unit_circle_grid(std::size_t n) {
    std::vector<Complex> grid;
    grid.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid.push_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
    }
    return grid;
}

SurfaceEquivalence verify_surface_equivalence(const DabSchedule& dab, SurfacePair pair,
                                              std::span<const Complex> z_grid, const SmallSignalOptions& opt) {
    const Surface p_surface = pair == SurfacePair::Plus ? Surface::PPlus : Surface::PMinus;
    const Surface s_surface = pair == SurfacePair::Plus ? Surface::SPlus : Surface::SMinus;
    const Matrix& T = dab.map(pair == SurfacePair::Plus ? 1 : 3).Phi;
    const std::string tag = std::string(to_string(p_surface)) + "<->" + std::string(to_string(s_surface));

    const auto lu = T.partialPivLu();
    if (!(lu.rcond() > 1e-14)) {
        throw SimilarityTransformError(tag + ": similarity transform is singular");
    }
    const Matrix Tinv = lu.inverse();
    const ComplexMatrix Tinv_c = Tinv.cast<Complex>();
    const ComplexMatrix C = dab.C_phys.cast<Complex>();

    const HalfCycleModel mp = build_half_cycle(dab, p_surface, opt);
    const HalfCycleModel ms = build_half_cycle(dab, s_surface, opt);

    SurfaceEquivalence out;
    const double phi_residual = (Tinv * ms.Phi_ab * T - mp.Phi_ab).cwiseAbs().maxCoeff();
    out.report.add(tag + " Phi similarity", phi_residual, opt.tol.identity);

    double h_residual = 0.0;
    for (const Complex z : z_grid) {
        const ComplexVector bp = mp.b_vector(z);
        const ComplexVector bs = Tinv_c * ms.b_vector(z);
        const double b_scale = std::max({bp.norm(), bs.norm(), 1e-300});
        out.b_residual = std::max(out.b_residual, (bp - bs).norm() / b_scale);
        out.b_flipped_residual = std::max(out.b_flipped_residual, (bp + bs).norm() / b_scale);

        const ComplexVector hp = H_fix(mp, dab.C_phys, z, opt.tol.resolvent_guard);
        const ComplexVector hs =
            (C * Tinv_c) * resolvent_apply(ms, z, ms.b_vector(z), opt.tol.resolvent_guard);
        h_residual = std::max(h_residual, relative_deviation(hp, hs));
    }
    out.sign_mismatch = out.b_residual > opt.tol.rel && out.b_flipped_residual <= opt.tol.rel;

    std::string b_note = "sign-flipped residual " + std::to_string(out.b_flipped_residual);
    if (out.sign_mismatch) {
        b_note = "global sign mismatch: relation holds only as b_p = -T^-1 b_s";
    }
    out.report.add(tag + " b-vector similarity", out.b_residual, opt.tol.rel, std::move(b_note));
    out.report.add(tag + " transfer chain", h_residual, opt.tol.rel);
    return out;
}

std::vector<double> sweep_frequencies(double f_min, double f_max, std::size_t n_points, Spacing spacing) {
    if (!(f_min > 0.0) || !(f_max > f_min) || !std::isfinite(f_max)) {
        throw ParameterError("sweep: need 0 < f_min < f_max");
    }
    if (n_points < 2) {
        throw ParameterError("sweep: need at least 2 points");
    }
    std::vector<double> f(n_points);
    const double last = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / last;
        f[i] = spacing == Spacing::Log ? f_min * std::pow(f_max / f_min, t) : f_min + t * (f_max - f_min);
    }
    f.front() = f_min;
    f.back() = f_max;
    return f;
}

std::vector<FrequencyResponseRow> bode_sweep(const DabSchedule& dab, Surface surface, ModelKind kind,
                                             double f_min, double f_max, std::size_t n_points, Spacing spacing,
                                             const SmallSignalOptions& opt) {
    const double nyquist = 1.0 / (2.0 * dab.half_period());
    if (f_max > nyquist * (1.0 + 1e-12)) {
        throw ParameterError("sweep: f_max " + std::to_string(f_max) + " Hz exceeds 1/(2 T_h) = " +
                             std::to_string(nyquist) + " Hz");
    }
    const auto freqs = sweep_frequencies(f_min, f_max, n_points, spacing);
    const HalfCycleModel model = build_half_cycle(dab, surface, opt);

    std::vector<FrequencyResponseRow> rows;
    rows.reserve(freqs.size());
    for (const double f : freqs) {
        FrequencyResponseRow row;
        row.f = f;
        const Complex z = frequency_to_z(f, model.Th);
        try {
            const ComplexVector H = kind == ModelKind::Fix ? H_fix(model, dab.C_phys, z, opt.tol.resolvent_guard)
                                                           : H_sc(model, dab.C_phys, z, opt.tol.resolvent_guard);
            row.H_irec = H(0);
            row.H_vout = H(1);
        } catch (const ResolventSingularityError&) {
            row.singular = true;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dabss
