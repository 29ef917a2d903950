#include "dabss/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dabss/config.hpp"
#include "dabss/dab_model.hpp"
#include "dabss/errors.hpp"
#include "dabss/oracle.hpp"
#include "dabss/pwlti.hpp"
#include "dabss/small_signal.hpp"
#include "dabss/version.hpp"

namespace dabss::cli {

namespace {

constexpr std::size_t kVerifyGridPoints = 64;

// Maps library errors onto the exit-code contract.
int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const MarginalSystemError& e) {
        err << "error: " << e.what() << '\n';
        return kMarginalSystem;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const AmplitudeError& e) {
        err << "error: " << e.what() << '\n';
        return kAmplitude;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}

Surface surface_arg(const std::string& label) {
    try {
        return parse_surface(label);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

double steady_residual(const Schedule& schedule, const Vector& x) {
    return (closed_form_state(schedule, x) - x).norm() / (1.0 + x.norm());
}

void add_half_cycle_checks(IdentityReport& report, const DabSchedule& dab, const Tolerances& tol) {
    const Vector full = solve_periodic_fixed_point(dab.schedule, tol);
    const Vector half = solve_half_cycle(dab, tol);
    const auto states = propagate(dab.schedule, half);
    const Matrix Dp = SymmetryConstants::Dprime();
    const double scale = 1.0 + full.norm();
    report.add("half-cycle X0 = full-period X*", (half - full).norm() / scale, tol.rel);
    report.add("four-step closure X4 = X0", (states[3] - half).norm() / (1.0 + half.norm()), tol.rel);
    report.add("mid-cycle X2 = D' X0", (states[1] - Dp * half).norm() / (1.0 + half.norm()), tol.rel);
}

void add_resolvent_checks(IdentityReport& report, const DabSchedule& dab, const SmallSignalOptions& opt,
                          std::span<const Complex> grid) {
    const std::pair<int, Surface> cases[] = {{1, Surface::SPlus}, {3, Surface::SMinus}};
    for (const auto& [t_index, surface] : cases) {
        const std::string name = "resolvent similarity T=Phi" + std::to_string(t_index) + ", A=Phi(" +
                                 std::string(to_string(surface)) + ")";
        const HalfCycleModel m = build_half_cycle(dab, surface, opt);
        double worst = 0.0;
        for (const Complex z : grid) {
            worst = std::max(worst, resolvent_similarity_residual(dab.map(t_index).Phi, m.Phi_ab, z));
        }
        report.add(name, worst, opt.tol.identity);
    }
}

void add_delta_h_checks(IdentityReport& report, const DabSchedule& dab, const SmallSignalOptions& opt,
                        std::size_t grid_points) {
    for (const auto surface : kAllSurfaces) {
        const std::string label(to_string(surface));
        const HalfCycleModel m = build_half_cycle(dab, surface, opt);
        const ComplexMatrix C = dab.C_phys.cast<Complex>();
        double path_dev = 0.0;
        double bound_excess = 0.0;
        for (std::size_t k = 0; k < grid_points; ++k) {
            // f over (0, 1/(2 T_h)], z = e^{j 2 pi f T_h}
            const double f = (static_cast<double>(k) + 1.0) / static_cast<double>(grid_points) / (2.0 * m.Th);
            const Complex z = frequency_to_z(f, m.Th);
            const ComplexVector closed =
                C * resolvent_apply(m, z, (z - 1.0) * m.beta_plus.cast<Complex>(), opt.tol.resolvent_guard);
            const ComplexVector fix = H_fix(m, dab.C_phys, z, opt.tol.resolvent_guard);
            const ComplexVector sc = H_sc(m, dab.C_phys, z, opt.tol.resolvent_guard);
            path_dev = std::max(path_dev, (closed - (fix - sc)).norm() / std::max(fix.norm(), sc.norm()));
            const double bound = delta_H_bound(m, dab.C_phys, f);
            bound_excess = std::max(bound_excess, (closed.norm() - bound) / bound);
        }
        const double at_one = delta_H(m, dab.C_phys, Complex(1.0, 0.0), opt.tol).norm();
        report.add("dH dual path " + label, path_dev, opt.tol.identity);
        report.add("dH(1) = 0 " + label, at_one, 0.0);
        report.add("dH bound " + label, std::max(0.0, bound_excess), opt.tol.identity);
    }
}

// Runs one suite; a throw becomes a failed entry so the rest still report.
void run_suite(IdentityReport& report, const std::string& name, const std::function<void(IdentityReport&)>& suite) {
    try {
        suite(report);
    } catch (const std::exception& e) {
        report.checks.push_back({name, INFINITY, 0.0, false, e.what()});
    }
}

std::string csv_cell(double v, bool blank) { return blank ? std::string() : format_number(v); }

std::string bode_row(const FrequencyResponseRow& row) {
    std::string line = format_number(row.f);
    line += ',' + csv_cell(magnitude_db(row.H_irec), row.singular);
    line += ',' + csv_cell(phase_deg(row.H_irec), row.singular);
    line += ',' + csv_cell(magnitude_db(row.H_vout), row.singular);
    line += ',' + csv_cell(phase_deg(row.H_vout), row.singular);
    return line;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double magnitude_db(std::complex<double> h) { return 20.0 * std::log10(std::abs(h)); }

double phase_deg(std::complex<double> h) {
    double deg = std::arg(h) * 180.0 / std::numbers::pi;
    if (deg <= -180.0) {
        deg += 360.0;
    }
    return deg;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move output into '" + path + "': " + ec.message());
    }
}

int cmd_steady_state(const std::string& config_path, const std::string& method, const std::string& out_path,
                     std::ostream& err) {
    return run_guarded(err, [&] {
        if (method != "full" && method != "half") {
            throw ConfigError("--method must be 'full' or 'half', got '" + method + "'");
        }
        const AppConfig cfg = load_config(config_path);
        const DabSchedule dab = build_dab(cfg.converter, cfg.overrides);
        const Matrix Pi = monodromy(dab.schedule);

        const Vector full = solve_periodic_fixed_point(dab.schedule, cfg.tolerances);
        const Vector half = solve_half_cycle(dab, cfg.tolerances);
        const Vector& x = method == "full" ? full : half;

        nlohmann::ordered_json doc;
        doc["method"] = method;
        doc["x_star"] = {x(0), x(1)};
        doc["residual"] = steady_residual(dab.schedule, x);
        auto eig = nlohmann::ordered_json::array();
        for (const auto& l : eigenvalues(Pi)) {
            eig.push_back({l.real(), l.imag()});
        }
        doc["eigenvalues_of_Pi"] = eig;
        doc["spectral_radius"] = spectral_radius(Pi);
        doc["full_vs_half_deviation"] = (full - half).norm() / (1.0 + full.norm());
        doc["version"] = std::string(kVersion);
        write_file_atomic(out_path, doc.dump(2) + "\n");
        return static_cast<int>(kOk);
    });
}

int cmd_verify(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const AppConfig cfg = load_config(config_path);
        const DabSchedule dab = build_dab(cfg.converter, cfg.overrides);
        const SmallSignalOptions opt = cfg.small_signal_options();
        const Tolerances& tol = cfg.tolerances;
        const auto grid = unit_circle_grid(kVerifyGridPoints);

        IdentityReport report;
        report.append(check_construction(dab));
        report.append(verify_symmetry(dab, tol.identity));
        run_suite(report, "half-cycle fixed point", [&](IdentityReport& r) { add_half_cycle_checks(r, dab, tol); });
        run_suite(report, "resolvent similarity", [&](IdentityReport& r) { add_resolvent_checks(r, dab, opt, grid); });
        for (const auto pair : {SurfacePair::Plus, SurfacePair::Minus}) {
            const std::string name = pair == SurfacePair::Plus ? "P+<->S+ equivalence" : "P-<->S- equivalence";
            run_suite(report, name, [&](IdentityReport& r) {
                r.append(verify_surface_equivalence(dab, pair, grid, opt).report);
            });
        }
        run_suite(report, "dH identity", [&](IdentityReport& r) { add_delta_h_checks(r, dab, opt, kVerifyGridPoints); });

        char line[256];
        std::snprintf(line, sizeof line, "%-48s %14s %10s  %s\n", "identity", "max residual", "tolerance", "result");
        out << line;
        std::size_t passed = 0;
        for (const auto& c : report.checks) {
            std::snprintf(line, sizeof line, "%-48s %14.3e %10.1e  %s", c.name.c_str(), c.residual, c.tolerance,
                          c.passed ? "PASS" : "FAIL");
            out << line;
            if (!c.note.empty()) {
                out << "  (" << c.note << ')';
            }
            out << '\n';
            passed += c.passed ? 1 : 0;
        }
        out << passed << '/' << report.checks.size() << " identities passed\n";
        for (const auto& c : report.checks) {
            if (!c.passed) {
                err << "FAILED: " << c.name << (c.note.empty() ? "" : " - " + c.note) << '\n';
            }
        }
        return static_cast<int>(report.passed() ? kOk : kCheckFailed);
    });
}

int cmd_bode(const std::string& config_path, const std::string& surface, const std::string& model,
             const std::string& out_path, std::ostream& err) {
    return run_guarded(err, [&] {
        if (model != "fix" && model != "sc" && model != "both") {
            throw ConfigError("--model must be 'fix', 'sc' or 'both', got '" + model + "'");
        }
        const Surface s = surface_arg(surface);
        const AppConfig cfg = load_config(config_path);
        const DabSchedule dab = build_dab(cfg.converter, cfg.overrides);
        const SmallSignalOptions opt = cfg.small_signal_options();
        const double f_min = cfg.sweep.lower(cfg.converter);
        const double f_max = cfg.sweep.upper(cfg.converter);

        auto sweep = [&](ModelKind kind) {
            return bode_sweep(dab, s, kind, f_min, f_max, cfg.sweep.points, cfg.sweep.spacing, opt);
        };
        std::ostringstream csv;
        csv << "f_hz,mag_db_irec,phase_deg_irec,mag_db_vout,phase_deg_vout" << (model == "both" ? ",model" : "")
            << '\n';
        std::vector<FrequencyResponseRow> fix;
        std::vector<FrequencyResponseRow> sc;
        if (model != "sc") {
            fix = sweep(ModelKind::Fix);
        }
        if (model != "fix") {
            sc = sweep(ModelKind::SameCycle);
        }
        const std::size_t n = std::max(fix.size(), sc.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!fix.empty()) {
                csv << bode_row(fix[i]) << (model == "both" ? ",fix" : "") << '\n';
                if (fix[i].singular) {
                    err << "warning: resolvent singular at f = " << format_number(fix[i].f) << " Hz (fix)\n";
                }
            }
            if (!sc.empty()) {
                csv << bode_row(sc[i]) << (model == "both" ? ",sc" : "") << '\n';
                if (sc[i].singular) {
                    err << "warning: resolvent singular at f = " << format_number(sc[i].f) << " Hz (sc)\n";
                }
            }
        }
        write_file_atomic(out_path, csv.str());
        return static_cast<int>(kOk);
    });
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::ostream& err) {
    return run_guarded(err, [&] {
        const AppConfig cfg = load_config(config_path);
        const DabSchedule dab = build_dab(cfg.converter, cfg.overrides);
        const SteadyStateRun run = run_to_steady_state(dab, cfg.sim);
        std::ostringstream csv;
        csv << "t,i_L,v_C,i_rec,v_out\n";
        const auto& w = run.waveform;
        for (std::size_t i = 0; i < w.t.size(); ++i) {
            csv << format_number(w.t[i]) << ',' << format_number(w.x[i](0)) << ',' << format_number(w.x[i](1)) << ','
                << format_number(w.y[i](0)) << ',' << format_number(w.y[i](1)) << '\n';
        }
        write_file_atomic(out_path, csv.str());
        err << "converged after " << run.periods << " periods (residual " << format_number(run.residual) << ")\n";
        return static_cast<int>(kOk);
    });
}

int cmd_compare(const std::string& config_path, const std::string& surface, const std::string& out_path,
                std::ostream& err) {
    return run_guarded(err, [&] {
        const Surface s = surface_arg(surface);
        const AppConfig cfg = load_config(config_path);
        const DabSchedule dab = build_dab(cfg.converter, cfg.overrides);
        const SmallSignalOptions opt = cfg.small_signal_options();
        const double Ts = dab.params.period();

        const Vector x_model = solve_periodic_fixed_point(dab.schedule, cfg.tolerances);
        const SteadyStateRun run = run_to_steady_state(dab, cfg.sim);
        const double steady_dev = relative_deviation(run.x0, x_model);

        SimConfig sim = cfg.sim;
        const InjectionConfig base = sim.injection.value_or(InjectionConfig{});
        const HalfCycleModel model = build_half_cycle(dab, s, opt);
        const auto requested = sweep_frequencies(cfg.sweep.lower(cfg.converter), cfg.sweep.upper(cfg.converter),
                                                 cfg.sweep.points, cfg.sweep.spacing);

        std::ostringstream csv;
        csv << "# steady_state_rel_deviation," << format_number(steady_dev) << '\n';
        csv << "f_hz,model_mag_db_irec,model_phase_deg_irec,oracle_mag_db_irec,oracle_phase_deg_irec,"
               "mag_ratio_irec,phase_diff_deg_irec,model_mag_db_vout,model_phase_deg_vout,oracle_mag_db_vout,"
               "oracle_phase_deg_vout,mag_ratio_vout,phase_diff_deg_vout\n";
        double last_f = 0.0;
        for (const double f_req : requested) {
            const double f = coherent_frequency(f_req, base.measure_periods, Ts);
            if (f <= last_f) {
                continue;
            }
            last_f = f;
            InjectionConfig inj = base;
            inj.f = f;
            sim.injection = inj;
            const FrequencyMeasurement meas = measure_frequency_response(dab, s, sim, opt);
            const ComplexVector H = H_fix(model, dab.C_phys, frequency_to_z(f, model.Th), opt.tol.resolvent_guard);
            csv << format_number(f);
            for (int ch = 0; ch < 2; ++ch) {
                const Complex hm = H(ch);
                const Complex ho = meas.gain(ch);
                csv << ',' << format_number(magnitude_db(hm)) << ',' << format_number(phase_deg(hm)) << ','
                    << format_number(magnitude_db(ho)) << ',' << format_number(phase_deg(ho)) << ','
                    << format_number(std::abs(ho) / std::abs(hm)) << ',' << format_number(phase_deg(ho / hm));
            }
            csv << '\n';
        }
        write_file_atomic(out_path, csv.str());
        err << "steady-state relative deviation " << format_number(steady_dev) << '\n';
        return static_cast<int>(kOk);
    });
}

}  // namespace dabss::cli
