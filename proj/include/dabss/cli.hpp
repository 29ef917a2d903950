#pragma once

#include <complex>
#include <iosfwd>
#include <string>

namespace dabss::cli {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kMarginalSystem = 3,
    kNonConvergence = 4,
    kAmplitude = 5,
};

/// Write the periodic steady state as JSON. `method` is "full" or "half".
int cmd_steady_state(const std::string& config_path, const std::string& method, const std::string& out_path,
                     std::ostream& err);

/// Run every identity suite, print a pass/fail table to `out`.
int cmd_verify(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Write a Bode CSV. `model` is "fix", "sc" or "both"; `surface` one of P+, S+, P-, S-.
int cmd_bode(const std::string& config_path, const std::string& surface, const std::string& model,
             const std::string& out_path, std::ostream& err);

/// Write the converged steady-state period as a waveform CSV.
int cmd_simulate(const std::string& config_path, const std::string& out_path, std::ostream& err);

/// Write model-vs-injection deviations per sweep frequency.
int cmd_compare(const std::string& config_path, const std::string& surface, const std::string& out_path,
                std::ostream& err);

/// 17 significant digits, "%.17g".
[[nodiscard]] std::string format_number(double v);

/// 20 log10 |h|.
[[nodiscard]] double magnitude_db(std::complex<double> h);

/// arg(h) in degrees, principal value in (-180, 180].
[[nodiscard]] double phase_deg(std::complex<double> h);

/// Replace `path` with `content` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dabss::cli
