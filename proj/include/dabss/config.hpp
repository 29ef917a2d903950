#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "dabss/dab_model.hpp"
#include "dabss/oracle.hpp"
#include "dabss/small_signal.hpp"
#include "dabss/tolerances.hpp"

namespace dabss {

struct SweepConfig {
    /// Unset bounds default to fs/1000 and fs/10.
    std::optional<double> f_min;
    std::optional<double> f_max;
    std::size_t points = 50;
    Spacing spacing = Spacing::Log;

    [[nodiscard]] double lower(const DabParams& p) const { return f_min.value_or(p.fs / 1000.0); }
    [[nodiscard]] double upper(const DabParams& p) const { return f_max.value_or(p.fs / 10.0); }
};

/// Everything a CLI command needs, parsed from one JSON document.
///
/// Top-level sections: "converter" (required), "sim", "sweep", "tolerances",
/// "overrides". Unknown keys anywhere are rejected. Units are SI base.
struct AppConfig {
    DabParams converter;
    SimConfig sim;
    SweepConfig sweep;
    Tolerances tolerances;
    DabOverrides overrides;
    std::array<std::optional<int>, 4> unsafe_polarity{};

    [[nodiscard]] SmallSignalOptions small_signal_options() const { return {tolerances, unsafe_polarity}; }
};

/// Parse a config document; `source` names it in error messages.
[[nodiscard]] AppConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Read and parse a config file. Throws ConfigError naming the path on any failure.
[[nodiscard]] AppConfig load_config(const std::string& path);

}  // namespace dabss
