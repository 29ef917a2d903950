#pragma once

namespace dabss {

/// Numerical thresholds shared by solvers and identity checks.
///
/// Equality assertions use `|a - b| <= rel * scale + abs_floor`; the tighter
/// `identity` bound applies to relations that hold to rounding error
/// (conjugacy under sign flips, resolvent similarity, dual-path evaluations).
struct Tolerances {
    double rel = 1e-10;
    double abs_floor = 1e-14;
    double identity = 1e-12;
    /// Condition estimate of a fixed-point system above which it is reported as marginal.
    double condition_limit = 1e12;
    /// Minimum distance from z to any eigenvalue before the resolvent is treated as singular.
    double resolvent_guard = 1e-12;
};

}  // namespace dabss
