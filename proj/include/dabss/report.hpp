#pragma once

#include <string>
#include <vector>

namespace dabss {

/// Outcome of checking one algebraic identity numerically.
struct IdentityCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;

    void add(std::string name, double residual, double tolerance, std::string note = {}) {
        const bool ok = residual <= tolerance;
        checks.push_back({std::move(name), residual, tolerance, ok, std::move(note)});
    }

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] const IdentityCheck* find(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }

    void append(const IdentityReport& other) {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
};

}  // namespace dabss
