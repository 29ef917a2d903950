#include "dabss/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

using json = nlohmann::json;

class Reader {
public:
    Reader(const json& node, std::string path, const std::string& source)
        : node_(node), path_(std::move(path)), source_(source) {
        if (!node_.is_object()) {
            fail("must be an object");
        }
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, value] : node_.items()) {
            bool known = false;
            for (auto k : keys) {
                known = known || key == k;
            }
            if (!known) {
                throw ConfigError(source_ + ": unknown key '" + path_ + "." + key + "'");
            }
        }
    }

    [[nodiscard]] bool has(const char* key) const { return node_.contains(key); }

    [[nodiscard]] double number(const char* key) const {
        const json& v = at(key);
        if (!v.is_number()) {
            fail_key(key, "must be a number");
        }
        return v.get<double>();
    }

    [[nodiscard]] long long integer(const char* key) const {
        const json& v = at(key);
        if (!v.is_number_integer()) {
            fail_key(key, "must be an integer");
        }
        return v.get<long long>();
    }

    [[nodiscard]] std::string string(const char* key) const {
        const json& v = at(key);
        if (!v.is_string()) {
            fail_key(key, "must be a string");
        }
        return v.get<std::string>();
    }

    void number_if(const char* key, double& out) const {
        if (has(key)) {
            out = number(key);
        }
    }

    template <typename Int>
    void integer_if(const char* key, Int& out) const {
        if (has(key)) {
            out = static_cast<Int>(integer(key));
        }
    }

    [[nodiscard]] Reader child(const char* key) const { return Reader(at(key), path_ + "." + key, source_); }
    [[nodiscard]] const json& node() const { return node_; }
    [[nodiscard]] const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source_ + ": '" + path_ + "' " + msg); }
    [[noreturn]] void fail_key(const char* key, const std::string& msg) const {
        throw ConfigError(source_ + ": '" + path_ + "." + key + "' " + msg);
    }

private:
    const json& at(const char* key) const {
        if (!node_.contains(key)) {
            fail_key(key, "is required");
        }
        return node_.at(key);
    }

    const json& node_;
    std::string path_;
    const std::string& source_;
};

void read_converter(const Reader& r, DabParams& p) {
    r.allow_only({"n_turns", "L", "Co", "Rt", "Rc", "Ro", "Vin", "fs", "D_phase", "Vr"});
    p.n_turns = r.number("n_turns");
    p.L = r.number("L");
    p.Co = r.number("Co");
    p.Rt = r.number("Rt");
    p.Rc = r.number("Rc");
    p.Ro = r.number("Ro");
    p.Vin = r.number("Vin");
    p.fs = r.number("fs");
    p.D_phase = r.number("D_phase");
    p.Vr = r.number("Vr");
}

void read_sim(const Reader& r, SimConfig& sim) {
    r.allow_only({"periods", "substeps_per_interval", "convergence_tol", "injection"});
    r.integer_if("periods", sim.periods);
    r.integer_if("substeps_per_interval", sim.substeps_per_interval);
    r.number_if("convergence_tol", sim.convergence_tol);
    if (r.has("injection")) {
        const Reader ir = r.child("injection");
        ir.allow_only({"f", "amplitude", "settle_periods", "measure_periods"});
        InjectionConfig inj;
        ir.number_if("f", inj.f);
        if (ir.has("amplitude")) {
            inj.amplitude = ir.number("amplitude");
        }
        ir.integer_if("settle_periods", inj.settle_periods);
        ir.integer_if("measure_periods", inj.measure_periods);
        sim.injection = inj;
    }
}

void read_sweep(const Reader& r, SweepConfig& sweep) {
    r.allow_only({"f_min", "f_max", "points", "spacing"});
    if (r.has("f_min")) {
        sweep.f_min = r.number("f_min");
    }
    if (r.has("f_max")) {
        sweep.f_max = r.number("f_max");
    }
    if (r.has("points")) {
        const long long points = r.integer("points");
        if (points < 2) {
            r.fail_key("points", "must be >= 2");
        }
        sweep.points = static_cast<std::size_t>(points);
    }
    if (r.has("spacing")) {
        const std::string spacing = r.string("spacing");
        if (spacing == "log") {
            sweep.spacing = Spacing::Log;
        } else if (spacing == "linear") {
            sweep.spacing = Spacing::Linear;
        } else {
            r.fail_key("spacing", "must be \"log\" or \"linear\"");
        }
    }
}

void read_tolerances(const Reader& r, Tolerances& tol) {
    r.allow_only({"rel", "abs_floor", "identity", "condition_limit", "resolvent_guard"});
    r.number_if("rel", tol.rel);
    r.number_if("abs_floor", tol.abs_floor);
    r.number_if("identity", tol.identity);
    r.number_if("condition_limit", tol.condition_limit);
    r.number_if("resolvent_guard", tol.resolvent_guard);
}

void read_overrides(const Reader& r, AppConfig& cfg) {
    r.allow_only({"t3", "unsafe_polarity_override"});
    if (r.has("t3")) {
        cfg.overrides.t3 = r.number("t3");
    }
    if (r.has("unsafe_polarity_override")) {
        const Reader pr = r.child("unsafe_polarity_override");
        pr.allow_only({"P+", "S+", "P-", "S-"});
        for (auto s : kAllSurfaces) {
            const std::string label(to_string(s));
            if (pr.has(label.c_str())) {
                const long long rho = pr.integer(label.c_str());
                if (rho != 1 && rho != -1) {
                    pr.fail_key(label.c_str(), "must be +1 or -1");
                }
                cfg.unsafe_polarity.at(static_cast<std::size_t>(s)) = static_cast<int>(rho);
            }
        }
    }
}

}  // namespace

AppConfig parse_config(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }

    AppConfig cfg;
    const Reader root(doc, "$", source);
    root.allow_only({"converter", "sim", "sweep", "tolerances", "overrides"});
    read_converter(root.child("converter"), cfg.converter);
    if (root.has("sim")) {
        read_sim(root.child("sim"), cfg.sim);
    }
    if (root.has("sweep")) {
        read_sweep(root.child("sweep"), cfg.sweep);
    }
    if (root.has("tolerances")) {
        read_tolerances(root.child("tolerances"), cfg.tolerances);
    }
    if (root.has("overrides")) {
        read_overrides(root.child("overrides"), cfg);
    }

    try {
        cfg.converter.validate();
        cfg.sim.validate();
        if (cfg.sim.injection && cfg.sim.injection->f > 0.0) {
            cfg.sim.require_coherent_injection(cfg.converter.period());
        }
    } catch (const ParameterError& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

}  // namespace dabss
