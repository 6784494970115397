#pragma once

// Run configuration: flat "key = value" text with [section] headers. Unknown
// keys are rejected with line context so archived configs stay canonical; a
// resolved copy is written next to every run's outputs.

#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "karman/common.hpp"
#include "karman/kernels.hpp"

namespace karman {

struct RunConfig {
    // [kernel]
    KernelKind kind = KernelKind::euler_log;
    double lambda = 1.0;
    double beta = 0.5;
    // [geometry]
    StreetGeometry geom;
    // [numerics]
    int N = 32;
    int M = 256;
    double tol_newton = 1e-11;
    double tol_sum = 1e-12;
    double eps = 0.05;
    double eps_target = 0.05;
    double dt = 0.0;          // 0 = auto from spacing
    long steps = 200;
    long K = 200;             // point-lattice truncation for the simulator
    int threads = 0;          // 0 = all available
    int gsqg_images = 64;
    // [field] optional sampling window
    double field_x0 = 0.0, field_x1 = 1.0, field_y0 = -1.0, field_y1 = 1.0;
    int field_nx = 0, field_ny = 0;

    RadialKernel kernel() const {
        switch (kind) {
            case KernelKind::euler_log: return RadialKernel::euler();
            case KernelKind::qgsw_bessel: return RadialKernel::qgsw(lambda);
            case KernelKind::gsqg_power: return RadialKernel::gsqg(beta);
        }
        throw config_error("bad kernel kind");
    }

    void validate() const {
        try {
            geom.validate();
            (void)kernel();
        } catch (const error& e) {
            throw config_error(e.what());
        }
        if (N < 1 || M < 4 * N || M % 2 != 0)
            throw config_error("numerics: need N >= 1 and even M >= 4N");
        if (!(tol_newton > 0.0) || !(tol_sum > 0.0))
            throw config_error("numerics: tolerances must be > 0");
        if (!(eps > 0.0) || !(eps_target > 0.0))
            throw config_error("numerics: eps and eps_target must be > 0");
        if (steps < 1 || K < 8) throw config_error("numerics: steps >= 1 and K >= 8");
        if (threads < 0) throw config_error("numerics: threads >= 0");
    }
};

namespace detail {

inline void assign_config(RunConfig& c, const std::string& section, const std::string& key,
                          const std::string& val, int lineno) {
    auto bad = [&](const std::string& why) {
        throw config_error("config line " + std::to_string(lineno) + ": " + why);
    };
    auto num = [&]() {
        try {
            size_t pos = 0;
            double v = std::stod(val, &pos);
            if (pos != val.size()) bad("bad number '" + val + "'");
            return v;
        } catch (const std::exception&) {
            bad("bad number '" + val + "'");
            return 0.0;
        }
    };
    std::string full = section.empty() ? key : section + "." + key;
    if (full == "kernel.kind") {
        if (val == "euler") c.kind = KernelKind::euler_log;
        else if (val == "qgsw") c.kind = KernelKind::qgsw_bessel;
        else if (val == "gsqg") c.kind = KernelKind::gsqg_power;
        else bad("unknown kernel kind '" + val + "' (euler|qgsw|gsqg)");
    } else if (full == "kernel.lambda") c.lambda = num();
    else if (full == "kernel.beta") c.beta = num();
    else if (full == "geometry.l") c.geom.l = num();
    else if (full == "geometry.h") c.geom.h = num();
    else if (full == "geometry.a") c.geom.a = num();
    else if (full == "numerics.N") c.N = static_cast<int>(num());
    else if (full == "numerics.M") c.M = static_cast<int>(num());
    else if (full == "numerics.tol_newton") c.tol_newton = num();
    else if (full == "numerics.tol_sum") c.tol_sum = num();
    else if (full == "numerics.eps") c.eps = num();
    else if (full == "numerics.eps_target") c.eps_target = num();
    else if (full == "numerics.dt") c.dt = num();
    else if (full == "numerics.steps") c.steps = static_cast<long>(num());
    else if (full == "numerics.K") c.K = static_cast<long>(num());
    else if (full == "numerics.threads") c.threads = static_cast<int>(num());
    else if (full == "numerics.gsqg_images") c.gsqg_images = static_cast<int>(num());
    else if (full == "field.x0") c.field_x0 = num();
    else if (full == "field.x1") c.field_x1 = num();
    else if (full == "field.y0") c.field_y0 = num();
    else if (full == "field.y1") c.field_y1 = num();
    else if (full == "field.nx") c.field_nx = static_cast<int>(num());
    else if (full == "field.ny") c.field_ny = static_cast<int>(num());
    else bad("unknown key '" + full + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    auto trim = [](std::string& t) {
        t.erase(0, t.find_first_not_of(" \t"));
        t.erase(t.find_last_not_of(" \t\r") + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config line " + std::to_string(lineno) +
                                   ": malformed section header");
            section = line.substr(1, line.size() - 2);
            trim(section);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        trim(key);
        trim(val);
        detail::assign_config(c, section, key, val, lineno);
    }
    c.validate();
    return c;
}

// Canonical serialization of the resolved configuration.
inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << "\n";
    };
    os << "[kernel]\n";
    os << "kind = " << kernel_name(c.kind) << "\n";
    if (c.kind == KernelKind::qgsw_bessel) put("lambda", c.lambda);
    if (c.kind == KernelKind::gsqg_power) put("beta", c.beta);
    os << "[geometry]\n";
    put("l", c.geom.l);
    put("h", c.geom.h);
    put("a", c.geom.a);
    os << "[numerics]\n";
    os << "N = " << c.N << "\nM = " << c.M << "\n";
    put("tol_newton", c.tol_newton);
    put("tol_sum", c.tol_sum);
    put("eps", c.eps);
    put("eps_target", c.eps_target);
    put("dt", c.dt);
    os << "steps = " << c.steps << "\nK = " << c.K << "\nthreads = " << c.threads
       << "\ngsqg_images = " << c.gsqg_images << "\n";
    if (c.field_nx > 0 && c.field_ny > 0) {
        os << "[field]\n";
        put("x0", c.field_x0);
        put("x1", c.field_x1);
        put("y0", c.field_y0);
        put("y1", c.field_y1);
        os << "nx = " << c.field_nx << "\nny = " << c.field_ny << "\n";
    }
    return os.str();
}

}  // namespace karman
