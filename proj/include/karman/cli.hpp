#pragma once

// Batch front-end: subcommands over a RunConfig file. Every run writes its
// resolved configuration next to its outputs. Exit codes: 0 success,
// 2 config error, 3 convergence failure, 4 internal assertion.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "karman/config.hpp"
#include "karman/evolution.hpp"
#include "karman/functional.hpp"
#include "karman/io.hpp"
#include "karman/parallel.hpp"
#include "karman/periodic_field.hpp"
#include "karman/point_street.hpp"
#include "karman/solver.hpp"

namespace karman::cli {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw config_error("cannot read config file " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw error("cannot open " + p.string() + " for writing");
    f << text;
}

struct Paths {
    fs::path out;
    fs::path in(const std::string& name) const { return out / name; }
};

inline Paths prepare(const RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    thread_count() = cfg.threads;
    Paths p{out_dir};
    write_file(p.in("resolved.cfg"), serialize_config(cfg));
    return p;
}

inline int cmd_point_speed(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    RadialKernel kernel = cfg.kernel();
    LatticeSum sum = street_speed_sum(kernel, cfg.geom, cfg.tol_sum);
    CsvWriter csv({"method", "re_v", "im_v", "K"});
    os << "street speed (" << kernel.describe() << ", l=" << cfg.geom.l << " h=" << cfg.geom.h
       << " a=" << cfg.geom.a << ")\n";
    os << "  lattice sum      V = " << fmt17(sum.value.real()) << " + " << fmt17(sum.value.imag())
       << " i   (K = " << sum.K << ", tail bound " << fmt17(sum.tail_bound) << ")\n";
    csv.raw_row({"lattice_sum", fmt17(sum.value.real()), fmt17(sum.value.imag()),
                 std::to_string(sum.K)});
    if (cfg.kind == KernelKind::euler_log) {
        cdouble cf = street_speed_closed_form(cfg.geom);
        os << "  closed form      V = " << fmt17(cf.real()) << " + " << fmt17(cf.imag())
           << " i\n";
        os << "  discrepancy      " << fmt17(std::abs(cf - sum.value)) << "\n";
        csv.raw_row({"closed_form", fmt17(cf.real()), fmt17(cf.imag()), "0"});
        csv.raw_row({"discrepancy", fmt17(std::abs(cf - sum.value)), "0", "0"});
    }
    csv.write(paths.in("speeds.csv"));
    return 0;
}

inline void write_contours_svg(const StreetContours& sc, const fs::path& path) {
    SvgWriter svg;
    auto close = [](const ContourState& c) {
        std::vector<double> xs, ys;
        for (const auto& p : c.nodes) {
            xs.push_back(p.real());
            ys.push_back(p.imag());
        }
        xs.push_back(c.nodes.front().real());
        ys.push_back(c.nodes.front().imag());
        return std::pair(xs, ys);
    };
    auto [x1, y1] = close(sc.top);
    svg.polyline(x1, y1, "black");
    auto [x2, y2] = close(sc.bottom);
    svg.polyline(x2, y2, "crimson");
    svg.write(path);
}

inline StreetSolution solve_for_config(const RunConfig& cfg, double eps) {
    StreetFunctional fn(cfg.kernel(), cfg.geom, cfg.N, cfg.M, cfg.gsqg_images);
    SolveOptions opt;
    opt.tol = cfg.tol_newton;
    ContinuationRun run = continue_in_eps(fn, eps, opt);
    if (run.termination != ContinuationStop::reached_target || run.branch.back().eps != eps)
        throw convergence_error("continuation stalled before eps target",
                                run.branch.empty() ? 0.0 : run.branch.back().eps);
    return run.branch.back();
}

inline int cmd_solve_street(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    StreetSolution sol = solve_for_config(cfg, cfg.eps);
    write_file(paths.in("solution.txt"), serialize_solution(sol));
    StreetContours sc = make_street_contours(sol, cfg.M);
    CsvWriter csv({"node_index", "re", "im"});
    for (int j = 0; j < sc.top.size(); ++j)
        csv.row({static_cast<double>(j), sc.top.nodes[j].real(), sc.top.nodes[j].imag()});
    csv.write(paths.in("contour.csv"));
    write_contours_svg(sc, paths.in("contour.svg"));
    os << "solved " << cfg.kernel().describe() << " street at eps=" << fmt17(sol.eps)
       << ": V=" << fmt17(sol.V) << " residual=" << fmt17(sol.residual_norm) << " iters="
       << sol.newton_iters << "\n";

    if (cfg.field_nx > 0 && cfg.field_ny > 0) {
        BoundaryMap map(cfg.kernel(), sol.eps, sol.coeffs);
        SampledBoundary b1 = SampledBoundary::from_map(map, cfg.M);
        for (auto& n : b1.nodes) n *= sol.eps;
        for (auto& d : b1.dnodes) d *= sol.eps;
        SampledBoundary b2 = b1.mirrored(cfg.geom.bottom_offset());
        auto rows = sample_field_grid(cfg.kernel(), b1, b2, cfg.geom, cfg.field_x0, cfg.field_x1,
                                      cfg.field_nx, cfg.field_y0, cfg.field_y1, cfg.field_ny);
        double scale = 1.0 / (sol.eps * sol.eps);  // physical vorticity 1/(pi eps^2)
        CsvWriter fcsv({"x", "y", "u", "v"});
        for (const auto& r : rows) fcsv.row({r.x, r.y, r.u * scale, r.v * scale});
        fcsv.write(paths.in("field.csv"));
    }
    return 0;
}

inline int cmd_sweep_epsilon(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    StreetFunctional fn(cfg.kernel(), cfg.geom, cfg.N, cfg.M, cfg.gsqg_images);
    SolveOptions opt;
    opt.tol = cfg.tol_newton;
    ContinuationRun run = continue_in_eps(fn, cfg.eps_target, opt);

    CsvWriter csv({"eps", "V", "max_coeff", "iters"});
    std::vector<double> xs, ys;
    std::ostringstream records;
    for (const auto& s : run.branch) {
        double mc = 0.0;
        for (double c : s.coeffs) mc = std::max(mc, std::abs(c));
        csv.row({s.eps, s.V, mc, static_cast<double>(s.newton_iters)});
        xs.push_back(s.eps);
        ys.push_back(s.V);
        std::string rec = serialize_solution(s);
        for (auto& ch : rec)
            if (ch == '\n') ch = ' ';
        records << rec << "\n";
    }
    csv.write(paths.in("branch.csv"));
    write_file(paths.in("records.txt"), records.str());
    SvgWriter svg;
    svg.polyline(xs, ys, "black");
    svg.write(paths.in("V_curve.svg"));

    os << "branch: " << run.branch.size() << " solutions, eps in ["
       << fmt17(run.branch.front().eps) << ", " << fmt17(run.branch.back().eps) << "], "
       << (run.termination == ContinuationStop::reached_target ? "reached target"
                                                               : "stopped at step floor")
       << "\n";
    if (run.branch.size() >= 4 && run.branch.back().eps / run.branch.front().eps >= 10.0) {
        LimitReport rep = verify_limit(run);
        os << "point-vortex limit: V0=" << fmt17(rep.V0)
           << " empirical order=" << fmt17(rep.empirical_order) << "\n";
    }
    return run.termination == ContinuationStop::reached_target ? 0 : 3;
}

inline int cmd_evolve_patch(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    StreetSolution sol = solve_for_config(cfg, cfg.eps);
    StreetContours sc = make_street_contours(sol, cfg.M);
    RadialKernel kernel = cfg.kernel();

    auto flux = boundary_flux(kernel, cfg.geom, sc, sol.V, cfg.gsqg_images);
    double fmax = 0.0;
    for (double f : flux) fmax = std::max(fmax, std::abs(f));
    os << "t=0 boundary flux residual max |Re[(v-V) n]| = " << fmt17(fmax) << "\n";

    double dt = cfg.dt;
    if (dt <= 0.0) {
        StreetVelocities v0 = boundary_velocity(kernel, cfg.geom, sc, cfg.gsqg_images);
        double vmax = 0.0;
        for (const auto& v : v0.top) vmax = std::max(vmax, std::abs(v));
        double mn, mx;
        sc.top.spacing(mn, mx);
        dt = 0.2 * mn / vmax;
    }
    long every = std::max<long>(1, cfg.steps / 64);
    EvolveResult res = evolve(kernel, cfg.geom, sc, dt, cfg.steps, every, cfg.gsqg_images);

    CsvWriter traj({"t", "node_index", "re", "im"});
    CsvWriter trajb({"t", "node_index", "re", "im"});
    for (const auto& snap : res.snapshots) {
        for (int j = 0; j < snap.top.size(); ++j)
            traj.row({snap.top.t, static_cast<double>(j), snap.top.nodes[j].real(),
                      snap.top.nodes[j].imag()});
        for (int j = 0; j < snap.bottom.size(); ++j)
            trajb.row({snap.bottom.t, static_cast<double>(j), snap.bottom.nodes[j].real(),
                       snap.bottom.nodes[j].imag()});
    }
    traj.write(paths.in("trajectory.csv"));
    trajb.write(paths.in("trajectory_partner.csv"));

    CsvWriter diag({"t", "area", "centroid_re", "centroid_im", "shape_dev"});
    CsvWriter sym({"t", "sym_dev"});
    for (const auto& r : res.records) {
        diag.row({r.t, r.area, r.centroid.real(), r.centroid.imag(), r.shape_dev});
        sym.row({r.t, r.sym_dev});
    }
    diag.write(paths.in("diagnostics.csv"));
    sym.write(paths.in("symmetry.csv"));

    const auto& first = res.records.front();
    const auto& last = res.records.back();
    cdouble vdrift = (last.centroid - first.centroid) / (last.t - first.t);
    os << "window " << fmt17(last.t) << ": centroid velocity " << fmt17(vdrift.real()) << " + "
       << fmt17(vdrift.imag()) << " i (solution V = " << fmt17(sol.V) << ")\n";
    os << "area drift " << fmt17(std::abs(last.area - first.area) / std::abs(first.area))
       << ", shape deviation " << fmt17(last.shape_dev) << ", symmetry drift "
       << fmt17(last.sym_dev) << "\n";
    return 0;
}

inline int cmd_simulate_points(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    RadialKernel kernel = cfg.kernel();
    double dt = cfg.dt > 0.0 ? cfg.dt : 0.01;
    long every = std::max<long>(1, cfg.steps / 64);
    PointTrajectory traj = simulate_street(kernel, cfg.geom, cfg.K, dt, cfg.steps, every);

    CsvWriter csv({"t", "point_index", "row", "re", "im"});
    for (const auto& st : traj.states) {
        for (size_t j = 0; j < st.top.size(); ++j)
            csv.row({st.t, static_cast<double>(j), 0.0, st.top[j].real(), st.top[j].imag()});
        for (size_t j = 0; j < st.bottom.size(); ++j)
            csv.row({st.t, static_cast<double>(j), 1.0, st.bottom[j].real(), st.bottom[j].imag()});
    }
    csv.write(paths.in("trajectory.csv"));
    os << "central-point drift velocity " << fmt17(traj.drift_velocity.real()) << " + "
       << fmt17(traj.drift_velocity.imag()) << " i\n";
    os << "street speed (lattice sum)   " << fmt17(traj.street_speed.real()) << " + "
       << fmt17(traj.street_speed.imag()) << " i\n";
    os << "deviation " << fmt17(traj.drift_deviation) << "\n";
    return 0;
}

inline int cmd_lin_check(const RunConfig& cfg, const Paths& paths, std::ostream& os) {
    StreetFunctional fn(cfg.kernel(), cfg.geom, cfg.N, cfg.M, cfg.gsqg_images);
    const int nmax = std::min(cfg.N, 16);
    std::vector<double> zeros(cfg.N, 0.0);
    const double step = 1e-6;
    ResidualModes base = fn.residual_F(fn.make_map(0.0, zeros));

    CsvWriter csv({"n", "fd_diag", "prediction", "abs_diff", "max_offdiag"});
    os << "linearization at the eps=0 branch point (" << cfg.kernel().describe() << ")\n";
    double worst = 0.0;
    for (int n = 1; n <= nmax; ++n) {
        std::vector<double> c = zeros;
        c[n - 1] = step;
        ResidualModes pert = fn.residual_F(fn.make_map(0.0, c));
        double diag = 0.0, off = 0.0;
        for (int m = 0; m < cfg.N; ++m) {
            double d = (pert.modes[m] - base.modes[m]) / step;
            if (m == n - 1) diag = d;  // modes[m] is the sin((m+2)theta) coefficient
            else off = std::max(off, std::abs(d));
        }
        double pred = fn.linearized_diag_prediction(n);
        worst = std::max(worst, std::abs(diag - pred));
        csv.row({static_cast<double>(n), diag, pred, std::abs(diag - pred), off});
        os << "  n=" << n << "  fd=" << fmt17(diag) << "  predicted=" << fmt17(pred)
           << "  offdiag=" << fmt17(off) << "\n";
    }
    csv.write(paths.in("lin_check.csv"));

    if (cfg.kind == KernelKind::gsqg_power) {
        CsvWriter h6csv({"n", "re_lambda", "im_lambda", "nonzero"});
        os << "H6 coefficients Lambda_n:\n";
        for (int n = 1; n <= 8; ++n) {
            H6Result r = fn.h6_coefficient(n);
            h6csv.row({static_cast<double>(n), r.lambda.real(), r.lambda.imag(),
                       r.nonzero ? 1.0 : 0.0});
            os << "  n=" << n << "  Lambda = " << fmt17(r.lambda.real()) << " + "
               << fmt17(r.lambda.imag()) << " i  (" << (r.nonzero ? "nonzero" : "ZERO") << ")\n";
        }
        h6csv.write(paths.in("h6.csv"));
    }
    os << "max |fd - predicted| = " << fmt17(worst) << "\n";
    return 0;
}

inline int cmd_bessel_check(const RunConfig&, const Paths& paths, std::ostream& os) {
    CsvWriter csv({"x", "K0", "K1", "identity_defect", "k0_prime_defect"});
    bool ok = true;
    os << "modified Bessel verification\n";
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        double k0 = bessel_k0(x), k1 = bessel_k1(x);
        // decomposition identity K0 = -ln x + g0 + g1 inside the series radius
        double ident = x <= 1.0 ? std::abs(-std::log(x) + qgsw_smooth_part(x) + qgsw_g1 - k0)
                                : 0.0;
        // K0' = -K1 by central difference
        double hfd = 1e-6 * std::max(1.0, x);
        double dfd = (bessel_k0(x + hfd) - bessel_k0(x - hfd)) / (2.0 * hfd);
        double pdef = std::abs(dfd + k1) / k1;
        ok = ok && ident < 1e-13 && pdef < 1e-8;
        csv.row({x, k0, k1, ident, pdef});
        os << "  x=" << fmt17(x) << "  K0=" << fmt17(k0) << "  K1=" << fmt17(k1) << "\n";
    }
    // branch continuity at the series/quadrature crossover
    double below = bessel_k0(2.0), above = std::exp(-2.0) * detail::scaled_k_quadrature(2.0, 0);
    double cont = std::abs(below - above) / below;
    os << "  crossover continuity at x=2: " << fmt17(cont) << "\n";
    ok = ok && cont < 1e-12;
    // large-argument asymptotic
    double ratio = bessel_k0(50.0) / (std::sqrt(pi / 100.0) * std::exp(-50.0));
    os << "  K0(50) / asymptotic = " << fmt17(ratio) << "\n";
    ok = ok && std::abs(ratio - 1.0) < 0.01;
    csv.write(paths.in("bessel_check.csv"));
    os << (ok ? "all checks passed\n" : "CHECK FAILED\n");
    if (!ok) throw consistency_error("bessel-check: verification failed");
    return 0;
}

// Entry point shared by the binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& os, std::ostream& err) {
    const std::string usage =
        "usage: karman <point-speed|solve-street|sweep-epsilon|evolve-patch|simulate-points|"
        "lin-check|bessel-check> --config <path> [--out <dir>]\n";
    try {
        if (args.empty()) {
            err << usage;
            return 2;
        }
        std::string sub = args[0];
        std::string config_path, out_dir = "karman_out";
        for (size_t i = 1; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[++i];
            else if (args[i] == "--out" && i + 1 < args.size()) out_dir = args[++i];
            else {
                err << "unknown argument: " << args[i] << "\n" << usage;
                return 2;
            }
        }
        if (config_path.empty()) {
            err << "missing --config\n" << usage;
            return 2;
        }
        RunConfig cfg = parse_config(read_file(config_path));
        Paths paths = prepare(cfg, out_dir);

        if (sub == "point-speed") return cmd_point_speed(cfg, paths, os);
        if (sub == "solve-street") return cmd_solve_street(cfg, paths, os);
        if (sub == "sweep-epsilon") return cmd_sweep_epsilon(cfg, paths, os);
        if (sub == "evolve-patch") return cmd_evolve_patch(cfg, paths, os);
        if (sub == "simulate-points") return cmd_simulate_points(cfg, paths, os);
        if (sub == "lin-check") return cmd_lin_check(cfg, paths, os);
        if (sub == "bessel-check") return cmd_bessel_check(cfg, paths, os);
        err << "unknown subcommand: " << sub << "\n" << usage;
        return 2;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        err << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const consistency_error& e) {
        err << "internal assertion: " << e.what() << "\n";
        return 4;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace karman::cli
