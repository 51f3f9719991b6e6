#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "curvlab/cohomology.hpp"
#include "curvlab/lab.hpp"

using namespace curvlab;
using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int lmax = 0;
    double tol = 0.0;
    long long seed = -1;
    bool exact = false;
};

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

json cvec(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx z : v) a.push_back(cj(z));
    return a;
}

ExperimentConfig load(const Flags& f, const std::string& verb, bool tol_is_solver) {
    ExperimentConfig c;
    if (!f.config.empty()) c = load_config(f.config);
    if (c.experiment.empty()) c.experiment = verb;
    if (!f.out.empty()) c.out_dir = f.out;
    if (f.lmax > 0) c.solver.l_max = f.lmax;
    if (f.tol > 0) (tol_is_solver ? c.solver.newton_tol : c.classifier_tol) = f.tol;
    if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
    if (f.exact) c.exact = true;
    c.solver.validate();
    return c;
}

int emit(const ExperimentConfig& cfg, const json& body, bool ok) {
    json out = body;
    out["config_hash"] = config_hash(cfg);
    out["seed"] = cfg.seed;
    out["checks_passed"] = ok;
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : 1;
}

int report_run(const ExperimentConfig& cfg, const RunRecord& rec) {
    const auto paths = write_artifacts(cfg, rec);
    json out;
    out["experiment"] = rec.experiment;
    out["summary"] = rec.summary;
    out["failed_checks"] = rec.failed_checks;
    out["artifacts"] = paths;
    return emit(cfg, out, rec.passed());
}

int cmd_grid_check(const Flags& f) {
    ExperimentConfig cfg = load(f, "grid-check", true);
    const SphereGrid grid = build_grid(cfg.solver.l_max);
    double wsum = 0.0;
    for (double w : grid.ring_weights()) wsum += w * grid.n_lon();
    const int k = cfg.spec.k();
    const Field lap = laplacian_pointwise(
        [k](double th, double) {
            const double t = std::tan(0.5 * th);
            return 0.5 * k * std::log1p(1.0 / (t * t));
        },
        grid);
    double lap_err = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double th = grid.chart(n).theta;
        if (th < grid.spacing() || th > kPi - grid.spacing()) continue;
        lap_err = std::max(lap_err, std::abs(lap[n] - 2.0 * kPi * k) / (2.0 * kPi * k));
    }
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    Coeffs c(grid.n_coeffs(), 0.0);
    for (int l = 1; l <= std::min(8, grid.l_max()); ++l)
        for (int m = -l; m <= l; ++m) c[sh_index(l, m)] = nd(rng) / (l * l);
    const double deg = degree_by_integration(ConformalFactor::from_values(grid, grid.synthesize(c)), cfg.spec, grid);
    const bool ok = std::abs(wsum - 1.0) < 1e-12 && lap_err < 1e-6 && std::abs(deg - k) < 1e-8;
    json out{{"l_max", grid.l_max()},
             {"n_lat", grid.n_lat()},
             {"n_lon", grid.n_lon()},
             {"weight_sum_defect", wsum - 1.0},
             {"log_potential_laplacian_rel_error", lap_err},
             {"degree_by_integration", deg},
             {"k", k}};
    return emit(cfg, out, ok);
}

int cmd_classify(const Flags& f) {
    ExperimentConfig cfg = load(f, "classify", false);
    json out;
    DivisorReport rep;
    if (cfg.exact) {
        ExactVec b = cfg.b_exact;
        if (b.empty()) {
            if (cfg.b.empty()) throw InvalidArgument("classify --exact: config needs b");
            for (cplx z : cfg.b) b.push_back(GaussRational::from_complex(z));
        }
        rep = div_classifier_exact(b, cfg.spec);
    } else {
        DualCoords b;
        if (!cfg.b.empty()) {
            b = DualCoords::make(cfg.spec, cfg.b);
        } else if (!cfg.b_exact.empty()) {
            std::vector<cplx> v;
            for (const auto& e : cfg.b_exact) v.push_back(e.to_complex());
            b = DualCoords::make(cfg.spec, v);
        } else {
            b = dual_map_H0(class_of(cfg));
            out["b"] = cvec(b.b);
        }
        rep = div_classifier(b, cfg.classifier_tol);
    }
    const ExistenceRange range = existence_range_for_stratum(cfg.spec, rep.stratum_m);
    out["div_eta"] = rep.div_eta;
    out["j_star"] = rep.j_star;
    out["s_minus"] = rep.s_minus;
    out["stratum"] = rep.stratum_m;
    out["margin"] = rep.margin;
    out["boundary"] = rep.boundary;
    out["exact"] = rep.exact;
    out["witness"] = {{"y", cvec(rep.witness.y)}, {"v", cvec(rep.witness.v)}};
    out["existence_range"] = {range.lo, range.hi};
    out["alpha_stable_at_minus_1"] = alpha_stable(cfg.spec, rep.div_eta, -1.0);
    const int gap = cfg.spec.deg_L2 - rep.div_eta;
    return emit(cfg, out, gap >= 1 && gap <= cfg.spec.k() / 2);
}

int cmd_dualize(const Flags& f) {
    ExperimentConfig cfg = load(f, "dualize", false);
    const HoloClass phi = class_of(cfg);
    const DualCoords b = dual_map_H0(phi);
    const HoloClass back = dual_map_H0_inverse(b);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < phi.a.size(); ++i) {
        err = std::max(err, std::abs(back.a[i] - phi.a[i]));
        scale = std::max(scale, std::abs(phi.a[i]));
    }
    json div = json::array();
    for (const auto& p : divisor_of(phi).points)
        div.push_back({{"theta", p.point.theta}, {"phi", p.point.phi}, {"multiplicity", p.multiplicity}});
    json out{{"a", cvec(phi.a)},
             {"b", cvec(b.b)},
             {"divisor", div},
             {"roundtrip_rel_error", err / scale},
             {"condition", dualization_for(cfg.spec.k()).condition}};
    return emit(cfg, out, err <= 1e-10 * scale);
}

int cmd_solve(const Flags& f) {
    ExperimentConfig cfg = load(f, "solve", true);
    const HoloClass phi = class_of(cfg);
    const double lambda = cfg.lambdas.empty() ? 4.0 * kPi : cfg.lambdas.front();
    const SphereGrid grid = build_grid(cfg.solver.l_max);
    const SolveResult r = solve_phi_system(phi, lambda, cfg.solver, grid);
    // Curvature function K = 2|phi|_0^2 e^{2u}.
    const Field K0 = phi_norm_sq(phi, r.u, grid);
    double kmin = INFINITY, kmax = 0.0;
    for (double v : K0) {
        kmin = std::min(kmin, 2.0 * v);
        kmax = std::max(kmax, 2.0 * v);
    }
    json trace = json::array();
    for (const auto& t : r.trace)
        trace.push_back({{"lambda", t.lambda}, {"iterations", t.iterations}, {"residual", t.residual}, {"max_u", t.max_u}});
    json out{{"lambda", lambda},
             {"converged", r.converged},
             {"residual_sup", r.residual_sup},
             {"residual_l2", r.residual_l2},
             {"conservation_defect", r.conservation_defect},
             {"offset", r.u.offset},
             {"max_u", r.max_u},
             {"K_min", kmin},
             {"K_max", kmax},
             {"trace", trace}};
    if (r.converged) {
        out["b"] = cvec(b_coords(phi, r.u, grid).b);
    } else {
        out["failure"] = r.failure;
        out["statement"] = "continuation stopped; this is a solver outcome, not a non-existence claim";
    }
    const bool ok = r.converged && r.residual_sup < 10.0 * cfg.solver.newton_tol && r.conservation_defect < 1e-8;
    return emit(cfg, out, ok);
}

int cmd_family(const Flags& f) {
    ExperimentConfig cfg = load(f, "family", false);
    if (!cfg.family) throw InvalidArgument("family: config needs a family block");
    const HoloClass phi = gen_family(cfg.spec, *cfg.family);
    json div = json::array();
    for (const auto& p : divisor_of(phi).points)
        div.push_back({{"theta", p.point.theta}, {"phi", p.point.phi}, {"multiplicity", p.multiplicity}});
    json out{{"kind", cfg.family->kind}, {"g", cvec(phi.a)}, {"divisor", div}};
    return emit(cfg, out, true);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvlab: prescribed curvature and extension classes on the sphere"};
    app.require_subcommand(1);
    Flags flags;
    auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON config path");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--lmax", flags.lmax, "spectral degree");
        sub->add_option("--tol", flags.tol, "classifier tolerance, or Newton tolerance for solver verbs");
        sub->add_option("--seed", flags.seed, "RNG seed");
        sub->add_flag("--exact", flags.exact, "rational-arithmetic classifier");
        return sub;
    };
    struct Verb {
        const char* name;
        const char* help;
        std::function<int()> run;
    };
    const std::vector<Verb> verbs = {
        {"grid-check", "quadrature and Laplacian self-checks", [&] { return cmd_grid_check(flags); }},
        {"classify", "div and stratum of dual coordinates", [&] { return cmd_classify(flags); }},
        {"dualize", "H0 dual coordinates of a holomorphic class", [&] { return cmd_dualize(flags); }},
        {"solve", "solve the phi system at one lambda", [&] { return cmd_solve(flags); }},
        {"sweep", "existence sweep over a lambda grid",
         [&] {
             auto cfg = load(flags, "sweep", true);
             return report_run(cfg, run_existence_sweep(cfg));
         }},
        {"symmetry-audit", "b-coordinate pattern along a lambda grid",
         [&] {
             auto cfg = load(flags, "symmetry-audit", true);
             return report_run(cfg, run_symmetry_audit(cfg));
         }},
        {"radial", "radial shooting sweep",
         [&] {
             auto cfg = load(flags, "radial", true);
             return report_run(cfg, run_radial_nonexistence(cfg));
         }},
        {"family", "curvature family generator", [&] { return cmd_family(flags); }},
    };
    std::vector<CLI::App*> subs;
    for (const auto& v : verbs) subs.push_back(add_flags(app.add_subcommand(v.name, v.help)));
    CLI11_PARSE(app, argc, argv);
    try {
        for (std::size_t i = 0; i < verbs.size(); ++i)
            if (subs[i]->parsed()) return verbs[i].run();
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 3;
    } catch (const SweepInconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
