#include "curvlab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "curvlab/cohomology.hpp"

namespace curvlab {

using nlohmann::json;

namespace {

cplx parse_cplx(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw InvalidArgument("config: complex values are numbers or [re, im] pairs");
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::vector<cplx> parse_cplx_list(const json& v) {
    if (!v.is_array()) throw InvalidArgument("config: expected an array of complex values");
    std::vector<cplx> out;
    for (const auto& e : v) out.push_back(parse_cplx(e));
    return out;
}

std::vector<double> parse_lambdas(const json& v) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<double>());
    } else if (v.is_object()) {
        const double from = v.at("from").get<double>(), to = v.at("to").get<double>();
        const int count = v.at("count").get<int>();
        if (count < 1) throw InvalidArgument("config: lambdas.count must be >= 1");
        for (int i = 0; i < count; ++i) out.push_back(count == 1 ? to : from + (to - from) * i / (count - 1));
    } else {
        throw InvalidArgument("config: lambdas must be a number, a list or {from, to, count}");
    }
    for (double l : out)
        if (!(l > 0)) throw InvalidLambda("config: lambdas must be > 0");
    return out;
}

template <class T>
void read_opt(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Solves are independent; results land at their own index.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<double> sorted_lambdas(const ExperimentConfig& cfg) {
    std::vector<double> l = cfg.lambdas;
    if (l.empty()) l.push_back(4.0 * kPi);
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    return l;
}

LambdaOutcome solve_point(const HoloClass& phi, double lambda, const ExperimentConfig& cfg, const SphereGrid& grid) {
    LambdaOutcome o;
    o.lambda = lambda;
    SolveResult r = solve_phi_system(phi, lambda, cfg.solver, grid);
    o.converged = r.converged;
    o.residual_sup = r.residual_sup;
    o.conservation_defect = r.conservation_defect;
    o.offset = r.u.offset;
    o.max_u = r.max_u;
    o.failure = r.failure;
    if (!r.converged) return o;
    DualCoords b = b_coords(phi, r.u, grid);
    o.b = b.b;
    DivisorReport rep = div_classifier(b, cfg.classifier_tol);
    o.stratum = rep.stratum_m;
    o.div_eta = rep.div_eta;
    o.margin = rep.margin;
    o.boundary = rep.boundary;
    return o;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunRecord start_record(const ExperimentConfig& cfg, const char* experiment) {
    RunRecord rec;
    rec.experiment = experiment;
    rec.config_hash = config_hash(cfg);
    rec.seed = cfg.seed;
    return rec;
}

double off_pattern_mass(const std::vector<cplx>& b, int a, int n) {
    double on = 0.0, off = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const int j = static_cast<int>(i) + 1;
        (((j - (a + 1)) % n + n) % n == 0 ? on : off) += std::norm(b[i]);
    }
    return on + off > 0 ? std::sqrt(off / (on + off)) : 0.0;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
    if (!j.contains("schema") || j.at("schema") != 1) throw InvalidArgument("config: \"schema\": 1 is required");
    ExperimentConfig c;
    try {
        read_opt(j, "experiment", c.experiment);
        if (j.contains("bundle")) {
            const auto& b = j.at("bundle");
            c.spec = make_spec(b.at("deg_L1").get<int>(), b.at("deg_L2").get<int>());
        }
        if (j.contains("family")) {
            const auto& f = j.at("family");
            FamilyParams p;
            read_opt(f, "kind", p.kind);
            read_opt(f, "a", p.a);
            read_opt(f, "n", p.n);
            read_opt(f, "strict", p.strict);
            if (f.contains("q")) p.q = parse_cplx_list(f.at("q"));
            c.family = p;
        }
        if (j.contains("coefficients")) c.coefficients = parse_cplx_list(j.at("coefficients"));
        if (j.contains("b")) {
            const auto& b = j.at("b");
            if (!b.is_array()) throw InvalidArgument("config: b must be an array");
            bool strings = !b.empty() && b[0].is_array() && b[0].size() == 2 && b[0][0].is_string();
            if (strings)
                for (const auto& e : b) c.b_exact.push_back(GaussRational::parse(e.at(0).get<std::string>(), e.at(1).get<std::string>()));
            else
                c.b = parse_cplx_list(b);
        }
        if (j.contains("lambdas")) c.lambdas = parse_lambdas(j.at("lambdas"));
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            read_opt(s, "l_max", c.solver.l_max);
            read_opt(s, "newton_tol", c.solver.newton_tol);
            read_opt(s, "max_newton", c.solver.max_newton);
            read_opt(s, "continuation_step", c.solver.continuation_step);
            read_opt(s, "min_step", c.solver.min_step);
            read_opt(s, "lambda_start", c.solver.lambda_start);
            read_opt(s, "gmres_restart", c.solver.gmres_restart);
            read_opt(s, "gmres_max_iter", c.solver.gmres_max_iter);
        }
        if (j.contains("classifier")) {
            read_opt(j.at("classifier"), "tol", c.classifier_tol);
            read_opt(j.at("classifier"), "exact", c.exact);
        }
        if (j.contains("output")) {
            read_opt(j.at("output"), "dir", c.out_dir);
            read_opt(j.at("output"), "prefix", c.prefix);
        }
        read_opt(j, "seed", c.seed);
        if (j.contains("radial")) {
            const auto& r = j.at("radial");
            read_opt(r, "s_min", c.radial.s_min);
            read_opt(r, "s_max", c.radial.s_max);
            read_opt(r, "samples", c.radial.samples);
            read_opt(r, "rtol", c.radial.rtol);
            read_opt(r, "root_tol", c.radial.root_tol);
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.solver.validate();
    if (!(c.classifier_tol > 0)) throw InvalidArgument("config: classifier.tol must be > 0");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("config " + path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = 1;
    j["experiment"] = c.experiment;
    j["bundle"] = {{"deg_L1", c.spec.deg_L1}, {"deg_L2", c.spec.deg_L2}};
    if (c.family) {
        json q = json::array();
        for (cplx v : c.family->q) q.push_back(cplx_json(v));
        j["family"] = {{"kind", c.family->kind}, {"a", c.family->a}, {"n", c.family->n}, {"q", q}, {"strict", c.family->strict}};
    }
    if (!c.coefficients.empty()) {
        json a = json::array();
        for (cplx v : c.coefficients) a.push_back(cplx_json(v));
        j["coefficients"] = a;
    }
    if (!c.b.empty() || !c.b_exact.empty()) {
        json b = json::array();
        for (cplx v : c.b) b.push_back(cplx_json(v));
        for (const auto& v : c.b_exact) b.push_back(json::array({v.re.get_str(), v.im.get_str()}));
        j["b"] = b;
    }
    j["lambdas"] = c.lambdas;
    j["solver"] = {{"l_max", c.solver.l_max},
                   {"newton_tol", c.solver.newton_tol},
                   {"max_newton", c.solver.max_newton},
                   {"continuation_step", c.solver.continuation_step},
                   {"min_step", c.solver.min_step},
                   {"lambda_start", c.solver.lambda_start},
                   {"gmres_restart", c.solver.gmres_restart},
                   {"gmres_max_iter", c.solver.gmres_max_iter}};
    j["classifier"] = {{"tol", c.classifier_tol}, {"exact", c.exact}};
    j["output"] = {{"dir", c.out_dir}, {"prefix", c.prefix}};
    j["seed"] = c.seed;
    j["radial"] = {{"s_min", c.radial.s_min},
                   {"s_max", c.radial.s_max},
                   {"samples", c.radial.samples},
                   {"rtol", c.radial.rtol},
                   {"root_tol", c.radial.root_tol}};
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
    return buf;
}

HoloClass gen_family(const BundleSpec& spec, const FamilyParams& p) {
    const int k = spec.k();
    const int top = k - 2;
    std::vector<cplx> g{1.0};
    auto fail = [](const std::string& s) { throw HypothesisViolation("gen_family: " + s); };
    if (!p.strict) {
        if (p.kind < 1 || p.kind > 3) throw InvalidArgument("gen_family: kind must be 1, 2 or 3");
        if (p.a < 0 || (p.kind > 1 && p.n < 1)) fail("a >= 0 and n >= 1 are required");
        const int m = p.kind == 1 ? 0 : p.kind == 2 ? 1 : static_cast<int>(p.q.size());
        if (p.a + m * p.n > top) fail("a + m n <= k-2 is required");
    } else switch (p.kind) {
        case 1:
            if (!(p.a > 0)) fail("kind 1 requires a > 0");
            if (!(p.a < top)) fail("kind 1 requires a < k-2");
            break;
        case 2:
            if (!(2 * p.a > 0)) fail("kind 2 requires 2a > 0");
            if (!(p.n > 2 * p.a)) fail("kind 2 requires n > 2a");
            if (2 * p.a + p.n != top) fail("kind 2 requires 2a + n = k-2");
            break;
        case 3: {
            const int m = static_cast<int>(p.q.size());
            if (m < 1) fail("kind 3 requires at least one q");
            if (!(p.a > 0)) fail("kind 3 requires a > 0");
            if (!(p.n > p.a)) fail("kind 3 requires n > a");
            if (!(p.a + m * p.n < top)) fail("kind 3 requires a + m n < k-2");
            if (!((top - p.a) % p.n > 0)) fail("kind 3 requires (k-2-a) mod n > 0");
            for (std::size_t i = 0; i < p.q.size(); ++i) {
                if (p.q[i] == cplx(0.0)) fail("kind 3 requires q_i != 0");
                for (std::size_t j = 0; j < i; ++j)
                    if (p.q[i] == p.q[j]) fail("kind 3 requires distinct q_i");
            }
            break;
        }
        default:
            throw InvalidArgument("gen_family: kind must be 1, 2 or 3");
    }
    auto times_zn_minus = [&](cplx q) {
        std::vector<cplx> r(g.size() + p.n, 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            r[i + p.n] += g[i];
            r[i] -= q * g[i];
        }
        g = std::move(r);
    };
    if (p.kind == 2) times_zn_minus(1.0);
    if (p.kind == 3)
        for (cplx q : p.q) times_zn_minus(q);
    std::vector<cplx> a(k - 1, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) a[i + p.a] = g[i];
    return HoloClass::make(spec, std::move(a));
}

HoloClass class_of(const ExperimentConfig& cfg) {
    if (cfg.family) return gen_family(cfg.spec, *cfg.family);
    if (!cfg.coefficients.empty()) return HoloClass::make(cfg.spec, cfg.coefficients);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> a(cfg.spec.k() - 1);
    for (auto& v : a) v = cplx(nd(rng), nd(rng));
    return HoloClass::make(cfg.spec, std::move(a));
}

RunRecord run_existence_sweep(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec = start_record(cfg, "sweep");
    const HoloClass phi = class_of(cfg);
    const SphereGrid grid = build_grid(cfg.solver.l_max);
    const std::vector<double> lambdas = sorted_lambdas(cfg);
    rec.points.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) { rec.points[i] = solve_point(phi, lambdas[i], cfg, grid); });

    const DivisorReport h0 = div_classifier(dual_map_H0(phi), cfg.classifier_tol);
    const ExistenceRange range = existence_range_for_stratum(phi.spec, h0.stratum_m);
    json s;
    s["stratum_at_H0"] = h0.stratum_m;
    s["stratum_margin_at_H0"] = h0.margin;
    s["theoretical_bound"] = range.hi;
    s["bound_text"] = "stratum m = " + std::to_string(h0.stratum_m) + " gives solutions for lambda in (0, 4 pi m) = (0, " +
                      fmt(range.hi) + ")";
    const auto first_fail = std::find_if(rec.points.begin(), rec.points.end(), [](const auto& o) { return !o.converged; });
    if (first_fail == rec.points.end()) {
        s["lambda_star"] = nullptr;
        s["statement"] = "continuation converged at every lambda in the grid";
    } else {
        s["lambda_star"] = first_fail->lambda;
        s["statement"] = "continuation failed at lambda* = " + fmt(first_fail->lambda) +
                         "; this is a solver outcome, compare the theoretical bound " + fmt(range.hi);
    }
    rec.summary = s;
    for (const auto& o : rec.points) {
        if (!o.converged) continue;
        if (!(o.residual_sup < 10.0 * cfg.solver.newton_tol))
            rec.failed_checks.push_back("residual_sup at lambda " + fmt(o.lambda));
        if (!(o.conservation_defect < 1e-8)) rec.failed_checks.push_back("conservation at lambda " + fmt(o.lambda));
    }
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_symmetry_audit(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec = start_record(cfg, "symmetry-audit");
    if (!cfg.family || (cfg.family->kind != 2 && cfg.family->kind != 3))
        throw InvalidArgument("symmetry-audit: family kind 2 or 3 is required");
    const FamilyParams fam = *cfg.family;
    const HoloClass phi = gen_family(cfg.spec, fam);
    const SphereGrid grid = build_grid(cfg.solver.l_max);
    const std::vector<double> lambdas = sorted_lambdas(cfg);
    const double off_tol = 1e-6;

    // Second inscribed polygon: the configuration rotated by pi/n.
    const HoloClass phi_alt = pullback_class(IsometryAction::rotation_about_axis(kPi / fam.n), phi);

    std::vector<LambdaOutcome> alt_points(lambdas.size());
    rec.points.resize(lambdas.size());
    parallel_for(2 * lambdas.size(), [&](std::size_t t) {
        const std::size_t i = t / 2;
        LambdaOutcome& o = t % 2 == 0 ? rec.points[i] : alt_points[i];
        o = solve_point(t % 2 == 0 ? phi : phi_alt, lambdas[i], cfg, grid);
        if (o.converged) o.off_pattern = off_pattern_mass(o.b, fam.a, fam.n);
    });

    json s;
    s["theorem_hypotheses_checked"] = fam.strict;
    s["pattern"] = "b_j nonzero only for j = " + std::to_string(fam.a + 1) + " mod " + std::to_string(fam.n);
    double worst = 0.0, worst_alt = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (rec.points[i].converged) worst = std::max(worst, rec.points[i].off_pattern);
        if (alt_points[i].converged) worst_alt = std::max(worst_alt, alt_points[i].off_pattern);
        if (!rec.points[i].converged) rec.failed_checks.push_back("solver did not converge at lambda " + fmt(lambdas[i]));
    }
    s["max_off_pattern"] = worst;
    s["max_off_pattern_rotated_polygon"] = worst_alt;
    json alt_rows = json::array();
    for (const auto& o : alt_points)
        alt_rows.push_back({{"lambda", o.lambda}, {"converged", o.converged}, {"off_pattern", o.off_pattern}});
    s["rotated_polygon"] = alt_rows;
    s["statement"] = "both inscribed polygon configurations are reported; neither is asserted to be the one attained";
    if (!(worst < off_tol)) rec.failed_checks.push_back("off-pattern mass " + fmt(worst));

    // Identity and reflection audits at the largest converged lambda.
    auto last = std::find_if(rec.points.rbegin(), rec.points.rend(), [](const auto& o) { return o.converged; });
    if (last != rec.points.rend()) {
        const double lam = last->lambda;
        const DualCoords base{cfg.spec, last->b};
        const IsometryAction id = IsometryAction::identity();
        const DualCoords via_id = forward_F(pullback_class(id, phi), lam, cfg.solver, grid);
        const DualCoords id_dual = pullback_dual(id, base);
        double id_defect = 0.0;
        for (std::size_t i = 0; i < base.b.size(); ++i) id_defect = std::max(id_defect, std::abs(via_id.b[i] - id_dual.b[i]));
        const IsometryAction refl = IsometryAction::reflection();
        const HoloClass phi_r = pullback_class(refl, phi);
        const DualCoords via_r = forward_F(phi_r, lam, cfg.solver, grid);
        const DualCoords r_dual = pullback_dual(refl, base);
        const double r_angle = projective_angle(via_r.b, r_dual.b);
        const double r_off = off_pattern_mass(via_r.b, fam.a, fam.n);
        s["audit_lambda"] = lam;
        s["identity_defect"] = id_defect;
        s["reflection_angle"] = r_angle;
        s["reflection_off_pattern"] = r_off;
        if (id_defect != 0.0) rec.failed_checks.push_back("identity audit defect " + fmt(id_defect));
        if (!(r_angle < 1e-6)) rec.failed_checks.push_back("reflection audit angle " + fmt(r_angle));
        if (!(r_off < off_tol)) rec.failed_checks.push_back("reflection audit off-pattern " + fmt(r_off));
    }
    rec.summary = s;
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

RunRecord run_radial_nonexistence(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec = start_record(cfg, "radial");
    const int k = cfg.spec.k();
    std::vector<cplx> a(k - 1, 0.0);
    a[k - 2] = 1.0;
    const HoloClass phi = cfg.coefficients.empty() ? HoloClass::make(cfg.spec, a) : class_of(cfg);
    const double lambda = cfg.lambdas.empty() ? 4.0 * kPi : cfg.lambdas.front();
    const RadialResult r = solve_radial(phi, lambda, cfg.radial);
    rec.shooting = r.curve;

    const DualCoords h0 = dual_map_H0(phi);
    const DivisorReport rep = div_classifier(h0, cfg.classifier_tol);
    const ExistenceRange range = existence_range(h0, cfg.classifier_tol);
    json s;
    s["lambda"] = lambda;
    s["root_found"] = r.root_found;
    s["s_star"] = r.root_found ? json(r.s_star) : json(nullptr);
    s["root_residual"] = r.residual;
    s["min_abs_mismatch"] = r.min_abs_mismatch;
    s["s_at_min"] = r.s_at_min;
    s["error_estimate"] = r.error_estimate;
    s["stratum_at_H0"] = rep.stratum_m;
    s["existence_range"] = {range.lo, range.hi};
    json bj = json::array();
    for (cplx v : h0.b) bj.push_back(cplx_json(v));
    s["b_at_H0"] = bj;
    const int zeros_at_x0 = phi.degree() == 0 ? 0 : k - 2;
    if (r.root_found)
        s["statement"] = "radial shooting root found at s = " + fmt(r.s_star);
    else
        s["statement"] = "no shooting root in [" + fmt(cfg.radial.s_min) + ", " + fmt(cfg.radial.s_max) +
                         "]; minimum |mismatch| " + fmt(r.min_abs_mismatch) + " against error estimate " +
                         fmt(r.error_estimate) + " (empirical, not a proof)";
    rec.summary = s;
    if (zeros_at_x0 > 0) {
        if (r.root_found) rec.failed_checks.push_back("unexpected shooting root");
        if (rep.stratum_m != 1) rec.failed_checks.push_back("stratum at H0 is not 1");
    } else if (!r.root_found) {
        rec.failed_checks.push_back("no radial solution for the control class");
    }
    rec.wall_seconds = seconds_since(t0);
    return rec;
}

std::string sweep_csv(const RunRecord& rec, int k) {
    std::ostringstream os;
    os << "lambda,converged,residual_sup,offset";
    for (int j = 1; j <= k - 1; ++j) os << ",b_" << j << "_re,b_" << j << "_im";
    os << ",stratum,margin\n";
    for (const auto& o : rec.points) {
        os << fmt(o.lambda) << ',' << (o.converged ? 1 : 0) << ',' << fmt(o.residual_sup) << ',' << fmt(o.offset);
        for (int j = 0; j < k - 1; ++j) {
            if (o.converged)
                os << ',' << fmt(o.b[j].real()) << ',' << fmt(o.b[j].imag());
            else
                os << ",,";
        }
        if (o.converged)
            os << ',' << o.stratum << ',' << fmt(o.margin);
        else
            os << ",,";
        os << '\n';
    }
    return os.str();
}

std::string shooting_csv(const RunRecord& rec) {
    std::ostringstream os;
    os << "s,mismatch,error\n";
    for (const auto& p : rec.shooting) os << fmt(p.s) << ',' << fmt(p.mismatch) << ',' << fmt(p.error) << '\n';
    return os.str();
}

json record_json(const ExperimentConfig& cfg, const RunRecord& rec) {
    json j;
    j["config"] = to_json(cfg);
    j["config_hash"] = rec.config_hash;
    j["seed"] = rec.seed;
    j["experiment"] = rec.experiment;
    j["summary"] = rec.summary;
    json pts = json::array();
    for (const auto& o : rec.points) {
        json p;
        p["lambda"] = o.lambda;
        p["converged"] = o.converged;
        p["residual_sup"] = o.residual_sup;
        p["conservation_defect"] = o.conservation_defect;
        p["offset"] = o.offset;
        p["max_u"] = o.max_u;
        if (o.converged) {
            p["stratum"] = o.stratum;
            p["div_eta"] = o.div_eta;
            p["margin"] = o.margin;
            p["boundary"] = o.boundary;
        } else {
            p["failure"] = o.failure;
        }
        pts.push_back(p);
    }
    j["points"] = pts;
    j["checks_passed"] = rec.passed();
    j["failed_checks"] = rec.failed_checks;
    j["wall_seconds"] = rec.wall_seconds;
    return j;
}

std::vector<std::string> write_artifacts(const ExperimentConfig& cfg, const RunRecord& rec) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> paths;
    auto put = [&](const std::string& name, const std::string& body) {
        const std::string path = (fs::path(cfg.out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        out << body;
        if (!out) throw Error("cannot write " + path);
        paths.push_back(path);
    };
    put(cfg.prefix + ".json", record_json(cfg, rec).dump(2) + "\n");
    if (!rec.points.empty()) put(cfg.prefix + "_sweep.csv", sweep_csv(rec, cfg.spec.k()));
    if (!rec.shooting.empty()) put(cfg.prefix + "_shooting.csv", shooting_csv(rec));
    return paths;
}

}  // namespace curvlab
