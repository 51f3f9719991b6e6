#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>

#include "curvlab/lab.hpp"

using namespace curvlab;

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kLogLaplaceTol = 1e-6;
constexpr double kDegreeTol = 1e-8;
constexpr double kHankelTol = 1e-7;
constexpr double kConstantTol = 1e-9;
constexpr double kRoundTol = 1e-10;
constexpr double kJacobianTol = 1e-6;
constexpr double kConservationTol = 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kRootTol = 1e-8;
constexpr double kLimitAngle = 1e-2;
constexpr double kNormEquivTol = 1e-8;
constexpr double kEquivAngle = 1e-5;
constexpr double kOffPatternTol = 1e-6;
constexpr double kDbarResidual = 1e-4;
constexpr double kDbarNorth = 1e-8;
constexpr double kDbarMatch = 1e-4;

int failures = 0;
double worst_conservation = 0.0;

std::map<int, std::string> lines;

void line(int id, bool pass, const std::string& detail) {
    lines[id] = std::string(pass ? "PASS" : "FAIL") + "  " + detail;
    if (!pass) ++failures;
}

void info(const std::string& s) {
    std::printf("INFO  %s\n", s.c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

HoloClass monomial(int k, int a) {
    std::vector<cplx> v(k - 1, 0.0);
    v[a] = 1.0;
    return HoloClass::make(make_spec(0, k), v);
}

HoloClass random_class(int k, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<cplx> a(k - 1);
    for (auto& v : a) v = cplx(nd(rng), nd(rng));
    return HoloClass::make(make_spec(0, k), a);
}

void accept_conservation(const SolveResult& r) {
    if (r.converged) worst_conservation = std::max(worst_conservation, r.conservation_defect);
}

void geometry() {
    const auto t0 = std::chrono::steady_clock::now();
    SphereGrid g = build_grid(32);
    double wsum = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) wsum += g.weight(n);
    double worst = 0.0;
    for (int k = 2; k <= 6; ++k) {
        Field lap = laplacian_pointwise(
            [k](double th, double) {
                const double t = std::tan(0.5 * th);
                return 0.5 * k * std::log1p(1.0 / (t * t));
            },
            g);
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double th = g.chart(n).theta;
            if (th < g.spacing() || th > kPi - g.spacing()) continue;
            worst = std::max(worst, std::abs(lap[n] - 2 * kPi * k) / (2 * kPi * k));
        }
    }
    const double t = since(t0);
    line(1, std::abs(wsum - 1) < kWeightTol && worst < kLogLaplaceTol && t < 5.0,
         "|sum w - 1| = " + num(std::abs(wsum - 1)) + ", log-potential laplacian rel err " + num(worst) + ", " +
             num(t) + " s");
}

void degree() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(102);
    std::normal_distribution<double> nd;
    SphereGrid g = build_grid(24);
    double worst = 0.0;
    for (int k = 2; k <= 6; ++k)
        for (int t = 0; t < 100; ++t) {
            Coeffs c(g.n_coeffs(), 0.0);
            for (int l = 1; l <= 12; ++l)
                for (int m = -l; m <= l; ++m) c[sh_index(l, m)] = nd(rng) / l;
            ConformalFactor u = ConformalFactor::from_values(g, g.synthesize(c));
            worst = std::max(worst, std::abs(degree_by_integration(u, make_spec(0, k), g) - k));
        }
    const double t = since(t0);
    line(2, worst < kDegreeTol && t < 30.0, "max |deg - k| = " + num(worst) + " over 500 fields, " + num(t) + " s");
}

void p1() {
    std::mt19937_64 rng(103);
    std::normal_distribution<double> nd;
    double hankel = 0.0, constant = 0.0;
    int bad_div = 0;
    for (int k = 3; k <= 6; ++k) {
        for (int t = 0; t < 20; ++t) {
            const cplx a(nd(rng), nd(rng));
            std::vector<cplx> g{1.0};
            for (int i = 0; i < k - 2; ++i) {
                std::vector<cplx> r(g.size() + 1, 0.0);
                for (std::size_t j = 0; j < g.size(); ++j) {
                    r[j + 1] += g[j];
                    r[j] -= a * g[j];
                }
                g = r;
            }
            const HoloClass phi = HoloClass::make(make_spec(0, k), g);
            SphereGrid grid = build_grid(16);
            const DualCoords b = b_coords(phi, ConformalFactor::zero(grid), grid);
            for (int j = 0; j + 2 < k - 1; ++j) {
                const cplx lhs = b.b[j] * b.b[j + 2], rhs = b.b[j + 1] * b.b[j + 1];
                hankel = std::max(hankel, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
            }
            if (div_classifier(b).div_eta != k - 1) ++bad_div;
        }
        std::vector<cplx> one(k - 1, 0.0);
        one[0] = 1.0;
        const DualCoords b = dual_map_H0(HoloClass::make(make_spec(0, k), one));
        for (int j = 1; j < k - 1; ++j) constant = std::max(constant, std::abs(b.b[j]) / std::abs(b.b[0]));
    }
    line(3, hankel < kHankelTol && bad_div == 0 && constant < kConstantTol,
         "hankel rank-1 defect " + num(hankel) + ", div != deg_L2 - 1 in " + std::to_string(bad_div) +
             " of 80, g = 1 ratio " + num(constant));
}

void roundtrip() {
    std::mt19937_64 rng(104);
    std::uniform_int_distribution<int> num_d(-9, 9), den_d(1, 7);
    auto q = [&] { return GaussRational(mpq_class(num_d(rng), den_d(rng)), mpq_class(num_d(rng), den_d(rng))); };
    int tested = 0, skipped = 0, bad = 0;
    for (int k = 3; k <= 8; ++k) {
        std::uniform_int_distribution<int> sd(1, k / 2);
        for (int t = 0; t < 500; ++t) {
            const int s = sd(rng);
            ExactCandidate c{ExactVec(s + 1), ExactVec(s + 1)};
            for (int i = 1; i <= s; ++i) {
                c.y[i] = q();
                c.v[i] = q();
            }
            while (c.v[s].is_zero()) c.v[s] = q();
            if (!candidate_coprime(c)) {
                ++skipped;
                continue;
            }
            ++tested;
            const BundleSpec spec = make_spec(0, k);
            const DivisorReport r = div_classifier_exact(series_of_rational(c, k - 1), spec);
            if (r.div_eta != spec.deg_L1 + k - s_minus(c)) ++bad;
        }
    }
    line(4, bad == 0 && tested > 0,
         std::to_string(bad) + " failures in " + std::to_string(tested) + " generic candidates (" +
             std::to_string(skipped) + " non-generic skipped), s_minus <= floor(k/2)");
}

void strata() {
    std::mt19937_64 rng(105);
    std::normal_distribution<double> nd;
    int bad = 0;
    for (int k = 2; k <= 8; ++k)
        for (int t = 0; t < 1000; ++t) {
            std::vector<cplx> b(k - 1);
            for (auto& v : b) v = cplx(nd(rng), nd(rng));
            const BundleSpec spec = make_spec(0, k);
            const int m = spec.deg_L2 - div_classifier(DualCoords::make(spec, b)).div_eta;
            if (m < 1 || m > k / 2) ++bad;
        }
    line(5, bad == 0, std::to_string(bad) + " violations of 1 <= deg_L2 - div <= floor(k/2) in 7000 draws, k = 2..8");
}

void pde_checks() {
    SolveConfig cfg;
    cfg.l_max = 16;
    const SolveResult round = solve_phi_system(monomial(2, 0), 4 * kPi, cfg);
    accept_conservation(round);
    double sup_u = 0.0;
    for (std::size_t n = 0; n < round.u.u.size(); ++n) sup_u = std::max(sup_u, std::abs(round.u.full(n)));

    SphereGrid g = build_grid(24);
    const HoloClass phi = HoloClass::make(make_spec(0, 5), {0.5, 1.0, cplx(0, 0.4), 0.2});
    Field v(g.size()), d(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto& p = g.chart(n);
        v[n] = 0.3 * std::cos(p.theta) + 0.2 * std::sin(p.theta) * std::cos(p.phi);
        d[n] = std::sin(2 * p.theta) * std::sin(p.phi + 0.5);
    }
    const ConformalFactor u = ConformalFactor::from_values(g, v);
    const double h = 1e-5;
    ConformalFactor up = u, dn = u;
    for (std::size_t n = 0; n < g.size(); ++n) {
        up.u[n] += h * d[n];
        dn.u[n] -= h * d[n];
    }
    const Field a = residual(up, phi, 5.0, g), b = residual(dn, phi, 5.0, g);
    const Field j = jacobian_apply(u, phi, d, g);
    double err = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        err = std::max(err, std::abs((a[n] - b[n]) / (2 * h) - j[n]));
        scale = std::max(scale, std::abs(j[n]));
    }
    const double jac = err / scale;
    line(6, round.converged && sup_u < kRoundTol && jac < kJacobianTol && worst_conservation < kConservationTol,
         "round sphere sup|u| " + num(sup_u) + ", jacobian rel err " + num(jac) + ", max conservation defect " +
             num(worst_conservation) + " over accepted points");
}

void exist_ab() {
    SolveConfig cfg;
    cfg.l_max = 48;
    SphereGrid g = build_grid(48);
    bool ok = true;
    std::string detail;
    double slowest = 0.0, worst = 0.0;
    for (int k = 4; k <= 6; ++k)
        for (int a = 1; a <= k - 3; ++a) {
            const auto t0 = std::chrono::steady_clock::now();
            const SolveResult r = solve_phi_system(monomial(k, a), 4 * kPi, cfg, g);
            const double t = since(t0);
            accept_conservation(r);
            slowest = std::max(slowest, t);
            worst = std::max(worst, r.residual_sup);
            if (!r.converged || !(r.residual_sup < kResidualTol) || t > 120.0) {
                ok = false;
                detail += " k=" + std::to_string(k) + ",a=" + std::to_string(a) + " failed;";
            }
        }
    line(7, ok, "6 cases at lambda = 4 pi, l_max 48: max residual_sup " + num(worst) + ", slowest " + num(slowest) +
                    " s" + detail);
}

void radial() {
    RadialConfig rc;
    rc.samples = 41;
    const RadialResult yes = solve_radial(monomial(4, 1), 4 * kPi, rc);
    const RadialResult no = solve_radial(monomial(4, 2), 4 * kPi, rc);
    const bool ok = yes.root_found && yes.residual < kRootTol && !no.root_found &&
                    no.min_abs_mismatch > 10 * no.error_estimate;
    line(8, ok,
         "x0 + (-x0): root at s = " + num(yes.s_star) + " residual " + num(yes.residual) + "; 2 x0: no root, min |m| " +
             num(no.min_abs_mismatch) + " vs error " + num(no.error_estimate) + " (empirical)");
}

void limit() {
    std::mt19937_64 rng(109);
    SolveConfig cfg;
    cfg.l_max = 32;
    SphereGrid g = build_grid(32);
    bool ok = true;
    double at_small = 0.0;
    for (int t = 0; t < 5; ++t) {
        const HoloClass phi = random_class(4, rng);
        const DualCoords h0 = dual_map_H0(phi);
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : {0.5, 0.1, 0.01}) {
            const DualCoords b = forward_F(phi, lam, cfg, g);
            const double ang = projective_angle(b.b, h0.b);
            if (!(ang < prev)) ok = false;
            prev = ang;
        }
        at_small = std::max(at_small, prev);
    }
    line(9, ok && at_small < kLimitAngle,
         "angle to H0 decreasing over 0.5, 0.1, 0.01 for 5 classes; max at 0.01 " + num(at_small));
}

void equivariance() {
    std::mt19937_64 rng(110);
    double norm_dev = 0.0;
    for (int t = 0; t < 20; ++t) {
        const HoloClass phi = random_class(4, rng);
        IsometryAction iso = IsometryAction::random_rotation(rng);
        iso.reversing = t % 2 == 1;
        const HoloClass pulled = pullback_class(iso, phi);
        for (int i = 0; i < 10; ++i) {
            const ChartPoint p = ChartPoint::from_angles(0.15 + 0.28 * i, 0.7 * i + 0.1 * t);
            const double rhs = phi_norm_sq_h0_at(phi, iso.apply(p));
            norm_dev = std::max(norm_dev, std::abs(phi_norm_sq_h0_at(pulled, p) - rhs) / rhs);
        }
    }
    SolveConfig cfg;
    cfg.l_max = 32;
    SphereGrid g = build_grid(32);
    const HoloClass phi = random_class(4, rng);
    const IsometryAction iso = IsometryAction::random_rotation(rng);
    const DualCoords base = forward_F(phi, 2 * kPi, cfg, g);
    const DualCoords moved = forward_F(pullback_class(iso, phi), 2 * kPi, cfg, g);
    const double ang = projective_angle(moved.b, pullback_dual(iso, base).b);
    line(10, norm_dev < kNormEquivTol && ang < kEquivAngle,
         "norm equivariance deviation " + num(norm_dev) + ", forward_F rotation angle " + num(ang));
}

void symmetry() {
    ExperimentConfig lit;
    lit.experiment = "symmetry-audit";
    lit.spec = make_spec(0, 7);
    lit.family = FamilyParams{2, 1, 4, {}, false};
    lit.lambdas = {kPi / 2, kPi, 2 * kPi, 4 * kPi};
    lit.solver.l_max = 48;
    const RunRecord r7 = run_symmetry_audit(lit);
    const double off7 = r7.summary["max_off_pattern"].get<double>();
    int conv7 = 0;
    for (const auto& o : r7.points) conv7 += o.converged;
    for (const auto& o : r7.points)
        if (!o.converged) info("k=7 a=1 n=4 (outside 2a+n=k-2): no convergence at lambda " + num(o.lambda) + ": " + o.failure);

    ExperimentConfig thm = lit;
    thm.spec = make_spec(0, 8);
    thm.family = FamilyParams{2, 1, 4, {}, true};
    thm.solver.l_max = 32;
    const RunRecord r8 = run_symmetry_audit(thm);
    const double off8 = r8.summary["max_off_pattern"].get<double>();
    const bool conv8 = r8.points.back().converged;
    line(11, conv7 > 0 && off7 < kOffPatternTol && conv8 && off8 < kOffPatternTol && r8.passed(),
         "k=7: off-pattern " + num(off7) + " over " + std::to_string(conv7) + " of " + std::to_string(r7.points.size()) +
             " lambdas converged" + (r7.points.back().converged ? "" : " (not at 4 pi)") + "; k=8 (2a+n=k-2): " +
             (conv8 ? "converged" : "not converged") + " at 4 pi, off-pattern " + num(off8));
}

void dbar() {
    std::mt19937_64 rng(112);
    SphereGrid g = build_grid(48);
    double res = 0.0, north = 0.0, match = 0.0;
    for (int k = 3; k <= 4; ++k) {
        const HoloClass phi = random_class(k, rng);
        const ConformalFactor u = ConformalFactor::zero(g);
        const DbarSolution s = dbar_solve(phi, u, g);
        const DualCoords b = b_coords(phi, u, g);
        res = std::max(res, s.residual_rel_l2);
        north = std::max(north, std::abs(s.f_north));
        for (int j = 0; j < k - 1; ++j) match = std::max(match, std::abs(s.p_f[j] - b.b[j]));
    }
    line(12, res < kDbarResidual && north < kDbarNorth && match < kDbarMatch,
         "relative L2 residual " + num(res) + ", |f(N)| " + num(north) + ", max |p_f - b| " + num(match));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    geometry();
    degree();
    p1();
    roundtrip();
    strata();
    exist_ab();
    limit();
    pde_checks();
    radial();
    equivariance();
    symmetry();
    dbar();
    for (const auto& [id, text] : lines) std::printf("criterion %2d %s\n", id, text.c_str());
    std::printf("%d failed, %.1f s\n", failures, since(t0));
    return failures == 0 ? 0 : 1;
}
