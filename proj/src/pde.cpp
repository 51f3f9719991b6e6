#include "curvlab/pde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvlab {

namespace {
std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

void SolveConfig::validate() const {
    if (l_max < 4) throw InvalidArgument("SolveConfig: l_max must be >= 4");
    if (!(newton_tol > 0)) throw InvalidArgument("SolveConfig: newton_tol must be > 0");
    if (!(min_step > 0)) throw InvalidArgument("SolveConfig: min_step must be > 0");
    if (!(continuation_step > 0)) throw InvalidArgument("SolveConfig: continuation_step must be > 0");
    if (!(lambda_start > 0)) throw InvalidArgument("SolveConfig: lambda_start must be > 0");
    if (max_newton < 1 || gmres_restart < 1 || gmres_max_iter < 1)
        throw InvalidArgument("SolveConfig: iteration limits must be positive");
}

Field residual(const ConformalFactor& u, const HoloClass& phi, double lambda, const SphereGrid& grid) {
    Field w = phi_norm_sq(phi, u, grid);
    Field r = laplacian(u.u, grid);
    for (std::size_t n = 0; n < r.size(); ++n) r[n] += 2.0 * w[n] - lambda;
    return r;
}

Field jacobian_apply(const ConformalFactor& u, const HoloClass& phi, std::span<const double> direction,
                     const SphereGrid& grid) {
    Field w = phi_norm_sq(phi, u, grid);
    Field r = laplacian(direction, grid);
    for (std::size_t n = 0; n < r.size(); ++n) r[n] += 4.0 * w[n] * direction[n];
    return r;
}

namespace {

using Vec = Eigen::VectorXd;

struct Gmres {
    int iterations = 0;
    double residual = 0.0;
};

// Restarted GMRES with right preconditioning, modified Gram-Schmidt and
// Givens rotations.
template <class ApplyA, class ApplyM>
Gmres gmres(ApplyA&& A, ApplyM&& Minv, const Vec& b, Vec& x, double tol, int restart, int max_iter) {
    Gmres out;
    const Eigen::Index n = b.size();
    Vec r = b - A(x);
    double beta = r.norm();
    out.residual = beta;
    while (beta > tol && out.iterations < max_iter) {
        const int m = restart;
        std::vector<Vec> V(m + 1), Z(m);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        Vec g = Vec::Zero(m + 1), cs = Vec::Zero(m), sn = Vec::Zero(m);
        V[0] = r / beta;
        g(0) = beta;
        int j = 0;
        for (; j < m && out.iterations < max_iter; ++j) {
            Z[j] = Minv(V[j]);
            Vec w = A(Z[j]);
            for (int i = 0; i <= j; ++i) {
                H(i, j) = w.dot(V[i]);
                w -= H(i, j) * V[i];
            }
            H(j + 1, j) = w.norm();
            V[j + 1] = H(j + 1, j) > 0 ? Vec(w / H(j + 1, j)) : Vec(Vec::Zero(n));
            for (int i = 0; i < j; ++i) {
                double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            double den = std::hypot(H(j, j), H(j + 1, j));
            cs(j) = den > 0 ? H(j, j) / den : 1.0;
            sn(j) = den > 0 ? H(j + 1, j) / den : 0.0;
            H(j, j) = den;
            H(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);
            ++out.iterations;
            if (std::abs(g(j + 1)) <= tol || den == 0.0) {
                ++j;
                break;
            }
        }
        Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        for (int i = 0; i < j; ++i) x += y(i) * Z[i];
        r = b - A(x);
        double nb = r.norm();
        if (!(nb < beta)) {
            beta = nb;
            break;
        }
        beta = nb;
    }
    out.residual = beta;
    return out;
}

class Newton {
public:
    Newton(const HoloClass& phi, const SolveConfig& cfg, const SphereGrid& grid)
        : phi_(phi), cfg_(cfg), grid_(grid), w0_(phi_norm_sq_h0(phi, grid)) {
        for (double& v : w0_) v *= 2.0;
        lam_.resize(grid.n_coeffs());
        for (int l = 0; l <= grid.l_max(); ++l)
            for (int m = -l; m <= l; ++m) lam_[sh_index(l, m)] = laplace_eigenvalue(l);
    }

    double w0_integral() const { return integrate(w0_, grid_); }
    const Field& w0() const { return w0_; }

    // Galerkin residual in coefficient space; also fills the nonlinear term.
    Vec galerkin(const Vec& c, double lambda, Field& e) const {
        Field u = grid_.synthesize(std::span<const double>(c.data(), c.size()));
        e.resize(u.size());
        for (std::size_t n = 0; n < u.size(); ++n) e[n] = w0_[n] * std::exp(2.0 * u[n]);
        Coeffs ce = grid_.analyze(e);
        Vec r(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) r(i) = lam_[i] * c(i) + ce[i];
        r(0) -= lambda;
        return r;
    }

    struct Outcome {
        bool ok = false;
        int iterations = 0;
        double residual = 0.0;
        std::string why;
    };

    Outcome solve(Vec& c, double lambda) const {
        Outcome out;
        Field e;
        Vec r = galerkin(c, lambda, e);
        double rn = r.norm();
        for (int it = 0; it < cfg_.max_newton; ++it) {
            out.residual = rn;
            if (rn < cfg_.newton_tol) {
                out.ok = true;
                return out;
            }
            out.iterations = it + 1;
            Field twoE(e.size());
            double wbar = 0.0;
            for (std::size_t n = 0; n < e.size(); ++n) twoE[n] = 2.0 * e[n];
            wbar = integrate(twoE, grid_);
            auto A = [&](const Vec& d) {
                Field dv = grid_.synthesize(std::span<const double>(d.data(), d.size()));
                for (std::size_t n = 0; n < dv.size(); ++n) dv[n] *= twoE[n];
                Coeffs cd = grid_.analyze(dv);
                Vec y(d.size());
                for (Eigen::Index i = 0; i < d.size(); ++i) y(i) = lam_[i] * d(i) + cd[i];
                return y;
            };
            auto M = [&](const Vec& v) {
                Vec y(v.size());
                y(0) = v(0) / wbar;
                for (Eigen::Index i = 1; i < v.size(); ++i) y(i) = v(i) / (lam_[i] - wbar);
                return y;
            };
            Vec delta = Vec::Zero(c.size());
            const double lin_tol = std::max(0.05 * cfg_.newton_tol, 1e-2 * rn * std::min(1.0, rn));
            Gmres gs = gmres(A, M, Vec(-r), delta, lin_tol, cfg_.gmres_restart, cfg_.gmres_max_iter);
            if (!(gs.residual < 0.5 * rn)) {
                out.why = "linear solve stalled";
                return out;
            }
            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 10; ++ls) {
                Vec trial = c + step * delta;
                Field et;
                Vec rt = galerkin(trial, lambda, et);
                double rtn = rt.norm();
                if (std::isfinite(rtn) && rtn < (1.0 - 1e-4 * step) * rn) {
                    c = std::move(trial);
                    r = std::move(rt);
                    e = std::move(et);
                    rn = rtn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                out.why = "line search failed";
                out.residual = rn;
                return out;
            }
        }
        out.residual = rn;
        out.ok = rn < cfg_.newton_tol;
        if (!out.ok) out.why = "iteration cap";
        return out;
    }

    void fill_result(const Vec& c, double lambda, SolveResult& res) const {
        res.lambda = lambda;
        res.coeffs.assign(c.data(), c.data() + c.size());
        Field u = grid_.synthesize(res.coeffs);
        res.u = ConformalFactor::from_values(grid_, u);
        Field e;
        Vec r = galerkin(c, lambda, e);
        res.residual_l2 = r.norm();
        Coeffs lapc(res.coeffs);
        for (std::size_t i = 0; i < lapc.size(); ++i) lapc[i] *= lam_[i];
        Field lap = grid_.synthesize(lapc);
        res.residual_sup = 0.0;
        for (std::size_t n = 0; n < lap.size(); ++n)
            res.residual_sup = std::max(res.residual_sup, std::abs(lap[n] + e[n] - lambda));
        res.conservation_defect = std::abs(integrate(e, grid_) - lambda);
        res.max_u = *std::max_element(u.begin(), u.end());
    }

private:
    const HoloClass& phi_;
    const SolveConfig& cfg_;
    const SphereGrid& grid_;
    Field w0_;
    std::vector<double> lam_;
};

Vec to_vec(const Coeffs& c) { return Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size())); }

double max_of(const SphereGrid& grid, const Vec& c) {
    Field u = grid.synthesize(std::span<const double>(c.data(), c.size()));
    return *std::max_element(u.begin(), u.end());
}

bool sup_ok(const SolveResult& r, const SolveConfig& cfg) { return r.residual_sup < 10.0 * cfg.newton_tol; }

}  // namespace

SolveResult solve_phi_system(const HoloClass& phi, double lambda, const SolveConfig& cfg) {
    cfg.validate();
    SphereGrid grid = build_grid(cfg.l_max);
    return solve_phi_system(phi, lambda, cfg, grid);
}

SolveResult solve_phi_system(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid) {
    cfg.validate();
    if (!(lambda > 0)) throw InvalidLambda("solve_phi_system: lambda must be > 0");
    if (phi.is_zero()) throw ZeroClass("solve_phi_system: zero class");
    Newton nw(phi, cfg, grid);
    SolveResult res;

    // Small-lambda start: constant with mean lambda0, then one Poisson correction.
    double lam = std::min(cfg.lambda_start, lambda);
    const double u0 = 0.5 * std::log(lam / nw.w0_integral());
    Field rhs(grid.size());
    for (std::size_t n = 0; n < rhs.size(); ++n) rhs[n] = lam - nw.w0()[n] * std::exp(2.0 * u0);
    const double mean = integrate(rhs, grid);
    for (double& v : rhs) v -= mean;
    Field v = solve_poisson(rhs, grid);
    for (double& x : v) x += u0;
    Vec c = to_vec(grid.analyze(v));

    auto out = nw.solve(c, lam);
    if (!out.ok) {
        res.failure = "initial Newton solve failed at lambda=" + num(lam) + " (" + out.why + ")";
        nw.fill_result(c, lam, res);
        res.converged = false;
        return res;
    }
    res.trace.push_back({lam, out.iterations, out.residual, max_of(grid, c)});
    Vec c_prev;
    double lam_prev = 0.0;
    bool have_prev = false;
    double step = cfg.continuation_step;
    while (lam < lambda) {
        const double next = std::min(lambda, lam + step);
        Vec trial;
        if (have_prev) {
            trial = c + (next - lam) / (lam - lam_prev) * (c - c_prev);
        } else {
            trial = c;
            trial(0) += 0.5 * std::log(next / lam);
        }
        auto o = nw.solve(trial, next);
        if (o.ok) {
            c_prev = c;
            lam_prev = lam;
            have_prev = true;
            c = std::move(trial);
            lam = next;
            res.trace.push_back({lam, o.iterations, o.residual, max_of(grid, c)});
            step = std::min(step * 1.5, 4.0 * cfg.continuation_step);
        } else {
            step *= 0.5;
            if (step < cfg.min_step) {
                std::ostringstream os;
                os << "continuation failed at lambda*=" << lam << " (next step to " << next << ": " << o.why
                   << "; step below min_step)";
                res.failure = os.str();
                nw.fill_result(c, lam, res);
                res.converged = false;
                return res;
            }
        }
    }
    nw.fill_result(c, lambda, res);
    res.converged = res.residual_l2 < cfg.newton_tol && sup_ok(res, cfg);
    if (!res.converged)
        res.failure = "Galerkin residual converged but pointwise residual " + num(res.residual_sup) +
                      " exceeds 10*newton_tol; increase l_max";
    return res;
}

SolveResult newton_from(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid,
                        const ConformalFactor& start) {
    cfg.validate();
    if (!(lambda > 0)) throw InvalidLambda("newton_from: lambda must be > 0");
    Newton nw(phi, cfg, grid);
    Field full(start.u);
    for (double& x : full) x += start.offset;
    Vec c = to_vec(grid.analyze(full));
    auto out = nw.solve(c, lambda);
    SolveResult res;
    nw.fill_result(c, lambda, res);
    res.trace.push_back({lambda, out.iterations, out.residual, res.max_u});
    res.converged = out.ok && sup_ok(res, cfg);
    if (!out.ok) res.failure = out.why;
    return res;
}

DualCoords forward_F(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid) {
    SolveResult r = solve_phi_system(phi, lambda, cfg, grid);
    if (!r.converged) throw NonConvergence("forward_F: " + r.failure, r.trace);
    return b_coords(phi, r.u, grid);
}

}  // namespace curvlab
