#include "curvlab/cohomology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "curvlab/errors.hpp"
#include "curvlab/poly.hpp"

namespace curvlab {

DualCoords DualCoords::make(BundleSpec spec, std::vector<cplx> b) {
    if (static_cast<int>(b.size()) != spec.k() - 1)
        throw SpecMismatch("DualCoords: expected " + std::to_string(spec.k() - 1) + " coordinates");
    return {spec, std::move(b)};
}

double DualCoords::norm() const {
    double s = 0.0;
    for (auto v : b) s += std::norm(v);
    return std::sqrt(s);
}

bool DualCoords::is_zero() const {
    return std::all_of(b.begin(), b.end(), [](cplx v) { return v == cplx(0.0); });
}

IsometryAction IsometryAction::identity() { return {1.0, 0.0, false}; }

IsometryAction IsometryAction::rotation_about_axis(double angle) {
    return {std::polar(1.0, 0.5 * angle), 0.0, false};
}

IsometryAction IsometryAction::reflection() { return {1.0, 0.0, true}; }

IsometryAction IsometryAction::random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    double q[4];
    for (double& v : q) v = n(rng);
    return make(cplx(q[0], q[1]), cplx(q[2], q[3]), false);
}

IsometryAction IsometryAction::make(cplx alpha, cplx beta, bool reversing) {
    double r = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (r == 0.0) throw InvalidArgument("IsometryAction: alpha = beta = 0");
    return {alpha / r, beta / r, reversing};
}

double IsometryAction::unit_defect() const { return std::abs(std::norm(alpha) + std::norm(beta) - 1.0); }

ChartPoint IsometryAction::apply(const ChartPoint& p) const {
    cplx Z1, Z2;
    if (p.z_finite() && std::norm(p.z) <= 1.0) {
        Z1 = p.z;
        Z2 = 1.0;
    } else {
        Z1 = 1.0;
        Z2 = p.w;
    }
    if (reversing) {
        Z1 = std::conj(Z1);
        Z2 = std::conj(Z2);
    }
    cplx N1 = alpha * Z1 + beta * Z2;
    cplx N2 = -std::conj(beta) * Z1 + std::conj(alpha) * Z2;
    if (std::abs(N1) <= std::abs(N2)) return ChartPoint::from_z(N1 / N2);
    return ChartPoint::from_w(N2 / N1);
}

IsometryAction compose(const IsometryAction& f, const IsometryAction& g) {
    // Matrix of f times (conjugated, if f reverses) matrix of g.
    cplx ga = f.reversing ? std::conj(g.alpha) : g.alpha;
    cplx gb = f.reversing ? std::conj(g.beta) : g.beta;
    cplx a = f.alpha * ga + f.beta * (-std::conj(gb));
    cplx b = f.alpha * gb + f.beta * std::conj(ga);
    return IsometryAction::make(a, b, f.reversing != g.reversing);
}

namespace {

void require_same_spec(const BundleSpec& a, const BundleSpec& b, const char* what) {
    if (!(a == b)) throw SpecMismatch(std::string(what) + ": bundle specs differ");
}

// 2 pi z^{j-1} conj(g) (1+|z|^2)^{2-k} for j = 1..k-1 at a point, written
// in the w-chart near N so every term stays bounded.
void dual_weights_at(const HoloClass& phi, const ChartPoint& p, std::vector<cplx>& out) {
    const int k = phi.spec.k();
    out.assign(k - 1, 0.0);
    if (p.z_finite() && std::norm(p.z) <= 1.0) {
        const cplx base = kTangentNorm * std::conj(phi.g(p.z)) * std::pow(p.rho_w(), k - 2);
        cplx zp = 1.0;
        for (int j = 1; j <= k - 1; ++j) {
            out[j - 1] = zp * base;
            zp *= p.z;
        }
    } else {
        const cplx base = kTangentNorm * std::conj(phi.g_south(p.w)) * std::pow(p.rho_z(), k - 2);
        cplx wp = 1.0;
        for (int j = k - 1; j >= 1; --j) {
            out[j - 1] = wp * base;
            wp *= p.w;
        }
    }
}

}  // namespace

cplx coupling(const HoloClass& phi, const DualCoords& eta) {
    require_same_spec(phi.spec, eta.spec, "coupling");
    cplx s = 0.0;
    for (std::size_t j = 0; j < eta.b.size(); ++j) s += phi.a[j] * eta.b[j];
    return s;
}

DualCoords b_coords(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid) {
    if (phi.is_zero()) throw ZeroClass("b_coords: zero class");
    if (u.u.size() != grid.size()) throw SpecMismatch("b_coords: conformal factor not on this grid");
    const int k = phi.spec.k();
    std::vector<cplx> b(k - 1, 0.0), w;
    const int nl = grid.n_lon();
    for (int i = 0; i < grid.n_lat(); ++i) {
        std::vector<cplx> ring(k - 1, 0.0);
        for (int jj = 0; jj < nl; ++jj) {
            const std::size_t n = static_cast<std::size_t>(i) * nl + jj;
            dual_weights_at(phi, grid.chart(n), w);
            const double e = std::exp(2.0 * u.full(n));
            for (int j = 0; j < k - 1; ++j) ring[j] += w[j] * e;
        }
        for (int j = 0; j < k - 1; ++j) b[j] += grid.ring_weights()[i] * ring[j];
    }
    return {phi.spec, std::move(b)};
}

DualCoords DualizationMap::apply(const HoloClass& phi) const {
    if (phi.spec.k() != k) throw SpecMismatch("DualizationMap: wrong k");
    if (phi.is_zero()) throw ZeroClass("dual_map_H0: zero class");
    const int n = k - 1;
    std::vector<cplx> b(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b[r] += matrix[r * n + c] * std::conj(phi.a[c]);
    return {phi.spec, std::move(b)};
}

HoloClass DualizationMap::invert(const DualCoords& eta) const {
    if (eta.spec.k() != k) throw SpecMismatch("DualizationMap: wrong k");
    if (eta.is_zero()) throw ZeroClass("dual_map_H0_inverse: zero class");
    const int n = k - 1;
    Eigen::MatrixXcd M(n, n);
    Eigen::VectorXcd rhs(n);
    for (int r = 0; r < n; ++r) {
        rhs(r) = eta.b[r];
        for (int c = 0; c < n; ++c) M(r, c) = matrix[r * n + c];
    }
    Eigen::VectorXcd x = M.partialPivLu().solve(rhs);
    std::vector<cplx> a(n);
    for (int c = 0; c < n; ++c) a[c] = std::conj(x(c));
    return {eta.spec, std::move(a)};
}

const DualizationMap& dualization_for(int k) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<DualizationMap>> cache;
    if (k < 2) throw InvalidArgument("dualization_for: k must be >= 2");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return *it->second;
    // Integrands at u = 0 are spherical polynomials of degree k-2, so any
    // grid with l_max >= k integrates them exactly.
    SphereGrid grid = build_grid(std::max(8, k));
    auto map = std::make_unique<DualizationMap>();
    map->k = k;
    const int n = k - 1;
    map->matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
    BundleSpec spec{0, k};
    ConformalFactor zero = ConformalFactor::zero(grid);
    for (int c = 0; c < n; ++c) {
        std::vector<cplx> a(n, 0.0);
        a[c] = 1.0;
        DualCoords col = b_coords(HoloClass{spec, a}, zero, grid);
        for (int r = 0; r < n; ++r) map->matrix[r * n + c] = col.b[r];
    }
    Eigen::MatrixXcd M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) M(r, c) = map->matrix[r * n + c];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    map->condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
    auto& ref = *map;
    cache.emplace(k, std::move(map));
    return ref;
}

DualCoords dual_map_H0(const HoloClass& phi) { return dualization_for(phi.spec.k()).apply(phi); }

HoloClass dual_map_H0_inverse(const DualCoords& eta) { return dualization_for(eta.spec.k()).invert(eta); }

cplx DbarSolution::value_at(const SphereGrid& grid, double theta, double phi) const {
    return {grid.evaluate(f_re, theta, phi), grid.evaluate(f_im, theta, phi)};
}

DbarSolution dbar_solve(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid) {
    if (phi.is_zero()) throw ZeroClass("dbar_solve: zero class");
    if (u.u.size() != grid.size()) throw SpecMismatch("dbar_solve: conformal factor not on this grid");
    const int k = phi.spec.k();
    const int L = grid.l_max();
    const std::size_t N = grid.size();

    // h = -2 pi conj(g) (1+|z|^2)^{2-k} e^{2u}; bounded, O(|w|^{k-2}) at N.
    Field hr(N), hi(N);
    for (std::size_t n = 0; n < N; ++n) {
        const ChartPoint& p = grid.chart(n);
        cplx v;
        if (std::norm(p.z) <= 1.0)
            v = std::conj(phi.g(p.z)) * std::pow(p.rho_w(), k - 2);
        else
            v = std::conj(phi.g_south(p.w)) * std::pow(p.w, k - 2) * std::pow(p.rho_z(), k - 2);
        v *= -kTangentNorm * std::exp(2.0 * u.full(n));
        hr[n] = v.real();
        hi[n] = v.imag();
    }
    Coeffs chr = grid.analyze(hr), chi = grid.analyze(hi);
    Field hr_t, hr_p, hi_t, hi_p;
    grid.synthesize_gradient(chr, hr_t, hr_p);
    grid.synthesize_gradient(chi, hi_t, hi_p);

    // Delta f = 4 pi (1+|z|^2)^2 d_z [h (1+|z|^2)^{-2}]
    //         = -2 pi e^{-i phi} [(1-cos)(h_theta + i h_phi/sin) + 2 sin h].
    Field qr(N), qi(N);
    const int nl = grid.n_lon();
    for (int i = 0; i < grid.n_lat(); ++i) {
        const double c = grid.cos_colat(i), s = grid.sin_colat(i);
        for (int j = 0; j < nl; ++j) {
            const std::size_t n = static_cast<std::size_t>(i) * nl + j;
            cplx ht(hr_t[n], hi_t[n]), hp(hr_p[n], hi_p[n]), h(hr[n], hi[n]);
            cplx q = -2.0 * kPi * std::polar(1.0, -grid.longitude(j)) * ((1.0 - c) * (ht + cplx(0, 1) * hp) + 2.0 * s * h);
            qr[n] = q.real();
            qi[n] = q.imag();
        }
    }
    Coeffs cqr = grid.analyze(qr), cqi = grid.analyze(qi);
    DbarSolution sol;
    sol.spec = phi.spec;
    sol.solvability_defect = std::hypot(cqr[0], cqi[0]);
    sol.f_re.assign(grid.n_coeffs(), 0.0);
    sol.f_im.assign(grid.n_coeffs(), 0.0);
    for (int l = 1; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
            sol.f_re[sh_index(l, m)] = cqr[sh_index(l, m)] / laplace_eigenvalue(l);
            sol.f_im[sh_index(l, m)] = cqi[sh_index(l, m)] / laplace_eigenvalue(l);
        }
    // Fix the constant by f(N) = 0; Y_l0(N) = sqrt(2l+1), Y_lm(N) = 0 otherwise.
    double nr = 0.0, ni = 0.0;
    for (int l = 1; l <= L; ++l) {
        nr += sol.f_re[sh_index(l, 0)] * std::sqrt(2.0 * l + 1.0);
        ni += sol.f_im[sh_index(l, 0)] * std::sqrt(2.0 * l + 1.0);
    }
    sol.f_re[0] = -nr;
    sol.f_im[0] = -ni;
    sol.f_north = cplx(sol.f_re[0] + nr, sol.f_im[0] + ni);

    Field fr = grid.synthesize(sol.f_re), fi = grid.synthesize(sol.f_im);
    sol.f.resize(N);
    for (std::size_t n = 0; n < N; ++n) sol.f[n] = cplx(fr[n], fi[n]);

    // Taylor coefficients at N: the e^{-ij phi} part of f behaves like
    // -b_j tan^j(theta/2), and Pbar_lj / tan^j(theta/2) -> sqrt((2l+1)(l+j)!/(l-j)!)/j!.
    sol.p_f.assign(k - 1, 0.0);
    for (int j = 1; j <= k - 1 && j <= L; ++j) {
        cplx acc = 0.0;
        for (int l = j; l <= L; ++l) {
            const double lim = std::exp(0.5 * (std::log(2.0 * l + 1.0) + std::lgamma(l + j + 1.0) - std::lgamma(l - j + 1.0)) -
                                        std::lgamma(j + 1.0));
            cplx cp(sol.f_re[sh_index(l, j)], sol.f_im[sh_index(l, j)]);
            cplx cm(sol.f_re[sh_index(l, -j)], sol.f_im[sh_index(l, -j)]);
            acc += (std::sqrt(2.0) / 2.0) * (cp + cplx(0, 1) * cm) * lim;
        }
        sol.p_f[j - 1] = -acc;
    }

    // Residual in the invariant form (1+|z|^2)(dbar_z f - source).
    Field fr_t, fr_p, fi_t, fi_p;
    grid.synthesize_gradient(sol.f_re, fr_t, fr_p);
    grid.synthesize_gradient(sol.f_im, fi_t, fi_p);
    CField err(N), ref(N);
    for (int i = 0; i < grid.n_lat(); ++i) {
        const double c = grid.cos_colat(i);
        for (int j = 0; j < nl; ++j) {
            const std::size_t n = static_cast<std::size_t>(i) * nl + j;
            cplx ft(fr_t[n], fi_t[n]), fp(fr_p[n], fi_p[n]);
            cplx dbar = -std::polar(1.0, grid.longitude(j)) * (ft - cplx(0, 1) * fp);
            cplx src = cplx(hr[n], hi[n]) * (1.0 - c) / 2.0;
            err[n] = std::norm(dbar - src);
            ref[n] = std::norm(src);
        }
    }
    const double ref_norm = integrate(ref, grid).real();
    sol.residual_rel_l2 = ref_norm > 0 ? std::sqrt(integrate(err, grid).real() / ref_norm) : 0.0;

    // Remainder order on dyadic circles around N.
    const double radii[] = {0.2, 0.1, 0.05, 0.025};
    double scale = 0.0;
    for (auto b : sol.p_f) scale = std::max(scale, std::abs(b));
    std::vector<double> lx, ly;
    for (double rho : radii) {
        double worst = 0.0;
        const double th = 2.0 * std::atan(rho);
        for (int t = 0; t < 16; ++t) {
            const double ph = 2.0 * kPi * t / 16.0;
            const cplx w = rho * std::polar(1.0, -ph);
            cplx o = sol.value_at(grid, th, ph);
            cplx wp = w;
            for (int j = 1; j <= k - 1; ++j) {
                o += sol.p_f[j - 1] * wp;
                wp *= w;
            }
            worst = std::max(worst, std::abs(o));
        }
        if (worst > 1e-13 * std::max(scale, 1.0)) {
            lx.push_back(std::log(rho));
            ly.push_back(std::log(worst));
        }
    }
    if (lx.size() < 2) {
        sol.remainder_slope = std::numeric_limits<double>::infinity();
    } else {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        sol.remainder_slope = sxy / sxx;
    }
    if (!(sol.residual_rel_l2 < 1e-2))
        throw QuadratureSingular("dbar_solve: residual " + std::to_string(sol.residual_rel_l2) +
                                 " too large; increase l_max");
    return sol;
}

namespace {
bool is_identity(const IsometryAction& iso) {
    return !iso.reversing && iso.alpha == cplx(1.0) && iso.beta == cplx(0.0);
}
}  // namespace

HoloClass pullback_class(const IsometryAction& iso, const HoloClass& phi) {
    if (is_identity(iso)) return phi;
    const int k = phi.spec.k();
    // Orientation reversal conjugates the coefficients and the Moebius map.
    cplx al = iso.reversing ? std::conj(iso.alpha) : iso.alpha;
    cplx be = iso.reversing ? std::conj(iso.beta) : iso.beta;
    std::vector<cplx> num{be, al};                           // alpha z + beta
    std::vector<cplx> den{std::conj(al), -std::conj(be)};    // -conj(beta) z + conj(alpha)
    std::vector<cplx> out(k - 1, 0.0);
    for (int m = 0; m <= k - 2; ++m) {
        cplx am = iso.reversing ? std::conj(phi.a[m]) : phi.a[m];
        if (am == cplx(0.0)) continue;
        auto term = poly::mul(poly::pow(num, m), poly::pow(den, k - 2 - m));
        for (std::size_t i = 0; i < term.size(); ++i) out[i] += am * term[i];
    }
    return {phi.spec, std::move(out)};
}

DualCoords pullback_dual(const IsometryAction& iso, const DualCoords& eta) {
    if (eta.is_zero()) throw ZeroClass("pullback_dual: zero class");
    if (is_identity(iso)) return eta;
    return dual_map_H0(pullback_class(iso, dual_map_H0_inverse(eta)));
}

double projective_angle(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw SpecMismatch("projective_angle: length mismatch");
    double na = 0, nb = 0;
    cplx ip = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
        ip += std::conj(a[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroClass("projective_angle: zero vector");
    // Component of b orthogonal to a, for accuracy at small angles.
    double perp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) perp += std::norm(b[i] - ip / na * a[i]);
    return std::atan2(std::sqrt(perp), std::abs(ip) / std::sqrt(na));
}

}  // namespace curvlab
