#include "curvlab/bundle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

BundleSpec make_spec(int deg_L1, int deg_L2) {
    if (deg_L2 - deg_L1 < 2)
        throw InvalidArgument("bundle: k = deg_L2 - deg_L1 must be >= 2, got " + std::to_string(deg_L2 - deg_L1));
    return BundleSpec{deg_L1, deg_L2};
}

ConformalFactor ConformalFactor::zero(const SphereGrid& grid) { return {Field(grid.size(), 0.0), 0.0}; }

ConformalFactor ConformalFactor::from_values(const SphereGrid& grid, Field values) {
    double mean = integrate(values, grid);
    for (double& v : values) v -= mean;
    return {std::move(values), mean};
}

HoloClass HoloClass::make(BundleSpec spec, std::vector<cplx> a) {
    if (spec.k() < 2) throw InvalidArgument("HoloClass: k must be >= 2");
    if (static_cast<int>(a.size()) > spec.k() - 1)
        throw SpecMismatch("HoloClass: polynomial degree exceeds k-2");
    a.resize(spec.k() - 1, 0.0);
    return {spec, std::move(a)};
}

cplx HoloClass::g(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * z + a[i];
    return acc;
}

cplx HoloClass::g_south(cplx w) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = acc * w + a[i];
    return acc;
}

int HoloClass::degree() const {
    for (std::size_t i = a.size(); i-- > 0;)
        if (a[i] != cplx(0.0)) return static_cast<int>(i);
    return -1;
}

bool HoloClass::is_zero() const { return degree() < 0; }

int Divisor::total() const {
    int t = 0;
    for (const auto& p : points) t += p.multiplicity;
    return t;
}

double h0_norm_zeta(cplx z, int k) { return std::pow(1.0 + std::norm(z), -k); }
double h0_norm_zeta_south(cplx w, int k) { return std::pow(1.0 + std::norm(w), -k); }

double phi_norm_sq_h0_z(const HoloClass& phi, cplx z) {
    return kTangentNorm * std::norm(phi.g(z)) * std::pow(1.0 + std::norm(z), 2 - phi.spec.k());
}

double phi_norm_sq_h0_w(const HoloClass& phi, cplx w) {
    return kTangentNorm * std::norm(phi.g_south(w)) * std::pow(1.0 + std::norm(w), 2 - phi.spec.k());
}

double phi_norm_sq_h0_at(const HoloClass& phi, const ChartPoint& p) {
    const int e = phi.spec.k() - 2;
    if (p.z_finite() && std::norm(p.z) <= 1.0) return kTangentNorm * std::norm(phi.g(p.z)) * std::pow(p.rho_w(), e);
    return kTangentNorm * std::norm(phi.g_south(p.w)) * std::pow(p.rho_z(), e);
}

Field phi_norm_sq_h0(const HoloClass& phi, const SphereGrid& grid) {
    Field out(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] = phi_norm_sq_h0_at(phi, grid.chart(n));
    return out;
}

Field phi_norm_sq(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid) {
    if (u.u.size() != grid.size()) throw SpecMismatch("phi_norm_sq: conformal factor not on this grid");
    Field out = phi_norm_sq_h0(phi, grid);
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] *= std::exp(2.0 * u.full(n));
    return out;
}

Field curvature_scalar(const ConformalFactor& u, const BundleSpec& spec, const SphereGrid& grid) {
    Field lap = laplacian(u.u, grid);
    for (double& v : lap) v = 2.0 * kPi * spec.k() - v;
    return lap;
}

double degree_by_integration(const ConformalFactor& u, const BundleSpec& spec, const SphereGrid& grid) {
    return integrate(curvature_scalar(u, spec, grid), grid) / (2.0 * kPi);
}

namespace {

// Taylor coefficients of p at c (repeated synthetic division).
std::vector<cplx> taylor_at(std::vector<cplx> p, cplx c) {
    const std::size_t n = p.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = n - 1; i > j; --i) p[i - 1] += c * p[i];
    return p;
}

// Scale against which |t_j| is judged: sum_i |a_i| C(i,j) |c|^{i-j}.
std::vector<double> taylor_scale(const std::vector<cplx>& p, cplx c) {
    std::vector<double> ap(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ap[i] = std::abs(p[i]);
    const double r = std::abs(c);
    const std::size_t n = ap.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = n - 1; i > j; --i) ap[i - 1] += r * ap[i];
    return ap;
}

bool is_root_of_order(const std::vector<cplx>& p, cplx c, int m, double tol) {
    auto t = taylor_at(p, c);
    auto s = taylor_scale(p, c);
    for (int j = 0; j < m; ++j)
        if (std::abs(t[j]) > tol * s[j]) return false;
    return true;
}

void cluster_roots(const std::vector<cplx>& p, const std::vector<cplx>& roots, double tau, double tol,
                   std::vector<std::pair<cplx, int>>& out) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(roots[i] - roots[j]) <= tau * (1.0 + std::abs(roots[i]))) parent[find(i)] = find(j);
    std::vector<std::vector<cplx>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(roots[i]);
    for (auto& g : groups) {
        if (g.empty()) continue;
        const int m = static_cast<int>(g.size());
        cplx c = std::accumulate(g.begin(), g.end(), cplx(0.0)) / static_cast<double>(m);
        if (m == 1 || is_root_of_order(p, c, m, tol)) {
            out.emplace_back(c, m);
        } else if (tau < 1e-12) {
            for (cplx r : g) out.emplace_back(r, 1);
        } else {
            cluster_roots(p, g, tau * 0.1, tol, out);
        }
    }
}

}  // namespace

Divisor divisor_of(const HoloClass& phi, double cluster_tol) {
    const int d = phi.degree();
    if (d < 0) throw ZeroClass("divisor_of: zero class");
    Divisor div;
    std::vector<cplx> p(phi.a.begin(), phi.a.begin() + d + 1);
    if (d > 0) {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) comp(i, d - 1) = -p[i] / p[d];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
        std::vector<std::pair<cplx, int>> clusters;
        cluster_roots(p, roots, 1e-2, cluster_tol, clusters);
        std::sort(clusters.begin(), clusters.end(), [](const auto& x, const auto& y) {
            if (std::abs(x.first) != std::abs(y.first)) return std::abs(x.first) < std::abs(y.first);
            return std::arg(x.first) < std::arg(y.first);
        });
        for (auto& [c, m] : clusters) {
            // Snap tiny roots to the chart origin so exact zeros print as 0.
            cplx r = std::abs(c) < 1e-14 ? cplx(0.0) : c;
            div.points.push_back({ChartPoint::from_z(r), m});
        }
    }
    const int at_north = phi.spec.k() - 2 - d;
    if (at_north > 0) div.points.push_back({ChartPoint::north(), at_north});
    return div;
}

}  // namespace curvlab
