#include "curvlab/sphere_geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes on [-1, 1], returned in descending order of x.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

void check_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw InvalidArgument(std::string(what) + ": size " + std::to_string(got) + ", expected " +
                              std::to_string(want));
}

}  // namespace

ChartPoint ChartPoint::from_angles(double theta, double phi) {
    ChartPoint p;
    p.theta = theta;
    p.phi = phi;
    double t = std::tan(0.5 * theta);
    cplx e = std::polar(1.0, phi);
    if (theta <= 0.0) {
        p.z = cplx(kInf, 0.0);
        p.w = 0.0;
    } else if (theta >= kPi) {
        p.z = 0.0;
        p.w = cplx(kInf, 0.0);
    } else {
        p.z = e / t;
        p.w = t * std::conj(e);
    }
    return p;
}

ChartPoint ChartPoint::from_z(cplx z) {
    if (!std::isfinite(std::abs(z))) return north();
    if (z == cplx(0.0)) return south();
    double r = std::abs(z);
    ChartPoint p;
    p.z = z;
    p.w = 1.0 / z;
    p.theta = 2.0 * std::atan2(1.0, r);
    p.phi = std::arg(z);
    return p;
}

ChartPoint ChartPoint::from_w(cplx w) {
    if (!std::isfinite(std::abs(w))) return south();
    if (w == cplx(0.0)) return north();
    ChartPoint p;
    p.w = w;
    p.z = 1.0 / w;
    p.theta = 2.0 * std::atan(std::abs(w));
    p.phi = -std::arg(w);
    return p;
}

ChartPoint ChartPoint::north() { return from_angles(0.0, 0.0); }
ChartPoint ChartPoint::south() { return from_angles(kPi, 0.0); }

bool ChartPoint::z_finite() const { return std::isfinite(std::abs(z)); }
bool ChartPoint::w_finite() const { return std::isfinite(std::abs(w)); }

double ChartPoint::rho_z() const { return 0.5 * (1.0 + std::cos(theta)); }
double ChartPoint::rho_w() const { return 0.5 * (1.0 - std::cos(theta)); }

void legendre_table(int l_max, double x, std::vector<double>& out) {
    out.assign(tri_index(l_max + 1, 0), 0.0);
    double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = 1.0;
    for (int m = 0; m <= l_max; ++m) {
        if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        out[tri_index(m, m)] = pmm;
        if (m + 1 > l_max) break;
        out[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
        for (int l = m + 2; l <= l_max; ++l) {
            double l2 = static_cast<double>(l) * l, m2 = static_cast<double>(m) * m;
            double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
            double lm1 = l - 1.0;
            double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
            out[tri_index(l, m)] = a * (x * out[tri_index(l - 1, m)] - b * out[tri_index(l - 2, m)]);
        }
    }
}

SphereGrid build_grid(int l_max) {
    if (l_max < 4) throw InvalidArgument("build_grid: l_max must be >= 4, got " + std::to_string(l_max));
    int n_lat = l_max + 1 + l_max / 2;
    return build_grid(l_max, n_lat, 2 * n_lat);
}

SphereGrid build_grid(int l_max, int n_lat, int n_lon) {
    if (l_max < 4) throw InvalidArgument("build_grid: l_max must be >= 4, got " + std::to_string(l_max));
    if (n_lat < l_max + 1 || n_lon < 2 * l_max + 1)
        throw InvalidArgument("build_grid: grid too coarse for l_max");
    SphereGrid g;
    g.l_max_ = l_max;
    g.n_lat_ = n_lat;
    g.n_lon_ = n_lon;
    std::vector<double> glw;
    gauss_legendre(n_lat, g.x_, glw);
    g.s_.resize(n_lat);
    g.theta_.resize(n_lat);
    g.ring_w_.resize(n_lat);
    for (int i = 0; i < n_lat; ++i) {
        g.s_[i] = std::sqrt(1.0 - g.x_[i] * g.x_[i]);
        g.theta_[i] = std::acos(g.x_[i]);
        g.ring_w_[i] = glw[i] / (2.0 * n_lon);
    }
    g.spacing_ = g.theta_[0];
    for (int i = 1; i < n_lat; ++i) g.spacing_ = std::max(g.spacing_, g.theta_[i] - g.theta_[i - 1]);
    g.spacing_ = std::max(g.spacing_, kPi - g.theta_[n_lat - 1]);

    g.phi_.resize(n_lon);
    for (int j = 0; j < n_lon; ++j) g.phi_[j] = 2.0 * kPi * j / n_lon;
    g.chart_.resize(g.size());
    for (int i = 0; i < n_lat; ++i)
        for (int j = 0; j < n_lon; ++j)
            g.chart_[static_cast<std::size_t>(i) * n_lon + j] = ChartPoint::from_angles(g.theta_[i], g.phi_[j]);

    const std::size_t nt = tri_index(l_max + 1, 0);
    g.plm_.resize(nt * n_lat);
    g.dplm_.resize(nt * n_lat);
    std::vector<double> tab;
    for (int i = 0; i < n_lat; ++i) {
        legendre_table(l_max, g.x_[i], tab);
        std::copy(tab.begin(), tab.end(), g.plm_.begin() + static_cast<std::ptrdiff_t>(nt * i));
        double x = g.x_[i], s = g.s_[i];
        for (int m = 0; m <= l_max; ++m) {
            for (int l = m; l <= l_max; ++l) {
                double prev = l > m ? tab[tri_index(l - 1, m)] : 0.0;
                double c = l > m ? std::sqrt((2.0 * l + 1.0) * (l - m) * (l + m) / (2.0 * l - 1.0)) : 0.0;
                g.dplm_[nt * i + tri_index(l, m)] = (l * x * tab[tri_index(l, m)] - c * prev) / s;
            }
        }
    }
    g.cos_.resize(static_cast<std::size_t>(l_max + 1) * n_lon);
    g.sin_.resize(static_cast<std::size_t>(l_max + 1) * n_lon);
    for (int m = 0; m <= l_max; ++m)
        for (int j = 0; j < n_lon; ++j) {
            // Reduce m*j modulo n_lon so the phase is exact.
            double ang = 2.0 * kPi * static_cast<double>((static_cast<long>(m) * j) % n_lon) / n_lon;
            g.cos_[static_cast<std::size_t>(m) * n_lon + j] = std::cos(ang);
            g.sin_[static_cast<std::size_t>(m) * n_lon + j] = std::sin(ang);
        }
    return g;
}

Coeffs SphereGrid::analyze(std::span<const double> values) const {
    check_size(values.size(), size(), "analyze");
    Coeffs c(n_coeffs(), 0.0);
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < n_lat_; ++i) {
        const double* f = values.data() + static_cast<std::size_t>(i) * n_lon_;
        const double* p = plm_ring(i);
        const double w = ring_w_[i];
        for (int m = 0; m <= l_max_; ++m) {
            const double* cm = cos_.data() + static_cast<std::size_t>(m) * n_lon_;
            const double* sm = sin_.data() + static_cast<std::size_t>(m) * n_lon_;
            double C = 0.0, S = 0.0;
            for (int j = 0; j < n_lon_; ++j) {
                C += f[j] * cm[j];
                S += f[j] * sm[j];
            }
            if (m == 0) {
                C *= w;
                for (int l = 0; l <= l_max_; ++l) c[sh_index(l, 0)] += p[tri_index(l, 0)] * C;
            } else {
                C *= w * r2;
                S *= w * r2;
                for (int l = m; l <= l_max_; ++l) {
                    c[sh_index(l, m)] += p[tri_index(l, m)] * C;
                    c[sh_index(l, -m)] += p[tri_index(l, m)] * S;
                }
            }
        }
    }
    return c;
}

namespace {

// Sum over l of coefficients against a Legendre ring table, giving the
// cos/sin amplitudes A_m, B_m.
void ring_amplitudes(std::span<const double> c, const double* p, int l_max, std::vector<double>& A,
                     std::vector<double>& B) {
    const double r2 = std::sqrt(2.0);
    A.assign(l_max + 1, 0.0);
    B.assign(l_max + 1, 0.0);
    for (int m = 0; m <= l_max; ++m) {
        double a = 0.0, b = 0.0;
        for (int l = m; l <= l_max; ++l) {
            a += c[sh_index(l, m)] * p[tri_index(l, m)];
            if (m > 0) b += c[sh_index(l, -m)] * p[tri_index(l, m)];
        }
        A[m] = m == 0 ? a : r2 * a;
        B[m] = r2 * b;
    }
}

}  // namespace

Field SphereGrid::synthesize(std::span<const double> coeffs) const {
    check_size(coeffs.size(), n_coeffs(), "synthesize");
    Field out(size(), 0.0);
    std::vector<double> A, B;
    for (int i = 0; i < n_lat_; ++i) {
        ring_amplitudes(coeffs, plm_ring(i), l_max_, A, B);
        double* f = out.data() + static_cast<std::size_t>(i) * n_lon_;
        for (int j = 0; j < n_lon_; ++j) f[j] = A[0];
        for (int m = 1; m <= l_max_; ++m) {
            const double* cm = cos_.data() + static_cast<std::size_t>(m) * n_lon_;
            const double* sm = sin_.data() + static_cast<std::size_t>(m) * n_lon_;
            const double a = A[m], b = B[m];
            for (int j = 0; j < n_lon_; ++j) f[j] += a * cm[j] + b * sm[j];
        }
    }
    return out;
}

void SphereGrid::synthesize_gradient(std::span<const double> coeffs, Field& d_theta, Field& d_phi_over_sin) const {
    check_size(coeffs.size(), n_coeffs(), "synthesize_gradient");
    d_theta.assign(size(), 0.0);
    d_phi_over_sin.assign(size(), 0.0);
    std::vector<double> A, B, dA, dB;
    for (int i = 0; i < n_lat_; ++i) {
        ring_amplitudes(coeffs, dplm_ring(i), l_max_, dA, dB);
        ring_amplitudes(coeffs, plm_ring(i), l_max_, A, B);
        double* ft = d_theta.data() + static_cast<std::size_t>(i) * n_lon_;
        double* fp = d_phi_over_sin.data() + static_cast<std::size_t>(i) * n_lon_;
        const double inv_s = 1.0 / s_[i];
        for (int j = 0; j < n_lon_; ++j) ft[j] = dA[0];
        for (int m = 1; m <= l_max_; ++m) {
            const double* cm = cos_.data() + static_cast<std::size_t>(m) * n_lon_;
            const double* sm = sin_.data() + static_cast<std::size_t>(m) * n_lon_;
            const double pa = m * B[m] * inv_s, pb = -m * A[m] * inv_s;
            for (int j = 0; j < n_lon_; ++j) {
                ft[j] += dA[m] * cm[j] + dB[m] * sm[j];
                fp[j] += pa * cm[j] + pb * sm[j];
            }
        }
    }
}

double SphereGrid::evaluate(std::span<const double> coeffs, double theta, double phi) const {
    check_size(coeffs.size(), n_coeffs(), "evaluate");
    std::vector<double> tab, A, B;
    legendre_table(l_max_, std::cos(theta), tab);
    ring_amplitudes(coeffs, tab.data(), l_max_, A, B);
    double v = A[0];
    for (int m = 1; m <= l_max_; ++m) v += A[m] * std::cos(m * phi) + B[m] * std::sin(m * phi);
    return v;
}

double integrate(std::span<const double> f, const SphereGrid& grid) {
    check_size(f.size(), grid.size(), "integrate");
    double total = 0.0;
    const int nl = grid.n_lon();
    for (int i = 0; i < grid.n_lat(); ++i) {
        double ring = 0.0;
        for (int j = 0; j < nl; ++j) ring += f[static_cast<std::size_t>(i) * nl + j];
        total += grid.ring_weights()[i] * ring;
    }
    return total;
}

cplx integrate(std::span<const cplx> f, const SphereGrid& grid) {
    check_size(f.size(), grid.size(), "integrate");
    cplx total = 0.0;
    const int nl = grid.n_lon();
    for (int i = 0; i < grid.n_lat(); ++i) {
        cplx ring = 0.0;
        for (int j = 0; j < nl; ++j) ring += f[static_cast<std::size_t>(i) * nl + j];
        total += grid.ring_weights()[i] * ring;
    }
    return total;
}

double laplace_eigenvalue(int l) { return -kLaplaceScale * l * (l + 1.0); }

Coeffs laplacian_coeffs(std::span<const double> coeffs, int l_max) {
    check_size(coeffs.size(), sh_count(l_max), "laplacian_coeffs");
    Coeffs out(coeffs.begin(), coeffs.end());
    for (int l = 0; l <= l_max; ++l)
        for (int m = -l; m <= l; ++m) out[sh_index(l, m)] *= laplace_eigenvalue(l);
    return out;
}

Field laplacian(std::span<const double> f, const SphereGrid& grid) {
    return grid.synthesize(laplacian_coeffs(grid.analyze(f), grid.l_max()));
}

Field solve_poisson(std::span<const double> rhs, const SphereGrid& grid, double tol) {
    Coeffs c = grid.analyze(rhs);
    if (std::abs(c[0]) > tol)
        throw NonZeroMean("solve_poisson: right-hand side has mean " + std::to_string(c[0]));
    c[0] = 0.0;
    for (int l = 1; l <= grid.l_max(); ++l)
        for (int m = -l; m <= l; ++m) c[sh_index(l, m)] /= laplace_eigenvalue(l);
    return grid.synthesize(c);
}

Field laplacian_pointwise(const std::function<double(double, double)>& f, const SphereGrid& grid) {
    Field out(grid.size());
    auto d1 = [](double m2, double m1, double p1, double p2, double h) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    };
    auto d2 = [](double m2, double m1, double c, double p1, double p2, double h) {
        return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    };
    for (int i = 0; i < grid.n_lat(); ++i) {
        const double th = grid.colatitude(i);
        const double ht = 5e-3 * std::min(th, kPi - th);
        const double hp = 5e-3;
        const double s = std::sin(th);
        for (int j = 0; j < grid.n_lon(); ++j) {
            const double ph = grid.longitude(j);
            const double c = f(th, ph);
            const double tm2 = f(th - 2 * ht, ph), tm1 = f(th - ht, ph), tp1 = f(th + ht, ph), tp2 = f(th + 2 * ht, ph);
            const double pm2 = f(th, ph - 2 * hp), pm1 = f(th, ph - hp), pp1 = f(th, ph + hp), pp2 = f(th, ph + 2 * hp);
            const double ftt = d2(tm2, tm1, c, tp1, tp2, ht);
            const double ft = d1(tm2, tm1, tp1, tp2, ht);
            const double fpp = d2(pm2, pm1, c, pp1, pp2, hp);
            out[static_cast<std::size_t>(i) * grid.n_lon() + j] =
                kLaplaceScale * (ftt + std::cos(th) / s * ft + fpp / (s * s));
        }
    }
    return out;
}

Field sample(const SphereGrid& grid, const std::function<double(const ChartPoint&)>& f) {
    Field out(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] = f(grid.chart(n));
    return out;
}

CField sample_complex(const SphereGrid& grid, const std::function<cplx(const ChartPoint&)>& f) {
    CField out(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] = f(grid.chart(n));
    return out;
}

double real_ylm(int l, int m, double theta, double phi) {
    int am = std::abs(m);
    if (am > l) throw InvalidArgument("real_ylm: |m| > l");
    std::vector<double> tab;
    legendre_table(l, std::cos(theta), tab);
    double p = tab[tri_index(l, am)];
    if (m == 0) return p;
    return std::sqrt(2.0) * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

}  // namespace curvlab
