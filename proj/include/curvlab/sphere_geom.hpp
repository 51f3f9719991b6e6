#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace curvlab {

using cplx = std::complex<double>;
using Field = std::vector<double>;
using CField = std::vector<cplx>;
using Coeffs = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;

// Unit-area round sphere: radius 1/(2 sqrt(pi)), Gaussian curvature 4 pi.
// Delta Y_l = -kLaplaceScale * l(l+1) * Y_l.
inline constexpr double kLaplaceScale = 4.0 * kPi;

// Stereographic coordinates. z has its pole at N = (0,0,1), w = 1/z has its
// pole at S. x0 (the chart origin z = 0) is S; -x0 is N.
struct ChartPoint {
    cplx z;
    cplx w;
    double theta = 0.0;
    double phi = 0.0;

    static ChartPoint from_angles(double theta, double phi);
    static ChartPoint from_z(cplx z);
    static ChartPoint from_w(cplx w);
    static ChartPoint north();
    static ChartPoint south();

    bool z_finite() const;
    bool w_finite() const;
    // |z|^2 / (1+|z|^2) and 1/(1+|z|^2), valid at both poles.
    double rho_z() const;
    double rho_w() const;
};

// Spherical harmonic index for real harmonics, m in [-l, l].
inline constexpr std::size_t sh_index(int l, int m) {
    return static_cast<std::size_t>(l * l + l + m);
}
inline constexpr std::size_t sh_count(int l_max) {
    return static_cast<std::size_t>((l_max + 1) * (l_max + 1));
}

// Fully normalized associated Legendre values Pbar_l^m(x), m >= 0, with
// int_{-1}^{1} Pbar^2 dx = 2. Stored at tri_index(l, m).
inline constexpr std::size_t tri_index(int l, int m) {
    return static_cast<std::size_t>(l * (l + 1) / 2 + m);
}
void legendre_table(int l_max, double x, std::vector<double>& out);

// Gauss-Legendre latitudes x equispaced longitudes. Weights sum to 1.
// Real spherical harmonics are orthonormal for the normalized measure, so
// Y_00 = 1. Node index is i * n_lon + j, colatitude ascending from N.
// All reductions are sequential in a fixed order, so results are bitwise
// reproducible for the same inputs.
class SphereGrid {
public:
    int l_max() const { return l_max_; }
    int n_lat() const { return n_lat_; }
    int n_lon() const { return n_lon_; }
    std::size_t size() const { return static_cast<std::size_t>(n_lat_) * n_lon_; }
    std::size_t n_coeffs() const { return sh_count(l_max_); }

    double colatitude(int i) const { return theta_[i]; }
    double longitude(int j) const { return phi_[j]; }
    double cos_colat(int i) const { return x_[i]; }
    double sin_colat(int i) const { return s_[i]; }
    double weight(std::size_t node) const { return ring_w_[node / n_lon_]; }
    const std::vector<double>& ring_weights() const { return ring_w_; }
    const ChartPoint& chart(std::size_t node) const { return chart_[node]; }
    const std::vector<ChartPoint>& charts() const { return chart_; }
    // Largest angular distance between neighbouring latitude rings.
    double spacing() const { return spacing_; }

    Coeffs analyze(std::span<const double> values) const;
    Field synthesize(std::span<const double> coeffs) const;
    // d/dtheta and (1/sin theta) d/dphi of the synthesized field.
    void synthesize_gradient(std::span<const double> coeffs, Field& d_theta, Field& d_phi_over_sin) const;
    double evaluate(std::span<const double> coeffs, double theta, double phi) const;

    friend SphereGrid build_grid(int l_max);
    friend SphereGrid build_grid(int l_max, int n_lat, int n_lon);

private:
    int l_max_ = 0, n_lat_ = 0, n_lon_ = 0;
    double spacing_ = 0.0;
    std::vector<double> x_, s_, theta_, phi_, ring_w_;
    std::vector<ChartPoint> chart_;
    std::vector<double> plm_;   // [ring][tri]
    std::vector<double> dplm_;  // d/dtheta, [ring][tri]
    std::vector<double> cos_, sin_;  // [m][j]

    const double* plm_ring(int i) const { return plm_.data() + static_cast<std::size_t>(i) * tri_index(l_max_ + 1, 0); }
    const double* dplm_ring(int i) const { return dplm_.data() + static_cast<std::size_t>(i) * tri_index(l_max_ + 1, 0); }
};

// Throws InvalidArgument for l_max < 4. Default sizes pad by 3/2 over the
// minimum (n_lat >= l_max+1, n_lon >= 2 l_max + 1) to damp aliasing in
// nonlinear products.
SphereGrid build_grid(int l_max);
SphereGrid build_grid(int l_max, int n_lat, int n_lon);

double integrate(std::span<const double> f, const SphereGrid& grid);
cplx integrate(std::span<const cplx> f, const SphereGrid& grid);

Field laplacian(std::span<const double> f, const SphereGrid& grid);
Coeffs laplacian_coeffs(std::span<const double> coeffs, int l_max);
double laplace_eigenvalue(int l);

// Mean-zero solution of laplacian(u) = rhs. NonZeroMean if |mean(rhs)| > tol.
Field solve_poisson(std::span<const double> rhs, const SphereGrid& grid, double tol = 1e-8);

// Chart-local Laplacian of a field given in closed form, by high-order
// central differences in (theta, phi) at each node. Used for fields with
// logarithmic pole singularities, where a spectral Laplacian has Gibbs
// ringing everywhere.
Field laplacian_pointwise(const std::function<double(double, double)>& f, const SphereGrid& grid);

Field sample(const SphereGrid& grid, const std::function<double(const ChartPoint&)>& f);
CField sample_complex(const SphereGrid& grid, const std::function<cplx(const ChartPoint&)>& f);

// Real spherical harmonic Y_lm at a point (orthonormal, Y_00 = 1).
double real_ylm(int l, int m, double theta, double phi);

}  // namespace curvlab
