#pragma once

#include <vector>

#include "curvlab/sphere_geom.hpp"

namespace curvlab {

// Tangent-bundle normalization in |phi|^2: |dz|^2_{g0} = 2 pi (1+|z|^2)^{-2}
// on the unit-area sphere.
inline constexpr double kTangentNorm = 2.0 * kPi;

struct BundleSpec {
    int deg_L1 = 0;
    int deg_L2 = 2;
    int k() const { return deg_L2 - deg_L1; }
    bool operator==(const BundleSpec&) const = default;
};

// Throws InvalidArgument unless k >= 2.
BundleSpec make_spec(int deg_L1, int deg_L2);

// u = mean-zero part sampled on a grid, offset = its constant c.
struct ConformalFactor {
    Field u;
    double offset = 0.0;

    static ConformalFactor zero(const SphereGrid& grid);
    // Splits a full field into mean-zero part and offset.
    static ConformalFactor from_values(const SphereGrid& grid, Field values);
    double full(std::size_t node) const { return u[node] + offset; }
};

// phi = g(z) zeta_L dz with g = a_0 + a_1 z + ... + a_{k-2} z^{k-2}.
struct HoloClass {
    BundleSpec spec;
    std::vector<cplx> a;

    static HoloClass make(BundleSpec spec, std::vector<cplx> a);
    cplx g(cplx z) const;
    // G(w) = w^{k-2} g(1/w), the section in the south trivialization.
    cplx g_south(cplx w) const;
    // Largest index with a nonzero coefficient, -1 if a = 0.
    int degree() const;
    bool is_zero() const;
};

struct DivisorPoint {
    ChartPoint point;
    int multiplicity = 1;
};

struct Divisor {
    std::vector<DivisorPoint> points;
    int total() const;
};

double h0_norm_zeta(cplx z, int k);
double h0_norm_zeta_south(cplx w, int k);

// |phi|^2_{H0} = 2 pi |g|^2 (1+|z|^2)^{2-k} at a point, evaluated in
// whichever chart keeps it bounded.
double phi_norm_sq_h0_at(const HoloClass& phi, const ChartPoint& p);
// z-chart and w-chart formulas separately, for covariance checks.
double phi_norm_sq_h0_z(const HoloClass& phi, cplx z);
double phi_norm_sq_h0_w(const HoloClass& phi, cplx w);

Field phi_norm_sq(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid);
Field phi_norm_sq_h0(const HoloClass& phi, const SphereGrid& grid);

Field curvature_scalar(const ConformalFactor& u, const BundleSpec& spec, const SphereGrid& grid);
double degree_by_integration(const ConformalFactor& u, const BundleSpec& spec, const SphereGrid& grid);

// Roots of g with multiplicities, plus k-2-deg g at N (z = infinity).
// ZeroClass if a = 0.
Divisor divisor_of(const HoloClass& phi, double cluster_tol = 1e-7);

}  // namespace curvlab
