#pragma once

#include <random>
#include <vector>

#include "curvlab/bundle.hpp"
#include "curvlab/sphere_geom.hpp"

namespace curvlab {

// Coordinates b_1..b_{k-1} (stored at b[j-1]) of a class in H^{0,1}(L*),
// in the basis dual to beta_j = z^{j-1} zeta_L dz.
struct DualCoords {
    BundleSpec spec;
    std::vector<cplx> b;

    static DualCoords make(BundleSpec spec, std::vector<cplx> b);
    double norm() const;
    bool is_zero() const;
};

// Sphere isometry z -> (alpha z + beta)/(-conj(beta) z + conj(alpha)),
// preceded by z -> conj(z) when reversing.
struct IsometryAction {
    cplx alpha = 1.0;
    cplx beta = 0.0;
    bool reversing = false;

    static IsometryAction identity();
    static IsometryAction rotation_about_axis(double angle);
    // z -> conj(z): reflection in the plane through the axis and z = 1.
    static IsometryAction reflection();
    static IsometryAction random_rotation(std::mt19937_64& rng);
    // Normalizes (alpha, beta) to |alpha|^2+|beta|^2 = 1.
    static IsometryAction make(cplx alpha, cplx beta, bool reversing);

    ChartPoint apply(const ChartPoint& p) const;
    double unit_defect() const;
};

// (f o g)(x) = f(g(x)).
IsometryAction compose(const IsometryAction& f, const IsometryAction& g);

// Algebraic pairing sum_j a_{j-1} b_j.
cplx coupling(const HoloClass& phi, const DualCoords& eta);

// b_j = 2 pi int z^{j-1} conj(g) (1+|z|^2)^{2-k} e^{2(u+c)} dnu.
DualCoords b_coords(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid);
DualCoords dual_map_H0(const HoloClass& phi);

// Matrix M with dual_map_H0(a) = M conj(a), assembled once per k by quadrature.
struct DualizationMap {
    int k = 0;
    std::vector<cplx> matrix;  // row-major (k-1)x(k-1)
    double condition = 0.0;

    DualCoords apply(const HoloClass& phi) const;
    HoloClass invert(const DualCoords& eta) const;
};
const DualizationMap& dualization_for(int k);
HoloClass dual_map_H0_inverse(const DualCoords& eta);

// Solution of dbar_z f = h / (1+|z|^2)^2 with
// h = -2 pi conj(g) (1+|z|^2)^{2-k} e^{2(u+c)}, f(N) = 0. Near N,
// f = -sum_j p_f[j-1] w^j + O(|w|^k).
struct DbarSolution {
    BundleSpec spec;
    Coeffs f_re, f_im;
    CField f;
    std::vector<cplx> p_f;
    cplx f_north;
    double residual_rel_l2 = 0.0;
    double solvability_defect = 0.0;
    // Fitted exponent of max |f + p_f| on dyadic circles around N;
    // +infinity if the remainder is below roundoff.
    double remainder_slope = 0.0;

    cplx value_at(const SphereGrid& grid, double theta, double phi) const;
};
DbarSolution dbar_solve(const HoloClass& phi, const ConformalFactor& u, const SphereGrid& grid);

HoloClass pullback_class(const IsometryAction& iso, const HoloClass& phi);
DualCoords pullback_dual(const IsometryAction& iso, const DualCoords& eta);

// Fubini-Study distance arccos(|<a,b>| / (|a||b|)).
double projective_angle(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace curvlab
