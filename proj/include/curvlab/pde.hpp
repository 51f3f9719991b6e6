#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/bundle.hpp"
#include "curvlab/cohomology.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/sphere_geom.hpp"

namespace curvlab {

struct SolveConfig {
    int l_max = 32;
    double newton_tol = 1e-10;      // L2 norm of the Galerkin residual
    int max_newton = 30;
    double continuation_step = 0.5;
    double min_step = 1e-4;
    double lambda_start = 0.05;     // first continuation point (capped at lambda)
    int gmres_restart = 80;
    int gmres_max_iter = 2000;

    void validate() const;  // InvalidArgument on bad values
};

struct SolveResult {
    ConformalFactor u;
    Coeffs coeffs;  // spectral coefficients of u + offset
    double lambda = 0.0;
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
    double conservation_defect = 0.0;  // |int 2|phi|_0^2 e^{2u} - lambda|
    double max_u = 0.0;
    bool converged = false;
    std::vector<TracePoint> trace;
    std::string failure;  // empty when converged
};

// Delta u + 2|phi|_0^2 e^{2u} - lambda, pointwise on the grid.
Field residual(const ConformalFactor& u, const HoloClass& phi, double lambda, const SphereGrid& grid);
// Linearization Delta d + 4|phi|_0^2 e^{2u} d.
Field jacobian_apply(const ConformalFactor& u, const HoloClass& phi, std::span<const double> direction,
                     const SphereGrid& grid);

SolveResult solve_phi_system(const HoloClass& phi, double lambda, const SolveConfig& cfg);
SolveResult solve_phi_system(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid);
// Newton at fixed lambda from a given start, no continuation.
SolveResult newton_from(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid,
                        const ConformalFactor& start);

// b_coords(phi, u_lambda); NonConvergence if the solve fails.
DualCoords forward_F(const HoloClass& phi, double lambda, const SolveConfig& cfg, const SphereGrid& grid);

// Radial reduction for g = c z^a (divisor a x0 + (k-2-a)(-x0)) in
// sigma = ln|z|: 4 pi cosh^2(sigma) u'' = lambda - K(sigma) e^{2u},
// K = 2|phi|_0^2. Shooting from x0 (sigma -> -inf) with u = s, u' = 0;
// the mismatch is u'(+inf), which vanishes exactly for smooth solutions.
struct RadialConfig {
    double s_min = -5.0;
    double s_max = 5.0;
    int samples = 101;
    double rtol = 1e-12;        // integration tolerance; error estimate reruns at 100x looser
    double root_tol = 1e-9;     // |mismatch| accepted as a root at a sample
};

struct RadialSample {
    double s = 0.0;
    double mismatch = 0.0;
    double error = 0.0;
};

struct RadialResult {
    bool root_found = false;
    double s_star = 0.0;
    double residual = 0.0;  // |mismatch| at the root
    std::vector<RadialSample> curve;
    double min_abs_mismatch = 0.0;
    double s_at_min = 0.0;
    double error_estimate = 0.0;  // max error over the sweep
};

// InvalidArgument unless phi is a single monomial; SweepInconclusive when
// the sign pattern cannot be resolved against the error estimate.
RadialResult solve_radial(const HoloClass& phi, double lambda, const RadialConfig& cfg);
double radial_mismatch(const HoloClass& phi, double lambda, double s, double rtol);
// u at the given colatitudes for shooting parameter s.
std::vector<double> radial_profile(const HoloClass& phi, double lambda, double s, const std::vector<double>& colatitudes,
                                   double rtol = 1e-12);

}  // namespace curvlab
