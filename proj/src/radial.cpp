#include <array>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "curvlab/pde.hpp"

namespace curvlab {

namespace {

using State = std::array<double, 2>;
namespace ode = boost::numeric::odeint;

struct Monomial {
    double log_k0 = 0.0;  // ln(4 pi |c|^2)
    int a = 0;
    int k = 2;
};

Monomial monomial_of(const HoloClass& phi) {
    int nz = 0;
    Monomial m;
    m.k = phi.spec.k();
    for (std::size_t i = 0; i < phi.a.size(); ++i)
        if (phi.a[i] != cplx(0.0)) {
            ++nz;
            m.a = static_cast<int>(i);
            m.log_k0 = std::log(2.0 * kTangentNorm * std::norm(phi.a[i]));
        }
    if (nz != 1)
        throw InvalidArgument("solve_radial: divisor must be supported on {x0, -x0} (g a single monomial)");
    return m;
}

double log2cosh(double s) {
    const double a = std::abs(s);
    return a + std::log1p(std::exp(-2.0 * a));
}

struct Rhs {
    Monomial mono;
    double lambda;
    // u'' = (lambda - K e^{2u}) / (pi (2 cosh sigma)^2).
    double forcing(double sigma, double u) const {
        const double l2c = log2cosh(sigma);
        const double logK = mono.log_k0 + 2.0 * mono.a * sigma + (2 - mono.k) * (sigma + l2c);
        return (lambda * std::exp(-2.0 * l2c) - std::exp(logK + 2.0 * u - 2.0 * l2c)) / kPi;
    }
    void operator()(const State& x, State& dx, double sigma) const {
        dx[0] = x[1];
        dx[1] = forcing(sigma, x[0]);
    }
};

struct Shot {
    State x;
    double sigma;
};

template <class Observer>
Shot shoot(const Rhs& rhs, double s, double rtol, const std::vector<double>& stops, Observer&& observe) {
    auto stepper = ode::make_controlled(rtol * 1e-2, rtol, ode::runge_kutta_dopri5<State>());
    const double start = -(25.0 + std::abs(s));
    State x{s, 0.0};
    double sigma = start;
    for (double target : stops) {
        if (target > sigma) {
            ode::integrate_adaptive(stepper, rhs, x, sigma, target, 1e-3);
            sigma = target;
        }
        observe(target, x);
    }
    // Continue until the forcing is negligible far out towards N.
    const double floor_sigma = 25.0 + std::abs(s);
    while (sigma < 500.0) {
        const double next = sigma + 2.0;
        ode::integrate_adaptive(stepper, rhs, x, sigma, next, 1e-3);
        sigma = next;
        if (sigma >= floor_sigma && std::abs(rhs.forcing(sigma, x[0])) < 1e-18) break;
    }
    return {x, sigma};
}

}  // namespace

double radial_mismatch(const HoloClass& phi, double lambda, double s, double rtol) {
    if (!(lambda > 0)) throw InvalidLambda("radial: lambda must be > 0");
    Rhs rhs{monomial_of(phi), lambda};
    return shoot(rhs, s, rtol, {}, [](double, const State&) {}).x[1];
}

std::vector<double> radial_profile(const HoloClass& phi, double lambda, double s, const std::vector<double>& colatitudes,
                                   double rtol) {
    Rhs rhs{monomial_of(phi), lambda};
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < colatitudes.size(); ++i)
        order.emplace_back(std::log(1.0 / std::tan(0.5 * colatitudes[i])), i);
    std::sort(order.begin(), order.end());
    std::vector<double> stops;
    for (auto& o : order) stops.push_back(o.first);
    std::vector<double> out(colatitudes.size());
    std::size_t idx = 0;
    shoot(rhs, s, rtol, stops, [&](double, const State& x) { out[order[idx++].second] = x[0]; });
    return out;
}

RadialResult solve_radial(const HoloClass& phi, double lambda, const RadialConfig& cfg) {
    if (cfg.samples < 2 || !(cfg.s_max > cfg.s_min)) throw InvalidArgument("solve_radial: bad sweep range");
    monomial_of(phi);
    RadialResult res;
    res.min_abs_mismatch = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.samples; ++i) {
        const double s = cfg.s_min + (cfg.s_max - cfg.s_min) * i / (cfg.samples - 1);
        const double m = radial_mismatch(phi, lambda, s, cfg.rtol);
        const double m_loose = radial_mismatch(phi, lambda, s, cfg.rtol * 100.0);
        res.curve.push_back({s, m, std::abs(m - m_loose)});
        res.error_estimate = std::max(res.error_estimate, std::abs(m - m_loose));
        if (std::abs(m) < res.min_abs_mismatch) {
            res.min_abs_mismatch = std::abs(m);
            res.s_at_min = s;
        }
    }
    const double center = std::clamp(0.0, cfg.s_min, cfg.s_max);
    // Samples already within root tolerance, nearest the centre first.
    std::vector<std::size_t> idx(res.curve.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(res.curve[a].s - center) < std::abs(res.curve[b].s - center);
    });
    for (std::size_t i : idx)
        if (std::abs(res.curve[i].mismatch) < cfg.root_tol) {
            res.root_found = true;
            res.s_star = res.curve[i].s;
            res.residual = std::abs(res.curve[i].mismatch);
            return res;
        }
    // Sign changes, nearest the centre first.
    int best = -1;
    for (std::size_t i = 0; i + 1 < res.curve.size(); ++i) {
        if (std::signbit(res.curve[i].mismatch) == std::signbit(res.curve[i + 1].mismatch)) continue;
        if (best < 0 || std::abs(res.curve[i].s - center) < std::abs(res.curve[best].s - center)) best = static_cast<int>(i);
    }
    if (best >= 0) {
        auto f = [&](double s) { return radial_mismatch(phi, lambda, s, cfg.rtol); };
        boost::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, res.curve[best].s, res.curve[best + 1].s, res.curve[best].mismatch,
                                                   res.curve[best + 1].mismatch,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
        const double s = 0.5 * (r.first + r.second);
        res.root_found = true;
        res.s_star = s;
        res.residual = std::abs(f(s));
        return res;
    }
    const auto& at_min = *std::min_element(res.curve.begin(), res.curve.end(), [](const auto& a, const auto& b) {
        return std::abs(a.mismatch) < std::abs(b.mismatch);
    });
    if (std::abs(at_min.mismatch) <= 10.0 * at_min.error) {
        std::ostringstream os;
        os << "solve_radial: minimum |mismatch| " << std::abs(at_min.mismatch) << " at s=" << at_min.s
           << " is within 10x its error estimate " << at_min.error;
        throw SweepInconclusive(os.str());
    }
    return res;
}

}  // namespace curvlab
