#pragma once

#include <limits>
#include <vector>

#include "curvlab/bundle.hpp"
#include "curvlab/cohomology.hpp"
#include "curvlab/exact.hpp"

namespace curvlab {

// h(w) = y(w) / (1 - v(w)), coefficient index = power, y[0] = v[0] = 0.
template <class T>
struct BasicCandidate {
    std::vector<T> y;
    std::vector<T> v;
};
using RationalCandidate = BasicCandidate<cplx>;
using ExactCandidate = BasicCandidate<GaussRational>;

// max(deg y, deg(1 - v)); 0 for h = 0.
int s_minus(const RationalCandidate& c);
int s_minus(const ExactCandidate& c);

// Taylor coefficients c_1..c_order of y/(1-v), as
// c_j = sum_{m=0}^{j-1} (y v^m)_j.
std::vector<cplx> series_of_rational(const RationalCandidate& c, int order);
ExactVec series_of_rational(const ExactCandidate& c, int order);

// Resultant of y/w and 1-v is nonzero (y has a forced zero at w = 0 that
// 1-v never shares). Relative threshold in floating point.
bool candidate_coprime(const ExactCandidate& c);
bool candidate_coprime(const RationalCandidate& c, double rel_tol = 1e-12);

struct MatchDetail {
    int j_star = 0;
    // Largest residual among satisfied rows, residual of the first failing row.
    double pass_residual = 0.0;
    double fail_residual = std::numeric_limits<double>::infinity();
    std::vector<cplx> q;  // Q(w) = 1 + q_1 w + ... + q_s w^s
};

// Largest j* <= k such that some candidate with s_minus <= s matches b
// through index j*-1. Rows are satisfied when the least-squares residual
// is below tol * |b|.
MatchDetail max_matching_order_detail(const DualCoords& b, int s, double tol = 1e-8);
int max_matching_order(const DualCoords& b, int s, double tol = 1e-8);
int max_matching_order(const ExactVec& b, int s);

struct DivisorReport {
    int div_eta = 0;
    int j_star = 0;
    int s_minus = 0;
    bool zero_h = false;
    RationalCandidate witness;
    int stratum_m = 0;
    // Smallest relative residual of a failing row whose success would have
    // raised div; +infinity when no such row exists. Exact mode: +infinity.
    double margin = std::numeric_limits<double>::infinity();
    double pass_residual = 0.0;
    bool boundary = false;
    bool exact = false;
};

DivisorReport div_classifier(const DualCoords& b, double tol = 1e-8);
DivisorReport div_classifier_exact(const ExactVec& b, const BundleSpec& spec);

// deg_L1 - deg_L2 < alpha < deg_L1 + deg_L2 - 2 div_eta, and alpha < 0.
bool alpha_stable(const BundleSpec& spec, int div_eta, double alpha);

struct ExistenceRange {
    int m = 1;
    double lo = 0.0;           // open interval (lo, hi) with solutions
    double hi = 0.0;
    double none_lo = 0.0;      // [none_lo, none_hi) without solutions
    double none_hi = 0.0;
};
ExistenceRange existence_range(const DualCoords& b, double tol = 1e-8);
ExistenceRange existence_range_for_stratum(const BundleSpec& spec, int m);

}  // namespace curvlab
