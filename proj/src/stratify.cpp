#include "curvlab/stratify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "curvlab/errors.hpp"
#include "curvlab/poly.hpp"

namespace curvlab {

namespace {

template <class T, class IsZero>
int s_minus_impl(const BasicCandidate<T>& c, IsZero is_zero) {
    int dy = poly::degree(c.y, is_zero);
    std::vector<T> one_minus_v(std::max<std::size_t>(c.v.size(), 1), T{});
    one_minus_v[0] = T{1};
    for (std::size_t i = 1; i < c.v.size(); ++i) one_minus_v[i] = -c.v[i];
    int dv = poly::degree(one_minus_v, is_zero);
    return std::max({dy, dv, 0});
}

template <class T>
std::vector<T> series_impl(const BasicCandidate<T>& c, int order) {
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    std::vector<T> out(n, T{});
    std::vector<T> term(c.y.begin(), c.y.begin() + std::min(c.y.size(), n));
    term.resize(n, T{});
    for (int m = 0; m < order; ++m) {
        for (std::size_t j = 1; j < n; ++j) out[j] += term[j];
        term = poly::mul_trunc(term, c.v, n);
    }
    return {out.begin() + 1, out.end()};
}

bool cz(const cplx& v) { return v == cplx(0.0); }
bool gz(const GaussRational& v) { return v.is_zero(); }

}  // namespace

int s_minus(const RationalCandidate& c) { return s_minus_impl(c, cz); }
int s_minus(const ExactCandidate& c) { return s_minus_impl(c, gz); }

std::vector<cplx> series_of_rational(const RationalCandidate& c, int order) { return series_impl(c, order); }
ExactVec series_of_rational(const ExactCandidate& c, int order) { return series_impl(c, order); }

bool candidate_coprime(const ExactCandidate& c) {
    if (!c.y.empty() && !c.y[0].is_zero()) throw InvalidArgument("candidate: y(0) must be 0");
    ExactVec y_over_w(c.y.size() > 1 ? c.y.begin() + 1 : c.y.end(), c.y.end());
    ExactVec q(std::max<std::size_t>(c.v.size(), 1));
    q[0] = GaussRational(1);
    for (std::size_t i = 1; i < c.v.size(); ++i) q[i] = -c.v[i];
    if (poly::degree(y_over_w, gz) < 0) return false;
    return !exact_resultant(y_over_w, q).is_zero();
}

bool candidate_coprime(const RationalCandidate& c, double rel_tol) {
    std::vector<cplx> y_over_w(c.y.size() > 1 ? c.y.begin() + 1 : c.y.end(), c.y.end());
    std::vector<cplx> q(std::max<std::size_t>(c.v.size(), 1), 0.0);
    q[0] = 1.0;
    for (std::size_t i = 1; i < c.v.size(); ++i) q[i] = -c.v[i];
    const int dy = poly::degree(y_over_w, cz), dq = poly::degree(q, cz);
    if (dy < 0) return false;
    if (dy == 0 || dq == 0) return true;
    const int n = dy + dq;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < dq; ++r)
        for (int i = 0; i <= dy; ++i) s(r, r + i) = y_over_w[dy - i];
    for (int r = 0; r < dy; ++r)
        for (int i = 0; i <= dq; ++i) s(dq + r, r + i) = q[dq - i];
    // Scale-free test: smallest singular value against the largest.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
    const auto& sv = svd.singularValues();
    return sv(n - 1) > rel_tol * sv(0);
}

namespace {

// Rows n = s+1..t of (Q B)_n = 0: sum_{i=1}^{s} q_i b_{n-i} = -b_n,
// with b stored 0-based (b[n-1] = b_n) and b_m = 0 for m <= 0.
template <class T>
void hankel_rows(const std::vector<T>& b, int s, int t, std::vector<std::vector<T>>& H, std::vector<T>& r) {
    H.clear();
    r.clear();
    for (int n = s + 1; n <= t; ++n) {
        std::vector<T> row(s, T{});
        for (int i = 1; i <= s; ++i)
            if (n - i >= 1) row[i - 1] = b[n - i - 1];
        H.push_back(row);
        r.push_back(-b[n - 1]);
    }
}

struct LsqResult {
    double residual;
    Eigen::VectorXcd q;
};

LsqResult lsq(const std::vector<std::vector<cplx>>& H, const std::vector<cplx>& r, int s, double cutoff) {
    const int rows = static_cast<int>(H.size());
    Eigen::VectorXcd rhs(rows);
    for (int i = 0; i < rows; ++i) rhs(i) = r[i];
    if (s == 0) return {rhs.norm(), Eigen::VectorXcd()};
    Eigen::MatrixXcd A(rows, s);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < s; ++j) A(i, j) = H[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(cutoff / std::max(1e-300, svd.singularValues().size() ? svd.singularValues()(0) : 1.0));
    Eigen::VectorXcd q = svd.solve(rhs);
    return {(A * q - rhs).norm(), q};
}

}  // namespace

MatchDetail max_matching_order_detail(const DualCoords& b, int s, double tol) {
    const int k = b.spec.k();
    if (s < 0 || s > k - 1) throw InvalidArgument("max_matching_order: s out of range");
    const double nb = b.norm();
    if (nb == 0.0) throw ZeroClass("max_matching_order: zero class");
    std::vector<cplx> bn(b.b);
    for (auto& v : bn) v /= nb;
    MatchDetail d;
    d.j_star = k;
    std::vector<std::vector<cplx>> H;
    std::vector<cplx> r;
    Eigen::VectorXcd last_q = Eigen::VectorXcd::Zero(s);
    for (int t = s + 1; t <= k - 1; ++t) {
        hankel_rows(bn, s, t, H, r);
        LsqResult res = lsq(H, r, s, tol);
        if (res.residual > tol) {
            d.j_star = t;
            d.fail_residual = res.residual;
            break;
        }
        d.pass_residual = std::max(d.pass_residual, res.residual);
        last_q = res.q;
    }
    d.q.assign(last_q.data(), last_q.data() + last_q.size());
    return d;
}

int max_matching_order(const DualCoords& b, int s, double tol) { return max_matching_order_detail(b, s, tol).j_star; }

namespace {

bool exact_consistent(const ExactVec& b, int s, int t) {
    std::vector<ExactVec> H;
    ExactVec r;
    hankel_rows(b, s, t, H, r);
    if (s == 0) {
        for (const auto& v : r)
            if (!v.is_zero()) return false;
        return true;
    }
    ExactMatrix aug = H;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(r[i]);
    return exact_rank(H) == exact_rank(aug);
}

// A solution of the consistent system by exact elimination (free variables 0).
ExactVec exact_solve(const ExactVec& b, int s, int t) {
    std::vector<ExactVec> H;
    ExactVec r;
    hankel_rows(b, s, t, H, r);
    ExactMatrix m = H;
    for (std::size_t i = 0; i < m.size(); ++i) m[i].push_back(r[i]);
    const std::size_t rows = m.size();
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (int c = 0; c < s && row < rows; ++c) {
        std::size_t p = row;
        while (p < rows && m[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[row]);
        GaussRational inv = GaussRational(1) / m[row][c];
        for (auto& v : m[row]) v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row || m[i][c].is_zero()) continue;
            GaussRational f = m[i][c];
            for (int j = c; j <= s; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(c);
        ++row;
    }
    ExactVec q(s);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) q[pivot_col[i]] = m[i][s];
    return q;
}

int exact_j_star(const ExactVec& b, int s, int k) {
    for (int t = s + 1; t <= k - 1; ++t)
        if (!exact_consistent(b, s, t)) return t;
    return k;
}

template <class T>
BasicCandidate<T> witness_from_q(const std::vector<T>& b, const std::vector<T>& q, int s) {
    // Q = 1 + sum q_i w^i, v = 1 - Q, y = Q B mod w^{s+1}.
    BasicCandidate<T> c;
    c.v.assign(s + 1, T{});
    c.y.assign(s + 1, T{});
    for (int i = 1; i <= s; ++i) c.v[i] = -q[i - 1];
    for (int n = 1; n <= s; ++n) {
        T acc = n - 1 < static_cast<int>(b.size()) ? b[n - 1] : T{};
        for (int i = 1; i <= s && i < n; ++i) acc += q[i - 1] * b[n - i - 1];
        c.y[n] = acc;
    }
    return c;
}

void finish_report(DivisorReport& rep, const BundleSpec& spec, double tol) {
    rep.div_eta = std::max(spec.deg_L1, spec.deg_L1 + rep.j_star - rep.s_minus);
    rep.stratum_m = spec.deg_L2 - rep.div_eta;
    rep.boundary = rep.margin < 10.0 * tol;
}

}  // namespace

int max_matching_order(const ExactVec& b, int s) {
    const int k = static_cast<int>(b.size()) + 1;
    if (s < 0 || s > k - 1) throw InvalidArgument("max_matching_order: s out of range");
    return exact_j_star(b, s, k);
}

DivisorReport div_classifier(const DualCoords& b, double tol) {
    if (b.is_zero() || b.norm() == 0.0) throw ZeroClass("div_classifier: [eta] = 0 is excluded");
    const int k = b.spec.k();
    std::vector<MatchDetail> details(k);
    for (int s = 0; s <= k - 1; ++s) details[s] = max_matching_order_detail(b, s, tol);
    int best_s = 0, best = details[0].j_star;
    for (int s = 1; s <= k - 1; ++s)
        if (details[s].j_star - s > best - best_s) {
            best = details[s].j_star;
            best_s = s;
        }
    DivisorReport rep;
    rep.j_star = best;
    rep.s_minus = best_s;
    rep.pass_residual = details[best_s].pass_residual;
    for (int s = 0; s <= k - 1; ++s)
        if (details[s].j_star < k && details[s].j_star + 1 - s > best - best_s)
            rep.margin = std::min(rep.margin, details[s].fail_residual);
    if (best_s == 0) {
        rep.zero_h = true;
    } else {
        std::vector<cplx> bn(b.b);
        const double nb = b.norm();
        for (auto& v : bn) v /= nb;
        rep.witness = witness_from_q(bn, details[best_s].q, best_s);
        for (auto& v : rep.witness.y) v *= nb;
    }
    finish_report(rep, b.spec, tol);
    return rep;
}

DivisorReport div_classifier_exact(const ExactVec& b, const BundleSpec& spec) {
    const int k = spec.k();
    if (static_cast<int>(b.size()) != k - 1) throw SpecMismatch("div_classifier_exact: expected k-1 coordinates");
    if (std::all_of(b.begin(), b.end(), [](const GaussRational& v) { return v.is_zero(); }))
        throw ZeroClass("div_classifier_exact: [eta] = 0 is excluded");
    int best_s = 0, best = exact_j_star(b, 0, k);
    for (int s = 1; s <= k - 1; ++s) {
        int j = exact_j_star(b, s, k);
        if (j - s > best - best_s) {
            best = j;
            best_s = s;
        }
    }
    DivisorReport rep;
    rep.exact = true;
    rep.j_star = best;
    rep.s_minus = best_s;
    if (best_s == 0) {
        rep.zero_h = true;
    } else {
        ExactVec q = exact_solve(b, best_s, best - 1);
        ExactCandidate w = witness_from_q(b, q, best_s);
        for (auto& v : w.y) rep.witness.y.push_back(v.to_complex());
        for (auto& v : w.v) rep.witness.v.push_back(v.to_complex());
    }
    finish_report(rep, spec, 0.0);
    rep.boundary = false;
    return rep;
}

bool alpha_stable(const BundleSpec& spec, int div_eta, double alpha) {
    return spec.deg_L1 - spec.deg_L2 < alpha && alpha < spec.deg_L1 + spec.deg_L2 - 2.0 * div_eta && alpha < 0.0;
}

ExistenceRange existence_range_for_stratum(const BundleSpec& spec, int m) {
    ExistenceRange r;
    r.m = m;
    r.lo = 0.0;
    r.hi = 4.0 * kPi * m;
    r.none_lo = 4.0 * kPi * m;
    r.none_hi = 2.0 * kPi * spec.k();
    return r;
}

ExistenceRange existence_range(const DualCoords& b, double tol) {
    return existence_range_for_stratum(b.spec, div_classifier(b, tol).stratum_m);
}

}  // namespace curvlab
