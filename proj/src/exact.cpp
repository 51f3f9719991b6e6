#include "curvlab/exact.hpp"

#include <utility>

#include "curvlab/errors.hpp"

namespace curvlab {

GaussRational GaussRational::from_complex(std::complex<double> z) {
    return {mpq_class(z.real()), mpq_class(z.imag())};
}

GaussRational GaussRational::parse(const std::string& re, const std::string& im) {
    try {
        mpq_class r(re), i(im);
        r.canonicalize();
        i.canonicalize();
        return {r, i};
    } catch (const std::invalid_argument&) {
        throw InvalidArgument("GaussRational: cannot parse '" + re + "', '" + im + "'");
    }
}

std::string GaussRational::str() const { return re.get_str() + (sgn(im) < 0 ? "" : "+") + im.get_str() + "i"; }

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re += o.re;
    im += o.im;
    return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
    mpq_class r = re * o.re - im * o.im;
    mpq_class i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    mpq_class d = o.norm();
    if (sgn(d) == 0) throw InvalidArgument("GaussRational: division by zero");
    mpq_class r = (re * o.re + im * o.im) / d;
    mpq_class i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

namespace {

// Row-reduces in place; returns rank and accumulates the determinant sign
// and pivot product when square.
int eliminate(ExactMatrix& m, GaussRational* det) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::size_t r = 0;
    if (det) *det = GaussRational(1);
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c].is_zero()) ++piv;
        if (piv == rows) {
            if (det) *det = GaussRational(0);
            continue;
        }
        if (piv != r) {
            std::swap(m[piv], m[r]);
            if (det) *det = -*det;
        }
        if (det) *det *= m[r][c];
        const GaussRational inv = GaussRational(1) / m[r][c];
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c].is_zero()) continue;
            const GaussRational f = m[i][c] * inv;
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return static_cast<int>(r);
}

int exact_degree(const ExactVec& p) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (!p[i].is_zero()) return static_cast<int>(i);
    return -1;
}

}  // namespace

int exact_rank(ExactMatrix m) { return eliminate(m, nullptr); }

GaussRational exact_determinant(ExactMatrix m) {
    if (m.empty()) return GaussRational(1);
    if (m.size() != m[0].size()) throw InvalidArgument("exact_determinant: matrix not square");
    GaussRational det;
    int rank = eliminate(m, &det);
    if (rank < static_cast<int>(m.size())) return GaussRational(0);
    return det;
}

GaussRational exact_resultant(const ExactVec& p, const ExactVec& q) {
    const int dp = exact_degree(p), dq = exact_degree(q);
    if (dp < 0 || dq < 0) return GaussRational(0);
    // Res(c, q) = c^{deg q} for a constant c, and symmetrically.
    if (dp == 0 || dq == 0) {
        const GaussRational& c = dp == 0 ? p[0] : q[0];
        GaussRational v(1);
        for (int i = 0; i < (dp == 0 ? dq : dp); ++i) v *= c;
        return v;
    }
    const int n = dp + dq;
    ExactMatrix s(n, ExactVec(n));
    // dq shifted copies of p, then dp shifted copies of q, descending powers.
    for (int r = 0; r < dq; ++r)
        for (int i = 0; i <= dp; ++i) s[r][r + i] = p[dp - i];
    for (int r = 0; r < dp; ++r)
        for (int i = 0; i <= dq; ++i) s[dq + r][r + i] = q[dq - i];
    return exact_determinant(std::move(s));
}

}  // namespace curvlab
