#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace curvlab {

// Element of Q(i) with GMP rationals.
struct GaussRational {
    mpq_class re{0}, im{0};

    GaussRational() = default;
    GaussRational(mpq_class r) : re(std::move(r)) { re.canonicalize(); }
    GaussRational(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }
    GaussRational(int r) : re(r) {}

    // Exact conversion of the binary doubles.
    static GaussRational from_complex(std::complex<double> z);
    // Real and imaginary parts as "p/q" strings.
    static GaussRational parse(const std::string& re, const std::string& im);

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    GaussRational conj() const { return {re, -im}; }
    mpq_class norm() const { return re * re + im * im; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
    std::string str() const;

    GaussRational& operator+=(const GaussRational& o);
    GaussRational& operator-=(const GaussRational& o);
    GaussRational& operator*=(const GaussRational& o);
    GaussRational& operator/=(const GaussRational& o);
    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    GaussRational operator-() const { return {-re, -im}; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }
};

using ExactVec = std::vector<GaussRational>;
using ExactMatrix = std::vector<ExactVec>;

// Exact Gaussian elimination over Q(i).
int exact_rank(ExactMatrix m);
GaussRational exact_determinant(ExactMatrix m);
// Resultant of two polynomials (coefficient index = power) via the
// Sylvester determinant. Degrees are taken from the highest nonzero entry.
GaussRational exact_resultant(const ExactVec& p, const ExactVec& q);

}  // namespace curvlab
