#include <doctest.h>

#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/stratify.hpp"

using namespace curvlab;

namespace {

// c_n = y_n + sum_{i=1}^{n-1} v_i c_{n-i}: long division of y by 1 - v.
ExactVec divide_series(const ExactCandidate& c, int order) {
    ExactVec out(order + 1);
    for (int n = 1; n <= order; ++n) {
        GaussRational acc = n < static_cast<int>(c.y.size()) ? c.y[n] : GaussRational{};
        for (int i = 1; i < n && i < static_cast<int>(c.v.size()); ++i) acc += c.v[i] * out[n - i];
        out[n] = acc;
    }
    return {out.begin() + 1, out.end()};
}

GaussRational small_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    return {mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng))};
}

ExactCandidate random_candidate(int s, std::mt19937_64& rng) {
    ExactCandidate c;
    c.y.assign(s + 1, GaussRational{});
    c.v.assign(s + 1, GaussRational{});
    for (int i = 1; i <= s; ++i) {
        c.y[i] = small_rational(rng);
        c.v[i] = small_rational(rng);
    }
    while (c.v[s].is_zero()) c.v[s] = small_rational(rng);
    return c;
}

std::vector<cplx> to_cplx(const ExactVec& v) {
    std::vector<cplx> out;
    for (const auto& x : v) out.push_back(x.to_complex());
    return out;
}

}  // namespace

TEST_CASE("GaussRational arithmetic is exact") {
    GaussRational a = GaussRational::parse("1/3", "-2/5");
    GaussRational b = GaussRational::from_complex({0.1, 0.0});
    CHECK(b.re != mpq_class(1, 10));
    CHECK(b.re.get_d() == 0.1);
    CHECK((a * a.conj()).im == 0);
    CHECK((a * a.conj()).re == a.norm());
    CHECK((a / a) == GaussRational(1));
    CHECK((a - a).is_zero());
    CHECK_THROWS(GaussRational(1) / GaussRational{});
}

TEST_CASE("exact rank and determinant") {
    ExactMatrix m{{1, 2, 3}, {2, 4, 6}, {1, 0, 1}};
    CHECK(exact_rank(m) == 2);
    CHECK(exact_determinant(m).is_zero());
    ExactMatrix d{{2, 0, 1}, {1, 3, 0}, {0, 1, 4}};
    CHECK(exact_determinant(d) == GaussRational(25));
    ExactMatrix c{{GaussRational(0, 1), 1}, {1, GaussRational(0, 1)}};
    CHECK(exact_determinant(c) == GaussRational(-2));
}

TEST_CASE("exact resultant vanishes exactly on common roots") {
    // (x-1)(x-2) = x^2 - 3x + 2.
    ExactVec p{2, -3, 1};
    CHECK_FALSE(exact_resultant(p, ExactVec{6, 1, -1}).is_zero());  // -(x-3)(x+2)
    ExactVec q{-6, 1, 1};                                      // (x+3)(x-2)
    CHECK(exact_resultant(p, q).is_zero());
    ExactVec lin{3, 1};  // x + 3
    CHECK(exact_resultant(p, lin).norm() == 400);
}

TEST_CASE("series_of_rational agrees with long division") {
    std::mt19937_64 rng(21);
    for (int s = 1; s <= 4; ++s) {
        ExactCandidate c = random_candidate(s, rng);
        ExactVec a = series_of_rational(c, 9), b = divide_series(c, 9);
        CHECK(a == b);
        std::vector<cplx> f = series_of_rational(RationalCandidate{to_cplx(c.y), to_cplx(c.v)}, 9);
        for (int i = 0; i < 9; ++i) CHECK(std::abs(f[i] - b[i].to_complex()) < 1e-9 * (1 + std::abs(f[i])));
    }
}

TEST_CASE("s_minus is the larger of the two degrees") {
    ExactCandidate c{{0, 1, 0, 0}, {0, 0, 2, 0}};
    CHECK(s_minus(c) == 2);
    RationalCandidate r{{0.0, 0.0, 0.0, 1.0}, {0.0, 1.0}};
    CHECK(s_minus(r) == 3);
    CHECK(s_minus(RationalCandidate{{0.0}, {0.0}}) == 0);
}

TEST_CASE("exact classifier roundtrip on generic candidates") {
    std::mt19937_64 rng(22);
    for (int k = 3; k <= 7; ++k) {
        int checked = 0;
        for (int t = 0; t < 40; ++t) {
            std::uniform_int_distribution<int> sd(1, k / 2);
            ExactCandidate c = random_candidate(sd(rng), rng);
            if (!candidate_coprime(c)) continue;
            ++checked;
            const BundleSpec spec = make_spec(-1, k - 1);
            DivisorReport r = div_classifier_exact(series_of_rational(c, k - 1), spec);
            CHECK(r.div_eta == spec.deg_L1 + k - s_minus(c));
            CHECK(r.exact);
        }
        CHECK(checked > 20);
    }
}

TEST_CASE("exact witness reproduces b") {
    std::mt19937_64 rng(23);
    const int k = 6;
    ExactCandidate c = random_candidate(2, rng);
    REQUIRE(candidate_coprime(c));
    ExactVec b = series_of_rational(c, k - 1);
    DivisorReport r = div_classifier_exact(b, make_spec(0, k));
    CHECK(r.s_minus == 2);
    std::vector<cplx> back = series_of_rational(r.witness, k - 1);
    for (int i = 0; i < k - 1; ++i) CHECK(std::abs(back[i] - b[i].to_complex()) < 1e-9 * (1 + std::abs(back[i])));
}

TEST_CASE("floating classifier agrees with exact on rational data") {
    std::mt19937_64 rng(24);
    for (int k = 3; k <= 7; ++k)
        for (int t = 0; t < 10; ++t) {
            std::uniform_int_distribution<int> sd(1, k / 2);
            ExactCandidate c = random_candidate(sd(rng), rng);
            if (!candidate_coprime(c)) continue;
            ExactVec b = series_of_rational(c, k - 1);
            DivisorReport e = div_classifier_exact(b, make_spec(0, k));
            DivisorReport f = div_classifier(DualCoords::make(make_spec(0, k), to_cplx(b)), 1e-8);
            CHECK(f.div_eta == e.div_eta);
            CHECK(f.margin > 0);
        }
}

TEST_CASE("(z-a)^{k-2} dualizes into P_1") {
    std::mt19937_64 rng(25);
    std::normal_distribution<double> nd;
    for (int k = 3; k <= 6; ++k) {
        const cplx a(nd(rng), nd(rng));
        std::vector<cplx> g{1.0};
        for (int i = 0; i < k - 2; ++i) {
            std::vector<cplx> r(g.size() + 1, 0.0);
            for (std::size_t j = 0; j < g.size(); ++j) {
                r[j + 1] += g[j];
                r[j] -= a * g[j];
            }
            g = r;
        }
        DualCoords b = dual_map_H0(HoloClass::make(make_spec(0, k), g));
        DivisorReport r = div_classifier(b);
        CHECK(r.div_eta == k - 1);
        CHECK(r.stratum_m == 1);
        CHECK(r.s_minus == 1);
        CHECK_FALSE(r.boundary);
    }
}

TEST_CASE("random b respects the stratum bounds") {
    std::mt19937_64 rng(26);
    std::normal_distribution<double> nd;
    for (int k = 2; k <= 8; ++k)
        for (int t = 0; t < 100; ++t) {
            std::vector<cplx> b(k - 1);
            for (auto& v : b) v = cplx(nd(rng), nd(rng));
            DivisorReport r = div_classifier(DualCoords::make(make_spec(2, 2 + k), b));
            const int gap = 2 + k - r.div_eta;
            CHECK(gap >= 1);
            CHECK(gap <= k / 2);
            CHECK(r.margin > 0);
        }
}

TEST_CASE("max_matching_order on a geometric sequence") {
    const int k = 6;
    std::vector<cplx> b(k - 1);
    for (int j = 0; j < k - 1; ++j) b[j] = std::pow(cplx(0.5, 0.3), j);
    DualCoords d = DualCoords::make(make_spec(0, k), b);
    CHECK(max_matching_order(d, 1) == k);
    CHECK(max_matching_order(d, 0) == 1);
    ExactVec e{1, 2, 4, 8, 17};
    CHECK(max_matching_order(e, 1) == 5);
    CHECK_THROWS_AS(max_matching_order(d, 9), InvalidArgument);
}

TEST_CASE("classifier rejects the zero class") {
    CHECK_THROWS_AS(div_classifier(DualCoords::make(make_spec(0, 4), {0.0, 0.0, 0.0})), ZeroClass);
    CHECK_THROWS_AS(div_classifier_exact(ExactVec(3), make_spec(0, 4)), ZeroClass);
    CHECK_THROWS_AS(div_classifier_exact(ExactVec(2, 1), make_spec(0, 4)), SpecMismatch);
}

TEST_CASE("alpha stability window") {
    const BundleSpec s = make_spec(0, 4);
    CHECK(alpha_stable(s, 2, -1.0));
    CHECK_FALSE(alpha_stable(s, 2, 0.0));
    CHECK_FALSE(alpha_stable(s, 2, -4.0));
    CHECK_FALSE(alpha_stable(s, 3, -1.0));
    CHECK(alpha_stable(s, 1, -3.5));
}

TEST_CASE("existence range is (0, 4 pi m)") {
    ExistenceRange r = existence_range_for_stratum(make_spec(0, 6), 2);
    CHECK(r.lo == 0.0);
    CHECK(r.hi == doctest::Approx(8 * kPi));
    std::vector<cplx> b(4, 0.0);
    b[3] = 1.0;
    CHECK(existence_range(DualCoords::make(make_spec(0, 5), b)).hi == doctest::Approx(4 * kPi));
}
