#include <doctest.h>

#include <random>

#include "sphedit/rational.hpp"

using namespace sphedit;

namespace {

RationalMap fig_quarter_turn_map() {
    // (i/2)(-z + 1/z)
    return {2, {Complex(0.0, -0.5), 0.0, Complex(0.0, 0.5)}, {0.0, 1.0, 0.0}};
}

RationalMap fig_doubling_map() {
    // (z^2+1)^2 / (4z(z^2-1)); numerator degree beats the denominator, so
    // infinity maps to infinity
    return {4, {1.0, 0.0, 2.0, 0.0, 1.0}, {0.0, 4.0, 0.0, -4.0, 0.0}};
}

} // namespace

TEST_CASE("identity evaluation") {
    RationalMap id = RationalMap::identity();
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        Complex z(u(rng), u(rng));
        CHECK(chordal(id.eval(ProjectivePoint::affine(z)), ProjectivePoint::affine(z)) <
              1e-14);
    }
}

TEST_CASE("published map values by substitution") {
    RationalMap q = fig_quarter_turn_map();
    // at z = i: (i/2)(-i + 1/i) = (i/2)(-2i) = 1
    ProjectivePoint at_i = q.eval(ProjectivePoint::affine(Complex(0.0, 1.0)));
    CHECK(chordal(at_i, ProjectivePoint::affine(1.0)) < 1e-14);

    // pole at 0 and at infinity handled projectively
    CHECK(q.eval(ProjectivePoint::affine(0.0)).is_infinity(1e-12));
    CHECK(q.eval(ProjectivePoint::infinity()).is_infinity(1e-12));

    RationalMap d = fig_doubling_map();
    CHECK(d.eval(ProjectivePoint::infinity()).is_infinity(1e-12));
    // z = 1 sits over a lattice point after doubling, so it goes to infinity
    CHECK(d.eval(ProjectivePoint::affine(1.0)).is_infinity(1e-12));
    // the quarter-turn map sends 1 to 0
    CHECK(chordal(q.eval(ProjectivePoint::affine(1.0)), ProjectivePoint::affine(0.0)) < 1e-12);
}

TEST_CASE("projective vs affine evaluation") {
    RationalMap d = fig_doubling_map();
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int done = 0;
    while (done < 100) {
        Complex z(u(rng), u(rng));
        // keep away from poles so the affine form is stable
        if (std::abs(z) < 0.1 || std::abs(z - 1.0) < 0.1 || std::abs(z + 1.0) < 0.1)
            continue;
        Complex num = 0.0, den = 0.0;
        for (int k = 0; k <= 4; ++k) {
            num = num * z + d.num[size_t(k)];
            den = den * z + d.den[size_t(k)];
        }
        Complex affine = num / den;
        ProjectivePoint proj = d.eval(ProjectivePoint::affine(z));
        CHECK(std::abs(proj.value() - affine) < 1e-12 * std::max(1.0, std::abs(affine)));
        ++done;
    }
}

TEST_CASE("coefficient scaling is projective") {
    RationalMap a = fig_quarter_turn_map();
    RationalMap b = a;
    for (auto& c : b.num)
        c *= Complex(5.0, -2.0);
    for (auto& c : b.den)
        c *= Complex(5.0, -2.0);
    CHECK(rational_equiv(a, b, 1e-12));
}

TEST_CASE("strict inequivalence of different maps") {
    RationalMap flipped{4, {1.0, 0.0, 2.0, 0.0, 1.0}, {0.0, 4.0, 0.0, 4.0, 0.0}};
    CHECK_FALSE(rational_equiv_strict(fig_doubling_map(), flipped, 1e-6));
}

TEST_CASE("conjugacy detection") {
    RationalMap d = fig_doubling_map();
    MobiusTransform c = mobius_two_point(ProjectivePoint::affine(Complex(0.3, 0.4)),
                                         ProjectivePoint::affine(Complex(-0.7, 0.2)), 0.9, 1.3);
    RationalMap conj = compose_mobius_rational(c, compose_rational_mobius(d, c.inverse()));
    CHECK_FALSE(rational_equiv_strict(d, conj, 1e-6));
    CHECK(rational_equiv(conj, d, 1e-6, true));
    auto found = rational_conjugacy(conj, d, 1e-6);
    REQUIRE(found.has_value());
    RationalMap back =
        compose_mobius_rational(*found, compose_rational_mobius(conj, found->inverse()));
    CHECK(rational_equiv_strict(back, d, 1e-6));
}

TEST_CASE("validation rejects a common factor") {
    // (z^2 - 1) / (z - 1)(z + 2) written at degree 2 shares (z - 1)
    RationalMap bad{2, {1.0, 0.0, -1.0}, {1.0, 1.0, -2.0}};
    CHECK_THROWS_AS(bad.validate(), RankDeficientError);

    RationalMap good = fig_doubling_map();
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("mobius composition of rational maps evaluates correctly") {
    RationalMap d = fig_quarter_turn_map();
    MobiusTransform c{1.0, Complex(0.0, 1.0), Complex(0.5, 0.0), 2.0};
    RationalMap pre = compose_rational_mobius(d, c);
    RationalMap post = compose_mobius_rational(c, d);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 60; ++i) {
        ProjectivePoint z = ProjectivePoint::affine(Complex(u(rng), u(rng)));
        CHECK(chordal(pre.eval(z), d.eval(c.normalized().apply(z))) < 1e-10);
        CHECK(chordal(post.eval(z), c.normalized().apply(d.eval(z))) < 1e-10);
    }
}

TEST_CASE("polynomial roots") {
    // (z - 2)(z + i) = z^2 + (i - 2)z - 2i
    std::vector<Complex> roots =
        polynomial_roots({1.0, Complex(-2.0, 1.0), Complex(0.0, -2.0)});
    REQUIRE(roots.size() == 2);
    auto has = [&](Complex r) {
        for (const Complex& x : roots)
            if (std::abs(x - r) < 1e-10)
                return true;
        return false;
    };
    CHECK(has(Complex(2.0, 0.0)));
    CHECK(has(Complex(0.0, -1.0)));
}
