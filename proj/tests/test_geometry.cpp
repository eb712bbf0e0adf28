#include <doctest.h>

#include <random>

#include "sphedit/geometry.hpp"

using namespace sphedit;

namespace {

SpherePoint random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    double x = n(rng), y = n(rng), z = n(rng);
    double s = std::sqrt(x * x + y * y + z * z);
    return {x / s, y / s, z / s};
}

ProjectivePoint random_point(std::mt19937_64& rng) {
    return stereographic_project(random_unit(rng));
}

MobiusTransform random_mobius(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        MobiusTransform m{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        if (std::abs(m.det()) > 0.1)
            return m.normalized();
    }
}

} // namespace

TEST_CASE("stereographic projection special points") {
    ProjectivePoint north = stereographic_project({0.0, 0.0, 1.0});
    CHECK(north.is_infinity());

    ProjectivePoint south = stereographic_project({0.0, 0.0, -1.0});
    CHECK(std::abs(south.value()) < 1e-15);

    ProjectivePoint front = stereographic_project({1.0, 0.0, 0.0});
    CHECK(std::abs(front.value() - Complex(1.0, 0.0)) < 1e-15);

    CHECK(stereographic_unproject(ProjectivePoint::infinity()).z == doctest::Approx(1.0));
    CHECK(stereographic_unproject(ProjectivePoint::affine(0.0)).z == doctest::Approx(-1.0));
    SpherePoint one = stereographic_unproject(ProjectivePoint::affine(1.0));
    CHECK(one.x == doctest::Approx(1.0));
    CHECK(std::abs(one.y) < 1e-15);
    CHECK(std::abs(one.z) < 1e-15);
}

TEST_CASE("stereographic round trip") {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        SpherePoint p = random_unit(rng);
        SpherePoint q = stereographic_unproject(stereographic_project(p));
        worst = std::max({worst, std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("equirect conversions") {
    SpherePoint front = to_sphere({0.0, 0.0});
    CHECK(front.x == doctest::Approx(1.0));
    SpherePoint pole = to_sphere({0.3, kPi / 2.0});
    CHECK(pole.z == doctest::Approx(1.0));
    CHECK(std::abs(pole.x) < 1e-12);

    // poles report theta = 0
    EquirectCoord at_pole = to_equirect({0.0, 0.0, 1.0});
    CHECK(at_pole.theta == 0.0);
    CHECK(at_pole.phi == doctest::Approx(kPi / 2.0));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> up(-kPi / 2.0 + 1e-6, kPi / 2.0 - 1e-6);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        EquirectCoord c{ut(rng), up(rng)};
        EquirectCoord r = to_equirect(to_sphere(c));
        double dt = std::abs(r.theta - c.theta);
        dt = std::min(dt, 2.0 * kPi - dt);
        worst = std::max({worst, dt, std::abs(r.phi - c.phi)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("chordal distance matches sphere chord") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        SpherePoint a = random_unit(rng);
        SpherePoint b = random_unit(rng);
        double chord = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                                 (a.z - b.z) * (a.z - b.z));
        double d = chordal(stereographic_project(a), stereographic_project(b));
        CHECK(d == doctest::Approx(chord).epsilon(1e-10));
    }
}

TEST_CASE("mobius apply basics") {
    MobiusTransform id = MobiusTransform::identity();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        ProjectivePoint z = random_point(rng);
        CHECK(chordal(id.apply(z), z) < 1e-14);
    }

    // (1+z)/(1-z) fixes i
    MobiusTransform quarter{1.0, 1.0, -1.0, 1.0};
    ProjectivePoint at_i = quarter.apply(ProjectivePoint::affine(Complex(0.0, 1.0)));
    CHECK(chordal(at_i, ProjectivePoint::affine(Complex(0.0, 1.0))) < 1e-14);

    MobiusTransform twice = MobiusTransform::scaling(2.0);
    CHECK(std::abs(twice.apply(ProjectivePoint::affine(3.0)).value() - Complex(6.0, 0.0)) <
          1e-14);

    // projective invariance under scaling of both the matrix and the point
    for (int i = 0; i < 50; ++i) {
        MobiusTransform m = random_mobius(rng);
        ProjectivePoint z = random_point(rng);
        MobiusTransform ms{m.a * Complex(0.0, 3.0), m.b * Complex(0.0, 3.0),
                           m.c * Complex(0.0, 3.0), m.d * Complex(0.0, 3.0)};
        ProjectivePoint zs{z.num * Complex(-2.0, 1.0), z.den * Complex(-2.0, 1.0)};
        CHECK(chordal(m.apply(z), ms.apply(zs)) < 1e-12);
    }
}

TEST_CASE("mobius composition and inversion") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        MobiusTransform m = random_mobius(rng);
        MobiusTransform n = random_mobius(rng);
        ProjectivePoint z = random_point(rng);
        CHECK(chordal(compose(m, n).apply(z), m.apply(n.apply(z))) < 1e-10);
        CHECK(chordal(compose(m, m.inverse()).apply(z), z) < 1e-10);
    }
    MobiusTransform s6 = compose(MobiusTransform::scaling(2.0), MobiusTransform::scaling(3.0));
    CHECK(std::abs(s6.a / s6.d - Complex(6.0, 0.0)) < 1e-14);
    CHECK(std::abs(s6.b) < 1e-14);
    CHECK(std::abs(s6.c) < 1e-14);
}

TEST_CASE("two-point transform") {
    ProjectivePoint zero = ProjectivePoint::affine(0.0);
    ProjectivePoint inf = ProjectivePoint::infinity();

    MobiusTransform rot = mobius_two_point(zero, inf, kPi / 8.0, 1.0);
    CHECK(std::abs(rot.a / rot.d - std::polar(1.0, kPi / 8.0)) < 1e-12);
    CHECK(std::abs(rot.b) < 1e-14);
    CHECK(std::abs(rot.c) < 1e-14);

    MobiusTransform sc = mobius_two_point(zero, inf, 0.0, 2.0);
    CHECK(std::abs(sc.a / sc.d - Complex(2.0, 0.0)) < 1e-12);

    // fixing +-i with a quarter turn: proportional to (1, 1; -1, 1),
    // checked by conjugating diag(i, 1) with z -> (z - i)/(z + i) by hand
    MobiusTransform q = mobius_two_point(ProjectivePoint::affine(Complex(0.0, 1.0)),
                                         ProjectivePoint::affine(Complex(0.0, -1.0)),
                                         kPi / 2.0, 1.0);
    Complex ratio = q.a / Complex(1.0, 0.0);
    CHECK(std::abs(q.b / ratio - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(q.c / ratio + Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(q.d / ratio - Complex(1.0, 0.0)) < 1e-12);

    // fixes both anchors
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        ProjectivePoint p = random_point(rng);
        ProjectivePoint r = random_point(rng);
        if (chordal(p, r) < 1e-3)
            continue;
        MobiusTransform m = mobius_two_point(p, r, 0.7, 1.3);
        CHECK(chordal(m.apply(p), p) < 1e-10);
        CHECK(chordal(m.apply(r), r) < 1e-10);
    }

    CHECK_THROWS_AS(mobius_two_point(zero, zero, 1.0, 1.0), DegeneratePointsError);
}

TEST_CASE("three-point transform") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        ProjectivePoint p1 = random_point(rng), p2 = random_point(rng), p3 = random_point(rng);
        ProjectivePoint q1 = random_point(rng), q2 = random_point(rng), q3 = random_point(rng);
        if (chordal(p1, p2) < 1e-2 || chordal(p1, p3) < 1e-2 || chordal(p2, p3) < 1e-2 ||
            chordal(q1, q2) < 1e-2 || chordal(q1, q3) < 1e-2 || chordal(q2, q3) < 1e-2)
            continue;
        MobiusTransform m = mobius_three_point(p1, p2, p3, q1, q2, q3);
        CHECK(chordal(m.apply(p1), q1) < 1e-9);
        CHECK(chordal(m.apply(p2), q2) < 1e-9);
        CHECK(chordal(m.apply(p3), q3) < 1e-9);
    }
}

TEST_CASE("classification") {
    CHECK(classify(MobiusTransform::scaling(std::polar(1.0, kPi / 8.0))) ==
          MobiusClass::Elliptic);
    CHECK(classify(MobiusTransform{std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)}) ==
          MobiusClass::Hyperbolic);
    CHECK(classify(MobiusTransform{1.0, 0.5, 0.0, 1.0}) == MobiusClass::Parabolic);
    CHECK(classify(MobiusTransform::scaling(std::polar(2.0, 0.5))) == MobiusClass::Loxodromic);

    // invariant under conjugation
    std::mt19937_64 rng(8);
    MobiusTransform samples[4] = {
        MobiusTransform::scaling(std::polar(1.0, 0.4)),
        MobiusTransform::scaling(3.0),
        MobiusTransform{1.0, 0.25, 0.0, 1.0},
        MobiusTransform::scaling(std::polar(1.5, 1.0)),
    };
    for (const MobiusTransform& m : samples) {
        MobiusClass expected = classify(m);
        for (int i = 0; i < 25; ++i) {
            MobiusTransform c = random_mobius(rng);
            CHECK(classify(compose(c, compose(m, c.inverse()))) == expected);
        }
    }
}
