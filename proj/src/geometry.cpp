#include "sphedit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sphedit {

ProjectivePoint ProjectivePoint::normalized() const {
    double m = std::max(std::abs(num), std::abs(den));
    if (m == 0.0 || !std::isfinite(m))
        throw NumericError("degenerate projective point");
    return {num / m, den / m};
}

double chordal(const ProjectivePoint& a, const ProjectivePoint& b) {
    double na = std::hypot(std::abs(a.num), std::abs(a.den));
    double nb = std::hypot(std::abs(b.num), std::abs(b.den));
    return 2.0 * std::abs(a.num * b.den - a.den * b.num) / (na * nb);
}

SpherePoint to_sphere(const EquirectCoord& c) {
    double cp = std::cos(c.phi);
    return {cp * std::cos(c.theta), cp * std::sin(c.theta), std::sin(c.phi)};
}

EquirectCoord to_equirect(const SpherePoint& p) {
    // atan2 against the equatorial radius stays well conditioned at the
    // poles, unlike asin(z)
    double phi = std::atan2(p.z, std::hypot(p.x, p.y));
    double theta = (p.x == 0.0 && p.y == 0.0) ? 0.0 : std::atan2(p.y, p.x);
    if (theta < 0.0)
        theta += 2.0 * kPi;
    if (theta >= 2.0 * kPi)
        theta = 0.0;
    return {theta, phi};
}

ProjectivePoint stereographic_project(const SpherePoint& p) {
    // (x + iy : 1 - z) == (1 + z : x - iy) on the sphere; pick the branch
    // whose denominator-side is large.
    if (p.z > 0.0)
        return ProjectivePoint(Complex(1.0 + p.z, 0.0), Complex(p.x, -p.y)).normalized();
    return ProjectivePoint(Complex(p.x, p.y), Complex(1.0 - p.z, 0.0)).normalized();
}

SpherePoint stereographic_unproject(const ProjectivePoint& q) {
    double n1 = std::norm(q.num);
    double n2 = std::norm(q.den);
    double s = n1 + n2;
    if (s == 0.0 || !std::isfinite(s)) {
        ProjectivePoint r = q.normalized();
        n1 = std::norm(r.num);
        n2 = std::norm(r.den);
        s = n1 + n2;
        Complex t = 2.0 * r.num * std::conj(r.den);
        return {t.real() / s, t.imag() / s, (n1 - n2) / s};
    }
    Complex t = 2.0 * q.num * std::conj(q.den);
    return {t.real() / s, t.imag() / s, (n1 - n2) / s};
}

std::string to_string(MobiusClass c) {
    switch (c) {
    case MobiusClass::Elliptic: return "elliptic";
    case MobiusClass::Hyperbolic: return "hyperbolic";
    case MobiusClass::Parabolic: return "parabolic";
    case MobiusClass::Loxodromic: return "loxodromic";
    }
    return "?";
}

MobiusTransform MobiusTransform::normalized() const {
    Complex dt = det();
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (scale == 0.0 || std::abs(dt) < 1e-14 * scale * scale)
        throw DegeneratePointsError("Mobius transform has zero determinant");
    Complex s = std::sqrt(dt);
    return {a / s, b / s, c / s, d / s};
}

MobiusTransform compose(const MobiusTransform& m, const MobiusTransform& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Sends p -> 0 and q -> infinity.
static MobiusTransform to_zero_infinity(const ProjectivePoint& p, const ProjectivePoint& q) {
    return {p.den, -p.num, q.den, -q.num};
}

MobiusTransform mobius_two_point(const ProjectivePoint& p, const ProjectivePoint& q,
                                 double angle, double scale) {
    if (chordal(p, q) < 1e-12)
        throw DegeneratePointsError("two-point transform needs distinct fixed points");
    MobiusTransform c = to_zero_infinity(p.normalized(), q.normalized());
    MobiusTransform k = MobiusTransform::scaling(scale * std::polar(1.0, angle));
    return compose(c.inverse(), compose(k, c)).normalized();
}

MobiusTransform mobius_three_point(const ProjectivePoint& p1, const ProjectivePoint& p2,
                                   const ProjectivePoint& p3, const ProjectivePoint& q1,
                                   const ProjectivePoint& q2, const ProjectivePoint& q3) {
    if (chordal(p1, p2) < 1e-12 || chordal(p1, p3) < 1e-12 || chordal(p2, p3) < 1e-12 ||
        chordal(q1, q2) < 1e-12 || chordal(q1, q3) < 1e-12 || chordal(q2, q3) < 1e-12)
        throw DegeneratePointsError("three-point transform needs distinct anchors");

    // T sends (a1, a2, a3) to (0, 1, infinity).
    auto standard = [](ProjectivePoint a1, ProjectivePoint a2, ProjectivePoint a3) {
        a1 = a1.normalized();
        a2 = a2.normalized();
        a3 = a3.normalized();
        // z -> ((z - a1)(a2 - a3)) / ((z - a3)(a2 - a1)) in ratio form.
        Complex m21 = a2.num * a1.den - a2.den * a1.num;
        Complex m23 = a2.num * a3.den - a2.den * a3.num;
        return MobiusTransform{a1.den * m23, -a1.num * m23, a3.den * m21, -a3.num * m21};
    };
    MobiusTransform tp = standard(p1, p2, p3);
    MobiusTransform tq = standard(q1, q2, q3);
    return compose(tq.inverse(), tp).normalized();
}

MobiusClass classify(const MobiusTransform& m) {
    MobiusTransform n = m.normalized();
    Complex t2 = (n.a + n.d) * (n.a + n.d);
    const double tol = 1e-9;
    if (std::abs(t2 - 4.0) < tol)
        return MobiusClass::Parabolic;
    if (std::abs(t2.imag()) < tol) {
        double r = t2.real();
        if (r >= 0.0 && r < 4.0)
            return MobiusClass::Elliptic;
        if (r > 4.0)
            return MobiusClass::Hyperbolic;
    }
    return MobiusClass::Loxodromic;
}

} // namespace sphedit
