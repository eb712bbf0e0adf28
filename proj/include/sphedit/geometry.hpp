#pragma once

#include <complex>
#include <string>

#include "sphedit/errors.hpp"

namespace sphedit {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// A point of the Riemann sphere as a homogeneous ratio (num : den).
/// Never (0, 0); the point at infinity is (1, 0). Keeping both components
/// removes every special case around poles and infinities.
struct ProjectivePoint {
    Complex num{0.0, 0.0};
    Complex den{1.0, 0.0};

    ProjectivePoint() = default;
    ProjectivePoint(Complex n, Complex d) : num(n), den(d) {}

    static ProjectivePoint affine(Complex z) { return {z, Complex(1.0, 0.0)}; }
    static ProjectivePoint infinity() { return {Complex(1.0, 0.0), Complex(0.0, 0.0)}; }

    bool is_infinity(double tol = 1e-14) const {
        return std::abs(den) <= tol * std::abs(num);
    }

    // Affine value num/den; returns a huge value (inf) at the pole.
    Complex value() const { return num / den; }

    // Scale so that max(|num|, |den|) == 1; guards against overflow in chains.
    ProjectivePoint normalized() const;
};

// Distance between projective points measured as the chord of the unit
// sphere; finite everywhere, max 2 at antipodes.
double chordal(const ProjectivePoint& a, const ProjectivePoint& b);

inline bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b,
                               double tol = 1e-10) {
    return chordal(a, b) <= tol;
}

/// Unit vector in R^3.
struct SpherePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Longitude theta in [0, 2*pi), latitude phi in [-pi/2, pi/2].
struct EquirectCoord {
    double theta = 0.0;
    double phi = 0.0;
};

SpherePoint to_sphere(const EquirectCoord& c);
EquirectCoord to_equirect(const SpherePoint& p);

// Stereographic projection from the north pole: (x + iy) / (1 - z), with the
// north pole itself landing on (1 : 0). Implemented with the projectively
// equal representative (1 + z : x - iy) on the northern half so the pair is
// never (0, 0) and stays well conditioned.
ProjectivePoint stereographic_project(const SpherePoint& p);
SpherePoint stereographic_unproject(const ProjectivePoint& q);

enum class MobiusClass { Elliptic, Hyperbolic, Parabolic, Loxodromic };

std::string to_string(MobiusClass c);

/// z -> (a z + b) / (c z + d) with ad - bc != 0, acting on ratio pairs.
struct MobiusTransform {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};
    Complex d{1.0, 0.0};

    MobiusTransform() = default;
    MobiusTransform(Complex a_, Complex b_, Complex c_, Complex d_)
        : a(a_), b(b_), c(c_), d(d_) {}

    static MobiusTransform identity() { return {}; }
    static MobiusTransform scaling(Complex k) { return {k, 0.0, 0.0, 1.0}; }
    // Swaps 0 and infinity: z -> 1/z.
    static MobiusTransform pole_swap() { return {0.0, 1.0, 1.0, 0.0}; }

    Complex det() const { return a * d - b * c; }

    ProjectivePoint apply(const ProjectivePoint& q) const {
        return ProjectivePoint(a * q.num + b * q.den, c * q.num + d * q.den).normalized();
    }

    // Rescaled so det == 1 (either sign of sqrt is fine). Throws
    // DegeneratePointsError when the determinant is numerically zero.
    MobiusTransform normalized() const;

    MobiusTransform inverse() const { return {d, -b, -c, a}; }
};

// apply(compose(m, n), z) == apply(m, apply(n, z))
MobiusTransform compose(const MobiusTransform& m, const MobiusTransform& n);

// The transform fixing p and q that rotates by `angle` and scales by `scale`
// around them: conjugate of diag(scale*e^{i angle}, 1) by the map p->0, q->inf.
MobiusTransform mobius_two_point(const ProjectivePoint& p, const ProjectivePoint& q,
                                 double angle, double scale);

// The unique transform sending p1->q1, p2->q2, p3->q3 (all pairwise distinct).
MobiusTransform mobius_three_point(const ProjectivePoint& p1, const ProjectivePoint& p2,
                                   const ProjectivePoint& p3, const ProjectivePoint& q1,
                                   const ProjectivePoint& q2, const ProjectivePoint& q3);

// Trace classification of the det-1 representative. Bands of 1e-9 around the
// exact trichotomy absorb floating-point noise.
MobiusClass classify(const MobiusTransform& m);

} // namespace sphedit
