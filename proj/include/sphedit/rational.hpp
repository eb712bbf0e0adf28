#pragma once

#include <optional>
#include <vector>

#include "sphedit/maps.hpp"

namespace sphedit {

/// Rational self-map of the sphere, coefficient lists degree-descending.
/// Evaluation is homogeneous, so poles and infinity need no special cases.
struct RationalMap {
    int degree = 1;
    std::vector<Complex> num; // a_n .. a_0
    std::vector<Complex> den; // b_n .. b_0

    static RationalMap identity() { return {1, {1.0, 0.0}, {0.0, 1.0}}; }

    void validate() const;

    // Scale both coefficient lists so the largest-modulus entry is exactly 1.
    RationalMap normalized() const;

    ProjectivePoint eval(const ProjectivePoint& z) const;

    // Roots of the derivative numerator plus the image of infinity; the map
    // is not locally injective there. Poles are appended since fit samples
    // must stay away from them too.
    std::vector<ProjectivePoint> singular_points() const;

    PullbackMap as_pullback() const;
};

struct FitResult {
    RationalMap map;
    double residual = 0.0; // smallest singular value over largest
};

// Builds the sample matrix with rows (z^n .. 1 | -w z^n .. -w), scaled
// projectively, and extracts its kernel with an SVD. Throws
// DegreeTooLowError when no kernel exists at this degree and
// RankDeficientError when the kernel is not one-dimensional (degree too
// high or degenerate samples).
FitResult fit_rational(const std::function<std::optional<ProjectivePoint>(const ProjectivePoint&)>& f,
                       int degree, const std::vector<Complex>& samples);
FitResult fit_rational(const PullbackMap& f, int degree, const std::vector<Complex>& samples);

// Default placement: 6n points on the circles |z| = 0.7 and |z| = 1.3 with
// deterministic angular jitter, skipping anything within 0.05 (chordal) of a
// declared singular point.
std::vector<Complex> default_fit_samples(int degree,
                                         const std::vector<ProjectivePoint>& singular,
                                         uint64_t seed = 20240601);

// Proportional coefficient vectors within tol (after the best projective
// scalar). Both maps must have equal degree.
bool rational_equiv_strict(const RationalMap& r1, const RationalMap& r2, double tol);

// True when some Mobius C conjugates r1 onto r2 (C o r1 o C^-1 == r2), found
// by aligning critical values; returns the conjugator on success.
std::optional<MobiusTransform> rational_conjugacy(const RationalMap& r1, const RationalMap& r2,
                                                  double tol);

bool rational_equiv(const RationalMap& r1, const RationalMap& r2, double tol,
                    bool relaxed = false);

// C o R and R o C as rational maps of the same degree.
RationalMap compose_mobius_rational(const MobiusTransform& c, const RationalMap& r);
RationalMap compose_rational_mobius(const RationalMap& r, const MobiusTransform& c);

// Companion-matrix roots of a degree-descending complex polynomial.
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs);

} // namespace sphedit
