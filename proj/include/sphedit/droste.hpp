#pragma once

#include <optional>
#include <utility>

#include "sphedit/image.hpp"
#include "sphedit/maps.hpp"
#include "sphedit/resample.hpp"

namespace sphedit {

/// Self-similar annulus construction between two limit points. The annulus
/// lives in the coordinates where p -> 0 and q -> infinity; there it is
/// {inner_radius <= |w| < lambda * inner_radius} with deck map w -> lambda*w.
struct DrosteSpec {
    ProjectivePoint p = ProjectivePoint::affine(0.0);
    ProjectivePoint q = ProjectivePoint::infinity();
    double lambda = 2.0;       // annulus ratio, > 1
    int twist = 0;             // spiral winding; 0 = straight
    double inner_radius = 0.5; // in normalized coordinates

    void validate() const {
        if (!(lambda > 1.0))
            throw ConfigError("droste lambda must be > 1");
        if (!(inner_radius > 0.0))
            throw ConfigError("droste inner radius must be positive");
        if (chordal(p, q) < 1e-12)
            throw ConfigError("droste limit points coincide");
    }
};

// The concrete normalizer sending p -> 0, q -> infinity used by every
// operation here (its residual scale freedom is part of what inner_radius
// means).
MobiusTransform droste_normalizer(const DrosteSpec& spec);

// w * lambda^-k lies in the fundamental annulus; returns (w', k).
// nullopt at the two removed points 0 and infinity.
std::optional<std::pair<Complex, long>> annulus_reduce(Complex w, const DrosteSpec& spec);

// Twist exponent: exp(2*pi*i*beta) = lambda^twist, so crossing the log
// branch cut changes the pre-reduction value by a deck move. beta = 1 when
// twist = 0.
Complex droste_beta(const DrosteSpec& spec);

// Full pixel map: normalize, spiral (if twisted), deck-reduce, denormalize.
PullbackMap droste_map(const DrosteSpec& spec);

// Spiral without the deck reduction; used by conformality probes. Identity
// for twist = 0.
PullbackMap droste_premap(const DrosteSpec& spec);

SphericalImage straight_droste(const SphericalImage& input, const DrosteSpec& spec,
                               const SampleOptions& opts);
SphericalImage twisted_droste(const SphericalImage& input, const DrosteSpec& spec,
                              const SampleOptions& opts);

// One period of the annulus in log coordinates: width log(lambda), height
// 2*pi, inner boundary on the left edge.
SphericalImage log_strip_unwrap(const SphericalImage& input, const DrosteSpec& spec,
                                int strip_height, const SampleOptions& opts);

// Recovers (p, q, lambda, inner_radius) from two circles |z - c| = r in the
// plane: the limit points are the fixed points of inversion in one circle
// followed by inversion in the other.
DrosteSpec fit_annulus_from_circles(Complex c1, double r1, Complex c2, double r2);

} // namespace sphedit
