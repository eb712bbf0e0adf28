#pragma once

#include <memory>
#include <optional>

#include "sphedit/elliptic.hpp"
#include "sphedit/maps.hpp"

namespace sphedit {

/// The degree-|m|^2 rational self-map of the sphere induced by multiplying
/// the lattice plane by a ring element m: z -> p(m * p^-1(z)), conjugated by
/// a normalization that places the half-period values at fixed anchors.
/// p^-1 is evaluated by Newton iteration seeded from a precomputed grid over
/// the unit cell; any branch works because multiplication by m descends
/// through the +-u and lattice ambiguity.
class LatticeTwistMap {
public:
    // Default normalization sends (p((1+tau)/2), p(1/2), p(0)=inf) to
    // (0, 1, inf).
    LatticeTwistMap(LatticeSpec lattice, Complex multiplier);
    LatticeTwistMap(LatticeSpec lattice, Complex multiplier,
                    const MobiusTransform& normalization);

    std::optional<ProjectivePoint> operator()(const ProjectivePoint& z) const;

    int degree() const { return degree_; }
    const MobiusTransform& normalization() const { return norm_; }
    const Weierstrass& weierstrass() const { return wp_; }

    // Branch values and critical points in image coordinates; the map is
    // defined there but not conformal (or not locally injective).
    const std::vector<ProjectivePoint>& singular_points() const { return singular_; }

    PullbackMap as_pullback() const;

    // One valid plane preimage of an image-sphere point, for tests.
    std::optional<Complex> plane_preimage(const ProjectivePoint& z) const;

private:
    void init();
    std::optional<Complex> invert(const ProjectivePoint& target) const;

    LatticeSpec lattice_;
    Complex m_;
    int degree_ = 0;
    Weierstrass wp_;
    MobiusTransform norm_;
    MobiusTransform norm_inv_;
    bool custom_norm_ = false;

    struct Seed {
        Complex u;
        ProjectivePoint val;
    };
    std::vector<Seed> seeds_;
    // seeds bucketed by the sphere position of their value, so the per-pixel
    // search touches a handful of candidates instead of the whole grid
    static constexpr int kBucketsTheta = 48;
    static constexpr int kBucketsPhi = 24;
    std::vector<std::vector<int>> buckets_;
    std::vector<ProjectivePoint> singular_;
};

// Checks that m = a + b*tau with integer a, b and returns |m|^2; throws
// ConfigError otherwise.
int multiplier_degree(const LatticeSpec& lattice, Complex m);

} // namespace sphedit
