#pragma once

#include <array>
#include <optional>

#include "sphedit/image.hpp"
#include "sphedit/maps.hpp"
#include "sphedit/resample.hpp"

namespace sphedit {

enum class SchottkyRegion : uint8_t { Black = 0, LowerA, UpperA, LowerB, UpperB };

// Mask colors: red = D_a, white = D_A, green = D_b, blue = D_B, black = keep.
SchottkyRegion classify_mask_pixel(uint8_t r, uint8_t g, uint8_t b);

/// Two-generator (or one-generator) Schottky rendering setup. The generator
/// A maps the complement of D_a onto D_A, so the escape routine applies A on
/// D_a and A^-1 on D_A; same for B on D_b / D_B. Regions come either from a
/// color-coded raster mask or from exact disks (synthetic tests).
struct SchottkyConfig {
    struct Disk {
        Complex center{0.0, 0.0};
        double radius = 1.0;
        bool exterior = false; // true: |z - c| >= r, contains infinity

        bool contains(const ProjectivePoint& q) const;
    };

    MobiusTransform gen_a;
    std::optional<MobiusTransform> gen_b;

    std::optional<std::array<Disk, 4>> disks; // D_a, D_A, D_b, D_B
    SphericalImage mask;                      // used when `disks` is empty

    int max_iter = 100;
    Rgb8 sentinel{0, 0, 0};

    void validate() const;
};

// Paints white = A(complement of red) and blue = B(complement of green) by
// pulling region membership back through the inverse generators. Throws
// RegionsOverlapError when the resulting four regions collide on more than
// `overlap_tolerance` pixels.
SphericalImage derive_disk_regions(const SphericalImage& mask_ab, const MobiusTransform& a,
                                   const std::optional<MobiusTransform>& b,
                                   const SampleOptions& opts, long overlap_tolerance = 0);

struct SchottkyStats {
    long total_pixels = 0;
    long capped_pixels = 0; // hit max_iter (limit-set neighborhood)
    long cycle_pixels = 0;  // revisited a (region, point) pair
};

/// Per-pixel escape iteration over the region model; resolved points in the
/// black region sample the input, capped pixels get the sentinel color.
class SchottkyMapper {
public:
    SchottkyMapper(const SchottkyConfig& cfg, const SampleOptions& opts);

    SchottkyRegion region_of(const ProjectivePoint& q) const;

    // Final black-region position, nullopt when capped or cycling.
    std::optional<ProjectivePoint> escape(const ProjectivePoint& q, SchottkyStats* stats) const;

    const SchottkyConfig& config() const { return cfg_; }

private:
    SchottkyConfig cfg_;
    SampleOptions opts_;
    MobiusTransform inv_a_;
    MobiusTransform inv_b_;
    std::vector<uint8_t> labels_; // mask-mode label grid
    int mask_w_ = 0, mask_h_ = 0;
};

SphericalImage schottky_render(const SphericalImage& input, const SchottkyConfig& cfg,
                               const SampleOptions& opts, SchottkyStats* stats = nullptr);

} // namespace sphedit
