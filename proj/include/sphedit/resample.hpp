#pragma once

#include <array>
#include <functional>

#include "sphedit/image.hpp"
#include "sphedit/maps.hpp"

namespace sphedit {

enum class Filter { Nearest, Bilinear };

// Which pole the top image row is. The default puts infinity at the top;
// TopZero conjugates every map by z -> 1/z so the origin is at the top
// instead.
enum class PoleOrientation { TopInfinity, TopZero };

struct Rgb8 {
    uint8_t r = 0, g = 0, b = 0;
};

struct SampleOptions {
    Filter filter = Filter::Bilinear;
    int supersample = 1; // k x k grid per pixel, clamped to [1, 8]
    Rgb8 undefined_color{128, 128, 128};
    PoleOrientation orientation = PoleOrientation::TopInfinity;
    int jobs = 0; // worker threads; 0 = hardware concurrency
};

// Linear-light color; interpolation and supersample averaging happen here,
// after sRGB decoding.
struct LinearColor {
    std::array<double, 4> v{0.0, 0.0, 0.0, 1.0};
};

double srgb_decode_unit(double encoded);
double srgb_encode_unit(double linear);
double channel_to_linear(uint16_t value, int channel);
uint16_t channel_from_linear(double linear, int channel);

// Pixel centers sit at half-integer continuous coordinates.
EquirectCoord pixel_to_equirect(double xc, double yc, int width, int height);
void equirect_to_pixel(const EquirectCoord& c, int width, int height, double& xf, double& yf);

ProjectivePoint equirect_to_projective(const EquirectCoord& c, PoleOrientation orientation);
EquirectCoord projective_to_equirect(const ProjectivePoint& q, PoleOrientation orientation);

// Nearest / bilinear lookup with longitude wraparound and latitude clamping.
LinearColor sample(const SphericalImage& img, const EquirectCoord& c, const SampleOptions& opts);

// Renders output(p) = input(S(z_p)); undefined map values paint the sentinel
// color. Deterministic for any worker count.
SphericalImage pull_back(const SphericalImage& input, const PullbackMap& map,
                         const SampleOptions& opts);

struct CompositeSource {
    std::function<bool(const ProjectivePoint&)> region;
    PullbackMap map;
    const SphericalImage* input = nullptr;
};

// First matching region wins; uncovered pixels get the sentinel color.
SphericalImage composite_pull_back(const std::vector<CompositeSource>& sources, int width,
                                   int height, const SampleOptions& opts);

namespace pattern {
inline constexpr Rgb8 kBackground{230, 226, 218};
inline constexpr Rgb8 kEquator{40, 90, 200};
inline constexpr Rgb8 kMeridian{200, 40, 40};
inline constexpr Rgb8 kMeridian2{40, 160, 60};
inline constexpr Rgb8 kGraticule{60, 60, 60};
inline constexpr Rgb8 kDiskAtZero{200, 0, 200};  // south pole cap
inline constexpr Rgb8 kDiskAtInfinity{0, 180, 180}; // north pole cap
inline constexpr double kPoleCapRadians = 10.0 * kPi / 180.0;
} // namespace pattern

// Deterministic calibration pattern: blue equator, one-sided red meridian
// (so mirror flips are detectable), graticule disks, and marked polar caps
// used by the scaling measurements.
SphericalImage generate_test_pattern(int height);

} // namespace sphedit
