#include "sphedit/resample.hpp"

#include <cmath>
#include <mutex>
#include <thread>

namespace sphedit {

double srgb_decode_unit(double encoded) {
    if (encoded <= 0.04045)
        return encoded / 12.92;
    return std::pow((encoded + 0.055) / 1.055, 2.4);
}

double srgb_encode_unit(double linear) {
    if (linear <= 0.0031308)
        return linear * 12.92;
    return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

namespace {

const std::array<double, 65536>& decode_lut() {
    static const std::array<double, 65536> lut = [] {
        std::array<double, 65536> t{};
        for (int i = 0; i < 65536; ++i)
            t[size_t(i)] = srgb_decode_unit(i / 65535.0);
        return t;
    }();
    return lut;
}

int positive_mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

double channel_to_linear(uint16_t value, int channel) {
    if (channel == 3)
        return value / 65535.0; // alpha stays linear
    return decode_lut()[value];
}

uint16_t channel_from_linear(double linear, int channel) {
    double e = channel == 3 ? linear : srgb_encode_unit(linear);
    double v = std::round(std::clamp(e, 0.0, 1.0) * 65535.0);
    return uint16_t(v);
}

EquirectCoord pixel_to_equirect(double xc, double yc, int width, int height) {
    return {2.0 * kPi * xc / width, kPi / 2.0 - kPi * yc / height};
}

void equirect_to_pixel(const EquirectCoord& c, int width, int height, double& xf, double& yf) {
    xf = c.theta * width / (2.0 * kPi);
    yf = (kPi / 2.0 - c.phi) * height / kPi;
}

ProjectivePoint equirect_to_projective(const EquirectCoord& c, PoleOrientation orientation) {
    ProjectivePoint q = stereographic_project(to_sphere(c));
    if (orientation == PoleOrientation::TopZero)
        return {q.den, q.num};
    return q;
}

EquirectCoord projective_to_equirect(const ProjectivePoint& q, PoleOrientation orientation) {
    ProjectivePoint p = q;
    if (orientation == PoleOrientation::TopZero)
        p = {q.den, q.num};
    return to_equirect(stereographic_unproject(p));
}

LinearColor sample(const SphericalImage& img, const EquirectCoord& c, const SampleOptions& opts) {
    double xf, yf;
    equirect_to_pixel(c, img.width, img.height, xf, yf);
    double u = xf - 0.5;
    double v = yf - 0.5;
    LinearColor out;
    out.v[3] = 1.0;
    if (opts.filter == Filter::Nearest) {
        int xi = positive_mod(int(std::lround(std::floor(u + 0.5))), img.width);
        int yi = std::clamp(int(std::lround(std::floor(v + 0.5))), 0, img.height - 1);
        for (int ch = 0; ch < img.channels; ++ch)
            out.v[size_t(ch)] = channel_to_linear(img.at(xi, yi, ch), ch);
        return out;
    }
    int x0 = int(std::floor(u));
    int y0 = int(std::floor(v));
    double fx = u - x0;
    double fy = v - y0;
    int xa = positive_mod(x0, img.width);
    int xb = positive_mod(x0 + 1, img.width);
    int ya = std::clamp(y0, 0, img.height - 1);
    int yb = std::clamp(y0 + 1, 0, img.height - 1);
    double w00 = (1.0 - fx) * (1.0 - fy);
    double w10 = fx * (1.0 - fy);
    double w01 = (1.0 - fx) * fy;
    double w11 = fx * fy;
    for (int ch = 0; ch < img.channels; ++ch) {
        out.v[size_t(ch)] = w00 * channel_to_linear(img.at(xa, ya, ch), ch) +
                            w10 * channel_to_linear(img.at(xb, ya, ch), ch) +
                            w01 * channel_to_linear(img.at(xa, yb, ch), ch) +
                            w11 * channel_to_linear(img.at(xb, yb, ch), ch);
    }
    return out;
}

namespace {

LinearColor sentinel_color(const SampleOptions& opts, int channels) {
    LinearColor c;
    c.v[0] = channel_to_linear(uint16_t(opts.undefined_color.r * 257), 0);
    c.v[1] = channel_to_linear(uint16_t(opts.undefined_color.g * 257), 1);
    c.v[2] = channel_to_linear(uint16_t(opts.undefined_color.b * 257), 2);
    c.v[3] = 1.0;
    (void)channels;
    return c;
}

void run_rows(int height, int jobs, const std::function<void(int, int)>& body) {
    if (jobs <= 0) {
        jobs = int(std::thread::hardware_concurrency());
        if (jobs <= 0)
            jobs = 1;
    }
    jobs = std::min(jobs, height);
    if (jobs <= 1) {
        body(0, height);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(jobs));
    for (int k = 0; k < jobs; ++k) {
        int y0 = int(size_t(height) * k / jobs);
        int y1 = int(size_t(height) * (k + 1) / jobs);
        pool.emplace_back(body, y0, y1);
    }
    for (auto& t : pool)
        t.join();
}

// Shared per-pixel loop: `pick` chooses (map, image) for the pixel's sphere
// position, or nullptr to paint the sentinel.
template <typename Pick>
SphericalImage render(int width, int height, int channels, int depth, const SampleOptions& opts,
                      Pick pick) {
    SphericalImage out = SphericalImage::create(width, height, channels, depth);
    int ss = std::clamp(opts.supersample, 1, 8);
    run_rows(height, opts.jobs, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < width; ++x) {
                LinearColor acc;
                acc.v = {0.0, 0.0, 0.0, 0.0};
                for (int sy = 0; sy < ss; ++sy) {
                    for (int sx = 0; sx < ss; ++sx) {
                        double xc = x + (sx + 0.5) / ss;
                        double yc = y + (sy + 0.5) / ss;
                        EquirectCoord ec = pixel_to_equirect(xc, yc, width, height);
                        ProjectivePoint z = equirect_to_projective(ec, opts.orientation);
                        const PullbackMap* map = nullptr;
                        const SphericalImage* src = nullptr;
                        pick(z, map, src);
                        LinearColor col;
                        if (!map || !src) {
                            col = sentinel_color(opts, channels);
                        } else if (auto w = (*map)(z)) {
                            EquirectCoord tc = projective_to_equirect(*w, opts.orientation);
                            col = sample(*src, tc, opts);
                        } else {
                            col = sentinel_color(opts, channels);
                        }
                        for (int ch = 0; ch < 4; ++ch)
                            acc.v[size_t(ch)] += col.v[size_t(ch)];
                    }
                }
                double inv = 1.0 / (ss * ss);
                for (int ch = 0; ch < channels; ++ch)
                    out.at(x, y, ch) = channel_from_linear(acc.v[size_t(ch)] * inv, ch);
            }
        }
    });
    return out;
}

} // namespace

SphericalImage pull_back(const SphericalImage& input, const PullbackMap& map,
                         const SampleOptions& opts) {
    if (!input.is_equirect())
        throw ConfigError("input image is not 2:1 equirectangular");
    return render(input.width, input.height, input.channels, input.source_depth, opts,
                  [&](const ProjectivePoint&, const PullbackMap*& m, const SphericalImage*& s) {
                      m = &map;
                      s = &input;
                  });
}

SphericalImage composite_pull_back(const std::vector<CompositeSource>& sources, int width,
                                   int height, const SampleOptions& opts) {
    if (sources.empty())
        throw ConfigError("composite needs at least one source");
    int channels = 3;
    int depth = 8;
    for (const auto& s : sources) {
        if (!s.input || !s.input->is_equirect())
            throw ConfigError("composite source image is not 2:1 equirectangular");
        channels = std::max(channels, s.input->channels);
        depth = std::max(depth, s.input->source_depth);
    }
    return render(width, height, channels, depth, opts,
                  [&](const ProjectivePoint& z, const PullbackMap*& m, const SphericalImage*& s) {
                      for (const auto& src : sources) {
                          if (src.region(z)) {
                              m = &src.map;
                              s = src.input;
                              return;
                          }
                      }
                  });
}

SphericalImage generate_test_pattern(int height) {
    if (height < 64)
        throw ConfigError("test pattern height must be >= 64");
    int width = 2 * height;
    SphericalImage img = SphericalImage::create(width, height, 3, 8);

    auto put = [&](int x, int y, Rgb8 c) {
        img.set_rgb(x, y, uint16_t(c.r * 257), uint16_t(c.g * 257), uint16_t(c.b * 257));
    };

    struct Cap {
        SpherePoint center;
        double cos_radius;
        Rgb8 color;
    };
    std::vector<Cap> caps;
    caps.push_back({{0.0, 0.0, -1.0}, std::cos(pattern::kPoleCapRadians), pattern::kDiskAtZero});
    caps.push_back(
        {{0.0, 0.0, 1.0}, std::cos(pattern::kPoleCapRadians), pattern::kDiskAtInfinity});
    double grat = std::cos(3.0 * kPi / 180.0);
    for (int i = 0; i < 8; ++i) {
        for (int j = -1; j <= 1; ++j) {
            double theta = (2.0 * i + 1.0) * kPi / 8.0;
            double phi = j * kPi / 4.0;
            caps.push_back({to_sphere({theta, phi}), grat, pattern::kGraticule});
        }
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            EquirectCoord c = pixel_to_equirect(x + 0.5, y + 0.5, width, height);
            SpherePoint p = to_sphere(c);
            Rgb8 col = pattern::kBackground;
            bool done = false;
            for (const Cap& cap : caps) {
                double dot = p.x * cap.center.x + p.y * cap.center.y + p.z * cap.center.z;
                if (dot >= cap.cos_radius) {
                    col = cap.color;
                    done = true;
                    break;
                }
            }
            if (!done) {
                if (std::abs(c.phi) < kPi / 64.0)
                    col = pattern::kEquator;
                else if (c.theta < kPi / 48.0) // one-sided: breaks mirror symmetry
                    col = pattern::kMeridian;
                else if (c.theta >= kPi / 2.0 && c.theta < kPi / 2.0 + kPi / 96.0)
                    col = pattern::kMeridian2;
            }
            put(x, y, col);
        }
    }
    return img;
}

} // namespace sphedit
