#include "sphedit/schottky.hpp"

#include <atomic>
#include <cmath>

namespace sphedit {

SchottkyRegion classify_mask_pixel(uint8_t r, uint8_t g, uint8_t b) {
    struct Canon {
        uint8_t r, g, b;
        SchottkyRegion region;
    };
    static const Canon canon[] = {
        {0, 0, 0, SchottkyRegion::Black},       {255, 0, 0, SchottkyRegion::LowerA},
        {255, 255, 255, SchottkyRegion::UpperA}, {0, 255, 0, SchottkyRegion::LowerB},
        {0, 0, 255, SchottkyRegion::UpperB},
    };
    SchottkyRegion best = SchottkyRegion::Black;
    long best_d = -1;
    for (const Canon& c : canon) {
        int dr = int(r) - c.r, dg = int(g) - c.g, db = int(b) - c.b;
        if (std::abs(dr) > 64 || std::abs(dg) > 64 || std::abs(db) > 64)
            continue;
        long d = long(dr) * dr + long(dg) * dg + long(db) * db;
        if (best_d < 0 || d < best_d) {
            best_d = d;
            best = c.region;
        }
    }
    return best;
}

bool SchottkyConfig::Disk::contains(const ProjectivePoint& q) const {
    ProjectivePoint p = q.normalized();
    if (p.is_infinity(1e-14))
        return exterior;
    double d = std::abs(p.value() - center);
    return exterior ? d >= radius : d <= radius;
}

namespace {

bool disks_disjoint(const SchottkyConfig::Disk& a, const SchottkyConfig::Disk& b) {
    double sep = std::abs(a.center - b.center);
    if (!a.exterior && !b.exterior)
        return sep > a.radius + b.radius;
    if (a.exterior && b.exterior)
        return false; // both contain infinity
    const auto& in = a.exterior ? b : a;
    const auto& out = a.exterior ? a : b;
    return sep + in.radius < out.radius;
}

SchottkyRegion classify_stored(const SphericalImage& mask, int x, int y) {
    auto to8 = [](uint16_t v) { return uint8_t((v + 128) / 257); };
    return classify_mask_pixel(to8(mask.at(x, y, 0)), to8(mask.at(x, y, 1)),
                               to8(mask.at(x, y, 2)));
}

} // namespace

void SchottkyConfig::validate() const {
    MobiusClass ca = classify(gen_a);
    if (ca != MobiusClass::Hyperbolic && ca != MobiusClass::Loxodromic)
        throw ConfigError("generator A must be hyperbolic or loxodromic");
    if (gen_b) {
        MobiusClass cb = classify(*gen_b);
        if (cb != MobiusClass::Hyperbolic && cb != MobiusClass::Loxodromic)
            throw ConfigError("generator B must be hyperbolic or loxodromic");
    }
    if (max_iter < 1)
        throw ConfigError("max_iter must be positive");
    if (disks) {
        int used = gen_b ? 4 : 2;
        for (int i = 0; i < used; ++i)
            for (int j = i + 1; j < used; ++j)
                if (!disks_disjoint((*disks)[size_t(i)], (*disks)[size_t(j)]))
                    throw RegionsOverlapError("schottky disks are not disjoint", -1);
    } else {
        if (mask.empty() || !mask.is_equirect())
            throw ConfigError("schottky needs a 2:1 mask or exact disks");
        bool have_b_regions = false;
        for (int y = 0; y < mask.height && !have_b_regions; ++y)
            for (int x = 0; x < mask.width; ++x) {
                SchottkyRegion r = classify_stored(mask, x, y);
                if (r == SchottkyRegion::LowerB || r == SchottkyRegion::UpperB) {
                    have_b_regions = true;
                    break;
                }
            }
        if (have_b_regions && !gen_b)
            throw ConfigError("mask has green/blue regions but no B generator");
    }
}

SphericalImage derive_disk_regions(const SphericalImage& mask_ab, const MobiusTransform& a,
                                   const std::optional<MobiusTransform>& b,
                                   const SampleOptions& opts, long overlap_tolerance) {
    if (!mask_ab.is_equirect())
        throw ConfigError("mask is not 2:1 equirectangular");
    int w = mask_ab.width, h = mask_ab.height;

    auto source_label = [&](const ProjectivePoint& z) {
        EquirectCoord ec = projective_to_equirect(z, opts.orientation);
        double xf, yf;
        equirect_to_pixel(ec, w, h, xf, yf);
        int xi = int(std::lround(std::floor(xf))) % w;
        if (xi < 0)
            xi += w;
        int yi = std::clamp(int(std::lround(std::floor(yf))), 0, h - 1);
        return classify_stored(mask_ab, xi, yi);
    };

    MobiusTransform inv_a = a.inverse().normalized();
    MobiusTransform inv_b = b ? b->inverse().normalized() : MobiusTransform::identity();

    SphericalImage out = SphericalImage::create(w, h, 3, 8);
    long overlaps = 0;
    long source_red = 0, source_green = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            EquirectCoord ec = pixel_to_equirect(x + 0.5, y + 0.5, w, h);
            ProjectivePoint z = equirect_to_projective(ec, opts.orientation);
            SchottkyRegion here = classify_stored(mask_ab, x, y);
            bool is_red = here == SchottkyRegion::LowerA;
            bool is_green = here == SchottkyRegion::LowerB;
            // D_A = A(complement of D_a): membership pulled back through A^-1.
            bool is_white = source_label(inv_a.apply(z)) != SchottkyRegion::LowerA;
            bool is_blue = b && source_label(inv_b.apply(z)) != SchottkyRegion::LowerB;
            source_red += is_red;
            source_green += is_green;
            int claims = int(is_red) + int(is_green) + int(is_white) + int(is_blue);
            if (claims > 1)
                ++overlaps;
            Rgb8 color{0, 0, 0};
            if (is_red)
                color = {255, 0, 0};
            else if (is_green)
                color = {0, 255, 0};
            else if (is_white)
                color = {255, 255, 255};
            else if (is_blue)
                color = {0, 0, 255};
            out.set_rgb(x, y, uint16_t(color.r * 257), uint16_t(color.g * 257),
                        uint16_t(color.b * 257));
        }
    }
    if (source_red == 0 || (b && source_green == 0))
        throw ConfigError("mask must contain nonempty red (and green) regions");
    if (overlaps > overlap_tolerance)
        throw RegionsOverlapError("derived schottky regions overlap on " +
                                      std::to_string(overlaps) + " pixels",
                                  overlaps);
    return out;
}

SchottkyMapper::SchottkyMapper(const SchottkyConfig& cfg, const SampleOptions& opts)
    : cfg_(cfg), opts_(opts) {
    cfg_.validate();
    inv_a_ = cfg_.gen_a.inverse().normalized();
    if (cfg_.gen_b)
        inv_b_ = cfg_.gen_b->inverse().normalized();
    if (!cfg_.disks) {
        mask_w_ = cfg_.mask.width;
        mask_h_ = cfg_.mask.height;
        labels_.resize(size_t(mask_w_) * mask_h_);
        for (int y = 0; y < mask_h_; ++y)
            for (int x = 0; x < mask_w_; ++x)
                labels_[size_t(y) * mask_w_ + x] = uint8_t(classify_stored(cfg_.mask, x, y));
    }
}

SchottkyRegion SchottkyMapper::region_of(const ProjectivePoint& q) const {
    if (cfg_.disks) {
        const auto& d = *cfg_.disks;
        if (d[0].contains(q))
            return SchottkyRegion::LowerA;
        if (d[1].contains(q))
            return SchottkyRegion::UpperA;
        if (cfg_.gen_b && d[2].contains(q))
            return SchottkyRegion::LowerB;
        if (cfg_.gen_b && d[3].contains(q))
            return SchottkyRegion::UpperB;
        return SchottkyRegion::Black;
    }
    EquirectCoord ec = projective_to_equirect(q, opts_.orientation);
    double xf, yf;
    equirect_to_pixel(ec, mask_w_, mask_h_, xf, yf);
    int xi = int(std::lround(std::floor(xf))) % mask_w_;
    if (xi < 0)
        xi += mask_w_;
    int yi = std::clamp(int(std::lround(std::floor(yf))), 0, mask_h_ - 1);
    return SchottkyRegion(labels_[size_t(yi) * mask_w_ + xi]);
}

std::optional<ProjectivePoint> SchottkyMapper::escape(const ProjectivePoint& q,
                                                      SchottkyStats* stats) const {
    ProjectivePoint cur = q.normalized();
    struct Visit {
        SchottkyRegion region;
        long x, y, z;
    };
    std::vector<Visit> seen;
    for (int it = 0; it <= cfg_.max_iter; ++it) {
        SchottkyRegion region = region_of(cur);
        if (region == SchottkyRegion::Black)
            return cur;
        SpherePoint s = stereographic_unproject(cur);
        Visit v{region, std::lround(s.x * 1e9), std::lround(s.y * 1e9),
                std::lround(s.z * 1e9)};
        for (const Visit& old : seen) {
            if (old.region == v.region && old.x == v.x && old.y == v.y && old.z == v.z) {
                if (stats)
                    ++stats->cycle_pixels;
                return std::nullopt; // configuration error surfaced as sentinel
            }
        }
        seen.push_back(v);
        switch (region) {
        case SchottkyRegion::LowerA: cur = cfg_.gen_a.apply(cur); break;
        case SchottkyRegion::UpperA: cur = inv_a_.apply(cur); break;
        case SchottkyRegion::LowerB: cur = cfg_.gen_b->apply(cur); break;
        case SchottkyRegion::UpperB: cur = inv_b_.apply(cur); break;
        default: break;
        }
    }
    if (stats)
        ++stats->capped_pixels;
    return std::nullopt;
}

SphericalImage schottky_render(const SphericalImage& input, const SchottkyConfig& cfg,
                               const SampleOptions& opts, SchottkyStats* stats) {
    if (!input.is_equirect())
        throw ConfigError("input image is not 2:1 equirectangular");
    SchottkyMapper mapper(cfg, opts);
    std::atomic<long> capped{0};
    std::atomic<long> cycles{0};

    SampleOptions render_opts = opts;
    render_opts.undefined_color = cfg.sentinel;
    PullbackMap map("schottky", [&](const ProjectivePoint& q) {
        SchottkyStats local;
        auto r = mapper.escape(q, &local);
        if (local.capped_pixels)
            capped.fetch_add(local.capped_pixels, std::memory_order_relaxed);
        if (local.cycle_pixels)
            cycles.fetch_add(local.cycle_pixels, std::memory_order_relaxed);
        return r;
    });
    SphericalImage out = pull_back(input, map, render_opts);
    if (stats) {
        // counts are per map evaluation; equal to pixels at supersample 1
        stats->total_pixels += long(input.width) * input.height;
        stats->capped_pixels += capped.load();
        stats->cycle_pixels += cycles.load();
    }
    return out;
}

} // namespace sphedit
