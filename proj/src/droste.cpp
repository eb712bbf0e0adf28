#include "sphedit/droste.hpp"

#include <cmath>

namespace sphedit {

MobiusTransform droste_normalizer(const DrosteSpec& spec) {
    spec.validate();
    ProjectivePoint p = spec.p.normalized();
    ProjectivePoint q = spec.q.normalized();
    return MobiusTransform{p.den, -p.num, q.den, -q.num}.normalized();
}

std::optional<std::pair<Complex, long>> annulus_reduce(Complex w, const DrosteSpec& spec) {
    double r = std::abs(w);
    if (!(r > 0.0) || !std::isfinite(r))
        return std::nullopt;
    double step = std::log(spec.lambda);
    long k = long(std::floor(std::log(r / spec.inner_radius) / step));
    Complex reduced = w * std::pow(spec.lambda, double(-k));
    // fix up boundary rounding
    while (std::abs(reduced) >= spec.inner_radius * spec.lambda) {
        reduced /= spec.lambda;
        ++k;
    }
    while (std::abs(reduced) < spec.inner_radius) {
        reduced *= spec.lambda;
        --k;
    }
    return std::make_pair(reduced, k);
}

Complex droste_beta(const DrosteSpec& spec) {
    // exp(2 pi i beta) = lambda^twist  =>  beta = 1 + twist*log(lambda)/(2 pi i)
    return Complex(1.0, -spec.twist * std::log(spec.lambda) / (2.0 * kPi));
}

namespace {

std::optional<Complex> normalized_value(const MobiusTransform& norm, const ProjectivePoint& z) {
    ProjectivePoint w = norm.apply(z);
    double an = std::abs(w.num), ad = std::abs(w.den);
    if (an <= 1e-14 * ad || ad <= 1e-14 * an)
        return std::nullopt; // at a limit point
    return w.num / w.den;
}

} // namespace

PullbackMap droste_map(const DrosteSpec& spec) {
    spec.validate();
    MobiusTransform norm = droste_normalizer(spec);
    MobiusTransform denorm = norm.inverse().normalized();
    Complex beta = droste_beta(spec);
    bool twisted = spec.twist != 0;
    DrosteSpec s = spec;
    return PullbackMap(
        twisted ? "droste_twisted" : "droste_straight",
        [norm, denorm, beta, twisted, s](const ProjectivePoint& z)
            -> std::optional<ProjectivePoint> {
            auto w = normalized_value(norm, z);
            if (!w)
                return std::nullopt;
            Complex v = *w;
            if (twisted)
                v = std::exp(beta * std::log(v));
            auto red = annulus_reduce(v, s);
            if (!red)
                return std::nullopt;
            return denorm.apply(ProjectivePoint::affine(red->first));
        },
        {spec.p, spec.q});
}

PullbackMap droste_premap(const DrosteSpec& spec) {
    spec.validate();
    MobiusTransform norm = droste_normalizer(spec);
    MobiusTransform denorm = norm.inverse().normalized();
    Complex beta = droste_beta(spec);
    bool twisted = spec.twist != 0;
    return PullbackMap(
        "droste_spiral",
        [norm, denorm, beta, twisted](const ProjectivePoint& z)
            -> std::optional<ProjectivePoint> {
            if (!twisted)
                return z;
            auto w = normalized_value(norm, z);
            if (!w)
                return std::nullopt;
            return denorm.apply(ProjectivePoint::affine(std::exp(beta * std::log(*w))));
        },
        {spec.p, spec.q});
}

SphericalImage straight_droste(const SphericalImage& input, const DrosteSpec& spec,
                               const SampleOptions& opts) {
    DrosteSpec s = spec;
    s.twist = 0;
    return pull_back(input, droste_map(s), opts);
}

SphericalImage twisted_droste(const SphericalImage& input, const DrosteSpec& spec,
                              const SampleOptions& opts) {
    return pull_back(input, droste_map(spec), opts);
}

SphericalImage log_strip_unwrap(const SphericalImage& input, const DrosteSpec& spec,
                                int strip_height, const SampleOptions& opts) {
    spec.validate();
    if (strip_height < 8)
        throw ConfigError("strip height too small");
    MobiusTransform denorm = droste_normalizer(spec).inverse().normalized();
    double step = std::log(spec.lambda);
    int strip_width = std::max(1, int(std::lround(strip_height * step / (2.0 * kPi))));
    SphericalImage out =
        SphericalImage::create(strip_width, strip_height, input.channels, input.source_depth);
    double log_r0 = std::log(spec.inner_radius);
    for (int y = 0; y < strip_height; ++y) {
        for (int x = 0; x < strip_width; ++x) {
            double lx = log_r0 + (x + 0.5) / strip_width * step;
            double ang = (y + 0.5) / strip_height * 2.0 * kPi;
            Complex w = std::exp(Complex(lx, ang));
            ProjectivePoint src = denorm.apply(ProjectivePoint::affine(w));
            EquirectCoord tc = projective_to_equirect(src, opts.orientation);
            LinearColor col = sample(input, tc, opts);
            for (int ch = 0; ch < out.channels; ++ch)
                out.at(x, y, ch) = channel_from_linear(col.v[size_t(ch)], ch);
        }
    }
    return out;
}

DrosteSpec fit_annulus_from_circles(Complex c1, double r1, Complex c2, double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0))
        throw ConfigError("circle radii must be positive");
    // Inversion in circle 1 followed by inversion in circle 2 is a Mobius
    // transform whose fixed points are the common limit points of the
    // coaxial family.
    Complex d12 = std::conj(c1) - std::conj(c2);
    MobiusTransform m{c2 * d12 + r2 * r2, -c1 * c2 * d12 + c2 * r1 * r1 - r2 * r2 * c1, d12,
                      r1 * r1 - c1 * d12};

    // Fixed points: c z^2 + (d - a) z - b = 0.
    Complex A = m.c, B = m.d - m.a, C = -m.b;
    ProjectivePoint p, q;
    if (std::abs(A) < 1e-14 * (std::abs(B) + std::abs(C))) {
        if (std::abs(B) < 1e-300)
            throw NumericError("degenerate circle pair");
        p = ProjectivePoint::affine(-C / B);
        q = ProjectivePoint::infinity();
    } else {
        Complex disc = std::sqrt(B * B - 4.0 * A * C);
        p = ProjectivePoint::affine((-B + disc) / (2.0 * A));
        q = ProjectivePoint::affine((-B - disc) / (2.0 * A));
    }
    if (chordal(p, q) < 1e-10)
        throw NumericError("circles admit no annulus (tangent configuration)");

    DrosteSpec spec;
    spec.p = p;
    spec.q = q;
    spec.lambda = 2.0; // placeholder until measured below
    spec.inner_radius = 1.0;
    MobiusTransform norm = droste_normalizer(spec);

    auto circle_radius = [&](Complex c, double r) {
        Complex b1 = c + r;
        Complex b2 = c + Complex(0.0, r);
        double s1 = std::abs(norm.apply(ProjectivePoint::affine(b1)).value());
        double s2 = std::abs(norm.apply(ProjectivePoint::affine(b2)).value());
        if (std::abs(s1 - s2) > 1e-6 * std::max(s1, s2))
            throw NumericError("circles are not coaxial around the fitted limit points");
        return s1;
    };
    double s1 = circle_radius(c1, r1);
    double s2 = circle_radius(c2, r2);
    if (s1 > s2) {
        std::swap(spec.p, spec.q);
        norm = droste_normalizer(spec);
        s1 = circle_radius(c1, r1);
        s2 = circle_radius(c2, r2);
    }
    if (!(s2 > s1 * (1.0 + 1e-9)))
        throw NumericError("circles bound an empty annulus");
    spec.inner_radius = s1;
    spec.lambda = s2 / s1;
    return spec;
}

} // namespace sphedit
