#include "sphedit/maps.hpp"

#include <cmath>

namespace sphedit {

std::optional<ProjectivePoint> power_map(const ProjectivePoint& q, int n) {
    if (n < 2)
        throw NumericError("power map needs n >= 2");
    ProjectivePoint p = q.normalized();
    Complex num = 1.0, den = 1.0;
    for (int i = 0; i < n; ++i) {
        num *= p.num;
        den *= p.den;
    }
    return ProjectivePoint(num, den).normalized();
}

std::optional<ProjectivePoint> exp_strip_map(const ProjectivePoint& q, double lambda) {
    ProjectivePoint p = q.normalized();
    Complex num = p.num + p.den; // 1 + z
    Complex den = p.den - p.num; // 1 - z
    if (std::abs(den) <= 1e-15 * std::abs(num))
        return std::nullopt; // essential singularity at z = 1
    Complex w = -lambda * (num / den);
    // exp overflow/underflow towards the two ends of the strip.
    if (w.real() > 700.0)
        return ProjectivePoint::infinity();
    if (w.real() < -745.0)
        return ProjectivePoint::affine(0.0);
    return ProjectivePoint::affine(-std::exp(w));
}

PullbackMap PullbackMap::identity() {
    return PullbackMap("identity", [](const ProjectivePoint& q) {
        return std::optional<ProjectivePoint>(q);
    });
}

PullbackMap PullbackMap::mobius(const MobiusTransform& m) {
    MobiusTransform n = m.normalized();
    return PullbackMap("mobius", [n](const ProjectivePoint& q) {
        return std::optional<ProjectivePoint>(n.apply(q));
    });
}

PullbackMap PullbackMap::power(int n) {
    if (n < 2)
        throw ConfigError("power stage needs n >= 2");
    return PullbackMap(
        "power" + std::to_string(n),
        [n](const ProjectivePoint& q) { return power_map(q, n); },
        {ProjectivePoint::affine(0.0), ProjectivePoint::infinity()});
}

PullbackMap PullbackMap::exp_strip(double lambda) {
    if (!(lambda > 0.0))
        throw ConfigError("exp-strip stage needs lambda > 0");
    return PullbackMap(
        "exp_strip",
        [lambda](const ProjectivePoint& q) { return exp_strip_map(q, lambda); },
        {ProjectivePoint::affine(1.0), ProjectivePoint::affine(-1.0)});
}

PullbackMap PullbackMap::compose(const PullbackMap& outer, const PullbackMap& inner) {
    std::vector<ProjectivePoint> singular = inner.singular_points();
    for (const auto& s : outer.singular_points())
        singular.push_back(s);
    return PullbackMap(
        outer.name() + "." + inner.name(),
        [outer, inner](const ProjectivePoint& q) -> std::optional<ProjectivePoint> {
            auto mid = inner(q);
            if (!mid)
                return std::nullopt;
            return outer(*mid);
        },
        std::move(singular));
}

} // namespace sphedit
