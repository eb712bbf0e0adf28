#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sphedit/geometry.hpp"

namespace sphedit {

/// A single-valued map S : C-hat -> C-hat used to pull colors back through.
/// Evaluation returns nullopt at points where the map is undefined; the
/// resampler paints those with the sentinel color. `singular_points` lists
/// the declared branch/undefined points so tests and sample placement can
/// keep their distance.
class PullbackMap {
public:
    using Fn = std::function<std::optional<ProjectivePoint>(const ProjectivePoint&)>;

    PullbackMap() : PullbackMap(identity()) {}
    PullbackMap(std::string name, Fn fn, std::vector<ProjectivePoint> singular = {})
        : name_(std::move(name)), fn_(std::move(fn)), singular_(std::move(singular)) {}

    std::optional<ProjectivePoint> operator()(const ProjectivePoint& q) const {
        return fn_(q);
    }

    const std::string& name() const { return name_; }
    const std::vector<ProjectivePoint>& singular_points() const { return singular_; }

    static PullbackMap identity();
    static PullbackMap mobius(const MobiusTransform& m);
    // z -> z^n; branch points of the inverse at 0 and infinity.
    static PullbackMap power(int n);
    // z -> -exp(-lambda * (1 + z)/(1 - z)); undefined at z = 1.
    static PullbackMap exp_strip(double lambda);

    // z -> outer(inner(z)). Singular set is the union of the declared sets,
    // which is only a lower bound for compositions.
    static PullbackMap compose(const PullbackMap& outer, const PullbackMap& inner);

private:
    std::string name_;
    Fn fn_;
    std::vector<ProjectivePoint> singular_;
};

std::optional<ProjectivePoint> power_map(const ProjectivePoint& q, int n);
std::optional<ProjectivePoint> exp_strip_map(const ProjectivePoint& q, double lambda);

} // namespace sphedit
