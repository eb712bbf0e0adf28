#include "sphedit/twist.hpp"

#include <cmath>

namespace sphedit {

int multiplier_degree(const LatticeSpec& lattice, Complex m) {
    Complex tau = lattice.tau();
    double b = m.imag() / tau.imag();
    double a = m.real() - b * tau.real();
    if (std::abs(a - std::round(a)) > 1e-9 || std::abs(b - std::round(b)) > 1e-9)
        throw ConfigError("twist multiplier must lie in the lattice ring");
    long ia = std::lround(a), ib = std::lround(b);
    if (ia == 0 && ib == 0)
        throw ConfigError("twist multiplier must be nonzero");
    double n = std::norm(Complex(double(ia), 0.0) + double(ib) * tau);
    return int(std::lround(n));
}

LatticeTwistMap::LatticeTwistMap(LatticeSpec lattice, Complex multiplier)
    : lattice_(lattice), m_(multiplier), wp_(lattice) {
    init();
}

LatticeTwistMap::LatticeTwistMap(LatticeSpec lattice, Complex multiplier,
                                 const MobiusTransform& normalization)
    : lattice_(lattice), m_(multiplier), wp_(lattice),
      norm_(normalization.normalized()), custom_norm_(true) {
    init();
}

void LatticeTwistMap::init() {
    degree_ = multiplier_degree(lattice_, m_);

    if (!custom_norm_) {
        ProjectivePoint e_mid = ProjectivePoint::affine(wp_.half_period_value(1));
        ProjectivePoint e_real = ProjectivePoint::affine(wp_.half_period_value(0));
        norm_ = mobius_three_point(e_mid, e_real, ProjectivePoint::infinity(),
                                   ProjectivePoint::affine(0.0),
                                   ProjectivePoint::affine(1.0),
                                   ProjectivePoint::infinity());
    }
    norm_inv_ = norm_.inverse().normalized();

    // Newton seeds over the unit cell, bucketed by where they land.
    const int g = 40;
    Complex tau = lattice_.tau();
    seeds_.reserve(size_t(g) * g);
    buckets_.assign(size_t(kBucketsTheta) * kBucketsPhi, {});
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            Complex u = (i + 0.5) / double(g) + ((j + 0.5) / double(g)) * tau;
            ProjectivePoint val = wp_.value(u);
            EquirectCoord e = to_equirect(stereographic_unproject(val));
            int bt = std::clamp(int(e.theta / (2.0 * kPi) * kBucketsTheta), 0,
                                kBucketsTheta - 1);
            int bp = std::clamp(int((e.phi / kPi + 0.5) * kBucketsPhi), 0, kBucketsPhi - 1);
            buckets_[size_t(bp) * kBucketsTheta + bt].push_back(int(seeds_.size()));
            seeds_.push_back({u, val});
        }
    }

    // Critical points and branch values: images of (half period + lattice)/m
    // and of lattice/m.
    auto push_unique = [this](const ProjectivePoint& p) {
        for (const auto& s : singular_)
            if (chordal(s, p) < 1e-8)
                return;
        singular_.push_back(p);
    };
    Complex halves[4] = {Complex(0.0, 0.0), Complex(0.5, 0.0), 0.5 * tau,
                         0.5 * (1.0 + tau)};
    int range = degree_ + 1;
    for (int a = -range; a <= range; ++a) {
        for (int b = -range; b <= range; ++b) {
            for (const Complex& h : halves) {
                Complex u = (h + lattice_.ring_element(a, b)) / m_;
                push_unique(norm_.apply(wp_.value(u)));
            }
        }
    }
}

std::optional<Complex> LatticeTwistMap::invert(const ProjectivePoint& target) const {
    ProjectivePoint t = target.normalized();
    bool flip = std::abs(t.num) > std::abs(t.den); // work on 1/p for big targets
    Complex goal = flip ? t.den / t.num : t.num / t.den;

    // Gather candidate seeds from the target's bucket neighborhood, widening
    // the ring until enough are in hand.
    EquirectCoord e = to_equirect(stereographic_unproject(t));
    int bt = std::clamp(int(e.theta / (2.0 * kPi) * kBucketsTheta), 0, kBucketsTheta - 1);
    int bp = std::clamp(int((e.phi / kPi + 0.5) * kBucketsPhi), 0, kBucketsPhi - 1);
    std::vector<int> candidates;
    for (int ring = 1; ring <= kBucketsPhi && candidates.size() < 24; ++ring) {
        candidates.clear();
        for (int dp = -ring; dp <= ring; ++dp) {
            int p = bp + dp;
            if (p < 0 || p >= kBucketsPhi)
                continue;
            for (int dt = -ring; dt <= ring; ++dt) {
                int th = (bt + dt % kBucketsTheta + kBucketsTheta) % kBucketsTheta;
                for (int idx : buckets_[size_t(p) * kBucketsTheta + th])
                    candidates.push_back(idx);
            }
        }
    }

    // Rank a few best candidates by chordal distance.
    const int tries = 6;
    int best[tries];
    double bestd[tries];
    for (int k = 0; k < tries; ++k) {
        best[k] = -1;
        bestd[k] = 1e30;
    }
    for (int i : candidates) {
        double d = chordal(seeds_[size_t(i)].val, t);
        for (int k = 0; k < tries; ++k) {
            if (d < bestd[k]) {
                for (int l = tries - 1; l > k; --l) {
                    bestd[l] = bestd[l - 1];
                    best[l] = best[l - 1];
                }
                bestd[k] = d;
                best[k] = int(i);
                break;
            }
        }
    }

    for (int k = 0; k < tries; ++k) {
        if (best[k] < 0)
            continue;
        Complex u = seeds_[best[k]].u;
        ProjectivePoint p, dp;
        for (int it = 0; it < 80; ++it) {
            wp_.eval(u, p, dp);
            if (chordal(p, t) < 1e-13)
                return u;
            if (p.is_infinity(1e-280) || dp.is_infinity(1e-280))
                break;
            Complex pv = p.value();
            Complex dv = dp.value();
            Complex step;
            if (flip) {
                // f(u) = 1/p(u) - goal, f' = -p'/p^2
                if (std::abs(pv) < 1e-280)
                    break;
                Complex f = 1.0 / pv - goal;
                step = -f * pv * pv / dv;
            } else {
                step = (pv - goal) / dv;
            }
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
                break;
            // keep steps inside a cell; big steps mean a bad basin
            if (std::abs(step) > 0.75)
                step *= 0.75 / std::abs(step);
            u -= step;
            if (std::abs(step) < 1e-15) {
                wp_.eval(u, p, dp);
                if (chordal(p, t) < 1e-12)
                    return u;
                break;
            }
        }
    }
    return std::nullopt;
}

std::optional<Complex> LatticeTwistMap::plane_preimage(const ProjectivePoint& z) const {
    return invert(norm_inv_.apply(z));
}

std::optional<ProjectivePoint> LatticeTwistMap::operator()(const ProjectivePoint& z) const {
    ProjectivePoint target = norm_inv_.apply(z);
    if (target.is_infinity(1e-14)) {
        // p^-1(inf) is a lattice point; multiplication keeps it there.
        return norm_.apply(ProjectivePoint::infinity());
    }
    auto u = invert(target);
    if (!u)
        return std::nullopt;
    return norm_.apply(wp_.value(m_ * *u));
}

PullbackMap LatticeTwistMap::as_pullback() const {
    auto self = std::make_shared<LatticeTwistMap>(*this);
    return PullbackMap(
        "lattice_twist", [self](const ProjectivePoint& q) { return (*self)(q); },
        singular_);
}

} // namespace sphedit
