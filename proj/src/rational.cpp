#include "sphedit/rational.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sphedit {

namespace {

using Poly = std::vector<Complex>; // degree-descending

Poly poly_derivative(const Poly& p) {
    int n = int(p.size()) - 1;
    if (n <= 0)
        return {Complex(0.0)};
    Poly d(size_t(n), Complex(0.0));
    for (int i = 0; i < n; ++i)
        d[size_t(i)] = p[size_t(i)] * double(n - i);
    return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, Complex(0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_sub(Poly a, const Poly& b) {
    // align tails (constant terms)
    if (b.size() > a.size())
        a.insert(a.begin(), b.size() - a.size(), Complex(0.0));
    size_t off = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i)
        a[off + i] -= b[i];
    return a;
}

double coeff_scale(const Poly& p) {
    double m = 0.0;
    for (const Complex& c : p)
        m = std::max(m, std::abs(c));
    return m;
}

} // namespace

std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
    // strip leading (numerically zero) coefficients
    double scale = coeff_scale(coeffs);
    if (scale == 0.0)
        return {};
    size_t lead = 0;
    while (lead + 1 < coeffs.size() && std::abs(coeffs[lead]) < 1e-12 * scale)
        ++lead;
    coeffs.erase(coeffs.begin(), coeffs.begin() + long(lead));
    int n = int(coeffs.size()) - 1;
    if (n <= 0)
        return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        companion(0, i) = -coeffs[size_t(i) + 1] / coeffs[0];
        if (i + 1 < n)
            companion(i + 1, i) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Complex> roots;
    roots.reserve(size_t(n));
    for (int i = 0; i < n; ++i)
        roots.push_back(solver.eigenvalues()(i));
    return roots;
}

void RationalMap::validate() const {
    if (degree < 1 || num.size() != size_t(degree) + 1 || den.size() != size_t(degree) + 1)
        throw ConfigError("rational map coefficient lists must have degree+1 entries");
    double sn = coeff_scale(num);
    double sd = coeff_scale(den);
    if (sn == 0.0 || sd == 0.0)
        throw ConfigError("rational map numerator/denominator is zero");

    // Approximate common factor: smallest singular value of the Sylvester
    // matrix of the normalized polynomials.
    int n = degree;
    Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= n; ++k)
            syl(r, r + k) = num[size_t(k)] / sn;
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= n; ++k)
            syl(n + r, r + k) = den[size_t(k)] / sd;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(syl);
    double smin = svd.singularValues()(2 * n - 1);
    double smax = svd.singularValues()(0);
    if (smin <= 1e-8 * smax)
        throw RankDeficientError("numerator and denominator share a factor (degree too high?)");
}

RationalMap RationalMap::normalized() const {
    double m = std::max(coeff_scale(num), coeff_scale(den));
    Complex pivot(0.0);
    for (const Complex& c : num)
        if (std::abs(c) == m)
            pivot = c;
    if (pivot == Complex(0.0))
        for (const Complex& c : den)
            if (std::abs(c) == m)
                pivot = c;
    RationalMap out = *this;
    for (Complex& c : out.num)
        c /= pivot;
    for (Complex& c : out.den)
        c /= pivot;
    return out;
}

ProjectivePoint RationalMap::eval(const ProjectivePoint& z) const {
    ProjectivePoint q = z.normalized();
    // Horner on the pair (z1, z2): sum a_i z1^i z2^{n-i}.
    Complex n_acc = num[0];
    Complex d_acc = den[0];
    for (int i = 1; i <= degree; ++i) {
        n_acc = n_acc * q.num + num[size_t(i)] * std::pow(q.den, i);
        d_acc = d_acc * q.num + den[size_t(i)] * std::pow(q.den, i);
    }
    return ProjectivePoint(n_acc, d_acc).normalized();
}

std::vector<ProjectivePoint> RationalMap::singular_points() const {
    Poly deriv_num = poly_sub(poly_mul(poly_derivative(num), den),
                              poly_mul(num, poly_derivative(den)));
    std::vector<ProjectivePoint> out;
    for (const Complex& r : polynomial_roots(deriv_num))
        out.push_back(ProjectivePoint::affine(r));
    out.push_back(ProjectivePoint::infinity());
    for (const Complex& r : polynomial_roots(den))
        out.push_back(ProjectivePoint::affine(r)); // poles: keep fit samples away
    return out;
}

PullbackMap RationalMap::as_pullback() const {
    RationalMap r = *this;
    return PullbackMap(
        "rational" + std::to_string(degree),
        [r](const ProjectivePoint& q) { return std::optional<ProjectivePoint>(r.eval(q)); },
        singular_points());
}

FitResult fit_rational(
    const std::function<std::optional<ProjectivePoint>(const ProjectivePoint&)>& f, int degree,
    const std::vector<Complex>& samples) {
    int n = degree;
    if (n < 1)
        throw ConfigError("fit degree must be >= 1");
    long cols = 2 * (n + 1);
    std::vector<std::pair<Complex, ProjectivePoint>> rows;
    rows.reserve(samples.size());
    for (const Complex& z : samples) {
        auto w = f(ProjectivePoint::affine(z));
        if (!w)
            continue;
        rows.emplace_back(z, w->normalized());
    }
    if (long(rows.size()) < cols)
        throw NumericError("not enough usable samples for the requested degree");

    Eigen::MatrixXcd mat(long(rows.size()), cols);
    for (long r = 0; r < long(rows.size()); ++r) {
        const Complex z = rows[size_t(r)].first;
        const ProjectivePoint w = rows[size_t(r)].second;
        // (w_den * z^i | -w_num * z^i), scale-free form of the affine row
        Complex zp = 1.0;
        for (int i = 0; i <= n; ++i) {
            mat(r, n - i) = w.den * zp;
            mat(r, 2 * n + 1 - i) = -w.num * zp;
            zp *= z;
        }
        mat.row(r) /= mat.row(r).norm();
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    double smin = sv(cols - 1);
    double s2 = sv(cols - 2);
    double residual = smin / smax;
    if (residual > 1e-6)
        throw DegreeTooLowError("fit residual " + std::to_string(residual) +
                                " too large; degree too low or samples unusable");
    if (s2 < 1e3 * smin)
        throw RankDeficientError("sample matrix kernel is not one-dimensional");

    Eigen::VectorXcd v = svd.matrixV().col(cols - 1);
    RationalMap map;
    map.degree = n;
    map.num.assign(v.data(), v.data() + n + 1);
    map.den.assign(v.data() + n + 1, v.data() + 2 * (n + 1));
    map = map.normalized();
    map.validate();
    return {map, residual};
}

FitResult fit_rational(const PullbackMap& f, int degree, const std::vector<Complex>& samples) {
    return fit_rational([&f](const ProjectivePoint& q) { return f(q); }, degree, samples);
}

std::vector<Complex> default_fit_samples(int degree,
                                         const std::vector<ProjectivePoint>& singular,
                                         uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<Complex> out;
    int want = 6 * degree;
    int per_circle = (want + 1) / 2;
    double radii[2] = {0.7, 1.3};
    for (double r : radii) {
        for (int i = 0; i < per_circle; ++i) {
            for (int attempt = 0; attempt < 64; ++attempt) {
                double ang = 2.0 * kPi * (i + 0.5) / per_circle + jitter(rng);
                Complex z = std::polar(r + 0.3 * jitter(rng), ang);
                bool ok = true;
                for (const auto& s : singular) {
                    if (chordal(ProjectivePoint::affine(z), s) < 0.05) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    out.push_back(z);
                    break;
                }
            }
        }
    }
    return out;
}

bool rational_equiv_strict(const RationalMap& r1, const RationalMap& r2, double tol) {
    if (r1.degree != r2.degree)
        return false;
    RationalMap a = r1.normalized();
    RationalMap b = r2.normalized();
    // best projective scalar s minimizing |A - s B|
    Complex dot(0.0), nb(0.0);
    double na = 0.0;
    for (int i = 0; i <= r1.degree; ++i) {
        dot += std::conj(b.num[size_t(i)]) * a.num[size_t(i)] +
               std::conj(b.den[size_t(i)]) * a.den[size_t(i)];
        nb += std::conj(b.num[size_t(i)]) * b.num[size_t(i)] +
              std::conj(b.den[size_t(i)]) * b.den[size_t(i)];
        na = std::max({na, std::abs(a.num[size_t(i)]), std::abs(a.den[size_t(i)])});
    }
    Complex s = dot / nb;
    double worst = 0.0;
    for (int i = 0; i <= r1.degree; ++i) {
        worst = std::max(worst, std::abs(a.num[size_t(i)] - s * b.num[size_t(i)]));
        worst = std::max(worst, std::abs(a.den[size_t(i)] - s * b.den[size_t(i)]));
    }
    return worst <= tol * na;
}

namespace {

std::vector<ProjectivePoint> critical_values(const RationalMap& r) {
    Poly deriv_num = poly_sub(poly_mul(poly_derivative(r.num), r.den),
                              poly_mul(r.num, poly_derivative(r.den)));
    std::vector<ProjectivePoint> vals;
    auto push = [&vals](const ProjectivePoint& p) {
        for (const auto& v : vals)
            if (chordal(v, p) < 1e-6)
                return;
        vals.push_back(p);
    };
    for (const Complex& z : polynomial_roots(deriv_num))
        push(r.eval(ProjectivePoint::affine(z)));
    push(r.eval(ProjectivePoint::infinity()));
    return vals;
}

bool maps_agree_conjugated(const RationalMap& r1, const RationalMap& r2,
                           const MobiusTransform& c, double tol) {
    // check C(r1(z)) == r2(C(z)) on a deterministic point set
    std::mt19937_64 rng(7121);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 80; ++i) {
        Complex z(2.0 * u(rng), 2.0 * u(rng));
        ProjectivePoint p = ProjectivePoint::affine(z);
        ProjectivePoint lhs = c.apply(r1.eval(p));
        ProjectivePoint rhs = r2.eval(c.apply(p));
        if (chordal(lhs, rhs) > tol)
            return false;
    }
    return true;
}

} // namespace

std::optional<MobiusTransform> rational_conjugacy(const RationalMap& r1, const RationalMap& r2,
                                                  double tol) {
    if (r1.degree != r2.degree)
        return std::nullopt;
    if (rational_equiv_strict(r1, r2, tol))
        return MobiusTransform::identity();
    std::vector<ProjectivePoint> cv1 = critical_values(r1);
    std::vector<ProjectivePoint> cv2 = critical_values(r2);
    if (cv1.size() < 3 || cv2.size() < 3)
        return std::nullopt;
    size_t n1 = cv1.size(), n2 = cv2.size();
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n1; ++j)
            for (size_t k = 0; k < n1; ++k) {
                if (i == j || i == k || j == k)
                    continue;
                for (size_t p = 0; p < n2; ++p)
                    for (size_t q = 0; q < n2; ++q)
                        for (size_t s = 0; s < n2; ++s) {
                            if (p == q || p == s || q == s)
                                continue;
                            MobiusTransform c;
                            try {
                                c = mobius_three_point(cv1[i], cv1[j], cv1[k], cv2[p],
                                                       cv2[q], cv2[s]);
                            } catch (const NumericError&) {
                                continue;
                            }
                            if (maps_agree_conjugated(r1, r2, c, tol))
                                return c;
                        }
            }
    return std::nullopt;
}

bool rational_equiv(const RationalMap& r1, const RationalMap& r2, double tol, bool relaxed) {
    if (rational_equiv_strict(r1, r2, tol))
        return true;
    if (!relaxed)
        return false;
    return rational_conjugacy(r1, r2, std::max(tol, 1e-8)).has_value();
}

namespace {

// P(p z1 + q z2, r z1 + s z2) expanded back to degree-descending coefficients
// in (z1, z2), where P has homogeneous degree n.
Poly homogeneous_substitute(const Poly& coeffs, Complex p, Complex q, Complex r, Complex s) {
    int n = int(coeffs.size()) - 1;
    Poly acc(size_t(n) + 1, Complex(0.0));
    for (int i = 0; i <= n; ++i) {
        // coeffs[n-i] multiplies (p z1 + q z2)^i (r z1 + s z2)^{n-i}
        Poly term{Complex(1.0)};
        Poly f1{p, q};
        Poly f2{r, s};
        for (int k = 0; k < i; ++k)
            term = poly_mul(term, f1);
        for (int k = 0; k < n - i; ++k)
            term = poly_mul(term, f2);
        for (size_t k = 0; k < term.size(); ++k)
            acc[k] += coeffs[size_t(n - i)] * term[k];
    }
    return acc;
}

} // namespace

RationalMap compose_mobius_rational(const MobiusTransform& c, const RationalMap& r) {
    RationalMap out;
    out.degree = r.degree;
    out.num.resize(r.num.size());
    out.den.resize(r.den.size());
    for (size_t i = 0; i < r.num.size(); ++i) {
        out.num[i] = c.a * r.num[i] + c.b * r.den[i];
        out.den[i] = c.c * r.num[i] + c.d * r.den[i];
    }
    return out.normalized();
}

RationalMap compose_rational_mobius(const RationalMap& r, const MobiusTransform& c) {
    RationalMap out;
    out.degree = r.degree;
    out.num = homogeneous_substitute(r.num, c.a, c.b, c.c, c.d);
    out.den = homogeneous_substitute(r.den, c.a, c.b, c.c, c.d);
    return out.normalized();
}

} // namespace sphedit
