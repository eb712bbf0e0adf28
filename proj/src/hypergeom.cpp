#include "sphedit/hypergeom.hpp"

#include <cmath>

namespace sphedit {

namespace {

Complex series_2f1(double a, double b, double c, Complex z, long max_terms) {
    Complex sum = 1.0;
    Complex term = 1.0;
    for (long k = 0; k < max_terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) < 1e-17 * (1.0 + std::abs(sum)))
            return sum;
    }
    throw NoConvergenceError("2F1 series did not converge");
}

bool near_integer(double x) {
    return std::abs(x - std::round(x)) < 1e-9;
}

// DLMF 15.8.4, valid for |1 - z| < 1 and c - a - b not an integer.
Complex connection_2f1(double a, double b, double c, Complex z) {
    double s = c - a - b;
    if (near_integer(s))
        throw NoConvergenceError("2F1 connection formula needs c-a-b non-integer");
    Complex one_minus = 1.0 - z;
    double g1 = std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b));
    double g2 = std::tgamma(c) * std::tgamma(-s) / (std::tgamma(a) * std::tgamma(b));
    Complex f1 = series_2f1(a, b, a + b - c + 1.0, one_minus, 200000);
    if (std::abs(one_minus) == 0.0)
        return g1 * f1; // Gauss value at z = 1
    Complex f2 = series_2f1(c - a, c - b, s + 1.0, one_minus, 200000);
    return g1 * f1 + g2 * std::pow(one_minus, Complex(s, 0.0)) * f2;
}

} // namespace

Complex hyp2f1(double a, double b, double c, Complex z) {
    if (c <= 0.0 && near_integer(c))
        throw NumericError("2F1 undefined for non-positive integer c");
    double az = std::abs(z);
    if (az <= 0.95)
        return series_2f1(a, b, c, z, 4000);
    if (std::abs(1.0 - z) <= 0.95)
        return connection_2f1(a, b, c, z);
    if (az <= 1.0 - 1e-9)
        return series_2f1(a, b, c, z, 2000000);
    throw NoConvergenceError("2F1 argument too close to the unit circle");
}

Complex schwarz_christoffel_derivative(Complex z, int n) {
    Complex zn = std::pow(z, n);
    return std::exp(-(2.0 / n) * std::log(1.0 - zn));
}

namespace {

// tanh-sinh quadrature of (1 - w^n)^{-2/n} along the segment [0, z]. Handles
// the integrable endpoint singularity when z^n is on the unit circle.
Complex sc_segment_quadrature(Complex z, int n) {
    auto f = [&](double t) -> Complex {
        Complex w = z * t;
        Complex zn = std::pow(w, n);
        return std::exp(-(2.0 / n) * std::log(1.0 - zn));
    };
    Complex prev = 0.0;
    Complex result = 0.0;
    for (int level = 4; level <= 10; ++level) {
        long steps = 1L << level;
        double h = 7.0 / double(steps);
        Complex sum = 0.0;
        for (long j = -steps; j <= steps; ++j) {
            double u = j * h;
            double sh = 0.5 * kPi * std::sinh(u);
            double t = 0.5 * (1.0 + std::tanh(sh));
            double wgt = 0.25 * kPi * std::cosh(u) / (std::cosh(sh) * std::cosh(sh));
            if (t <= 0.0 || t >= 1.0 || wgt < 1e-320)
                continue;
            sum += f(t) * wgt;
        }
        result = sum * h * z;
        if (level > 5 && std::abs(result - prev) < 1e-13 * (1.0 + std::abs(result)))
            return result;
        prev = result;
    }
    return result;
}

} // namespace

Complex schwarz_christoffel(Complex z, int n) {
    if (n < 3)
        throw NumericError("regular polygon map needs n >= 3");
    double az = std::abs(z);
    if (az > 1.0 + 1e-9)
        throw NumericError("sc_n defined on the closed unit disk");
    if (az > 1.0)
        z /= az;
    Complex zn = std::pow(z, n);
    double azn = std::abs(zn);
    if (azn <= 0.95 || std::abs(1.0 - zn) <= 0.95 || azn <= 1.0 - 1e-9)
        return z * hyp2f1(1.0 / n, 2.0 / n, 1.0 + 1.0 / n, zn);
    return sc_segment_quadrature(z, n);
}

double sc_vertex_radius(int n) {
    return schwarz_christoffel(Complex(1.0, 0.0), n).real();
}

Complex schwarz_christoffel_inverse(Complex target, int n) {
    Complex w = target;
    if (std::abs(w) > 0.999)
        w *= 0.999 / std::abs(w);
    for (int it = 0; it < 50; ++it) {
        Complex zn = std::pow(w, n);
        Complex deriv_inv = std::exp((2.0 / n) * std::log(1.0 - zn)); // 1 / sc'
        Complex step = (schwarz_christoffel(w, n) - target) * deriv_inv;
        w -= step;
        double aw = std::abs(w);
        if (aw > 0.9999999)
            w *= 0.9999999 / aw;
        if (std::abs(step) < 1e-12)
            return w;
    }
    throw NoConvergenceError("sc_n inverse did not converge");
}

} // namespace sphedit
