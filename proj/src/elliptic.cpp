#include "sphedit/elliptic.hpp"

#include <cmath>

namespace sphedit {

Complex lattice_reduce(Complex z, const LatticeSpec& lattice) {
    Complex tau = lattice.tau();
    double beta = z.imag() / tau.imag();
    double alpha = z.real() - beta * tau.real();
    double m = std::round(alpha);
    double n = std::round(beta);
    return Complex(z.real() - m - n * tau.real(), z.imag() - n * tau.imag());
}

Weierstrass::Weierstrass(LatticeSpec lattice) : lattice_(lattice) {
    // Nome q = exp(i*pi*tau); |q| = e^-pi (square) or e^-pi*sqrt(3)/2 (hex),
    // so a handful of terms reaches full double precision.
    Complex q = std::exp(Complex(0.0, kPi) * lattice_.tau());
    Complex qp = 1.0; // q^{n^2 + n}, running
    coef_.clear();
    Complex q_quarter = std::pow(q, 0.25);
    for (int n = 0; n < 24; ++n) {
        // q^{(n+1/2)^2} = q^{1/4} * q^{n^2+n}
        if (n > 0)
            qp *= std::pow(q, 2 * n); // q^{n^2+n} / q^{(n-1)^2+(n-1)} = q^{2n}
        Complex c = q_quarter * qp;
        if (n % 2 == 1)
            c = -c;
        coef_.push_back(c);
        if (std::abs(c) < 1e-40)
            break;
    }

    Complex d1 = 0.0, d3 = 0.0;
    for (size_t n = 0; n < coef_.size(); ++n) {
        double k = 2.0 * double(n) + 1.0;
        d1 += coef_[n] * k;
        d3 += coef_[n] * k * k * k;
    }
    d3_over_d1_ = -d3 / d1;

    e_[0] = value(Complex(0.5, 0.0)).value();
    e_[1] = value(0.5 * (1.0 + lattice_.tau())).value();
    e_[2] = value(0.5 * lattice_.tau()).value();
}

Complex Weierstrass::half_period_value(int which) const {
    return e_[which];
}

Weierstrass::Theta Weierstrass::theta(Complex v) const {
    // theta1(v) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) v) and the first
    // three v-derivatives, summed together off powers of e^{iv}.
    Complex e = std::exp(Complex(0.0, 1.0) * v);
    Complex einv = 1.0 / e;
    Complex e2 = e * e;
    Complex e2inv = einv * einv;
    Complex ep = e;      // e^{(2n+1) i v}
    Complex em = einv;   // e^{-(2n+1) i v}
    Theta out{0.0, 0.0, 0.0, 0.0};
    const Complex half_i(0.0, 0.5);
    for (size_t n = 0; n < coef_.size(); ++n) {
        double k = 2.0 * double(n) + 1.0;
        Complex s = (ep - em) * (-half_i); // sin(k v)
        Complex c = (ep + em) * 0.5;       // cos(k v)
        out.t0 += coef_[n] * s;
        out.t1 += coef_[n] * k * c;
        out.t2 -= coef_[n] * k * k * s;
        out.t3 -= coef_[n] * k * k * k * c;
        ep *= e2;
        em *= e2inv;
    }
    out.t0 *= 2.0;
    out.t1 *= 2.0;
    out.t2 *= 2.0;
    out.t3 *= 2.0;
    return out;
}

void Weierstrass::eval(Complex z, ProjectivePoint& p, ProjectivePoint& dp) const {
    Complex zr = lattice_reduce(z, lattice_);
    if (std::abs(zr) < 1e-12) {
        p = ProjectivePoint::infinity();
        dp = ProjectivePoint::infinity();
        return;
    }
    Complex v = kPi * zr;
    Theta t = theta(v);
    Complex l1 = t.t1 / t.t0;
    Complex l2 = t.t2 / t.t0;
    Complex l3 = t.t3 / t.t0;
    Complex pv = kPi * kPi * (d3_over_d1_ / 3.0 - l2 + l1 * l1);
    Complex dv = kPi * kPi * kPi * (-l3 + 3.0 * l1 * l2 - 2.0 * l1 * l1 * l1);
    p = ProjectivePoint::affine(pv).normalized();
    dp = ProjectivePoint::affine(dv).normalized();
}

ProjectivePoint Weierstrass::value(Complex z) const {
    ProjectivePoint p, dp;
    eval(z, p, dp);
    return p;
}

ProjectivePoint Weierstrass::derivative(Complex z) const {
    ProjectivePoint p, dp;
    eval(z, p, dp);
    return dp;
}

EisensteinInvariants eisenstein_invariants(const LatticeSpec& lattice, double radius) {
    Complex tau = lattice.tau();
    double r2 = radius * radius;
    Complex s4 = 0.0, s6 = 0.0;
    int nmax = int(std::ceil(radius / tau.imag())) + 1;
    for (int n = -nmax; n <= nmax; ++n) {
        double yc = n * tau.imag();
        double xc = n * tau.real();
        if (yc * yc > r2)
            continue;
        double half_width = std::sqrt(r2 - yc * yc);
        int mlo = int(std::ceil(-half_width - xc));
        int mhi = int(std::floor(half_width - xc));
        for (int m = mlo; m <= mhi; ++m) {
            if (m == 0 && n == 0)
                continue;
            Complex w(m + xc, yc);
            Complex inv2 = 1.0 / (w * w);
            Complex inv4 = inv2 * inv2;
            s4 += inv4;
            s6 += inv4 * inv2;
        }
    }
    return {60.0 * s4, 140.0 * s6};
}

} // namespace sphedit
