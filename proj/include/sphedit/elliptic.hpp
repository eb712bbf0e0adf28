#pragma once

#include <vector>

#include "sphedit/geometry.hpp"

namespace sphedit {

enum class LatticeKind { Square, Hexagonal };

/// Period lattice Z + Z*tau. Square uses tau = i (Gaussian integers), the
/// hexagonal one tau = exp(i*pi/3), the sixth root of unity.
struct LatticeSpec {
    LatticeKind kind = LatticeKind::Square;

    static LatticeSpec square() { return {LatticeKind::Square}; }
    static LatticeSpec hexagonal() { return {LatticeKind::Hexagonal}; }

    Complex tau() const {
        return kind == LatticeKind::Square ? Complex(0.0, 1.0)
                                           : std::polar(1.0, kPi / 3.0);
    }

    // Elements of the multiplier ring (Z[i] resp. Z[omega]) written as
    // a + b*tau with integer a, b.
    Complex ring_element(int a, int b) const {
        return Complex(double(a), 0.0) + double(b) * tau();
    }
};

// z reduced modulo the lattice into the cell centered on the origin;
// returns z - (m + n*tau).
Complex lattice_reduce(Complex z, const LatticeSpec& lattice);

/// Weierstrass elliptic function for the unit-cell lattice, evaluated through
/// the first Jacobi theta function and its log-derivatives. Periods 1 and tau,
/// poles (returned as the infinite ratio point) on the lattice.
class Weierstrass {
public:
    explicit Weierstrass(LatticeSpec lattice);

    const LatticeSpec& lattice() const { return lattice_; }

    ProjectivePoint value(Complex z) const;       // p(z)
    ProjectivePoint derivative(Complex z) const;  // p'(z)

    // Both at once; cheaper when Newton iterations need the pair.
    void eval(Complex z, ProjectivePoint& p, ProjectivePoint& dp) const;

    // Values at the three half periods 1/2, (1+tau)/2, tau/2.
    Complex half_period_value(int which) const;

private:
    struct Theta {
        // theta1 and its first three derivatives at v.
        Complex t0, t1, t2, t3;
    };
    Theta theta(Complex v) const;

    LatticeSpec lattice_;
    std::vector<double> log_q_sq_;   // (n + 1/2)^2 * log|q| is folded into coef_
    std::vector<Complex> coef_;      // (-1)^n q^{(n+1/2)^2}
    Complex d3_over_d1_;             // theta1'''(0) / theta1'(0)
    Complex e_[3];
};

/// g2 = 60 * sum' w^-4 and g3 = 140 * sum' w^-6 by direct summation over the
/// lattice points inside a disk. The disk truncation is exactly invariant
/// under the lattice's rotational symmetry, so the vanishing invariant
/// (g3 for the square lattice, g2 for the hexagonal one) cancels to rounding
/// error; the radius controls the tail of the surviving one.
struct EisensteinInvariants {
    Complex g2;
    Complex g3;
};

EisensteinInvariants eisenstein_invariants(const LatticeSpec& lattice, double radius = 4000.0);

} // namespace sphedit
