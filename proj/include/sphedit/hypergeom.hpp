#pragma once

#include "sphedit/geometry.hpp"

namespace sphedit {

// Gauss hypergeometric 2F1(a, b; c; z) with real parameters. Direct power
// series inside the disk; the z -> 1-z connection formula near z = 1. Throws
// NoConvergenceError when z sits on the unit circle away from 1, where
// neither route applies.
Complex hyp2f1(double a, double b, double c, Complex z);

// Conformal map from the closed unit disk onto a regular n-gon,
// z * 2F1(1/n, 2/n; 1 + 1/n; z^n). Boundary arguments that the series and
// connection formula cannot reach are integrated directly
// (double-exponential quadrature of (1 - w^n)^{-2/n} along [0, z]).
Complex schwarz_christoffel(Complex z, int n);

// Distance from the center to a vertex of the n-gon, sc_n(1).
double sc_vertex_radius(int n);

// Derivative (1 - z^n)^{-2/n}.
Complex schwarz_christoffel_derivative(Complex z, int n);

// Newton inversion of sc_n on the polygon interior, seeded with the target
// itself; 50 iterations max, 1e-12 step tolerance.
Complex schwarz_christoffel_inverse(Complex target, int n);

} // namespace sphedit
