#pragma once

#include <vector>

namespace curvedecay {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n).
GaussRule gauss_legendre(int n);

// n-point Gauss rule for the weight (1 - x^2)^a on [-1, 1], a > -1
// (Golub-Welsch on the symmetric Jacobi recurrence).
GaussRule gauss_gegenbauer(int n, double a);

// Cached 10- and 15-point Legendre rules used by the panel integrators.
const GaussRule& gl10();
const GaussRule& gl15();

}  // namespace curvedecay
