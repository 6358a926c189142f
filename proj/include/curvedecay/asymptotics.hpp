#pragma once

#include <complex>
#include <string>
#include <vector>

#include "curvedecay/oscquad.hpp"

namespace curvedecay {

// Lanczos approximation (g = 7, 9 coefficients); Gamma(x) = Gamma(x+1)/x
// below 1/2. Real x > 0.
double gamma_lanczos(double x);

struct AlphaConstant {
    int k = 2;
    Complex value;
};

// alpha_k = (2/k) Gamma(1/k) sin((k-1) pi / 2k) for odd k,
//           (2/k) Gamma(1/k) exp(i pi / 2k)    for even k.
AlphaConstant alpha(int k);

enum class AiryMethod { series, asymptotic };

struct AiryValue {
    double tau = 0.0;
    double value = 0.0;
    AiryMethod method = AiryMethod::series;
    double error = 0.0;
    // |series - asymptotic| for |tau| in [5, 7], NaN elsewhere.
    double cross_difference = 0.0;
};

// Maclaurin series with Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3).
double airy_series(double tau, double* error = nullptr);
// Asymptotic expansion truncated at its smallest term. Any |tau| > 0.
double airy_asymptotic(double tau, double* error = nullptr);
// Series on [-7, 6], asymptotic beyond; tau in [-100, 10].
AiryValue airy(double tau);
// pi^{-1/2} t^{-1/4} cos(2/3 t^{3/2} - pi/4), the leading term of Ai(-t).
double airy_leading(double t);

// Least-squares slope and intercept of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct Lemma51Row {
    double lambda = 0.0;
    Complex integral;
    Complex leading;
    double residual = 0.0;
    double envelope = 0.0;
    bool resolved = true;
};

struct Lemma51Report {
    int k = 2;
    double delta = 0.0;
    double A0 = 0.0;
    double A1 = 0.0;
    std::vector<Lemma51Row> rows;
    // Decay order of the residual (k = 2 and delta = 0: of residual / log lambda).
    double fitted_order = 0.0;
    double required_order = 0.0;
    // max residual / envelope.
    double fitted_constant = 0.0;
    bool passes = false;
};

// Perturbed stationary-phase check. Coefficients are x_j = xi_j lambda^{(j-k)/k}, so
// |x_j| <= delta lambda^{(j-k)/k} with delta = max |xi_j|. The residual
// |I - eta(0) alpha_k lambda^{-1/k}| must decay at order >= 2/k - 0.1 when
// delta = 0 (1 - 0.1 after dividing by log lambda for k = 2) and at order
// >= 1/k - 0.1 otherwise.
Lemma51Report check_lemma51(int k, const std::vector<double>& lambdas, const std::vector<double>& xi,
                            const std::vector<double>& g, const CutoffSpec& cutoff, double tol = 1e-12);

struct Lemma52Row {
    double lambda = 0.0;
    double theta = 0.0;
    Complex J;
    double airy_model = 0.0;
    double cosine_model = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    double envelope = 0.0;
    bool resolved = true;
};

// J(lambda, theta) = int exp(i lambda (s^3/3 - theta s + g(s) s^4)) eta(s) ds
// with eta the plateau cutoff of half-width eps (eta = 1 on |s| <= eps/2).
// Models: 2 pi lambda^{-1/3} Ai(-lambda^{2/3} theta) and
// 2 pi^{1/2} lambda^{-1/2} theta^{-1/4} cos(2/3 lambda theta^{3/2} - pi/4).
// Requires 0 < theta < eps^2/2, lambda > 1/eps, eps <= 1/(1 + ||g||_C2).
Lemma52Row check_lemma52(double lambda, double theta, const std::vector<double>& g, double eps,
                         double tol = 1e-12);

struct Lemma52Summary {
    std::vector<Lemma52Row> rows;
    // max over rows of max(E1, E2) / envelope.
    double fitted_constant = 0.0;
    bool all_resolved = true;
};

Lemma52Summary check_lemma52_grid(const std::vector<double>& lambdas, const std::vector<double>& thetas,
                                  const std::vector<std::vector<double>>& gs, double eps, double tol = 1e-12);

}  // namespace curvedecay
