#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "curvedecay/curve.hpp"
#include "curvedecay/gauss.hpp"
#include "curvedecay/sphere.hpp"

namespace curvedecay {

using Complex = std::complex<double>;

enum class CutoffFamily { bump, cosine_window, plateau };

std::string to_string(CutoffFamily family);
CutoffFamily cutoff_family_from_string(const std::string& name);

// chi(t) = amplitude * profile((t - center) / half_width), |u| < 1.
//   bump:          exp(1 - 1/(1 - u^2))
//   cosine-window: (1 + cos(pi u)) / 2
//   plateau:       1 on |u| <= 1/2, smooth monotone step to 0 at |u| = 1
struct CutoffSpec {
    double center = 0.0;
    double half_width = 0.1;
    CutoffFamily family = CutoffFamily::bump;
    double amplitude = 1.0;

    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
    double operator()(double t) const;
    double derivative(double t) const;
    // Integral of chi, by quadrature.
    double integral() const;
    // ||chi||_inf + ||chi'||_1.
    double sup_plus_variation() const;
    void validate() const;
};

struct QuadResult {
    Complex value{0.0, 0.0};
    double error = 0.0;
    long panels = 0;
    bool resolved = true;
    double tol = 0.0;
};

inline double default_tolerance(double R) { return R <= 1e4 ? 1e-9 : 1e-7; }

inline constexpr long kDefaultPanelBudget = 1L << 22;

// Integral over [a, b] of amp(t) * exp(i * phase(t)).
// Panels start no wider than max_width and are bisected until the sampled
// total variation of the phase (9 points) is at most 2 pi. Each panel is
// then integrated with 15- and 10-point Gauss-Legendre; the panel is accepted
// when |G15 - G10| <= tol * width / (b - a), otherwise bisected. The value is
// the sum of G15 results and the error the sum of |G15 - G10|.
template <class Amp, class Phase>
QuadResult integrate_oscillatory(const Amp& amp, const Phase& phase, double a, double b, double tol,
                                 double max_width, long panel_budget = kDefaultPanelBudget) {
    QuadResult result;
    result.tol = tol;
    const double length = b - a;
    if (!(length > 0.0)) return result;
    const GaussRule& g15 = gl15();
    const GaussRule& g10 = gl10();

    struct Panel {
        double lo, hi;
    };
    std::vector<Panel> stack;
    const long initial = std::max(1L, static_cast<long>(std::ceil(length / max_width - 1e-12)));
    for (long p = initial - 1; p >= 0; --p) {
        const double lo = a + length * static_cast<double>(p) / static_cast<double>(initial);
        const double hi = (p + 1 == initial) ? b
                                             : a + length * static_cast<double>(p + 1) / static_cast<double>(initial);
        stack.push_back({lo, hi});
    }

    // Neumaier-compensated panel sums.
    double sum_re = 0.0, sum_im = 0.0, c_re = 0.0, c_im = 0.0;
    auto add = [](double& s, double& c, double x) {
        const double t = s + x;
        c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
        s = t;
    };
    auto rule_sum = [&](const GaussRule& rule, double lo, double hi) {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = mid + half * rule.nodes[i];
            const double w = rule.weights[i] * amp(t);
            const double ph = phase(t);
            re += w * std::cos(ph);
            im += w * std::sin(ph);
        }
        return Complex(half * re, half * im);
    };

    long processed = 0;
    bool exhausted = false;
    double err_total = 0.0;
    const double two_pi = 2.0 * M_PI;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double w = p.hi - p.lo;
        const bool can_split = !exhausted && w > 1e-13 * std::max(1.0, std::abs(length));
        if (can_split) {
            double tv = 0.0;
            double prev = phase(p.lo);
            for (int i = 1; i <= 8; ++i) {
                const double cur = phase(p.lo + w * i / 8.0);
                tv += std::abs(cur - prev);
                prev = cur;
            }
            if (tv > two_pi) {
                const double mid = 0.5 * (p.lo + p.hi);
                stack.push_back({mid, p.hi});
                stack.push_back({p.lo, mid});
                continue;
            }
        }
        const Complex v15 = rule_sum(g15, p.lo, p.hi);
        const Complex v10 = rule_sum(g10, p.lo, p.hi);
        const double err = std::abs(v15 - v10);
        ++processed;
        if (can_split && err > tol * w / length) {
            if (processed + static_cast<long>(stack.size()) >= panel_budget) {
                exhausted = true;
            } else {
                const double mid = 0.5 * (p.lo + p.hi);
                stack.push_back({mid, p.hi});
                stack.push_back({p.lo, mid});
                continue;
            }
        }
        add(sum_re, c_re, v15.real());
        add(sum_im, c_im, v15.imag());
        err_total += err;
        ++result.panels;
    }
    result.value = Complex(sum_re + c_re, sum_im + c_im);
    result.error = err_total;
    result.resolved = !exhausted && err_total <= tol;
    return result;
}

// F_R(omega) = int chi(t) exp(i R <gamma(t), omega>) dt.
// tol <= 0 selects default_tolerance(R).
QuadResult eval_FR(const Curve& curve, const CutoffSpec& cutoff, double R, std::span<const double> omega,
                   double tol = 0.0, long panel_budget = kDefaultPanelBudget);

// F_R on every node of a grid. Uses F_R(-omega) = conj F_R(omega) when the
// grid records antipodes. Output is independent of the worker count.
std::vector<QuadResult> eval_FR_grid(const Curve& curve, const CutoffSpec& cutoff, double R,
                                     const SphericalGrid& grid, double tol = 0.0, int workers = 1);

// Composite 10-point Gauss-Legendre on n equal panels of supp chi.
Complex eval_FR_oracle(const Curve& curve, const CutoffSpec& cutoff, double R,
                       std::span<const double> omega, long n);

// Smallest admissible oracle panel count 50 (1 + R diam), diam = max |gamma|
// on supp chi.
long oracle_panels(const Curve& curve, const CutoffSpec& cutoff, double R);

// Phase lambda (sum_{j<=k-2} x_j s^j + s^k + g(s) s^{k+1}), with g a
// polynomial in s given by coefficients.
struct PhaseIntegralSpec {
    int k = 2;
    std::vector<double> x;  // x_1 .. x_{k-2}
    std::vector<double> g;  // g(s) = g[0] + g[1] s + ...
};

// max over i = 0, 1, 2 of sup |g^{(i)}| on [-radius, radius] (sampled).
double c2_norm(const std::vector<double>& g, double radius);

QuadResult eval_phase_integral(const PhaseIntegralSpec& spec, double lambda, const CutoffSpec& cutoff,
                               double tol = 1e-12);

}  // namespace curvedecay
