#include "curvedecay/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvedecay/errors.hpp"

namespace curvedecay {

double gamma_lanczos(double x) {
    static const double p[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                               771.32342877765313,   -176.61502916214059,   12.507343278686905,
                               -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (!(x > 0.0)) throw DomainError("gamma_lanczos requires x > 0");
    if (x < 0.5) return gamma_lanczos(x + 1.0) / x;
    const double z = x - 1.0;
    double a = p[0];
    for (int i = 1; i < 9; ++i) a += p[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

AlphaConstant alpha(int k) {
    if (k < 2) throw DomainError("alpha_k requires k >= 2");
    const double mag = 2.0 / k * gamma_lanczos(1.0 / k);
    AlphaConstant a;
    a.k = k;
    if (k % 2 == 1) {
        a.value = Complex(mag * std::sin((k - 1) * M_PI / (2.0 * k)), 0.0);
    } else {
        a.value = std::polar(mag, M_PI / (2.0 * k));
    }
    return a;
}

double airy_series(double tau, double* error) {
    const double c1 = std::pow(3.0, -2.0 / 3.0) / gamma_lanczos(2.0 / 3.0);
    const double c2 = std::pow(3.0, -1.0 / 3.0) / gamma_lanczos(1.0 / 3.0);
    const double x3 = tau * tau * tau;
    double f = 1.0, t = 1.0, fabs_sum = 1.0;
    double g = tau, u = tau, gabs_sum = std::abs(tau);
    for (int k = 0; k < 500; ++k) {
        t *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        u *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        f += t;
        g += u;
        fabs_sum += std::abs(t);
        gabs_sum += std::abs(u);
        if (std::abs(t) <= 1e-18 * fabs_sum && std::abs(u) <= 1e-18 * std::max(gabs_sum, 1e-300)) break;
    }
    if (error) {
        *error = 8.0 * std::numeric_limits<double>::epsilon() * (c1 * fabs_sum + c2 * gabs_sum);
    }
    return c1 * f - c2 * g;
}

double airy_asymptotic(double tau, double* error) {
    if (tau == 0.0) throw DomainError("asymptotic Airy expansion needs tau != 0");
    const double t = std::abs(tau);
    const double zeta = 2.0 / 3.0 * std::pow(t, 1.5);
    double u = 1.0;
    double term = 1.0;  // u_n zeta^{-n}
    double even = 0.0, odd = 0.0, alternating = 0.0;
    double omitted = 0.0;
    for (int n = 0; n < 200; ++n) {
        if (n > 0) {
            const double next_u = u * (6.0 * n - 5.0) * (6.0 * n - 3.0) * (6.0 * n - 1.0) / ((2.0 * n - 1.0) * 216.0 * n);
            const double next = next_u / std::pow(zeta, n);
            if (next > term) {
                omitted = next;
                break;
            }
            u = next_u;
            term = next;
        }
        if (n % 2 == 0) {
            even += ((n / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        } else {
            odd += (((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        }
        alternating += (n % 2 == 0 ? 1.0 : -1.0) * term;
        if (term < 1e-17) {
            omitted = term;
            break;
        }
    }
    if (omitted == 0.0) omitted = term;
    if (tau < 0.0) {
        const double amp = 1.0 / (std::sqrt(M_PI) * std::pow(t, 0.25));
        const double phase = zeta - 0.25 * M_PI;
        if (error) *error = amp * omitted;
        return amp * (std::cos(phase) * even + std::sin(phase) * odd);
    }
    const double amp = std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(t, 0.25));
    if (error) *error = amp * omitted;
    return amp * alternating;
}

AiryValue airy(double tau) {
    if (!(tau >= -100.0 && tau <= 10.0)) throw CapabilityError("airy supports tau in [-100, 10]");
    AiryValue v;
    v.tau = tau;
    v.cross_difference = std::numeric_limits<double>::quiet_NaN();
    const double a = std::abs(tau);
    double err_series = 0.0, err_asym = 0.0;
    // The oscillatory side switches at -7, where both forms agree to 1e-12;
    // at -6 they differ by about 6e-11, enough to break second differences.
    if (tau >= -7.0 && tau <= 6.0) {
        v.value = airy_series(tau, &err_series);
        v.method = AiryMethod::series;
        v.error = err_series;
    } else {
        v.value = airy_asymptotic(tau, &err_asym);
        v.method = AiryMethod::asymptotic;
        v.error = err_asym;
    }
    if (a >= 5.0 && a <= 7.0) {
        v.cross_difference = std::abs(airy_series(tau) - airy_asymptotic(tau));
    }
    return v;
}

double airy_leading(double t) {
    if (!(t > 0.0)) throw DomainError("leading Airy term requires t > 0");
    return std::cos(2.0 / 3.0 * std::pow(t, 1.5) - 0.25 * M_PI) / (std::sqrt(M_PI) * std::pow(t, 0.25));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("line fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DiagnosticError("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

Lemma51Report check_lemma51(int k, const std::vector<double>& lambdas, const std::vector<double>& xi,
                            const std::vector<double>& g, const CutoffSpec& cutoff, double tol) {
    if (k < 2) throw DomainError("check_lemma51 requires k >= 2");
    if (static_cast<int>(xi.size()) > std::max(0, k - 2)) throw DomainError("at most k - 2 coefficients");
    Lemma51Report rep;
    rep.k = k;
    for (double v : xi) rep.delta = std::max(rep.delta, std::abs(v));
    rep.A0 = cutoff.sup_plus_variation();
    for (int i = 0; i <= 4000; ++i) {
        rep.A1 = std::max(rep.A1, std::abs(cutoff.derivative(cutoff.lo() + cutoff.half_width * i / 2000.0)));
    }
    const Complex ak = alpha(k).value;
    const double beta = (k == 2) ? 1.0 : 0.0;
    const bool log_model = (k == 2 && rep.delta == 0.0);
    std::vector<double> lx, ly;
    for (double lambda : lambdas) {
        PhaseIntegralSpec spec;
        spec.k = k;
        spec.g = g;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            spec.x.push_back(xi[j] * std::pow(lambda, (static_cast<double>(j + 1) - k) / k));
        }
        const QuadResult q = eval_phase_integral(spec, lambda, cutoff, tol);
        Lemma51Row row;
        row.lambda = lambda;
        row.integral = q.value;
        row.leading = cutoff(0.0) * ak * std::pow(lambda, -1.0 / k);
        row.residual = std::abs(q.value - row.leading);
        row.envelope = rep.A0 * rep.delta * std::pow(lambda, -1.0 / k) +
                       rep.A1 * std::pow(lambda, -2.0 / k) * (1.0 + beta * std::log(lambda));
        row.resolved = q.resolved;
        rep.fitted_constant = std::max(rep.fitted_constant, row.residual / row.envelope);
        rep.rows.push_back(row);
        if (row.resolved && row.residual > 0.0) {
            lx.push_back(std::log(lambda));
            ly.push_back(std::log(log_model ? row.residual / std::log(lambda) : row.residual));
        }
    }
    rep.required_order = rep.delta > 0.0 ? 1.0 / k : (k == 2 ? 1.0 : 2.0 / k);
    if (lx.size() >= 2) {
        rep.fitted_order = -fit_line(lx, ly).slope;
        rep.passes = rep.fitted_order >= rep.required_order - 0.1 && lx.size() == lambdas.size();
    }
    return rep;
}

namespace {

double airy_any(double tau) {
    return std::abs(tau) <= 6.0 ? airy_series(tau) : airy_asymptotic(tau);
}

}  // namespace

Lemma52Row check_lemma52(double lambda, double theta, const std::vector<double>& g, double eps, double tol) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");
    if (eps > 1.0 / (1.0 + c2_norm(g, 1.0))) throw DomainError("eps must satisfy eps <= 1/(1 + ||g||_C2)");
    if (!(theta > 0.0 && theta < 0.5 * eps * eps)) throw DomainError("theta must satisfy 0 < theta < eps^2/2");
    if (!(lambda > 1.0 / eps)) throw DomainError("lambda must exceed 1/eps");
    const CutoffSpec eta{0.0, eps, CutoffFamily::plateau, 1.0};
    std::vector<double> c(4 + g.size(), 0.0);
    c[1] = -theta;
    c[3] = 1.0 / 3.0;
    for (std::size_t i = 0; i < g.size(); ++i) c[4 + i] += g[i];
    const CoordinateFunction p = CoordinateFunction::polynomial(c);
    const QuadResult q = integrate_oscillatory(
        eta, [&](double s) { return lambda * p(s); }, eta.lo(), eta.hi(), tol, 0.25 * eps);
    Lemma52Row row;
    row.lambda = lambda;
    row.theta = theta;
    row.J = q.value;
    row.resolved = q.resolved;
    row.airy_model = 2.0 * M_PI * std::pow(lambda, -1.0 / 3.0) * airy_any(-std::pow(lambda, 2.0 / 3.0) * theta);
    row.cosine_model = 2.0 * std::sqrt(M_PI) * std::pow(lambda, -0.5) * std::pow(theta, -0.25) *
                       std::cos(2.0 / 3.0 * lambda * std::pow(theta, 1.5) - 0.25 * M_PI);
    row.E1 = std::abs(q.value - row.airy_model);
    row.E2 = std::abs(q.value - row.cosine_model);
    row.envelope = 1.0 / (lambda * theta) + std::min(lambda * std::pow(theta, 2.5), std::sqrt(theta));
    return row;
}

Lemma52Summary check_lemma52_grid(const std::vector<double>& lambdas, const std::vector<double>& thetas,
                                  const std::vector<std::vector<double>>& gs, double eps, double tol) {
    Lemma52Summary s;
    for (const auto& g : gs) {
        for (double lambda : lambdas) {
            for (double theta : thetas) {
                Lemma52Row row = check_lemma52(lambda, theta, g, eps, tol);
                s.fitted_constant = std::max(s.fitted_constant, std::max(row.E1, row.E2) / row.envelope);
                s.all_resolved = s.all_resolved && row.resolved;
                s.rows.push_back(row);
            }
        }
    }
    return s;
}

}  // namespace curvedecay
