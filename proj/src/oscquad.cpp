#include "curvedecay/oscquad.hpp"

#include <algorithm>
#include <cmath>

#include "curvedecay/errors.hpp"
#include "curvedecay/parallel.hpp"

namespace curvedecay {

std::string to_string(CutoffFamily family) {
    switch (family) {
        case CutoffFamily::bump: return "bump";
        case CutoffFamily::cosine_window: return "cosine-window";
        case CutoffFamily::plateau: return "plateau";
    }
    return "bump";
}

CutoffFamily cutoff_family_from_string(const std::string& name) {
    if (name == "bump") return CutoffFamily::bump;
    if (name == "cosine-window") return CutoffFamily::cosine_window;
    if (name == "plateau") return CutoffFamily::plateau;
    throw ValidationError("unknown cutoff family '" + name + "'");
}

namespace {

double smooth_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Smooth step, 0 at x <= 0 and 1 at x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = smooth_f(x), b = smooth_f(1.0 - x);
    return a / (a + b);
}

double smooth_step_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = smooth_f(x), b = smooth_f(1.0 - x);
    const double da = a / (x * x), db = b / ((1.0 - x) * (1.0 - x));
    return (da * b + a * db) / ((a + b) * (a + b));
}

}  // namespace

double CutoffSpec::operator()(double t) const {
    const double u = (t - center) / half_width;
    if (!(std::abs(u) < 1.0)) return 0.0;
    switch (family) {
        case CutoffFamily::bump: return amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
        case CutoffFamily::cosine_window: return amplitude * 0.5 * (1.0 + std::cos(M_PI * u));
        case CutoffFamily::plateau: return amplitude * smooth_step(2.0 * (1.0 - std::abs(u)));
    }
    return 0.0;
}

double CutoffSpec::derivative(double t) const {
    const double u = (t - center) / half_width;
    if (!(std::abs(u) < 1.0)) return 0.0;
    switch (family) {
        case CutoffFamily::bump: {
            const double v = 1.0 - u * u;
            return (*this)(t) * (-2.0 * u / (v * v)) / half_width;
        }
        case CutoffFamily::cosine_window:
            return -amplitude * 0.5 * M_PI * std::sin(M_PI * u) / half_width;
        case CutoffFamily::plateau: {
            const double sign = u > 0.0 ? 1.0 : -1.0;
            return amplitude * smooth_step_derivative(2.0 * (1.0 - std::abs(u))) * (-2.0 * sign) / half_width;
        }
    }
    return 0.0;
}

namespace {

template <class Fn>
double integrate_smooth(const Fn& fn, double a, double b, int panels = 64) {
    const GaussRule& rule = gl15();
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += half * rule.weights[i] * fn(mid + half * rule.nodes[i]);
    }
    return acc;
}

}  // namespace

double CutoffSpec::integral() const {
    return integrate_smooth([this](double t) { return (*this)(t); }, lo(), hi(), 128);
}

double CutoffSpec::sup_plus_variation() const {
    const double l1 = integrate_smooth([this](double t) { return std::abs(derivative(t)); }, lo(), hi(), 128);
    return std::abs(amplitude) + l1;
}

void CutoffSpec::validate() const {
    if (!(half_width >= 1e-6) || !std::isfinite(half_width)) {
        throw DomainError("cutoff half-width must be at least 1e-6");
    }
    if (!std::isfinite(center) || !std::isfinite(amplitude)) throw DomainError("cutoff parameters must be finite");
}

namespace {

void check_support(const Curve& curve, const CutoffSpec& cutoff) {
    cutoff.validate();
    const Interval& iv = curve.interval();
    const double slack = 1e-12 * std::max(1.0, iv.length());
    if (cutoff.lo() < iv.lo - slack || cutoff.hi() > iv.hi + slack) {
        throw DomainError("cutoff support must lie inside the curve's parameter interval");
    }
}

}  // namespace

QuadResult eval_FR(const Curve& curve, const CutoffSpec& cutoff, double R, std::span<const double> omega,
                   double tol, long panel_budget) {
    check_support(curve, cutoff);
    if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("R must be finite and nonnegative");
    if (static_cast<int>(omega.size()) != curve.dim()) throw DomainError("omega has wrong dimension");
    if (tol <= 0.0) tol = default_tolerance(R);
    const CoordinateFunction p = curve.projected(omega);
    auto phase = [&](double t) { return R * p(t); };
    return integrate_oscillatory(cutoff, phase, cutoff.lo(), cutoff.hi(), tol, 0.25 * cutoff.half_width,
                                 panel_budget);
}

std::vector<QuadResult> eval_FR_grid(const Curve& curve, const CutoffSpec& cutoff, double R,
                                     const SphericalGrid& grid, double tol, int workers) {
    if (grid.dim != curve.dim()) throw DomainError("grid dimension differs from curve dimension");
    check_support(curve, cutoff);
    const std::size_t n = grid.size();
    std::vector<QuadResult> out(n);
    std::vector<std::size_t> todo;
    todo.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.antipode.empty() || grid.antipode[i] >= i) todo.push_back(i);
    }
    parallel_for(todo.size(), workers, [&](std::size_t k) {
        const std::size_t i = todo[k];
        out[i] = eval_FR(curve, cutoff, R, grid.node(i), tol);
    });
    if (!grid.antipode.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = grid.antipode[i];
            if (j < i) {
                out[i] = out[j];
                out[i].value = std::conj(out[j].value);
            }
        }
    }
    return out;
}

long oracle_panels(const Curve& curve, const CutoffSpec& cutoff, double R) {
    double diam = 0.0;
    const int samples = 257;
    for (int i = 0; i < samples; ++i) {
        const double t = cutoff.lo() + (cutoff.hi() - cutoff.lo()) * i / (samples - 1);
        double n2 = 0.0;
        for (double x : curve.derivative(t, 0)) n2 += x * x;
        diam = std::max(diam, std::sqrt(n2));
    }
    return static_cast<long>(std::ceil(50.0 * (1.0 + R * diam)));
}

Complex eval_FR_oracle(const Curve& curve, const CutoffSpec& cutoff, double R, std::span<const double> omega,
                       long n) {
    check_support(curve, cutoff);
    if (n < 1) throw DomainError("oracle needs at least one panel");
    const GaussRule& rule = gl10();
    const double a = cutoff.lo(), b = cutoff.hi();
    Complex acc(0.0, 0.0);
    for (long p = 0; p < n; ++p) {
        const double lo = a + (b - a) * static_cast<double>(p) / static_cast<double>(n);
        const double hi = a + (b - a) * static_cast<double>(p + 1) / static_cast<double>(n);
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        Complex panel(0.0, 0.0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = mid + half * rule.nodes[i];
            panel += rule.weights[i] * cutoff(t) * std::polar(1.0, R * curve.pairing(t, 0, omega));
        }
        acc += half * panel;
    }
    return acc;
}

double c2_norm(const std::vector<double>& g, double radius) {
    const CoordinateFunction f = CoordinateFunction::polynomial(g);
    double norm = 0.0;
    for (int order = 0; order <= 2; ++order) {
        for (int i = 0; i <= 2000; ++i) {
            norm = std::max(norm, std::abs(f.derivative(radius * (-1.0 + i / 1000.0), order)));
        }
    }
    return norm;
}

QuadResult eval_phase_integral(const PhaseIntegralSpec& spec, double lambda, const CutoffSpec& cutoff,
                               double tol) {
    if (!(lambda > 2.0)) throw DomainError("phase integral requires lambda > 2");
    if (spec.k < 2) throw DomainError("phase integral requires k >= 2");
    if (static_cast<int>(spec.x.size()) > std::max(0, spec.k - 2)) {
        throw DomainError("phase integral takes at most k - 2 lower coefficients");
    }
    cutoff.validate();
    // The support must lie in [-h, h] with h <= 1/(10(1 + ||g||_C2)), the
    // norm taken over [-2h, 2h].
    const double radius = std::abs(cutoff.center) + cutoff.half_width;
    const double bound = 1.0 / (10.0 * (1.0 + c2_norm(spec.g, 2.0 * radius)));
    if (radius > bound * (1.0 + 1e-12)) {
        throw DomainError("cutoff support radius violates h <= 1/(10(1 + ||g||_C2))");
    }
    std::vector<double> c(spec.k + 1 + spec.g.size(), 0.0);
    for (std::size_t j = 0; j < spec.x.size(); ++j) c[j + 1] = spec.x[j];
    c[spec.k] += 1.0;
    for (std::size_t i = 0; i < spec.g.size(); ++i) c[spec.k + 1 + i] += spec.g[i];
    const CoordinateFunction p = CoordinateFunction::polynomial(c);
    auto phase = [&](double s) { return lambda * p(s); };
    return integrate_oscillatory(cutoff, phase, cutoff.lo(), cutoff.hi(), tol, 0.25 * cutoff.half_width);
}

}  // namespace curvedecay
