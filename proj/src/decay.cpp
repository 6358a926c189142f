#include "curvedecay/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "curvedecay/errors.hpp"
#include "curvedecay/parallel.hpp"

namespace curvedecay {

int grid_resolution(const GridSpec& spec, int d, double R) {
    if (d == 2) return std::max(std::max(64, spec.m_min), static_cast<int>(std::ceil(spec.m_factor * R)));
    return std::max(spec.m_min, static_cast<int>(std::ceil(spec.m_factor * std::sqrt(R))));
}

SphericalGrid make_grid(const GridSpec& spec, int d, double R) {
    std::string kind = spec.kind;
    if (kind == "default") kind = d <= 3 ? "product" : "monte-carlo";
    if (kind == "product") return product_grid(d, grid_resolution(spec, d, R));
    if (kind == "graded") {
        Vec axis = spec.axis;
        if (axis.empty()) {
            axis.assign(d, 0.0);
            axis[d - 1] = 1.0;
        }
        const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(R, 2.0)))) + spec.extra_levels);
        return graded_grid(axis, grid_resolution(spec, d, R), levels);
    }
    if (kind == "monte-carlo") {
        const double n = std::min(spec.mc_cap, spec.mc_scale * std::sqrt(std::max(R, 1.0)));
        return monte_carlo_grid(d, static_cast<std::size_t>(n), spec.seed);
    }
    throw ValidationError("unknown grid kind '" + spec.kind + "'");
}

double GridField::resolved_fraction() const {
    if (resolved.empty()) return 1.0;
    std::size_t ok = 0;
    for (char r : resolved) ok += r ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(resolved.size());
}

GridField eval_field(const Curve& curve, const CutoffSpec& cutoff, double R, const SphericalGrid& grid, double tol,
                     int workers) {
    const std::vector<QuadResult> values = eval_FR_grid(curve, cutoff, R, grid, tol, workers);
    GridField f;
    f.R = R;
    f.abs_F.resize(values.size());
    f.resolved.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        f.abs_F[i] = std::abs(values[i].value);
        f.resolved[i] = values[i].resolved ? 1 : 0;
    }
    return f;
}

double lq_norm(const std::vector<double>& abs_F, const std::vector<double>& weights, double q) {
    if (abs_F.size() != weights.size()) throw DomainError("values and weights differ in length");
    if (!(q >= 1.0)) throw DomainError("q must be at least 1");
    double top = 0.0;
    for (double v : abs_F) top = std::max(top, v);
    if (std::isinf(q) || top == 0.0) return top;
    std::vector<double> terms(abs_F.size());
    for (std::size_t i = 0; i < abs_F.size(); ++i) terms[i] = weights[i] * std::pow(abs_F[i] / top, q);
    return top * std::pow(pairwise_sum(terms), 1.0 / q);
}

double lq_norm(const std::vector<double>& abs_F, const std::vector<double>& weights, const QValue& q) {
    return lq_norm(abs_F, weights, q.to_double());
}

GqResult compute_Gq(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const SphericalGrid& grid,
                    double tol, int workers) {
    if (grid.dim != curve.dim()) throw DomainError("grid dimension differs from curve dimension");
    const GridField f = eval_field(curve, cutoff, R, grid, tol, workers);
    GqResult r;
    r.value = lq_norm(f.abs_F, grid.weights, q);
    r.resolved_fraction = f.resolved_fraction();
    r.resolved = r.resolved_fraction == 1.0;
    return r;
}

std::vector<DecaySeries> compute_series(const Curve& curve, const CutoffSpec& cutoff, const std::vector<double>& qs,
                                        const std::vector<double>& Rs, const GridSpec& grid, int K, double tol,
                                        int workers) {
    for (std::size_t i = 1; i < Rs.size(); ++i) {
        if (!(Rs[i] > Rs[i - 1])) throw DomainError("R values must be strictly increasing");
    }
    std::vector<DecaySeries> out;
    for (double q : qs) {
        DecaySeries s;
        s.curve_id = curve.id();
        s.d = curve.dim();
        s.K = K;
        s.q = q;
        s.cutoff = cutoff;
        out.push_back(s);
    }
    for (double R : Rs) {
        const SphericalGrid g = make_grid(grid, curve.dim(), R);
        const GridField f = eval_field(curve, cutoff, R, g, tol, workers);
        const double frac = f.resolved_fraction();
        for (auto& s : out) {
            DecayRow row;
            row.R = R;
            row.Gq = lq_norm(f.abs_F, g.weights, s.q);
            row.m = g.m;
            row.nodes = g.size();
            row.resolved_fraction = frac;
            row.excluded = frac < 1.0;
            s.rows.push_back(row);
        }
    }
    return out;
}

double refinement_delta(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const GridSpec& grid,
                        double tol, int workers) {
    GridSpec fine = grid;
    fine.m_factor *= 2.0;
    fine.m_min *= 2;
    fine.mc_scale *= 2.0;
    const double a = compute_Gq(curve, cutoff, q, R, make_grid(grid, curve.dim(), R), tol, workers).value;
    const double b = compute_Gq(curve, cutoff, q, R, make_grid(fine, curve.dim(), R), tol, workers).value;
    return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

namespace {

ModelFit solve_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double forced_beta,
                   const Eigen::VectorXd& loglog, bool has_beta_column) {
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = y - X * coef;
    ModelFit f;
    f.amplitude = std::exp(coef(0));
    f.sigma = -coef(1);
    f.beta = has_beta_column ? coef(2) : forced_beta;
    const double n = static_cast<double>(y.size());
    const double rss = res.squaredNorm();
    f.residual_rms = std::sqrt(rss / n);
    f.residual_rms_log2 = f.residual_rms / std::log(2.0);
    f.aic = n * std::log(std::max(rss / n, 1e-300)) + 2.0 * static_cast<double>(X.cols());
    (void)loglog;
    return f;
}

}  // namespace

DecayFit fit_exponent(const std::vector<DecayRow>& rows, std::optional<double> force_beta) {
    std::vector<double> lr, llr, lg;
    DecayFit fit;
    for (const auto& r : rows) {
        if (r.excluded || !(r.Gq > 0.0) || !(r.R > M_E)) {
            ++fit.excluded;
            continue;
        }
        lr.push_back(std::log(r.R));
        llr.push_back(std::log(std::log(r.R)));
        lg.push_back(std::log(r.Gq));
    }
    const std::size_t n = lr.size();
    fit.used = n;
    if (n < 6) throw DiagnosticError("fit needs at least 6 included rows with R > e");
    fit.R_min = std::exp(*std::min_element(lr.begin(), lr.end()));
    fit.R_max = std::exp(*std::max_element(lr.begin(), lr.end()));
    if (fit.R_max / fit.R_min < 100.0 * (1.0 - 1e-12)) throw DiagnosticError("fit needs R spanning 2 decades");
    fit.unreliable = static_cast<double>(fit.excluded) > 0.1 * static_cast<double>(rows.size());

    const Eigen::Index m = static_cast<Eigen::Index>(n);
    Eigen::VectorXd y(m), loglog(m);
    Eigen::MatrixXd X3(m, 3), X2(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        y(i) = lg[i];
        loglog(i) = llr[i];
        X3(i, 0) = X2(i, 0) = 1.0;
        X3(i, 1) = X2(i, 1) = lr[i];
        X3(i, 2) = llr[i];
    }
    // Conditioning of the design with unit-norm columns.
    Eigen::MatrixXd scaled = X3;
    for (Eigen::Index c = 0; c < 3; ++c) scaled.col(c) /= scaled.col(c).norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / std::max(sv(sv.size() - 1), std::numeric_limits<double>::min());
    if (!force_beta && cond > 1e8) throw DiagnosticError("fit design is ill-conditioned");

    fit.beta0 = solve_fit(X2, y, 0.0, loglog, false);
    if (force_beta) {
        fit.beta_forced = true;
        fit.free = solve_fit(X2, y - *force_beta * loglog, *force_beta, loglog, false);
    } else {
        fit.free = solve_fit(X3, y, 0.0, loglog, true);
    }
    fit.free_residual_smaller = fit.free.residual_rms < fit.beta0.residual_rms;
    fit.log_model_preferred = fit.free.aic < fit.beta0.aic;
    return fit;
}

namespace {

double envelope_value(const CoordinateFunction& p, double s, double R, int n) {
    double h = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double v = R * std::abs(p.derivative(s, j));
        h = std::max(h, j == 1 ? v : std::pow(v, 1.0 / j));
    }
    return h;
}

}  // namespace

double envelope_HR(const Curve& curve, std::span<const double> theta, double R, int n, std::optional<Interval> range,
                   int density) {
    if (n < 1 || n > curve.max_order()) throw DomainError("envelope order must satisfy 1 <= n <= max_order");
    if (density < 3) throw DomainError("envelope grid density must be at least 3");
    const Interval iv = range.value_or(curve.interval());
    const CoordinateFunction p = curve.projected(theta);
    const double step = iv.length() / (density - 1);
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < density; ++i) {
        const double v = envelope_value(p, iv.lo + step * i, R, n);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    double a = iv.lo + step * std::max(0, best_i - 1);
    double b = iv.lo + step * std::min(density - 1, best_i + 1);
    for (int it = 0; it < 100 && b - a > 1e-15 * std::max(1.0, iv.length()); ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (envelope_value(p, m1, R, n) <= envelope_value(p, m2, R, n)) {
            b = m2;
        } else {
            a = m1;
        }
    }
    return std::min(best, envelope_value(p, 0.5 * (a + b), R, n));
}

EnvelopeReport envelope_check(const Curve& curve, const CutoffSpec& cutoff, const std::vector<double>& Rs, int n,
                              const GridSpec& grid, double tol, int workers) {
    if (Rs.empty()) throw DomainError("envelope_check needs at least one R");
    EnvelopeReport rep;
    const Interval support{cutoff.lo(), cutoff.hi()};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double R : Rs) {
        const SphericalGrid g = make_grid(grid, curve.dim(), R);
        const GridField f = eval_field(curve, cutoff, R, g, tol, workers);
        std::vector<double> H(g.size());
        parallel_for(g.size(), workers, [&](std::size_t i) { H[i] = envelope_HR(curve, g.node(i), R, n, support); });
        EnvelopeRow row;
        row.R = R;
        row.resolved_fraction = f.resolved_fraction();
        double hmax = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            row.C = std::max(row.C, f.abs_F[i] * std::max(1.0, H[i]));
            hmax = std::max(hmax, H[i]);
        }
        const int levels = std::max(1, static_cast<int>(std::floor(std::log2(std::max(hmax, 1.0)))) + 1);
        row.level_measure.assign(levels, 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (H[i] < 1.0) continue;
            const int l = std::min(levels - 1, static_cast<int>(std::floor(std::log2(H[i]))));
            row.level_measure[l] += g.weights[i];
        }
        rep.C = std::max(rep.C, row.C);
        lo = std::min(lo, row.C);
        hi = std::max(hi, row.C);
        rep.rows.push_back(row);
    }
    rep.spread = hi / lo;
    rep.stable = rep.spread <= 2.0;
    return rep;
}

namespace {

const CutoffSpec& unit_eta() {
    static const CutoffSpec eta{0.0, 1.0, CutoffFamily::plateau, 1.0};
    return eta;
}

double max_speed(const Curve& curve, const CutoffSpec& cutoff) {
    double v = 0.0;
    const int samples = 513;
    for (int i = 0; i < samples; ++i) {
        const double t = cutoff.lo() + (cutoff.hi() - cutoff.lo()) * i / (samples - 1);
        double n2 = 0.0;
        for (double x : curve.derivative(t, 1)) n2 += x * x;
        v = std::max(v, std::sqrt(n2));
    }
    return v;
}

}  // namespace

int dyadic_top(double R) {
    if (!(R >= 1.0)) throw DomainError("dyadic decomposition needs R >= 1");
    return static_cast<int>(std::floor(std::log2(R)));
}

int dyadic_bottom(const Curve& curve, const CutoffSpec& cutoff) {
    const double v = max_speed(curve, cutoff);
    if (!(v > 0.0)) return 0;
    // 2^{L0} v <= 1 keeps eta(2^{L0-1} <omega, gamma'>) = 1; the 1.01
    // margin absorbs the sampling of max |gamma'|.
    return static_cast<int>(std::floor(-std::log2(1.01 * v)));
}

DyadicPiece dyadic_g(const Curve& curve, const CutoffSpec& cutoff, double R, int l, std::span<const double> omega,
                     double tol) {
    const int M = dyadic_top(R);
    if (l > M) throw DomainError("dyadic index exceeds log2 R");
    if (static_cast<int>(omega.size()) != curve.dim()) throw DomainError("omega has wrong dimension");
    cutoff.validate();
    const CoordinateFunction p = curve.projected(omega);
    const CutoffSpec& eta = unit_eta();
    auto amp = [&](double s) {
        const double v = p.derivative(s, 1);
        const double cut = (l == M) ? eta(std::ldexp(v, M - 1)) : eta(std::ldexp(v, l - 1)) - eta(std::ldexp(v, l));
        return cutoff(s) * cut;
    };
    auto phase = [&](double s) { return R * p(s); };
    // The amplitude varies on the scale 2^{-l}; cap panels accordingly.
    const double width = std::min(0.25 * cutoff.half_width, cutoff.half_width * std::ldexp(1.0, -std::max(0, l)));
    const QuadResult q = integrate_oscillatory(amp, phase, cutoff.lo(), cutoff.hi(), tol, width);
    return {l, q.value, q.resolved};
}

std::vector<DyadicPiece> dyadic_pieces(const Curve& curve, const CutoffSpec& cutoff, double R,
                                       std::span<const double> omega, double tol) {
    const int M = dyadic_top(R);
    const int L0 = std::min(M, dyadic_bottom(curve, cutoff));
    std::vector<DyadicPiece> out;
    for (int l = L0; l <= M; ++l) out.push_back(dyadic_g(curve, cutoff, R, l, omega, tol));
    return out;
}

std::vector<DyadicRow> dyadic_diagnostics(const Curve& curve, const CutoffSpec& cutoff, double R,
                                          const SphericalGrid& grid, double tol, int workers) {
    const int M = dyadic_top(R);
    const int L0 = std::min(M, dyadic_bottom(curve, cutoff));
    const std::size_t levels = static_cast<std::size_t>(M - L0 + 1);
    std::vector<std::vector<double>> mag(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const auto pieces = dyadic_pieces(curve, cutoff, R, grid.node(i), tol);
        mag[i].resize(levels);
        for (std::size_t k = 0; k < levels; ++k) mag[i][k] = std::abs(pieces[k].value);
    });
    std::vector<DyadicRow> out;
    for (std::size_t k = 0; k < levels; ++k) {
        DyadicRow row;
        row.l = L0 + static_cast<int>(k);
        std::vector<double> sq(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            row.sup = std::max(row.sup, mag[i][k]);
            sq[i] = grid.weights[i] * mag[i][k] * mag[i][k];
        }
        const double two_l = std::ldexp(1.0, row.l);
        row.sup_scaled = row.sup * R / two_l;
        row.l2 = std::sqrt(pairwise_sum(sq));
        row.l2_model = (two_l * two_l >= R) ? std::sqrt(1.0 + std::log(two_l * two_l / R)) / two_l : two_l / R;
        out.push_back(row);
    }
    return out;
}

}  // namespace curvedecay
