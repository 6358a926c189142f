#include "curvedecay/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvedecay/asymptotics.hpp"
#include "curvedecay/decay.hpp"
#include "curvedecay/errors.hpp"
#include "curvedecay/parallel.hpp"
#include "curvedecay/theory.hpp"

namespace curvedecay {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_order(const Curve& curve, int k) {
    if (k < 2 || k > curve.dim()) throw DomainError("witness order k must satisfy 2 <= k <= d");
}

}  // namespace

Vec base_direction(const Curve& curve, double t0, int k) {
    check_order(curve, k);
    for (int j = 1; j <= k; ++j) {
        if (derivative_rank(curve, t0, j) < j) {
            throw DegeneracyError(j, "derivatives 1.." + std::to_string(j) + " are linearly dependent");
        }
    }
    std::vector<Vec> basis;
    for (int j = 1; j < k; ++j) {
        Vec v = curve.derivative(t0, j);
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vec& e : basis) {
                const double c = dot(v, e);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
            }
        }
        const double n = std::sqrt(dot(v, v));
        for (double& x : v) x /= n;
        basis.push_back(std::move(v));
    }
    Vec w = curve.derivative(t0, k);
    for (int pass = 0; pass < 2; ++pass) {
        for (const Vec& e : basis) {
            const double c = dot(w, e);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * e[i];
        }
    }
    const double n = std::sqrt(dot(w, w));
    for (double& x : w) x /= n;
    return w;
}

double solve_ttilde(const Curve& curve, std::span<const double> omega, int k, double guess) {
    check_order(curve, k);
    const Interval& iv = curve.interval();
    if (!iv.contains(guess)) throw DomainError("solver guess lies outside the parameter interval");
    double t = guess;
    for (int it = 0; it < 60; ++it) {
        const double f = curve.pairing(t, k - 1, omega);
        const double df = curve.pairing(t, k, omega);
        if (!(std::abs(df) > 0.0)) throw NoRootError("vanishing derivative in the solver");
        const double dt = f / df;
        t -= dt;
        if (!iv.contains(t) || !std::isfinite(t)) throw NoRootError("solver left the parameter interval");
        if (std::abs(dt) <= 1e-12 && std::abs(curve.pairing(t, k - 1, omega)) <= 1e-12) return t;
    }
    throw NoRootError("solver did not converge");
}

Vec coefficients(const Curve& curve, std::span<const double> omega, int k, double t) {
    Vec a(k);
    for (int j = 1; j <= k; ++j) a[j - 1] = curve.pairing(t, j, omega);
    return a;
}

Vec tilde_a(const Vec& a, int k) {
    if (k < 4) throw DomainError("tilde coefficients need k >= 4");
    if (static_cast<int>(a.size()) < k) throw DomainError("need coefficients a_1..a_k");
    const double akm2 = a[k - 3], ak = a[k - 1];
    if (!(akm2 < 0.0)) throw DomainError("tilde coefficients need a_{k-2} < 0");
    if (!(ak > 0.0)) throw DomainError("tilde coefficients need a_k > 0");
    const double s1 = std::sqrt(-2.0 * akm2 / ak);
    Vec out(k - 3);
    for (int j = 1; j <= k - 3; ++j) {
        double v = a[j - 1];
        double fact = 1.0;
        for (int nu = 1; nu <= k - j; ++nu) {
            fact *= nu;
            if (nu <= k - 2 - j || nu == k - j) v += a[j + nu - 1] / fact * std::pow(s1, nu);
        }
        out[j - 1] = v;
    }
    return out;
}

Vec tilde_a(const Curve& curve, std::span<const double> omega, int k, double guess) {
    const double t = solve_ttilde(curve, omega, k, guess);
    return tilde_a(coefficients(curve, omega, k, t), k);
}

Vec WitnessFrame::to_original(std::span<const double> omega, double* scale) const {
    const int d = static_cast<int>(omega.size());
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) w(i) = omega[i];
    const Eigen::VectorXd v = map.matrix.transpose() * w;
    const double n = v.norm();
    if (scale) *scale = n;
    Vec out(d);
    for (int i = 0; i < d; ++i) out[i] = v(i) / n;
    return out;
}

WitnessFrame make_witness_frame(const Curve& curve, double t0, int k) {
    check_order(curve, k);
    FrameMap map = normalize_frame(curve, t0, k);
    Curve normalized = curve.transformed(map.matrix, curve.id() + "-normalized");
    return WitnessFrame{std::move(map), std::move(normalized), k, t0};
}

namespace {

enum class Verdict { accepted, rejected, no_root };

double cap_distance(std::span<const double> omega, int k) {
    double s = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double e = (static_cast<int>(i) == k - 1) ? 1.0 : 0.0;
        s += (omega[i] - e) * (omega[i] - e);
    }
    return std::sqrt(s);
}

// Solves for ttilde and fills the common fields.
Verdict solve_common(const WitnessFrame& frame, std::span<const double> omega, WitnessSample& s) {
    const int k = frame.k;
    try {
        s.ttilde = solve_ttilde(frame.curve, omega, k, frame.t0);
    } catch (const NoRootError&) {
        return Verdict::no_root;
    }
    s.residual = std::abs(frame.curve.pairing(s.ttilde, k - 1, omega));
    if (s.residual > 1e-10) return Verdict::no_root;
    s.a = coefficients(frame.curve, omega, k, s.ttilde);
    if (!(s.a[k - 1] > 0.0)) return Verdict::rejected;
    return Verdict::accepted;
}

void finish(const WitnessFrame& frame, std::span<const double> omega, WitnessSample& s) {
    s.omega.assign(omega.begin(), omega.end());
    s.omega_original = frame.to_original(omega, &s.scale);
}

Verdict classify_U(const WitnessFrame& frame, std::span<const double> omega, double eps, double R,
                   WitnessSample& s) {
    const int k = frame.k;
    if (cap_distance(omega, k) > eps) return Verdict::rejected;
    const Verdict v = solve_common(frame, omega, s);
    if (v != Verdict::accepted) return v;
    for (int j = 1; j <= k - 2; ++j) {
        if (std::abs(s.a[j - 1]) > eps * std::pow(R, static_cast<double>(j - k) / k)) return Verdict::rejected;
    }
    finish(frame, omega, s);
    return Verdict::accepted;
}

Verdict classify_V(const WitnessFrame& frame, std::span<const double> omega, double delta, int j, double R,
                   WitnessSample& s) {
    const int k = frame.k;
    if (cap_distance(omega, k) > delta) return Verdict::rejected;
    const Verdict v = solve_common(frame, omega, s);
    if (v != Verdict::accepted) return v;
    const double unit = std::pow(R, -2.0 / k);
    const double akm2 = s.a[k - 3];
    if (!(akm2 < -std::ldexp(unit, j) && akm2 > -std::ldexp(unit, j + 1))) return Verdict::rejected;
    s.a_tilde = tilde_a(s.a, k);
    for (int nu = 1; nu <= k - 3; ++nu) {
        const double bound = delta * std::pow(std::abs(akm2), nu / (2.0 * k - 2.0)) *
                             std::pow(R, -static_cast<double>(k - nu - 1) / (k - 1));
        if (std::abs(s.a_tilde[nu - 1]) > bound) return Verdict::rejected;
    }
    s.b = -akm2;
    s.s1 = std::sqrt(2.0 * s.b / s.a[k - 1]);
    s.j = j;
    finish(frame, omega, s);
    return Verdict::accepted;
}

constexpr std::size_t kChunk = 1u << 14;

template <class Classify>
SampleReport run_sampler(const WitnessFrame& frame, double radius, std::size_t n, std::uint64_t seed, int workers,
                         const Classify& classify) {
    if (n == 0) throw DomainError("sampler needs n >= 1");
    const int d = frame.curve.dim();
    Vec axis(d, 0.0);
    axis[frame.k - 1] = 1.0;
    const CapSampler sampler(axis, radius);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<WitnessSample>> found(chunks);
    std::vector<std::size_t> no_root(chunks, 0);
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng = make_rng(seed, c);
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        Vec omega(d);
        for (std::size_t i = 0; i < count; ++i) {
            sampler.draw(rng, omega);
            WitnessSample s;
            const Verdict v = classify(omega, s);
            if (v == Verdict::accepted) found[c].push_back(std::move(s));
            if (v == Verdict::no_root) ++no_root[c];
        }
    });
    SampleReport rep;
    rep.n = n;
    for (std::size_t c = 0; c < chunks; ++c) {
        for (auto& s : found[c]) rep.samples.push_back(std::move(s));
        rep.no_root += no_root[c];
    }
    rep.rate = binomial_estimate(rep.samples.size(), n);
    rep.cap_fraction = cap_fraction(d, radius);
    rep.measure = rep.rate.fraction * rep.cap_fraction;
    return rep;
}

}  // namespace

std::optional<WitnessSample> test_U(const WitnessFrame& frame, std::span<const double> omega, double eps, double R) {
    WitnessSample s;
    if (classify_U(frame, omega, eps, R, s) != Verdict::accepted) return std::nullopt;
    return s;
}

std::optional<WitnessSample> test_V(const WitnessFrame& frame, std::span<const double> omega, double delta, int j,
                                    double R) {
    if (frame.k < 4) throw DomainError("V-sets need k >= 4");
    WitnessSample s;
    if (classify_V(frame, omega, delta, j, R, s) != Verdict::accepted) return std::nullopt;
    return s;
}

SampleReport sample_U(const Curve& curve, double t0, int k, double eps, double R, std::size_t n, std::uint64_t seed,
                      int workers) {
    if (!(eps > 0.0 && eps <= std::sqrt(2.0))) throw DomainError("eps must lie in (0, sqrt 2]");
    if (!(R >= 1.0)) throw DomainError("R must be at least 1");
    const WitnessFrame frame = make_witness_frame(curve, t0, k);
    return run_sampler(frame, eps, n, seed, workers, [&](std::span<const double> omega, WitnessSample& s) {
        return classify_U(frame, omega, eps, R, s);
    });
}

VWindow v_window(int k, double R, std::optional<double> tau1, std::optional<double> tau2) {
    if (k < 4) throw DomainError("V-sets need k >= 4");
    const double top = 2.0 / k, bottom = 2.0 / (k + 1);
    const double mid = 0.5 * (top + bottom), quarter = 0.25 * (top - bottom);
    VWindow w;
    w.tau1 = tau1.value_or(mid + quarter);
    w.tau2 = tau2.value_or(mid - quarter);
    if (!(top > w.tau1 && w.tau1 > w.tau2 && w.tau2 > bottom)) {
        throw DomainError("window exponents must satisfy 2/k > tau1 > tau2 > 2/(k+1)");
    }
    w.lo = (top - w.tau1) * std::log2(R);
    w.hi = (top - w.tau2) * std::log2(R);
    return w;
}

SampleReport sample_V(const Curve& curve, double t0, int k, double delta, int j, double R, std::size_t n,
                      std::uint64_t seed, bool enforce_window, int workers) {
    if (k < 4) throw DomainError("V-sets need k >= 4");
    if (!(delta > 0.0 && delta <= std::sqrt(2.0))) throw DomainError("delta must lie in (0, sqrt 2]");
    if (!(R > 1.0)) throw DomainError("R must exceed 1");
    if (enforce_window && !v_window(k, R).contains(j)) {
        throw DomainError("j lies outside the admissible dyadic window");
    }
    const WitnessFrame frame = make_witness_frame(curve, t0, k);
    return run_sampler(frame, delta, n, seed, workers, [&](std::span<const double> omega, WitnessSample& s) {
        return classify_V(frame, omega, delta, j, R, s);
    });
}

CutoffSpec default_witness_cutoff(const Curve& curve, double t0) {
    return CutoffSpec{t0, 0.05 * curve.interval().length(), CutoffFamily::bump, 1.0};
}

LowerBoundReport verify_lower(const Curve& curve, const CutoffSpec& cutoff, const std::vector<WitnessSample>& samples,
                              double R, int k, double tol, int workers, int bins) {
    if (samples.empty()) throw DomainError("verify_lower needs at least one sample");
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    LowerBoundReport rep;
    rep.scaled.resize(samples.size());
    std::vector<char> ok(samples.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        const WitnessSample& s = samples[i];
        const QuadResult q = eval_FR(curve, cutoff, R, s.omega_original, tol);
        double scale = std::pow(R, 1.0 / k);
        if (s.j) scale *= std::pow(2.0, *s.j / (2.0 * k - 2.0));
        rep.scaled[i] = std::abs(q.value) * scale;
        ok[i] = q.resolved ? 1 : 0;
    });
    std::size_t good = 0;
    for (char c : ok) good += c ? 1 : 0;
    rep.resolved_fraction = static_cast<double>(good) / static_cast<double>(samples.size());
    rep.min_scaled = *std::min_element(rep.scaled.begin(), rep.scaled.end());
    const double top = *std::max_element(rep.scaled.begin(), rep.scaled.end());
    const double floor_value = std::numeric_limits<double>::min();
    rep.hist_lo = std::log2(std::max(rep.min_scaled, floor_value));
    rep.hist_hi = std::log2(std::max(top, floor_value));
    rep.histogram.assign(bins, 0);
    const double width = rep.hist_hi - rep.hist_lo;
    for (double v : rep.scaled) {
        int b = 0;
        if (width > 0.0) {
            b = static_cast<int>((std::log2(std::max(v, floor_value)) - rep.hist_lo) / width * bins);
            b = std::clamp(b, 0, bins - 1);
        }
        ++rep.histogram[b];
    }
    return rep;
}

PlanarScan planar_scan(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const SphericalGrid& grid,
                       double tol, int workers, std::optional<int> l_lo, std::optional<int> l_hi) {
    if (curve.kind() != CurveKind::polynomial) throw DomainError("planar_scan needs a polynomial curve");
    int k = 0;
    while (k < curve.dim() && !curve.derivative_vanishes_identically(k + 1)) ++k;
    if (k < 1 || k >= curve.dim() || !curve.vanishes_beyond(k)) {
        throw DomainError("planar_scan needs coordinates vanishing beyond position k < d");
    }
    if (!(R >= 16.0)) throw DomainError("planar_scan needs R >= 16");
    if (!(q >= 1.0)) throw DomainError("planar_scan needs q >= 1");
    const GridField field = eval_field(curve, cutoff, R, grid, tol, workers);
    PlanarScan scan;
    scan.k = k;
    scan.q = q;
    scan.R = R;
    const int levels = static_cast<int>(std::ceil(std::log2(R))) + 4;
    scan.shells.resize(levels);
    for (int l = 1; l <= levels; ++l) scan.shells[l - 1].l = l;
    std::vector<std::vector<double>> parts(levels + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto w = grid.node(i);
        double rho2 = 0.0;
        for (int c = 0; c < k; ++c) rho2 += w[c] * w[c];
        const double rho = std::sqrt(rho2);
        int l = rho > 0.0 ? static_cast<int>(std::floor(-std::log2(rho))) + 1 : levels + 1;
        l = std::max(l, 1);
        const double term = grid.weights[i] * std::pow(field.abs_F[i], q);
        if (l > levels) {
            parts[levels].push_back(term);
        } else {
            parts[l - 1].push_back(term);
            scan.shells[l - 1].measure += grid.weights[i];
            ++scan.shells[l - 1].nodes;
        }
    }
    for (int l = 0; l < levels; ++l) scan.shells[l].contribution = pairwise_sum(parts[l]);
    scan.rest = pairwise_sum(parts[levels]);
    std::vector<double> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    scan.total = pairwise_sum(all);

    scan.l_lo = l_lo.value_or(2);
    scan.l_hi = std::min(levels, l_hi.value_or(static_cast<int>(std::floor(std::log2(R))) - 3));
    if (scan.l_hi - scan.l_lo < 1) throw DomainError("planar_scan window needs at least two shells");
    std::vector<double> xs, ys;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int l = scan.l_lo; l <= scan.l_hi; ++l) {
        const double c = scan.shells[l - 1].contribution;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        if (c > 0.0) {
            xs.push_back(l);
            ys.push_back(std::log2(c));
        }
    }
    scan.ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (xs.size() >= 2) scan.slope = fit_line(xs, ys).slope;
    scan.predicted_slope = (q - to_double(qk(k))) / k;
    return scan;
}

}  // namespace curvedecay
