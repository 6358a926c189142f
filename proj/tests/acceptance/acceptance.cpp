// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

#include "curvedecay/asymptotics.hpp"
#include "curvedecay/config.hpp"
#include "curvedecay/decay.hpp"
#include "curvedecay/report.hpp"
#include "curvedecay/theory.hpp"
#include "curvedecay/witness.hpp"

using namespace curvedecay;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const fs::path kConfigs = fs::path(CURVEDECAY_DATA_DIR) / "configs";

std::string f(double x) { return format_double(x); }

std::string fmt3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

double spread(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

std::vector<DecaySeries> series_for(const ExperimentConfig& c) {
    const Curve curve = resolve_curve(c);
    std::vector<double> qs;
    for (const auto& q : c.q) qs.push_back(parse_q(q).to_double());
    return compute_series(curve, c.cutoff, qs, c.R.resolve(), c.grid, curve.dim(), c.tol, 1);
}

Outcome c1_exponents() {
    using R = Rational;
    auto same = [](int d, int K, const std::vector<std::pair<R, R>>& want) {
        const auto v = breakpoints(d, K);
        if (v.size() != want.size()) return false;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i].inv_q != want[i].first || v[i].sigma != want[i].second) return false;
        return true;
    };
    std::vector<std::pair<R, R>> ten;
    for (long long k = 1; k <= 9; ++k) ten.push_back({R(1) / qk(k), R(k) / qk(k)});
    ten.push_back({R(0), R(1, 10)});
    bool ok = same(3, 3, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(0), R(1, 3)}}) &&
              same(4, 4, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(1, 7), R(3, 7)}, {R(0), R(1, 4)}}) &&
              same(4, 3, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(1, 7), R(3, 7)}, {R(0), R(0)}}) &&
              same(10, 10, ten);
    ok = ok && sigma(3, 3, parse_q("7")).sigma == R(3, 7) && sigma(4, 3, parse_q("9")).sigma == R(1, 3);
    return {ok, "exact lists for (3,3) (4,4) (4,3) (10,10)"};
}

Outcome c2_fresnel() {
    const CutoffSpec cut{0.0, 0.1, CutoffFamily::bump, 1.0};
    bool ok = true;
    std::string detail;
    for (int k = 2; k <= 5; ++k) {
        const Lemma51Report r = check_lemma51(k, {1e2, 1e3, 1e4, 1e5, 1e6}, {}, {}, cut);
        const bool p = r.fitted_order >= 2.0 / k - 0.1;
        ok = ok && p && r.passes;
        detail += "k=" + std::to_string(k) + " order " + fmt3(r.fitted_order) + " ";
    }
    return {ok, detail};
}

Outcome c3_airy() {
    bool ok = true;
    double worst = 0.0;
    for (double t : {5.0, 10.0, 20.0, 50.0}) {
        const double rel = std::abs(airy(-t).value - airy_leading(t)) * std::sqrt(M_PI) * std::pow(t, 0.25);
        worst = std::max(worst, rel / (2.0 * std::pow(t, -0.75)));
        ok = ok && rel <= 2.0 * std::pow(t, -0.75);
    }
    const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
    const double dev = std::abs(airy(0.0).value - ai0);
    ok = ok && dev <= 1e-8 && std::abs(airy(0.0).value - boost::math::airy_ai(0.0)) <= 1e-8;
    return {ok, "max deviation/bound " + fmt3(worst) + ", |Ai(0) - closed form| " + fmt3(dev)};
}

Outcome c4_lemma52() {
    const Lemma52Summary s = check_lemma52_grid({1e3, 1e4, 1e5}, {0.003, 0.01, 0.03}, {{}}, 0.5);
    return {s.all_resolved && s.fitted_constant <= 50.0, "C = " + fmt3(s.fitted_constant)};
}

Outcome c5_helix() {
    const auto s = series_for(load_config(kConfigs / "helix_q2.json"));
    const DecayFit fit = fit_exponent(s[0].rows);
    const double sig = fit.sigma_hat();
    const double rms = fit.free.residual_rms_log2;
    return {sig >= 0.45 && sig <= 0.55 && rms <= 0.05, "sigma " + fmt3(sig) + " (beta " + fmt3(fit.beta_hat()) +
                                                           "), rms log2 " + fmt3(rms) + ", beta=0 sigma " +
                                                           fmt3(fit.beta0.sigma)};
}

Outcome c6_parabola() {
    const auto s = series_for(load_config(kConfigs / "parabola.json"));
    const double s3 = fit_exponent(s[0].rows).sigma_hat();
    const double s8 = fit_exponent(s[1].rows).sigma_hat();
    return {s3 >= 0.45 && s3 <= 0.55 && s8 >= 0.20 && s8 <= 0.30, "q=3 sigma " + fmt3(s3) + ", q=8 sigma " + fmt3(s8)};
}

std::vector<DecaySeries> moment_series;
double moment_seconds = 0.0;

Outcome c7_moment() {
    const auto t0 = std::chrono::steady_clock::now();
    moment_series = series_for(load_config(kConfigs / "moment3.json"));
    moment_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double s10 = fit_exponent(moment_series[1].rows).sigma_hat();
    return {s10 >= 0.35 && s10 <= 0.45, "q=10 sigma " + fmt3(s10)};
}

Outcome c8_log() {
    const DecayFit fit = fit_exponent(moment_series[0].rows);
    const bool fit_ok = fit.free_residual_smaller && fit.free.beta >= 0.05 && fit.free.beta <= 0.45;
    const ExperimentConfig c = load_config(kConfigs / "planar.json");
    const Curve curve = resolve_curve(c);
    const double R = c.witness.R.front();
    const SphericalGrid g = make_grid(c.grid, curve.dim(), R);
    const PlanarScan flat = planar_scan(curve, c.cutoff, 4.0, R, g);
    const PlanarScan steep = planar_scan(curve, c.cutoff, 8.0, R, g);
    const bool planar_ok = flat.ratio <= 4.0 && steep.slope > 0.0 && steep.slope >= 0.5 * steep.predicted_slope;
    return {fit_ok && planar_ok, "beta " + fmt3(fit.free.beta) + ", rms free " + fmt3(fit.free.residual_rms_log2) +
                                     " vs beta0 " + fmt3(fit.beta0.residual_rms_log2) + ", q=4 shell ratio " +
                                     fmt3(flat.ratio) + ", q=8 log2 slope in l " + fmt3(steep.slope)};
}

Outcome c9_envelope() {
    const ExperimentConfig c = load_config(kConfigs / "envelope.json");
    const EnvelopeReport r = envelope_check(resolve_curve(c), c.cutoff, c.envelope.R, c.envelope.n, c.grid, c.tol, 1);
    return {r.stable && r.spread <= 2.0, "C " + fmt3(r.C) + ", spread " + fmt3(r.spread)};
}

std::vector<SampleReport> witness_samples;

Outcome c10_witness_rate() {
    const ExperimentConfig c = load_config(kConfigs / "witness_U.json");
    const Curve curve = resolve_curve(c);
    std::vector<double> x, y;
    bool enough = true;
    std::string counts;
    for (double R : c.witness.R) {
        witness_samples.push_back(sample_U(curve, c.witness.t0, c.witness.k, c.witness.eps, R, c.witness.n, c.seed, 1));
        const auto& s = witness_samples.back();
        enough = enough && s.samples.size() >= 200;
        counts += std::to_string(s.samples.size()) + " ";
        x.push_back(std::log(R));
        y.push_back(std::log(s.rate.fraction));
    }
    const double slope = fit_line(x, y).slope;
    return {enough && std::abs(slope + 2.0 / 3.0) <= 0.15, "slope " + fmt3(slope) + ", accepted " + counts};
}

Outcome c11_witness_lower() {
    const ExperimentConfig c = load_config(kConfigs / "witness_U.json");
    const Curve curve = resolve_curve(c);
    const CutoffSpec cut = default_witness_cutoff(curve, c.witness.t0);
    std::vector<double> mins;
    for (std::size_t i = 0; i < witness_samples.size(); ++i) {
        const auto& all = witness_samples[i].samples;
        if (all.empty()) return {false, "no samples"};
        const std::vector<WitnessSample> sub(all.begin(), all.begin() + std::min(all.size(), c.witness.max_verify));
        mins.push_back(verify_lower(curve, cut, sub, c.witness.R[i], c.witness.k).min_scaled);
    }
    std::string detail = "min scaled";
    for (double m : mins) detail += " " + fmt3(m);
    return {mins.front() > 0.0 && spread(mins) <= 2.0, detail + ", spread " + fmt3(spread(mins))};
}

Outcome c12_oracle() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n;
    const Curve curves[] = {moment_curve(3), helix(), moment_curve(4), circle(), planar_parabola(3)};
    const CutoffFamily families[] = {CutoffFamily::bump, CutoffFamily::cosine_window, CutoffFamily::plateau};
    int agree = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Curve& c = curves[i % 5];
        Vec w(c.dim());
        double norm = 0.0;
        for (double& x : w) {
            x = n(rng);
            norm += x * x;
        }
        for (double& x : w) x /= std::sqrt(norm);
        const double R = 1e3 * u(rng);
        const CutoffSpec chi{0.4 * (u(rng) - 0.5), 0.1 + 0.4 * u(rng), families[(i / 5) % 3], 1.0};
        const QuadResult q = eval_FR(c, chi, R, w);
        const double diff = std::abs(q.value - eval_FR_oracle(c, chi, R, w, oracle_panels(c, chi, R)));
        worst = std::max(worst, diff / q.tol);
        agree += (q.resolved && diff <= 2.0 * q.tol) ? 1 : 0;
    }
    return {agree == 100, std::to_string(agree) + "/100 within 2 tol, worst " + fmt3(worst) + " tol"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exponent calculus", 1, c1_exponents},
        {2, "stationary phase alpha_k law", 30, c2_fresnel},
        {3, "Airy asymptotics", 5, c3_airy},
        {4, "modified Airy envelope", 60, c4_lemma52},
        {5, "helix L2 decay", 300, c5_helix},
        {6, "planar parabola exponents", 600, c6_parabola},
        {7, "moment curve q=10", 600, c7_moment},
        {8, "log factor at q=4", 900, c8_log},
        {9, "pointwise envelope", 300, c9_envelope},
        {10, "witness measure law", 300, c10_witness_rate},
        {11, "witness pointwise law", 300, c11_witness_lower},
        {12, "oracle equivalence", 120, c12_oracle},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.id == 8) secs += moment_seconds;  // shares the moment series computed for criterion 7
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", over time");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
