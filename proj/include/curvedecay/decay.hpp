#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvedecay/oscquad.hpp"
#include "curvedecay/sphere.hpp"
#include "curvedecay/theory.hpp"

namespace curvedecay {

// How the sphere is discretized at frequency R.
struct GridSpec {
    // default: product for d <= 3, monte-carlo beyond; or product | graded | monte-carlo
    std::string kind = "default";
    double m_factor = 8.0;         // m = max(m_min, ceil(m_factor * R^{1/2})) (d = 3)
    int m_min = 32;
    Vec axis;                      // graded: pole direction
    int extra_levels = 4;          // graded: levels = ceil(log2 R) + extra_levels
    double mc_scale = 1e4;         // monte-carlo: n = min(mc_cap, mc_scale R^{1/2})
    double mc_cap = 1e7;
    std::uint64_t seed = 0;
};

int grid_resolution(const GridSpec& spec, int d, double R);
SphericalGrid make_grid(const GridSpec& spec, int d, double R);

// |F_R| on every node of a grid, with per-node resolved flags.
struct GridField {
    double R = 0.0;
    std::vector<double> abs_F;
    std::vector<char> resolved;
    double resolved_fraction() const;
};

GridField eval_field(const Curve& curve, const CutoffSpec& cutoff, double R, const SphericalGrid& grid,
                     double tol = 0.0, int workers = 1);

// (sum w_i |F_i|^q)^{1/q}; q = infinity gives the max (a lower bound on the sup).
double lq_norm(const std::vector<double>& abs_F, const std::vector<double>& weights, const QValue& q);
double lq_norm(const std::vector<double>& abs_F, const std::vector<double>& weights, double q);

struct GqResult {
    double value = 0.0;
    double resolved_fraction = 1.0;
    bool resolved = true;
};

GqResult compute_Gq(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const SphericalGrid& grid,
                    double tol = 0.0, int workers = 1);

struct DecayRow {
    double R = 0.0;
    double Gq = 0.0;
    int m = 0;
    std::size_t nodes = 0;
    double resolved_fraction = 1.0;
    bool excluded = false;
};

struct DecaySeries {
    std::string curve_id;
    int d = 0;
    int K = 0;
    double q = 2.0;
    CutoffSpec cutoff;
    std::vector<DecayRow> rows;
};

// One series per q, sharing a single |F_R| evaluation per R. R values must
// be strictly increasing; rows with unresolved nodes are excluded.
std::vector<DecaySeries> compute_series(const Curve& curve, const CutoffSpec& cutoff, const std::vector<double>& qs,
                                        const std::vector<double>& Rs, const GridSpec& grid, int K,
                                        double tol = 0.0, int workers = 1);

// Relative change of G_q between resolutions m and 2m at one R.
double refinement_delta(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const GridSpec& grid,
                        double tol = 0.0, int workers = 1);

struct ModelFit {
    double sigma = 0.0;
    double beta = 0.0;
    double amplitude = 0.0;
    double residual_rms = 0.0;       // natural-log units
    double residual_rms_log2 = 0.0;  // log2 units
    double aic = 0.0;                // n log(RSS / n) + 2 p
};

struct DecayFit {
    ModelFit free;      // (c, sigma, beta) all fitted, or beta forced
    ModelFit beta0;     // beta = 0
    bool beta_forced = false;
    double R_min = 0.0;
    double R_max = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    bool unreliable = false;
    // Free fit has smaller residual RMS / smaller AIC than the beta = 0 fit.
    bool free_residual_smaller = false;
    bool log_model_preferred = false;

    double sigma_hat() const { return free.sigma; }
    double beta_hat() const { return free.beta; }
};

// Least squares of log G on (1, log R, log log R). Needs >= 6 included rows
// over >= 2 decades of R with R > e; throws DiagnosticError otherwise or when
// the design is ill-conditioned.
DecayFit fit_exponent(const std::vector<DecayRow>& rows, std::optional<double> force_beta = std::nullopt);

// H_R(theta) = min over s in [lo, hi] of max_{1<=j<=n} (R |<gamma^{(j)}(s), theta>|)^{1/j}.
// Dense grid of `density` points, then one ternary refinement around the
// best sample.
double envelope_HR(const Curve& curve, std::span<const double> theta, double R, int n,
                   std::optional<Interval> range = std::nullopt, int density = 2001);

struct EnvelopeRow {
    double R = 0.0;
    double C = 0.0;  // max over nodes of |F_R| max(1, H_R)
    double resolved_fraction = 1.0;
    // Sphere measure of {H_R in [2^l, 2^{l+1})} for l = 0..levels.size()-1.
    std::vector<double> level_measure;
};

struct EnvelopeReport {
    std::vector<EnvelopeRow> rows;
    double C = 0.0;
    double spread = 0.0;  // max C_R / min C_R
    bool stable = false;  // spread <= 2
};

// H_R is minimized over supp chi.
EnvelopeReport envelope_check(const Curve& curve, const CutoffSpec& cutoff, const std::vector<double>& Rs, int n,
                              const GridSpec& grid, double tol = 0.0, int workers = 1);

// Dyadic pieces of F_R in the size of <omega, gamma'(s)>. The fixed eta is
// the plateau profile (1 on |s| <= 1/2, 0 beyond 1); eta_l(s) = eta(2^{l-1}s)
// - eta(2^l s). M = floor(log2 R); pieces l = L0..M-1 use eta_l and the last
// piece uses eta(2^{M-1} s), so the pieces sum to F_R exactly. L0 is chosen
// with eta(2^{L0-1} s) = 1 on the range of <omega, gamma'>.
struct DyadicPiece {
    int l = 0;
    Complex value;
    bool resolved = true;
};

int dyadic_top(double R);
int dyadic_bottom(const Curve& curve, const CutoffSpec& cutoff);
std::vector<DyadicPiece> dyadic_pieces(const Curve& curve, const CutoffSpec& cutoff, double R,
                                       std::span<const double> omega, double tol = 1e-10);
DyadicPiece dyadic_g(const Curve& curve, const CutoffSpec& cutoff, double R, int l, std::span<const double> omega,
                     double tol = 1e-10);

struct DyadicRow {
    int l = 0;
    double sup = 0.0;
    double sup_scaled = 0.0;  // sup * R / 2^l
    double l2 = 0.0;
    double l2_model = 0.0;    // 2^{-l} (1 + log(2^{2l}/R))^{1/2} when 2^{2l} >= R, else 2^l / R
};

std::vector<DyadicRow> dyadic_diagnostics(const Curve& curve, const CutoffSpec& cutoff, double R,
                                          const SphericalGrid& grid, double tol = 1e-10, int workers = 1);

}  // namespace curvedecay
