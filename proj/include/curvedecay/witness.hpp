#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "curvedecay/curve.hpp"
#include "curvedecay/oscquad.hpp"
#include "curvedecay/sphere.hpp"

namespace curvedecay {

// Unit vector orthogonal to gamma'(t0)..gamma^{(k-1)}(t0) with positive
// pairing against gamma^{(k)}(t0) (Gram-Schmidt of gamma^{(k)}).
Vec base_direction(const Curve& curve, double t0, int k);

// Root of f(t) = <omega, gamma^{(k-1)}(t)> by Newton from `guess`. Converged
// when |f| <= 1e-12 and |dt| <= 1e-12. Throws NoRootError on divergence or
// exit from the parameter interval.
double solve_ttilde(const Curve& curve, std::span<const double> omega, int k, double guess);

// a_j = <omega, gamma^{(j)}(t)> for j = 1..k (index j-1).
Vec coefficients(const Curve& curve, std::span<const double> omega, int k, double t);

// a~_j = P^{(j)}(s1), j = 1..k-3, with P(s) = sum a_nu s^nu / nu! and
// s1 = (-2 a_{k-2} / a_k)^{1/2}; nu ranges over 1..k-2-j and k-j.
// `a` holds a_1..a_k. Needs k >= 4, a_{k-2} < 0, a_k > 0.
Vec tilde_a(const Vec& a, int k);
Vec tilde_a(const Curve& curve, std::span<const double> omega, int k, double guess);

// The curve in the frame where gamma^{(j)}(t0) = e_j, j = 1..k.
struct WitnessFrame {
    FrameMap map;
    Curve curve;
    int k = 0;
    double t0 = 0.0;

    // omega in the normalized frame -> unit vector in the original frame,
    // A^T omega / |A^T omega|, and the factor |A^T omega|.
    Vec to_original(std::span<const double> omega, double* scale = nullptr) const;
};

WitnessFrame make_witness_frame(const Curve& curve, double t0, int k);

struct WitnessSample {
    Vec omega;           // normalized frame
    Vec omega_original;  // original frame, unit
    double scale = 1.0;  // |A^T omega|
    double ttilde = 0.0;
    Vec a;               // a_1..a_k in the normalized frame
    Vec a_tilde;         // V-sets only
    double b = 0.0;      // -a_{k-2}, V-sets only
    double s1 = 0.0;     // V-sets only
    std::optional<int> j;
    double residual = 0.0;  // |<omega, gamma^{(k-1)}(ttilde)>|
};

struct SampleReport {
    std::vector<WitnessSample> samples;
    std::size_t n = 0;
    std::size_t no_root = 0;
    // Fraction of cap draws accepted, with binomial standard error.
    MeasureEstimate rate;
    double cap_fraction = 0.0;
    // rate * cap_fraction: estimated fraction of the whole sphere.
    double measure = 0.0;
};

// Membership in U_{k,eps}(R) for omega in the normalized frame.
std::optional<WitnessSample> test_U(const WitnessFrame& frame, std::span<const double> omega, double eps, double R);

// Rejection sampling of U_{k,eps}(R) from the eps-cap around e_k in the
// normalized frame. Draws are split in fixed chunks with independent streams,
// so results do not depend on `workers`.
SampleReport sample_U(const Curve& curve, double t0, int k, double eps, double R, std::size_t n, std::uint64_t seed,
                      int workers = 1);

// Admissible dyadic window R^{-tau1+2/k} <= 2^j <= R^{-tau2+2/k} with
// 2/k > tau1 > tau2 > 2/(k+1). Defaults: midpoint +/- a quarter width.
struct VWindow {
    double tau1 = 0.0;
    double tau2 = 0.0;
    double lo = 0.0;  // log2 bounds on j
    double hi = 0.0;
    bool contains(int j) const { return j >= lo && j <= hi; }
};

VWindow v_window(int k, double R, std::optional<double> tau1 = std::nullopt, std::optional<double> tau2 = std::nullopt);

// Membership in V_{k,j}(delta) for omega in the normalized frame.
std::optional<WitnessSample> test_V(const WitnessFrame& frame, std::span<const double> omega, double delta, int j,
                                    double R);

// As sample_U for V_{k,j}(delta). With enforce_window, j outside v_window
// is a DomainError.
SampleReport sample_V(const Curve& curve, double t0, int k, double delta, int j, double R, std::size_t n,
                      std::uint64_t seed, bool enforce_window = true, int workers = 1);

struct LowerBoundReport {
    double min_scaled = 0.0;
    std::vector<double> scaled;  // per sample, in sample order
    // Counts of log2(scaled) in `bins` equal bins over [hist_lo, hist_hi].
    std::vector<std::size_t> histogram;
    double hist_lo = 0.0;
    double hist_hi = 0.0;
    double resolved_fraction = 1.0;
};

// Cutoff centered at t0 with half-width 0.05 |I|.
CutoffSpec default_witness_cutoff(const Curve& curve, double t0);

// min over samples of |F_R(omega)| R^{1/k} (times 2^{j/(2k-2)} for V
// samples), with F_R on the original curve at omega_original.
LowerBoundReport verify_lower(const Curve& curve, const CutoffSpec& cutoff, const std::vector<WitnessSample>& samples,
                              double R, int k, double tol = 0.0, int workers = 1, int bins = 10);

// Shells 2^{-l} <= |omega'| < 2^{-l+1}, omega' the first k coordinates, for a
// curve whose coordinates vanish beyond k.
struct PlanarShell {
    int l = 0;
    double contribution = 0.0;  // sum of w |F_R|^q over the shell
    double measure = 0.0;
    std::size_t nodes = 0;
};

struct PlanarScan {
    int k = 0;
    double q = 0.0;
    double R = 0.0;
    std::vector<PlanarShell> shells;  // l = 1..levels
    double rest = 0.0;                // |omega'| < 2^{-levels}
    double total = 0.0;               // G_q^q on the grid
    // Over l in [l_lo, l_hi]: max/min contribution and the log2 slope in l.
    int l_lo = 0;
    int l_hi = 0;
    double ratio = 0.0;
    double slope = 0.0;
    double predicted_slope = 0.0;  // (q - q_k)/k
};

// Window default: 2 <= l <= floor(log2 R) - 3.
PlanarScan planar_scan(const Curve& curve, const CutoffSpec& cutoff, double q, double R, const SphericalGrid& grid,
                       double tol = 0.0, int workers = 1, std::optional<int> l_lo = std::nullopt,
                       std::optional<int> l_hi = std::nullopt);

}  // namespace curvedecay
