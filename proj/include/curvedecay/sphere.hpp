#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "curvedecay/curve.hpp"

namespace curvedecay {

// Nodes and weights on S^{d-1}. Nodes are stored row-major (d doubles each).
struct SphericalGrid {
    int dim = 0;
    int m = 0;
    std::string kind;
    std::vector<double> nodes;
    std::vector<double> weights;
    // antipode[i] is the index of -node(i), or empty when the grid has no
    // such symmetry.
    std::vector<std::size_t> antipode;

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    double weight_sum() const;
};

// 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

// d = 2: m equispaced angles. d in 3..6: Gauss rule in the last coordinate
// x = omega_d with weight (1 - x^2)^{(d-3)/2} (m/2 nodes) times the grid of
// S^{d-2} scaled by sqrt(1 - x^2). Azimuth nodes sit at half steps.
SphericalGrid product_grid(int d, int m);

// Grid on S^2 graded toward +/- axis: polar panels end where
// sin(theta) = 2^{-l}, l = 1..levels, Gauss-Legendre in cos(theta) on each
// panel, m azimuth nodes per ring.
SphericalGrid graded_grid(const Vec& axis, int m, int levels);

// n uniform random nodes with equal weights area / n.
SphericalGrid monte_carlo_grid(int d, std::size_t n, std::uint64_t seed);

// Resolution rule for oscillation frequency R: m = max(64, ceil(8R)) for
// d = 2, m = max(32, ceil(8 sqrt(R))) for d = 3; Monte-Carlo beyond.
int default_resolution(int d, double R);
SphericalGrid default_grid(int d, double R, std::uint64_t seed = 0);

using Rng = std::mt19937_64;

// Independent generator for (seed, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

Vec random_unit(int d, Rng& rng);
std::vector<Vec> random_sphere(int d, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

// Uniform points of the cap {omega : |omega - axis| <= eps}, eps <= sqrt(2).
// A point of the (d-1)-ball of radius sin(theta_max) is lifted to the sphere
// and accepted with probability sqrt(1 - r^2) / sqrt(1 - |y|^2).
class CapSampler {
public:
    CapSampler(const Vec& axis, double eps);
    void draw(Rng& rng, std::span<double> out) const;
    Vec draw(Rng& rng) const;
    int dim() const { return dim_; }
    double eps() const { return eps_; }

private:
    int dim_;
    double eps_;
    double radius_;
    double floor_height_;
    Eigen::MatrixXd frame_;
};

// Orthonormal basis with last column equal to axis (unit).
Eigen::MatrixXd frame_with_last_axis(const Vec& axis);

// Fraction of S^{d-1} covered by the cap {|omega - e| <= eps}.
double cap_fraction(int d, double eps);

struct MeasureEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    std::size_t hits = 0;
    std::size_t n = 0;
};

MeasureEstimate binomial_estimate(std::size_t hits, std::size_t n);

MeasureEstimate estimate_measure(int d, const std::function<bool(std::span<const double>)>& predicate,
                                 std::size_t n, std::uint64_t seed);

}  // namespace curvedecay
