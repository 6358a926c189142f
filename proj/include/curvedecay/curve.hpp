#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curvedecay {

using Vec = std::vector<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
};

// c * cos(f t) + s * sin(f t)
struct TrigTerm {
    double frequency = 0.0;
    double cos_amplitude = 0.0;
    double sin_amplitude = 0.0;
};

// Scalar function p(t) + sum of trig terms. Derivatives of every order are
// exact: polynomial differentiation and the phase-shift rule for cos/sin.
class CoordinateFunction {
public:
    CoordinateFunction() = default;
    CoordinateFunction(std::vector<double> poly, std::vector<TrigTerm> trig = {});

    static CoordinateFunction polynomial(std::vector<double> coefficients) {
        return CoordinateFunction(std::move(coefficients));
    }

    double derivative(double t, int order) const;
    double operator()(double t) const { return derivative(t, 0); }

    bool is_polynomial() const { return trig_.empty(); }
    bool is_zero() const;
    // Degree of the polynomial part after trimming zeros; -1 for the zero polynomial.
    int degree() const;

    const std::vector<double>& poly() const { return poly_; }
    const std::vector<TrigTerm>& trig() const { return trig_; }

    CoordinateFunction& operator+=(const CoordinateFunction& other);
    CoordinateFunction scaled(double factor) const;

private:
    std::vector<double> poly_;
    std::vector<TrigTerm> trig_;
};

enum class CurveKind { polynomial, trigonometric };

// Parametrized curve t -> gamma(t) in R^d on a compact interval.
class Curve {
public:
    Curve(std::string id, std::vector<CoordinateFunction> coordinates, Interval interval,
          int max_order = 0);

    const std::string& id() const { return id_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    const Interval& interval() const { return interval_; }
    int max_order() const { return max_order_; }
    CurveKind kind() const;
    const CoordinateFunction& coordinate(int i) const { return coords_.at(i); }

    // gamma^{(order)}(t). Throws CapabilityError for order > max_order and
    // DomainError for t outside the parameter interval.
    Vec derivative(double t, int order) const;
    void derivative_into(double t, int order, std::span<double> out) const;

    // <gamma^{(order)}(t), w>, same checks as derivative().
    double pairing(double t, int order, std::span<const double> w) const;

    // The scalar function t -> <gamma(t), w>; its derivatives are the pairings.
    CoordinateFunction projected(std::span<const double> w) const;

    // t -> A gamma(t).
    Curve transformed(const Eigen::MatrixXd& a, std::string new_id = {}) const;

    // True when coordinates index >= k are identically zero.
    bool vanishes_beyond(int k) const;
    // True when gamma^{(order)} vanishes identically (polynomial curves only).
    bool derivative_vanishes_identically(int order) const;

    Curve with_interval(Interval interval) const;

private:
    void check(double t, int order) const;

    std::string id_;
    std::vector<CoordinateFunction> coords_;
    Interval interval_;
    int max_order_;
};

// Linear change of frame with A gamma^{(j)}(t0) = e_j for j = 1..k.
struct FrameMap {
    Eigen::MatrixXd matrix;
    double t0 = 0.0;
    int order = 0;

    // max_j |A gamma^{(j)}(t0) - e_j|_inf over j = 1..order.
    double residual(const Curve& curve) const;
};

inline constexpr double kDefaultRankTolerance = 1e-8;

int derivative_rank(const Curve& curve, double t, int k, double tol = kDefaultRankTolerance);

// Minimum of derivative_rank over `samples` equispaced points of [lo, hi].
int minimum_derivative_rank(const Curve& curve, Interval range, int k, int samples = 33,
                            double tol = kDefaultRankTolerance);

Curve moment_curve(int d);
Curve helix();
Curve circle();
// (t, t^2, 0, ..., 0) in R^d.
Curve planar_parabola(int d);

FrameMap normalize_frame(const Curve& curve, double t0, int k,
                         double tol = kDefaultRankTolerance);

}  // namespace curvedecay
