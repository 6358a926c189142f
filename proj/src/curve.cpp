#include "curvedecay/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvedecay/errors.hpp"

namespace curvedecay {

namespace {

// i (i-1) ... (i-n+1)
double falling_factorial(int i, int n) {
    double r = 1.0;
    for (int j = 0; j < n; ++j) r *= static_cast<double>(i - j);
    return r;
}

// n-th derivative of (cos(x), sin(x)) expressed through cos and sin of x.
void trig_derivative(int n, double c, double s, double& dcos, double& dsin) {
    switch (n & 3) {
        case 0: dcos = c;  dsin = s;  break;
        case 1: dcos = -s; dsin = c;  break;
        case 2: dcos = -c; dsin = -s; break;
        default: dcos = s; dsin = -c; break;
    }
}

}  // namespace

CoordinateFunction::CoordinateFunction(std::vector<double> poly, std::vector<TrigTerm> trig)
    : poly_(std::move(poly)), trig_(std::move(trig)) {
    while (!poly_.empty() && poly_.back() == 0.0) poly_.pop_back();
    std::erase_if(trig_, [](const TrigTerm& term) {
        return term.cos_amplitude == 0.0 && term.sin_amplitude == 0.0;
    });
}

double CoordinateFunction::derivative(double t, int order) const {
    double acc = 0.0;
    const int deg = static_cast<int>(poly_.size()) - 1;
    for (int i = deg; i >= order; --i) acc = acc * t + poly_[i] * falling_factorial(i, order);
    for (const auto& term : trig_) {
        const double x = term.frequency * t;
        double dc = 0.0, ds = 0.0;
        trig_derivative(order, std::cos(x), std::sin(x), dc, ds);
        const double scale = std::pow(term.frequency, order);
        acc += scale * (term.cos_amplitude * dc + term.sin_amplitude * ds);
    }
    return acc;
}

bool CoordinateFunction::is_zero() const { return poly_.empty() && trig_.empty(); }

int CoordinateFunction::degree() const { return static_cast<int>(poly_.size()) - 1; }

CoordinateFunction& CoordinateFunction::operator+=(const CoordinateFunction& other) {
    if (other.poly_.size() > poly_.size()) poly_.resize(other.poly_.size(), 0.0);
    for (std::size_t i = 0; i < other.poly_.size(); ++i) poly_[i] += other.poly_[i];
    for (const auto& term : other.trig_) {
        auto same = std::find_if(trig_.begin(), trig_.end(), [&](const TrigTerm& mine) {
            return mine.frequency == term.frequency;
        });
        if (same != trig_.end()) {
            same->cos_amplitude += term.cos_amplitude;
            same->sin_amplitude += term.sin_amplitude;
        } else {
            trig_.push_back(term);
        }
    }
    *this = CoordinateFunction(std::move(poly_), std::move(trig_));
    return *this;
}

CoordinateFunction CoordinateFunction::scaled(double factor) const {
    std::vector<double> p = poly_;
    for (double& c : p) c *= factor;
    std::vector<TrigTerm> tr = trig_;
    for (auto& term : tr) {
        term.cos_amplitude *= factor;
        term.sin_amplitude *= factor;
    }
    return CoordinateFunction(std::move(p), std::move(tr));
}

Curve::Curve(std::string id, std::vector<CoordinateFunction> coordinates, Interval interval,
             int max_order)
    : id_(std::move(id)), coords_(std::move(coordinates)), interval_(interval) {
    const int d = dim();
    if (d < 2) throw DomainError("curve dimension must be at least 2");
    if (!(interval_.lo < interval_.hi) || !std::isfinite(interval_.lo) ||
        !std::isfinite(interval_.hi))
        throw DomainError("curve parameter interval must be nonempty and bounded");
    max_order_ = max_order > 0 ? max_order : std::max(d + 3, 24);
    if (max_order_ < d + 3) throw DomainError("max_order must be at least d + 3");
}

CurveKind Curve::kind() const {
    const bool poly = std::all_of(coords_.begin(), coords_.end(),
                                  [](const CoordinateFunction& c) { return c.is_polynomial(); });
    return poly ? CurveKind::polynomial : CurveKind::trigonometric;
}

void Curve::check(double t, int order) const {
    if (order < 0 || order > max_order_) {
        std::ostringstream msg;
        msg << "derivative order " << order << " exceeds max_order " << max_order_;
        throw CapabilityError(msg.str());
    }
    // Allow rounding-level overshoot at the interval ends.
    const double slack = 1e-12 * std::max(1.0, interval_.length());
    if (!(t >= interval_.lo - slack && t <= interval_.hi + slack)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside [" << interval_.lo << ", " << interval_.hi << "]";
        throw DomainError(msg.str());
    }
}

Vec Curve::derivative(double t, int order) const {
    Vec out(coords_.size());
    derivative_into(t, order, out);
    return out;
}

void Curve::derivative_into(double t, int order, std::span<double> out) const {
    check(t, order);
    for (std::size_t i = 0; i < coords_.size(); ++i) out[i] = coords_[i].derivative(t, order);
}

double Curve::pairing(double t, int order, std::span<const double> w) const {
    check(t, order);
    double acc = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) acc += w[i] * coords_[i].derivative(t, order);
    return acc;
}

CoordinateFunction Curve::projected(std::span<const double> w) const {
    CoordinateFunction result;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (w[i] != 0.0) result += coords_[i].scaled(w[i]);
    }
    return result;
}

Curve Curve::transformed(const Eigen::MatrixXd& a, std::string new_id) const {
    const int d = dim();
    if (a.rows() != d || a.cols() != d) throw DomainError("transform must be d x d");
    std::vector<CoordinateFunction> out(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (a(i, j) != 0.0) out[i] += coords_[j].scaled(a(i, j));
        }
    }
    return Curve(new_id.empty() ? id_ : std::move(new_id), std::move(out), interval_, max_order_);
}

bool Curve::vanishes_beyond(int k) const {
    for (int i = k; i < dim(); ++i) {
        if (!coords_[i].is_zero()) return false;
    }
    return true;
}

bool Curve::derivative_vanishes_identically(int order) const {
    return std::all_of(coords_.begin(), coords_.end(), [order](const CoordinateFunction& c) {
        return c.is_polynomial() && c.degree() < order;
    });
}

Curve Curve::with_interval(Interval interval) const {
    return Curve(id_, coords_, interval, max_order_);
}

double FrameMap::residual(const Curve& curve) const {
    const int d = curve.dim();
    double worst = 0.0;
    for (int j = 1; j <= order; ++j) {
        const Vec v = curve.derivative(t0, j);
        const Eigen::VectorXd mapped = matrix * Eigen::Map<const Eigen::VectorXd>(v.data(), d);
        for (int i = 0; i < d; ++i) {
            const double target = (i == j - 1) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(mapped(i) - target));
        }
    }
    return worst;
}

namespace {

Eigen::MatrixXd derivative_matrix(const Curve& curve, double t, int k) {
    Eigen::MatrixXd m(curve.dim(), k);
    for (int j = 1; j <= k; ++j) {
        const Vec v = curve.derivative(t, j);
        for (int i = 0; i < curve.dim(); ++i) m(i, j - 1) = v[i];
    }
    return m;
}

}  // namespace

int derivative_rank(const Curve& curve, double t, int k, double tol) {
    if (k < 1 || k > curve.dim()) throw DomainError("derivative_rank requires 1 <= K <= d");
    const Eigen::MatrixXd m = derivative_matrix(curve, t, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) > tol * s(0)) ++rank;
    }
    return rank;
}

int minimum_derivative_rank(const Curve& curve, Interval range, int k, int samples, double tol) {
    int best = k;
    for (int i = 0; i < samples; ++i) {
        const double t = range.lo + (range.hi - range.lo) * i / std::max(1, samples - 1);
        best = std::min(best, derivative_rank(curve, t, k, tol));
    }
    return best;
}

Curve moment_curve(int d) {
    if (d < 2) throw DomainError("moment curve requires d >= 2");
    std::vector<CoordinateFunction> coords;
    for (int j = 1; j <= d; ++j) {
        std::vector<double> c(j + 1, 0.0);
        c[j] = 1.0;
        coords.emplace_back(std::move(c));
    }
    return Curve("moment" + std::to_string(d), std::move(coords), {-1.0, 1.0});
}

Curve helix() {
    std::vector<CoordinateFunction> coords{
        CoordinateFunction({}, {TrigTerm{1.0, 1.0, 0.0}}),
        CoordinateFunction({}, {TrigTerm{1.0, 0.0, 1.0}}),
        CoordinateFunction::polynomial({0.0, 1.0}),
    };
    return Curve("helix", std::move(coords), {-1.0, 1.0});
}

Curve circle() {
    std::vector<CoordinateFunction> coords{
        CoordinateFunction({}, {TrigTerm{1.0, 1.0, 0.0}}),
        CoordinateFunction({}, {TrigTerm{1.0, 0.0, 1.0}}),
    };
    return Curve("circle", std::move(coords), {-M_PI, M_PI});
}

Curve planar_parabola(int d) {
    if (d < 2) throw DomainError("parabola requires d >= 2");
    std::vector<CoordinateFunction> coords(d);
    coords[0] = CoordinateFunction::polynomial({0.0, 1.0});
    coords[1] = CoordinateFunction::polynomial({0.0, 0.0, 1.0});
    return Curve("parabola" + std::to_string(d), std::move(coords), {-1.0, 1.0});
}

FrameMap normalize_frame(const Curve& curve, double t0, int k, double tol) {
    const int d = curve.dim();
    if (k < 1 || k > d) throw DomainError("normalize_frame requires 1 <= k <= d");
    for (int j = 1; j <= k; ++j) {
        if (derivative_rank(curve, t0, j, tol) < j) {
            std::ostringstream msg;
            msg << "derivatives 1.." << j << " of " << curve.id() << " are linearly dependent at t0 = "
                << t0;
            throw DegeneracyError(j, msg.str());
        }
    }
    // Columns: gamma^{(1..k)}(t0), then an orthonormal basis of the
    // complement from Gram-Schmidt on e_1, ..., e_d.
    Eigen::MatrixXd basis(d, d);
    basis.leftCols(k) = derivative_matrix(curve, t0, k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.leftCols(k));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    std::vector<Eigen::VectorXd> span;
    for (int j = 0; j < k; ++j) span.push_back(q.col(j));
    int filled = k;
    for (int i = 0; i < d && filled < d; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(d, i);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : span) v -= u.dot(v) * u;
        }
        const double norm = v.norm();
        if (norm < 1e-6) continue;
        v /= norm;
        span.push_back(v);
        basis.col(filled++) = v;
    }
    FrameMap frame{basis.inverse(), t0, k};
    if (frame.residual(curve) > 1e-10) {
        throw DegeneracyError(k, "frame normalization residual exceeds 1e-10 (ill-conditioned frame)");
    }
    return frame;
}

}  // namespace curvedecay
