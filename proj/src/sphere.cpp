#include "curvedecay/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "curvedecay/errors.hpp"
#include "curvedecay/gauss.hpp"
#include "curvedecay/parallel.hpp"

namespace curvedecay {

double SphericalGrid::weight_sum() const { return pairwise_sum(weights); }

double sphere_area(int d) {
    if (d < 1) throw DomainError("sphere dimension must be positive");
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {

struct RawGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<std::size_t> antipode;
};

RawGrid circle_grid(int m) {
    RawGrid g;
    const double step = 2.0 * M_PI / m;
    for (int j = 0; j < m; ++j) {
        const double phi = (j + 0.5) * step;
        g.nodes.push_back(std::cos(phi));
        g.nodes.push_back(std::sin(phi));
        g.weights.push_back(step);
        g.antipode.push_back(static_cast<std::size_t>((j + m / 2) % m));
    }
    return g;
}

RawGrid build_product(int d, int m) {
    if (d == 2) return circle_grid(m);
    const RawGrid sub = build_product(d - 1, m);
    const int nx = std::max(2, m / 2);
    const GaussRule rule = gauss_gegenbauer(nx, 0.5 * (d - 3));
    const std::size_t nsub = sub.weights.size();
    RawGrid g;
    g.nodes.reserve(static_cast<std::size_t>(nx) * nsub * d);
    for (int ix = 0; ix < nx; ++ix) {
        const double x = rule.nodes[ix];
        const double r = std::sqrt(std::max(0.0, 1.0 - x * x));
        for (std::size_t js = 0; js < nsub; ++js) {
            for (int c = 0; c < d - 1; ++c) g.nodes.push_back(r * sub.nodes[js * (d - 1) + c]);
            g.nodes.push_back(x);
            g.weights.push_back(rule.weights[ix] * sub.weights[js]);
            g.antipode.push_back(static_cast<std::size_t>(nx - 1 - ix) * nsub + sub.antipode[js]);
        }
    }
    return g;
}

}  // namespace

SphericalGrid product_grid(int d, int m) {
    if (d < 2 || d > 6) throw CapabilityError("product_grid supports 2 <= d <= 6");
    if (m < 4) throw DomainError("product_grid requires m >= 4");
    m += m % 2;
    RawGrid raw = build_product(d, m);
    SphericalGrid g;
    g.dim = d;
    g.m = m;
    g.kind = "product";
    g.nodes = std::move(raw.nodes);
    g.weights = std::move(raw.weights);
    g.antipode = std::move(raw.antipode);
    return g;
}

Eigen::MatrixXd frame_with_last_axis(const Vec& axis) {
    const int d = static_cast<int>(axis.size());
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(axis.data(), d);
    const double norm = a.norm();
    if (!(norm > 0.0)) throw DomainError("axis must be nonzero");
    a /= norm;
    Eigen::MatrixXd f(d, d);
    f.col(d - 1) = a;
    std::vector<Eigen::VectorXd> basis{a};
    int filled = 0;
    for (int i = 0; i < d && filled < d - 1; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(d, i);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) v -= u.dot(v) * u;
        }
        const double n = v.norm();
        if (n < 1e-6) continue;
        v /= n;
        basis.push_back(v);
        f.col(filled++) = v;
    }
    return f;
}

SphericalGrid graded_grid(const Vec& axis, int m, int levels) {
    if (axis.size() != 3) throw CapabilityError("graded_grid is implemented for d = 3");
    if (m < 4) throw DomainError("graded_grid requires m >= 4");
    if (levels < 1) throw DomainError("graded_grid requires levels >= 1");
    m += m % 2;
    // Northern panel boundaries in theta, from the pole to the equator.
    std::vector<double> bounds{0.0};
    for (int l = levels; l >= 1; --l) bounds.push_back(std::asin(std::ldexp(1.0, -l)));
    bounds.push_back(0.5 * M_PI);
    std::vector<double> xs, wx;
    for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
        const double ta = bounds[p], tb = bounds[p + 1];
        const int n = std::max(6, static_cast<int>(std::ceil((tb - ta) * m / (2.0 * M_PI))));
        const GaussRule rule = gauss_legendre(n);
        const double hi = std::cos(ta), lo = std::cos(tb);
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int i = n - 1; i >= 0; --i) {
            xs.push_back(mid + half * rule.nodes[i]);
            wx.push_back(half * rule.weights[i]);
        }
    }
    const std::size_t north = xs.size();
    for (std::size_t i = 0; i < north; ++i) {
        xs.push_back(-xs[north - 1 - i]);
        wx.push_back(wx[north - 1 - i]);
    }
    const std::size_t rings = xs.size();
    const Eigen::MatrixXd frame = frame_with_last_axis(axis);
    SphericalGrid g;
    g.dim = 3;
    g.m = m;
    g.kind = "graded";
    const double step = 2.0 * M_PI / m;
    for (std::size_t r = 0; r < rings; ++r) {
        const double x = xs[r];
        const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
        for (int j = 0; j < m; ++j) {
            const double phi = (j + 0.5) * step;
            const Eigen::Vector3d local(s * std::cos(phi), s * std::sin(phi), x);
            const Eigen::Vector3d w = frame * local;
            g.nodes.insert(g.nodes.end(), {w(0), w(1), w(2)});
            g.weights.push_back(wx[r] * step);
            g.antipode.push_back((rings - 1 - r) * m + static_cast<std::size_t>((j + m / 2) % m));
        }
    }
    return g;
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

Vec random_unit(int d, Rng& rng) {
    std::normal_distribution<double> normal;
    Vec v(d);
    for (;;) {
        double n2 = 0.0;
        for (double& x : v) {
            x = normal(rng);
            n2 += x * x;
        }
        if (n2 > 1e-300) {
            const double inv = 1.0 / std::sqrt(n2);
            for (double& x : v) x *= inv;
            return v;
        }
    }
}

std::vector<Vec> random_sphere(int d, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    if (d < 2) throw DomainError("random_sphere requires d >= 2");
    Rng rng = make_rng(seed, stream);
    std::vector<Vec> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_unit(d, rng));
    return out;
}

SphericalGrid monte_carlo_grid(int d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("monte_carlo_grid requires n >= 1");
    SphericalGrid g;
    g.dim = d;
    g.m = 0;
    g.kind = "monte-carlo";
    g.nodes.reserve(n * d);
    Rng rng = make_rng(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec v = random_unit(d, rng);
        g.nodes.insert(g.nodes.end(), v.begin(), v.end());
    }
    g.weights.assign(n, sphere_area(d) / static_cast<double>(n));
    return g;
}

int default_resolution(int d, double R) {
    if (d == 2) return std::max(64, static_cast<int>(std::ceil(8.0 * R)));
    if (d == 3) return std::max(32, static_cast<int>(std::ceil(8.0 * std::sqrt(R))));
    return 0;
}

SphericalGrid default_grid(int d, double R, std::uint64_t seed) {
    if (d <= 3) return product_grid(d, default_resolution(d, R));
    const double n = std::min(1e7, 1e4 * std::sqrt(std::max(R, 1.0)));
    return monte_carlo_grid(d, static_cast<std::size_t>(n), seed);
}

CapSampler::CapSampler(const Vec& axis, double eps)
    : dim_(static_cast<int>(axis.size())), eps_(eps), frame_(frame_with_last_axis(axis)) {
    if (!(eps > 0.0) || eps > std::sqrt(2.0) + 1e-15) {
        throw DomainError("cap radius must lie in (0, sqrt(2)]");
    }
    const double theta = 2.0 * std::asin(std::min(1.0, 0.5 * eps));
    radius_ = std::sin(theta);
    floor_height_ = std::sqrt(std::max(0.0, 1.0 - radius_ * radius_));
}

void CapSampler::draw(Rng& rng, std::span<double> out) const {
    const int d = dim_;
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd local(d);
    for (;;) {
        double n2 = 0.0;
        for (int i = 0; i < d - 1; ++i) {
            local(i) = normal(rng);
            n2 += local(i) * local(i);
        }
        if (n2 < 1e-300) continue;
        const double rho = radius_ * std::pow(unif(rng), 1.0 / (d - 1));
        const double h = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        if (unif(rng) * h > floor_height_) continue;
        local.head(d - 1) *= rho / std::sqrt(n2);
        local(d - 1) = h;
        Eigen::Map<Eigen::VectorXd>(out.data(), d) = frame_ * local;
        return;
    }
}

Vec CapSampler::draw(Rng& rng) const {
    Vec out(dim_);
    draw(rng, out);
    return out;
}

double cap_fraction(int d, double eps) {
    if (eps <= 0.0) return 0.0;
    if (eps >= 2.0) return 1.0;
    const double theta = 2.0 * std::asin(0.5 * eps);
    const GaussRule& rule = gl15();
    auto integral = [&](double upper) {
        // Composite rule; the integrand sin^{d-2} is smooth.
        const int panels = 16;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = upper * p / panels, b = upper * (p + 1) / panels;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
                acc += 0.5 * (b - a) * rule.weights[i] * std::pow(std::sin(t), d - 2);
            }
        }
        return acc;
    };
    return integral(theta) / integral(M_PI);
}

MeasureEstimate binomial_estimate(std::size_t hits, std::size_t n) {
    MeasureEstimate e;
    e.hits = hits;
    e.n = n;
    if (n == 0) return e;
    e.fraction = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.fraction * (1.0 - e.fraction) / static_cast<double>(n));
    return e;
}

MeasureEstimate estimate_measure(int d, const std::function<bool(std::span<const double>)>& predicate,
                                 std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("estimate_measure requires n >= 1");
    Rng rng = make_rng(seed, 0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec v = random_unit(d, rng);
        if (predicate(v)) ++hits;
    }
    return binomial_estimate(hits, n);
}

}  // namespace curvedecay
