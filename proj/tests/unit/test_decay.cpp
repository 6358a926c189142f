#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "curvedecay/decay.hpp"
#include "curvedecay/errors.hpp"

using namespace curvedecay;

namespace {

std::vector<DecayRow> synthetic(double sigma, double beta, double c = 1.3, int jmin = 4, int jmax = 12) {
    std::vector<DecayRow> rows;
    for (int j = jmin; j <= jmax; ++j) {
        const double R = std::ldexp(1.0, j);
        rows.push_back({R, c * std::pow(R, -sigma) * std::pow(std::log(R), beta), 0, 0, 1.0, false});
    }
    return rows;
}

const CutoffSpec kBump{0.0, 0.5, CutoffFamily::bump, 1.0};

}  // namespace

TEST_CASE("G_q at R = 0") {
    const SphericalGrid g = product_grid(3, 16);
    for (double q : {1.0, 2.0, 4.0, 7.5}) {
        const GqResult r = compute_Gq(helix(), kBump, q, 0.0, g);
        CHECK(r.value == doctest::Approx(kBump.integral() * std::pow(4 * M_PI, 1.0 / q)).epsilon(1e-10));
    }
    CHECK(compute_Gq(helix(), kBump, INFINITY, 0.0, g).value == doctest::Approx(kBump.integral()));
    CHECK_THROWS(compute_Gq(moment_curve(4), kBump, 2.0, 1.0, g));
}

TEST_CASE("lq_norm against a direct sum") {
    const std::vector<double> f{0.5, 2.0, 1.5, 0.1};
    const std::vector<double> w{1.0, 0.5, 0.25, 2.0};
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(f[i], 3.0);
    CHECK(lq_norm(f, w, 3.0) == doctest::Approx(std::cbrt(s)).epsilon(1e-14));
    CHECK(lq_norm(f, w, QValue::infinity()) == 2.0);
    CHECK(lq_norm(f, w, parse_q("3")) == doctest::Approx(std::cbrt(s)).epsilon(1e-14));
}

TEST_CASE("normalized norms are nondecreasing in q") {
    const SphericalGrid g = product_grid(3, 48);
    const GridField f = eval_field(moment_curve(3), kBump, 128.0, g);
    double prev = 0.0;
    for (double q : {2.0, 4.0, 7.0, 10.0}) {
        const double v = lq_norm(f.abs_F, g.weights, q) / std::pow(4 * M_PI, 1.0 / q);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("G_q is rotation invariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
    const Eigen::MatrixXd A = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    const SphericalGrid g = product_grid(3, 96);
    for (double q : {2.0, 4.0}) {
        const double a = compute_Gq(helix(), kBump, q, 64.0, g).value;
        const double b = compute_Gq(helix().transformed(A), kBump, q, 64.0, g).value;
        CHECK(a == doctest::Approx(b).epsilon(0.01));
    }
}

TEST_CASE("grid refinement at R = 256 changes G_2 by under 1%") {
    GridSpec spec;
    spec.kind = "product";
    const CutoffSpec narrow{0.0, 0.25, CutoffFamily::bump, 1.0};
    CHECK(refinement_delta(helix(), narrow, 2.0, 256.0, spec) < 0.01);
    CHECK(refinement_delta(moment_curve(3), kBump, 2.0, 256.0, spec) < 0.01);
}

TEST_CASE("grid resolution rule") {
    GridSpec spec;
    CHECK(grid_resolution(spec, 3, 16.0) == 32);
    CHECK(grid_resolution(spec, 3, 1024.0) == 256);
    CHECK(grid_resolution(spec, 2, 100.0) == 800);
    CHECK(make_grid(spec, 4, 100.0).kind == "monte-carlo");
    CHECK(make_grid(spec, 4, 100.0).size() == 100000);
    CHECK(make_grid(spec, 3, 16.0).kind == "product");
}

TEST_CASE("compute_series matches compute_Gq and flags order") {
    GridSpec spec;
    spec.kind = "product";
    const auto s = compute_series(helix(), kBump, {2.0, 4.0}, {16.0, 32.0}, spec, 3);
    REQUIRE(s.size() == 2);
    const SphericalGrid g = make_grid(spec, 3, 32.0);
    CHECK(s[1].rows[1].Gq == compute_Gq(helix(), kBump, 4.0, 32.0, g).value);
    CHECK_FALSE(s[0].rows[0].excluded);
    CHECK_THROWS(compute_series(helix(), kBump, {2.0}, {32.0, 16.0}, spec, 3));
}

TEST_CASE("fit recovers noiseless models") {
    const DecayFit a = fit_exponent(synthetic(0.5, 0.0));
    CHECK(a.free.sigma == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(a.free.beta) < 1e-9);
    CHECK(a.free.residual_rms < 1e-10);
    CHECK(a.beta0.sigma == doctest::Approx(0.5).epsilon(1e-12));
    const DecayFit b = fit_exponent(synthetic(0.5, 0.25));
    CHECK(std::abs(b.free.sigma - 0.5) < 1e-6);
    CHECK(std::abs(b.free.beta - 0.25) < 1e-6);
    CHECK(b.free.amplitude == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(b.free_residual_smaller);
    CHECK(b.log_model_preferred);
    for (double sigma : {0.2, 0.4, 0.75}) {
        for (double beta : {-0.3, 0.0, 0.1, 0.5}) {
            const DecayFit f = fit_exponent(synthetic(sigma, beta, 0.7, 3, 14));
            CHECK(std::abs(f.free.sigma - sigma) < 1e-6);
            CHECK(std::abs(f.free.beta - beta) < 1e-6);
        }
    }
    const DecayFit c = fit_exponent(synthetic(0.4, 0.0));
    CHECK(c.sigma_hat() == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("forced beta fits only amplitude and sigma") {
    const DecayFit f = fit_exponent(synthetic(0.5, 0.25), 0.25);
    CHECK(f.beta_forced);
    CHECK(f.free.beta == 0.25);
    CHECK(std::abs(f.free.sigma - 0.5) < 1e-9);
}

TEST_CASE("fit preconditions") {
    CHECK_THROWS_AS(fit_exponent(synthetic(0.5, 0.0, 1.0, 4, 8)), DiagnosticError);  // 5 rows
    CHECK_THROWS_AS(fit_exponent(synthetic(0.5, 0.0, 1.0, 10, 15)), DiagnosticError);  // span 32
    auto rows = synthetic(0.5, 0.0, 1.0, 4, 12);
    rows[3].excluded = true;
    const DecayFit f = fit_exponent(rows);
    CHECK(f.excluded == 1);
    CHECK(f.used == 8);
    CHECK(f.unreliable);  // 1 of 9 exceeds 10%
}

TEST_CASE("envelope H_R closed forms") {
    const Curve c = moment_curve(3);
    for (double R : {10.0, 100.0, 1000.0}) {
        CHECK(envelope_HR(c, Vec{0, 0, 1}, R, 3) == doctest::Approx(std::cbrt(6 * R)).epsilon(1e-9));
        CHECK(envelope_HR(c, Vec{1, 0, 0}, R, 1) == doctest::Approx(R).epsilon(1e-12));
    }
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    for (int i = 0; i < 20; ++i) {
        Vec w{n(rng), n(rng), n(rng)};
        const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        for (double& x : w) x /= norm;
        CHECK(envelope_HR(c, w, 300.0, 3) >= envelope_HR(c, w, 100.0, 3) - 1e-12);
    }
}

TEST_CASE("envelope constant at R = 0 is the cutoff integral") {
    GridSpec spec;
    spec.kind = "product";
    spec.m_min = 16;
    const EnvelopeReport r = envelope_check(moment_curve(3), kBump, {0.0}, 3, spec);
    CHECK(r.C == doctest::Approx(kBump.integral()).epsilon(1e-12));
}

TEST_CASE("envelope level sets follow the measure bound with a stable constant") {
    GridSpec spec;
    spec.kind = "product";
    const EnvelopeReport r = envelope_check(moment_curve(3), kBump, {64.0, 256.0}, 3, spec);
    std::vector<double> worst;
    for (const auto& row : r.rows) {
        double w = 0.0;
        for (std::size_t l = 0; l < row.level_measure.size(); ++l) {
            double bound = INFINITY;
            for (int k = 1; k <= 3; ++k) {
                bound = std::min(bound, std::pow(2.0, l * (k * k + k + 2) / 2.0) * std::pow(row.R, -k));
            }
            w = std::max(w, row.level_measure[l] / bound);
        }
        worst.push_back(w);
    }
    CHECK(worst[0] < 50.0);
    CHECK(worst[1] < 50.0);
    CHECK(std::max(worst[0], worst[1]) / std::min(worst[0], worst[1]) <= 2.0);
    CHECK(r.stable);
}

TEST_CASE("dyadic pieces sum to F_R") {
    const Curve c = moment_curve(3);
    const Vec omegas[] = {{0.0, 0.6, 0.8}, {0.48, -0.6, 0.64}, {1.0, 0.0, 0.0}};
    for (double R : {64.0, 500.0}) {
        for (const Vec& w : omegas) {
            const auto pieces = dyadic_pieces(c, kBump, R, w);
            Complex s = 0.0;
            for (const auto& p : pieces) s += p.value;
            CHECK(std::abs(s - eval_FR(c, kBump, R, w, 1e-11).value) < 1e-8);
            CHECK(pieces.back().l == dyadic_top(R));
            CHECK(pieces.front().l == dyadic_bottom(c, kBump));
        }
    }
    CHECK(dyadic_top(1024.0) == 10);
    CHECK(dyadic_top(1000.0) == 9);
}

TEST_CASE("dyadic sup bound 2^l / R and L2 model") {
    const Curve c = moment_curve(3);
    const SphericalGrid g = product_grid(3, 32);
    double worst_sup[2] = {0.0, 0.0};
    int i = 0;
    for (double R : {64.0, 256.0}) {
        for (const DyadicRow& row : dyadic_diagnostics(c, kBump, R, g)) {
            worst_sup[i] = std::max(worst_sup[i], row.sup_scaled);
            if (std::ldexp(1.0, 2 * row.l) >= R && row.l < dyadic_top(R)) CHECK(row.l2 <= 4.0 * row.l2_model);
        }
        ++i;
    }
    CHECK(worst_sup[0] < 10.0);
    CHECK(worst_sup[1] < 10.0);
    CHECK(std::max(worst_sup[0], worst_sup[1]) / std::min(worst_sup[0], worst_sup[1]) <= 2.0);
}

TEST_CASE("worker count does not change G_q") {
    const SphericalGrid g = product_grid(3, 40);
    const double a = compute_Gq(helix(), kBump, 3.0, 100.0, g, 1e-10, 1).value;
    const double b = compute_Gq(helix(), kBump, 3.0, 100.0, g, 1e-10, 3).value;
    CHECK(a == b);
}
