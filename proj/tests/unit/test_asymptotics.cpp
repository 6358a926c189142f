#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/airy.hpp>

#include "curvedecay/asymptotics.hpp"
#include "curvedecay/errors.hpp"

using namespace curvedecay;

TEST_CASE("Lanczos gamma against the standard library") {
    for (double x = 0.05; x <= 1.0; x += 0.05) CHECK(gamma_lanczos(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-12));
    CHECK(gamma_lanczos(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("alpha constants") {
    const Complex a2 = alpha(2).value;
    CHECK(a2.real() == doctest::Approx(1.2533141).epsilon(1e-7));
    CHECK(a2.imag() == doctest::Approx(1.2533141).epsilon(1e-7));
    CHECK(alpha(3).value.real() == doctest::Approx(1.54669).epsilon(1e-5));
    for (int k = 2; k <= 8; ++k) {
        const Complex a = alpha(k).value;
        // Odd k carries the extra factor sin((k - 1) pi / 2k) of the closed form.
        const double odd = k % 2 ? std::sin((k - 1) * M_PI / (2.0 * k)) : 1.0;
        CHECK(std::abs(a) == doctest::Approx(2.0 / k * std::tgamma(1.0 / k) * odd).epsilon(1e-10));
        if (k % 2) {
            CHECK(a.imag() == 0.0);
        } else {
            CHECK(std::arg(a) == doctest::Approx(M_PI / (2 * k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Airy values against Boost") {
    for (double tau = -30.0; tau <= 6.0; tau += 0.37) {
        const AiryValue v = airy(tau);
        CHECK(std::abs(v.value - boost::math::airy_ai(tau)) <= 1e-8);
    }
    for (double tau : {-100.0, -60.0, -45.5}) {
        CHECK(std::abs(airy(tau).value - boost::math::airy_ai(tau)) <= 1e-8);
    }
    CHECK(airy(8.0).value == doctest::Approx(boost::math::airy_ai(8.0)).epsilon(1e-6));
    CHECK_THROWS_AS(airy(-101.0), CapabilityError);
    CHECK_THROWS_AS(airy(11.0), CapabilityError);
}

TEST_CASE("Ai(0) and the first negative zero") {
    const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
    CHECK(std::abs(airy(0.0).value - ai0) < 1e-12);
    CHECK(ai0 == doctest::Approx(0.3550280539).epsilon(1e-10));
    double lo = -3.0, hi = -2.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (airy(mid).value > 0.0 ? hi : lo) = mid;
    }
    CHECK(lo == doctest::Approx(-2.33811).epsilon(1e-5));
}

TEST_CASE("series and asymptotic forms agree in the switch band") {
    for (double tau = -7.0; tau <= -5.0; tau += 0.1) {
        const AiryValue v = airy(tau);
        CHECK(v.cross_difference <= 1e-8);
        CHECK(std::abs(airy_series(tau) - airy_asymptotic(tau)) <= 1e-8);
    }
    for (double tau = 5.0; tau <= 7.0; tau += 0.25) CHECK(std::abs(airy_series(tau) - airy_asymptotic(tau)) <= 1e-8);
    CHECK(airy(-6.5).method == AiryMethod::series);
    CHECK(airy(-7.5).method == AiryMethod::asymptotic);
    CHECK(airy(5.5).method == AiryMethod::series);
    CHECK(airy(6.5).method == AiryMethod::asymptotic);
}

TEST_CASE("Airy equation under central differences") {
    const double h = 1e-3;
    for (double tau = -10.0; tau <= 2.0; tau += 0.25) {
        const double d2 = (airy(tau + h).value - 2 * airy(tau).value + airy(tau - h).value) / (h * h);
        CHECK(std::abs(d2 - tau * airy(tau).value) < 1e-5);
    }
}

TEST_CASE("Airy leading term at large t") {
    for (double t : {5.0, 10.0, 20.0, 25.0, 50.0}) {
        const double lead = std::cos(2.0 / 3.0 * std::pow(t, 1.5) - M_PI / 4) / (std::sqrt(M_PI) * std::pow(t, 0.25));
        CHECK(airy_leading(t) == doctest::Approx(lead).epsilon(1e-14));
        const double rel = std::abs(airy(-t).value - lead) * std::sqrt(M_PI) * std::pow(t, 0.25);
        CHECK(rel <= 2.0 * std::pow(t, -0.75));
    }
}

TEST_CASE("fit_line recovers an exact line") {
    const LineFit f = fit_line({1, 2, 3, 4}, {1.5, 3.5, 5.5, 7.5});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(-0.5));
}

TEST_CASE("perturbed stationary phase decay orders for x = 0, g = 0") {
    const CutoffSpec eta{0.0, 0.1, CutoffFamily::bump, 1.0};
    const std::vector<double> lambdas{1e2, 1e3, 1e4, 1e5, 1e6};
    for (int k = 2; k <= 5; ++k) {
        const Lemma51Report r = check_lemma51(k, lambdas, {}, {}, eta);
        CHECK(r.passes);
        CHECK(r.delta == 0.0);
        CHECK(r.fitted_order >= r.required_order - 0.1);
        for (const auto& row : r.rows) CHECK(row.resolved);
    }
    // Independent log-log fit for k = 3 over 10^3..10^6. An off-center cutoff
    // has eta'(0) != 0, which makes the lambda^{-2/3} term visible; a centered
    // bump cancels it.
    const CutoffSpec shifted{0.03, 0.07, CutoffFamily::bump, 1.0};
    const Lemma51Report r3 = check_lemma51(3, {1e3, 1e4, 1e5, 1e6}, {}, {}, shifted);
    std::vector<double> x, y;
    for (const auto& row : r3.rows) {
        x.push_back(std::log(row.lambda));
        y.push_back(std::log(row.residual));
    }
    CHECK(-fit_line(x, y).slope == doctest::Approx(2.0 / 3.0).epsilon(0.15));
}

TEST_CASE("perturbed stationary phase with a small linear coefficient") {
    const CutoffSpec eta{0.0, 0.1, CutoffFamily::bump, 1.0};
    const double delta = 0.1;
    const Lemma51Report r = check_lemma51(3, {1e3, 1e4, 1e5, 1e6}, {delta}, {}, eta);
    CHECK(r.delta == delta);
    for (const auto& row : r.rows) CHECK(row.residual <= 10.0 * delta * std::pow(row.lambda, -1.0 / 3.0));
}

TEST_CASE("perturbed stationary phase rejects oversized cutoffs and small lambda") {
    const CutoffSpec wide{0.0, 0.5, CutoffFamily::bump, 1.0};
    CHECK_THROWS_AS(check_lemma51(3, {1e3}, {}, {1.0, 1.0}, wide), DomainError);
    const CutoffSpec eta{0.0, 0.1, CutoffFamily::bump, 1.0};
    CHECK_THROWS_AS(check_lemma51(3, {1.5}, {}, {}, eta), DomainError);
}

TEST_CASE("modified Airy integral example and hypotheses") {
    const Lemma52Row r = check_lemma52(1e4, 0.01, {}, 0.5);
    CHECK(r.resolved);
    CHECK(r.E1 <= 10.0 * r.envelope);
    CHECK(r.E2 <= 10.0 * r.envelope);
    const double env = 1.0 / (1e4 * 0.01) + std::min(1e4 * std::pow(0.01, 2.5), std::sqrt(0.01));
    CHECK(r.envelope == doctest::Approx(env));
    CHECK_THROWS_AS(check_lemma52(1e4, 0.125, {}, 0.5), DomainError);
    CHECK_THROWS_AS(check_lemma52(1.0, 0.01, {}, 0.5), DomainError);
}

TEST_CASE("Airy and cosine models differ by O(1/(lambda theta))") {
    double worst = 0.0;
    for (double lambda : {1e3, 1e4, 1e5}) {
        for (double theta : {0.003, 0.01, 0.03, 0.1}) {
            const Lemma52Row r = check_lemma52(lambda, theta, {}, 0.5);
            const double diff = std::abs(r.airy_model - r.cosine_model);
            worst = std::max(worst, diff * lambda * theta / (2 * M_PI * std::pow(lambda, -1.0 / 3.0)));
        }
    }
    CHECK(worst < 5.0);
}

TEST_CASE("modified Airy integral grid with a perturbation stays under a modest constant") {
    const Lemma52Summary s = check_lemma52_grid({1e3, 1e4, 1e5}, {0.003, 0.01, 0.03}, {{}, {0.1}}, 0.5);
    CHECK(s.all_resolved);
    CHECK(s.rows.size() == 18);
    CHECK(s.fitted_constant <= 50.0);
}
