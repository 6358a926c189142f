#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "curvedecay/errors.hpp"
#include "curvedecay/theory.hpp"

using namespace curvedecay;

namespace {

using R = Rational;

// Floating-point evaluation of the exponent minimum, written independently of
// the exact implementation.
double sigma_float(int d, int K, double q) {
    double best = 1e300;
    const int top = K == d ? d : K;
    for (int k = 2; k <= top; ++k) best = std::min(best, 1.0 / k + (k * k - k - 2.0) / (2.0 * k * q));
    if (K < d) best = std::min(best, K / q);
    return best;
}

QValue qv(long long num, long long den = 1) { return QValue::finite(R(num, den)); }

}  // namespace

TEST_CASE("q_k values") {
    CHECK(qk(1) == R(2));
    CHECK(qk(2) == R(4));
    CHECK(qk(3) == R(7));
    CHECK(qk(4) == R(11));
    CHECK_THROWS_AS(qk(0), DomainError);
}

TEST_CASE("sigma examples") {
    const auto a = sigma(3, 3, qv(7));
    CHECK(a.sigma == R(3, 7));
    CHECK(a.kstar == 3);
    CHECK(sigma(3, 2, qv(8)).sigma == R(1, 4));
    CHECK(sigma(5, 2, qv(8)).sigma == R(1, 4));
    const auto b = sigma(4, 3, qv(9));
    CHECK(b.sigma == R(1, 3));
    CHECK(b.k_over_q_branch);
    CHECK_THROWS_AS(QValue::finite(R(3, 2)), DomainError);
    CHECK(sigma(3, 3, QValue::infinity()).sigma == R(1, 3));
    CHECK(sigma(4, 3, QValue::infinity()).sigma == R(0));
}

TEST_CASE("ties resolve to the smallest k") {
    // At q = q_2 = 4 the k = 2 and k = 3 branches both give 1/2.
    CHECK(sigma(3, 3, qv(4)).kstar == 2);
}

TEST_CASE("exact breakpoint lists") {
    auto check = [](int d, int K, std::vector<std::pair<R, R>> want) {
        const auto v = breakpoints(d, K);
        REQUIRE(v.size() == want.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v[i].inv_q == want[i].first);
            CHECK(v[i].sigma == want[i].second);
        }
    };
    check(3, 3, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(0), R(1, 3)}});
    check(4, 4, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(1, 7), R(3, 7)}, {R(0), R(1, 4)}});
    check(4, 3, {{R(1, 2), R(1, 2)}, {R(1, 4), R(1, 2)}, {R(1, 7), R(3, 7)}, {R(0), R(0)}});
    std::vector<std::pair<R, R>> ten;
    for (long long k = 1; k <= 9; ++k) {
        const long long q = (k * k + k + 2) / 2;
        ten.push_back({R(1, q), R(k, q)});
    }
    ten.push_back({R(0), R(1, 10)});
    check(10, 10, ten);
}

TEST_CASE("sigma is linear between consecutive breakpoints and hits every vertex") {
    for (int d = 2; d <= 10; ++d) {
        for (int K = 2; K <= d; ++K) {
            const auto v = breakpoints(d, K);
            for (const auto& x : v) {
                if (x.inv_q == R(0)) {
                    CHECK(sigma(d, K, QValue::infinity()).sigma == x.sigma);
                } else {
                    CHECK(sigma(d, K, QValue{x.inv_q}).sigma == x.sigma);
                }
            }
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                const R mid = (v[i].inv_q + v[i + 1].inv_q) / 2;
                CHECK(sigma(d, K, QValue{mid}).sigma == (v[i].sigma + v[i + 1].sigma) / 2);
                // Quarter points as well, so one linear piece fits each interval.
                const R quarter = (3 * v[i].inv_q + v[i + 1].inv_q) / 4;
                CHECK(sigma(d, K, QValue{quarter}).sigma == (3 * v[i].sigma + v[i + 1].sigma) / 4);
            }
        }
    }
}

TEST_CASE("breakpoint polyline is concave for K < d") {
    for (int d = 3; d <= 10; ++d) {
        for (int K = 2; K < d; ++K) {
            const auto v = breakpoints(d, K);
            // Slopes in 1/q, taken from right (1/q = 1/2) to left, must increase.
            for (std::size_t i = 0; i + 2 < v.size(); ++i) {
                const R s1 = (v[i].sigma - v[i + 1].sigma) / (v[i].inv_q - v[i + 1].inv_q);
                const R s2 = (v[i + 1].sigma - v[i + 2].sigma) / (v[i + 1].inv_q - v[i + 2].inv_q);
                CHECK(s1 <= s2);
            }
        }
    }
}

TEST_CASE("sigma at q_k equals k / q_k") {
    for (int d = 3; d <= 10; ++d) {
        for (int k = 2; k <= d - 1; ++k) CHECK(sigma(d, d, QValue::finite(qk(k))).sigma == R(k) / qk(k));
    }
}

TEST_CASE("sigma agrees with an independent float evaluation") {
    for (int d = 2; d <= 8; ++d) {
        for (int K = 2; K <= d; ++K) {
            for (long long num = 4; num <= 60; num += 3) {
                const auto p = sigma(d, K, qv(num, 2));
                CHECK(to_double(p.sigma) == doctest::Approx(sigma_float(d, K, num / 2.0)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("sigma with K = 3 beats 2/q above q = 4") {
    for (int d = 3; d <= 8; ++d) {
        for (long long num = 9; num <= 200; num += 7) {
            const R q(num, 2);
            CHECK(sigma(d, 3, QValue::finite(q)).sigma > R(2) / q);
        }
    }
}

TEST_CASE("more independent derivatives never predict slower decay") {
    for (int d = 3; d <= 9; ++d) {
        for (int K = 2; K < d; ++K) {
            for (long long num = 4; num <= 120; num += 5) {
                const QValue q = qv(num, 2);
                CHECK(sigma(d, K + 1, q).sigma >= sigma(d, K, q).sigma);
            }
        }
    }
}

TEST_CASE("predicted_model log exponents") {
    const auto a = predicted_model(3, 3, qv(4), false);
    CHECK(a.sigma == R(1, 2));
    CHECK(a.beta == R(1, 4));
    const auto b = predicted_model(3, 2, qv(4), true);
    CHECK(b.sigma == R(1, 2));
    CHECK(b.beta == R(1, 4));
    const auto c = predicted_model(3, 3, qv(5), false);
    CHECK(c.sigma == sigma(3, 3, qv(5)).sigma);
    CHECK(c.beta == R(0));
    // q_3 = 7 is excluded for d = K = 3 (k runs to K - 1) but included when degenerate.
    CHECK(predicted_model(3, 3, qv(7), false).beta == R(0));
    CHECK(predicted_model(3, 3, qv(7), true).beta == R(1, 7));
    CHECK(predicted_model(5, 5, qv(11), false).beta == R(1, 11));
    CHECK(predicted_model(3, 3, QValue::infinity(), true).beta == R(0));
}

TEST_CASE("parse_q spellings") {
    CHECK(parse_q("7").inv == R(1, 7));
    CHECK(parse_q("15/2").inv == R(2, 15));
    CHECK(parse_q("inf").is_infinite());
    CHECK(parse_q("15/2").str() == "15/2");
    CHECK_THROWS_AS(parse_q("abc"), ValidationError);
    CHECK_THROWS_AS(parse_q("7/0"), ValidationError);
    CHECK_THROWS_AS(parse_q("1"), DomainError);
}
