#include "curvedecay/theory.hpp"

#include <algorithm>

#include "curvedecay/errors.hpp"

namespace curvedecay {

QValue QValue::finite(Rational q) {
    if (q < Rational(2)) throw DomainError("q must be at least 2");
    return QValue{Rational(1) / q};
}

double QValue::to_double() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(inv.denominator()) / static_cast<double>(inv.numerator());
}

std::string QValue::str() const {
    if (is_infinite()) return "inf";
    return rational_str(Rational(1) / inv);
}

QValue parse_q(const std::string& text) {
    if (text == "inf" || text == "infinity") return QValue::infinity();
    try {
        const auto slash = text.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const long long q = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return QValue::from_int(q);
        }
        const long long num = std::stoll(text.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(text);
        const std::string rest = text.substr(slash + 1);
        const long long den = std::stoll(rest, &used);
        if (used != rest.size() || den <= 0) throw std::invalid_argument(text);
        return QValue::finite(Rational(num, den));
    } catch (const std::invalid_argument&) {
        throw ValidationError("cannot parse q value '" + text + "'");
    } catch (const std::out_of_range&) {
        throw ValidationError("q value out of range '" + text + "'");
    }
}

Rational qk(int k) {
    if (k < 1) throw DomainError("q_k requires k >= 1");
    return Rational(static_cast<long long>(k) * k + k + 2, 2);
}

namespace {

Rational branch_value(int k, const Rational& r) {
    return Rational(1, k) + Rational(static_cast<long long>(k) * k - k - 2, 2LL * k) * r;
}

void check_dims(int d, int K) {
    if (d < 2) throw DomainError("d must be at least 2");
    if (K < 2 || K > d) throw DomainError("K must satisfy 2 <= K <= d");
}

}  // namespace

ExponentPrediction sigma(int d, int K, QValue q) {
    check_dims(d, K);
    const Rational& r = q.inv;
    if (r < Rational(0) || r > Rational(1, 2)) throw DomainError("q must be at least 2");
    ExponentPrediction p;
    p.d = d;
    p.K = K;
    p.q = q;
    const int top = (K == d) ? d : K;
    p.kstar = 2;
    p.sigma = branch_value(2, r);
    for (int k = 3; k <= top; ++k) {
        const Rational v = branch_value(k, r);
        if (v < p.sigma) {
            p.sigma = v;
            p.kstar = k;
        }
    }
    if (K < d) {
        const Rational v = Rational(K) * r;
        if (v < p.sigma) {
            p.sigma = v;
            p.kstar = 0;
            p.k_over_q_branch = true;
        }
    }
    p.beta = 0;
    return p;
}

std::vector<Vertex> breakpoints(int d, int K) {
    check_dims(d, K);
    std::vector<Vertex> out;
    for (int k = 1; k <= std::min(K, d - 1); ++k) {
        const Rational q = qk(k);
        out.push_back({Rational(1) / q, Rational(k) / q});
    }
    out.push_back({Rational(0), K == d ? Rational(1, d) : Rational(0)});
    return out;
}

ExponentPrediction predicted_model(int d, int K, QValue q, bool degenerate) {
    ExponentPrediction p = sigma(d, K, q);
    const int top = degenerate ? K : K - 1;
    if (!q.is_infinite()) {
        for (int k = 2; k <= top; ++k) {
            if (Rational(1) / qk(k) == q.inv) p.beta = q.inv;
        }
    }
    return p;
}

std::string rational_str(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace curvedecay
