#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace curvedecay {

using Rational = boost::rational<long long>;

// Exponent q in [2, infinity], stored through r = 1/q so that q = infinity
// is r = 0.
struct QValue {
    Rational inv;  // 1/q

    static QValue finite(Rational q);
    static QValue infinity() { return QValue{Rational(0)}; }
    static QValue from_int(long long q) { return finite(Rational(q)); }
    bool is_infinite() const { return inv.numerator() == 0; }
    // q as num/den; infinity is 1/0.
    long long num() const { return is_infinite() ? 1 : inv.denominator(); }
    long long den() const { return is_infinite() ? 0 : inv.numerator(); }
    double to_double() const;
    std::string str() const;
};

// Parses "7", "15/2", "inf".
QValue parse_q(const std::string& text);

struct ExponentPrediction {
    int d = 0;
    int K = 0;
    QValue q;
    Rational sigma;
    // argmin k of 1/k + (k^2-k-2)/(2kq); 0 when the K/q branch is the
    // strict minimum.
    int kstar = 0;
    bool k_over_q_branch = false;
    Rational beta;
};

// (k^2 + k + 2) / 2.
Rational qk(int k);

// Minimum over k = 2..d (K = d) or over k = 2..K together with K/q (K < d).
// Ties go to the smallest k, with the K/q branch ranked last.
ExponentPrediction sigma(int d, int K, QValue q);

struct Vertex {
    Rational inv_q;
    Rational sigma;
};

// (1/q_k, k/q_k) for k = 1..min(K, d-1), then (0, 1/d) if K = d or (0, 0).
std::vector<Vertex> breakpoints(int d, int K);

// sigma as above; beta = 1/q when q = q_k for k in 2..K-1 (or 2..K when
// gamma^{(K+1)} vanishes identically), else 0.
ExponentPrediction predicted_model(int d, int K, QValue q, bool degenerate);

std::string rational_str(const Rational& r);
double to_double(const Rational& r);

}  // namespace curvedecay
