#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvedecay/curve.hpp"
#include "curvedecay/decay.hpp"
#include "curvedecay/oscquad.hpp"

namespace curvedecay {

using Json = nlohmann::json;

// Curve file: {"id", "dim", "kind": "poly" | "trig", "coordinates",
// "interval": [lo, hi], optional "max_order"}. A poly coordinate is a
// coefficient array (constant first); a trig coordinate is
// {"poly": [...], "trig": [[frequency, cos_amplitude, sin_amplitude], ...]}.
Curve curve_from_json(const Json& j);
Curve load_curve(const std::filesystem::path& path);
// "moment:3", "helix", "circle", "parabola:3".
Curve builtin_curve(const std::string& name);
Json curve_to_json(const Curve& curve);

struct RSchedule {
    int j_min = 4;
    int j_max = 12;
    std::vector<double> values;  // overrides the dyadic range when nonempty

    std::vector<double> resolve() const;
};

struct EnvelopeConfig {
    int n = 3;
    std::vector<double> R{64.0, 256.0, 1024.0};
};

struct WitnessConfig {
    std::string set = "U";  // U | V | planar
    int k = 3;
    double t0 = 0.0;
    double eps = 0.05;    // U
    double delta = 0.05;  // V
    std::vector<int> j{1};
    bool enforce_window = true;
    std::vector<double> R{1e3, 1e4, 1e5, 1e6};
    std::size_t n = 1000000;
    std::size_t max_verify = 300;
    std::optional<double> cutoff_half_width;  // default 0.05 |I|
    std::vector<double> planar_q{4.0, 8.0};   // planar
};

struct ExperimentConfig {
    std::string curve;  // path (relative to the config file) or "builtin:<name>"
    std::vector<std::string> q{"2"};
    std::optional<int> K;
    std::optional<bool> degenerate;
    RSchedule R;
    CutoffSpec cutoff{0.0, 0.5, CutoffFamily::bump, 1.0};
    GridSpec grid;
    double tol = 0.0;
    std::uint64_t seed = 0;
    int workers = 0;  // 0: hardware concurrency
    std::string output;
    std::optional<double> force_beta;
    EnvelopeConfig envelope;
    WitnessConfig witness;

    std::filesystem::path base_dir;  // directory of the config file
};

// Unknown keys and wrong types raise ValidationError.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical form, the frozen copy embedded in outputs.
Json config_to_json(const ExperimentConfig& c);

Curve resolve_curve(const ExperimentConfig& c);

}  // namespace curvedecay
