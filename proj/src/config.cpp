#include "curvedecay/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "curvedecay/errors.hpp"

namespace curvedecay {

namespace {

// Reads fields of one JSON object and rejects keys that were never read.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(where() + " must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const Json& at(const std::string& key) {
        if (!has(key)) throw ValidationError("missing key " + where(key));
        return j_.at(key);
    }

    double number(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_number()) throw ValidationError(where(key) + " must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError(where(key) + " must be finite");
        return x;
    }

    long long integer(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_number_integer()) throw ValidationError(where(key) + " must be an integer");
        return v.get<long long>();
    }

    bool boolean(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_boolean()) throw ValidationError(where(key) + " must be a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_string()) throw ValidationError(where(key) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_array()) throw ValidationError(where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const Json& x : v) {
            if (!x.is_number()) throw ValidationError(where(key) + " must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        const Json& v = at(key);
        if (!v.is_array()) throw ValidationError(where(key) + " must be an array of integers");
        std::vector<int> out;
        for (const Json& x : v) {
            if (!x.is_number_integer()) throw ValidationError(where(key) + " must be an array of integers");
            out.push_back(x.get<int>());
        }
        return out;
    }

    std::string where(const std::string& key = {}) const {
        if (key.empty()) return path_.empty() ? "document" : "'" + path_ + "'";
        return "'" + (path_.empty() ? key : path_ + "." + key) + "'";
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ValidationError("unknown key " + where(it.key()));
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> coefficient_array(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + " must be a coefficient array");
    std::vector<double> out;
    for (const Json& x : v) {
        if (!x.is_number()) throw ValidationError(where + " must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace

Curve curve_from_json(const Json& j) {
    ObjectReader r(j, "");
    const std::string id = r.string("id");
    const long long dim = r.integer("dim");
    const std::string kind = r.string("kind");
    if (kind != "poly" && kind != "trig") throw ValidationError("'kind' must be poly or trig");
    const Json& coords = r.at("coordinates");
    if (!coords.is_array() || static_cast<long long>(coords.size()) != dim) {
        throw ValidationError("'coordinates' must list dim entries");
    }
    if (dim < 2) throw ValidationError("'dim' must be at least 2");
    std::vector<CoordinateFunction> fns;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const std::string where = "'coordinates[" + std::to_string(i) + "]'";
        if (kind == "poly") {
            fns.emplace_back(coefficient_array(coords[i], where));
            continue;
        }
        if (coords[i].is_array()) {
            fns.emplace_back(coefficient_array(coords[i], where));
            continue;
        }
        ObjectReader c(coords[i], "coordinates[" + std::to_string(i) + "]");
        std::vector<double> poly;
        if (c.has("poly")) poly = coefficient_array(c.at("poly"), where + ".poly");
        std::vector<TrigTerm> trig;
        if (c.has("trig")) {
            const Json& t = c.at("trig");
            if (!t.is_array()) throw ValidationError(where + ".trig must be an array");
            for (const Json& term : t) {
                const std::vector<double> v = coefficient_array(term, where + ".trig");
                if (v.size() != 3) throw ValidationError(where + ".trig entries are [frequency, cos, sin]");
                trig.push_back(TrigTerm{v[0], v[1], v[2]});
            }
        }
        c.finish();
        fns.emplace_back(std::move(poly), std::move(trig));
    }
    const std::vector<double> iv = r.numbers("interval");
    if (iv.size() != 2 || !(iv[0] < iv[1])) throw ValidationError("'interval' must be [lo, hi] with lo < hi");
    int max_order = 0;
    if (r.has("max_order")) max_order = static_cast<int>(r.integer("max_order"));
    r.finish();
    try {
        return Curve(id, std::move(fns), Interval{iv[0], iv[1]}, max_order);
    } catch (const DomainError& e) {
        throw ValidationError(std::string("invalid curve: ") + e.what());
    }
}

Curve load_curve(const std::filesystem::path& path) { return curve_from_json(parse_file(path)); }

Curve builtin_curve(const std::string& name) {
    const auto colon = name.find(':');
    const std::string base = name.substr(0, colon);
    int d = 0;
    if (colon != std::string::npos) {
        try {
            d = std::stoi(name.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("bad dimension in builtin curve '" + name + "'");
        }
    }
    if (base == "moment" && d >= 2) return moment_curve(d);
    if (base == "parabola" && d >= 2) return planar_parabola(d);
    if (base == "helix" && colon == std::string::npos) return helix();
    if (base == "circle" && colon == std::string::npos) return circle();
    throw ValidationError("unknown builtin curve '" + name + "'");
}

Json curve_to_json(const Curve& curve) {
    Json j;
    j["id"] = curve.id();
    j["dim"] = curve.dim();
    const bool poly = curve.kind() == CurveKind::polynomial;
    j["kind"] = poly ? "poly" : "trig";
    Json coords = Json::array();
    for (int i = 0; i < curve.dim(); ++i) {
        const CoordinateFunction& f = curve.coordinate(i);
        if (poly) {
            coords.push_back(f.poly());
            continue;
        }
        Json c;
        c["poly"] = f.poly();
        Json trig = Json::array();
        for (const TrigTerm& t : f.trig()) trig.push_back({t.frequency, t.cos_amplitude, t.sin_amplitude});
        c["trig"] = trig;
        coords.push_back(c);
    }
    j["coordinates"] = coords;
    j["interval"] = {curve.interval().lo, curve.interval().hi};
    j["max_order"] = curve.max_order();
    return j;
}

std::vector<double> RSchedule::resolve() const {
    if (!values.empty()) return values;
    if (j_min > j_max) throw ValidationError("R schedule needs j_min <= j_max");
    std::vector<double> out;
    for (int j = j_min; j <= j_max; ++j) out.push_back(std::ldexp(1.0, j));
    return out;
}

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    c.base_dir = base_dir;
    ObjectReader r(j, "");
    c.curve = r.string("curve");
    if (r.has("q")) {
        const Json& q = r.at("q");
        if (!q.is_array() || q.empty()) throw ValidationError("'q' must be a nonempty array");
        c.q.clear();
        for (const Json& x : q) {
            if (x.is_string()) {
                c.q.push_back(x.get<std::string>());
            } else if (x.is_number_integer()) {
                c.q.push_back(std::to_string(x.get<long long>()));
            } else {
                throw ValidationError("'q' entries must be integers or strings such as \"15/2\" or \"inf\"");
            }
        }
    }
    if (r.has("K")) c.K = static_cast<int>(r.integer("K"));
    if (r.has("degenerate")) c.degenerate = r.boolean("degenerate");
    if (r.has("R")) {
        ObjectReader s(r.at("R"), "R");
        if (s.has("j_min")) c.R.j_min = static_cast<int>(s.integer("j_min"));
        if (s.has("j_max")) c.R.j_max = static_cast<int>(s.integer("j_max"));
        if (s.has("values")) c.R.values = s.numbers("values");
        s.finish();
    }
    if (r.has("cutoff")) {
        ObjectReader s(r.at("cutoff"), "cutoff");
        if (s.has("center")) c.cutoff.center = s.number("center");
        if (s.has("half_width")) c.cutoff.half_width = s.number("half_width");
        if (s.has("family")) c.cutoff.family = cutoff_family_from_string(s.string("family"));
        if (s.has("amplitude")) c.cutoff.amplitude = s.number("amplitude");
        s.finish();
    }
    if (r.has("grid")) {
        ObjectReader s(r.at("grid"), "grid");
        if (s.has("kind")) c.grid.kind = s.string("kind");
        if (s.has("m_factor")) c.grid.m_factor = s.number("m_factor");
        if (s.has("m_min")) c.grid.m_min = static_cast<int>(s.integer("m_min"));
        if (s.has("axis")) c.grid.axis = s.numbers("axis");
        if (s.has("extra_levels")) c.grid.extra_levels = static_cast<int>(s.integer("extra_levels"));
        if (s.has("mc_scale")) c.grid.mc_scale = s.number("mc_scale");
        if (s.has("mc_cap")) c.grid.mc_cap = s.number("mc_cap");
        s.finish();
        const std::set<std::string> kinds{"default", "product", "graded", "monte-carlo"};
        if (!kinds.count(c.grid.kind)) throw ValidationError("unknown grid kind '" + c.grid.kind + "'");
    }
    if (r.has("tol")) c.tol = r.number("tol");
    if (r.has("seed")) {
        const long long s = r.integer("seed");
        if (s < 0) throw ValidationError("'seed' must be nonnegative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (r.has("workers")) c.workers = static_cast<int>(r.integer("workers"));
    if (r.has("output")) c.output = r.string("output");
    if (r.has("force_beta")) c.force_beta = r.number("force_beta");
    if (r.has("envelope")) {
        ObjectReader s(r.at("envelope"), "envelope");
        if (s.has("n")) c.envelope.n = static_cast<int>(s.integer("n"));
        if (s.has("R")) c.envelope.R = s.numbers("R");
        s.finish();
    }
    if (r.has("witness")) {
        ObjectReader s(r.at("witness"), "witness");
        WitnessConfig& w = c.witness;
        if (s.has("set")) w.set = s.string("set");
        if (w.set != "U" && w.set != "V" && w.set != "planar") {
            throw ValidationError("'witness.set' must be U, V or planar");
        }
        if (s.has("k")) w.k = static_cast<int>(s.integer("k"));
        if (s.has("t0")) w.t0 = s.number("t0");
        if (s.has("eps")) w.eps = s.number("eps");
        if (s.has("delta")) w.delta = s.number("delta");
        if (s.has("j")) w.j = s.integers("j");
        if (s.has("enforce_window")) w.enforce_window = s.boolean("enforce_window");
        if (s.has("R")) w.R = s.numbers("R");
        if (s.has("n")) {
            const long long n = s.integer("n");
            if (n < 1) throw ValidationError("'witness.n' must be positive");
            w.n = static_cast<std::size_t>(n);
        }
        if (s.has("max_verify")) {
            const long long n = s.integer("max_verify");
            if (n < 0) throw ValidationError("'witness.max_verify' must be nonnegative");
            w.max_verify = static_cast<std::size_t>(n);
        }
        if (s.has("cutoff_half_width")) w.cutoff_half_width = s.number("cutoff_half_width");
        if (s.has("planar_q")) w.planar_q = s.numbers("planar_q");
        s.finish();
    }
    r.finish();
    if (c.R.resolve().empty()) throw ValidationError("R schedule is empty");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(parse_file(path), path.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["curve"] = c.curve;
    j["q"] = c.q;
    if (c.K) j["K"] = *c.K;
    if (c.degenerate) j["degenerate"] = *c.degenerate;
    j["R"] = {{"j_min", c.R.j_min}, {"j_max", c.R.j_max}, {"values", c.R.values}};
    j["cutoff"] = {{"center", c.cutoff.center},
                   {"half_width", c.cutoff.half_width},
                   {"family", to_string(c.cutoff.family)},
                   {"amplitude", c.cutoff.amplitude}};
    j["grid"] = {{"kind", c.grid.kind},         {"m_factor", c.grid.m_factor},
                 {"m_min", c.grid.m_min},       {"axis", c.grid.axis},
                 {"extra_levels", c.grid.extra_levels}, {"mc_scale", c.grid.mc_scale},
                 {"mc_cap", c.grid.mc_cap}};
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    if (c.force_beta) j["force_beta"] = *c.force_beta;
    j["envelope"] = {{"n", c.envelope.n}, {"R", c.envelope.R}};
    const WitnessConfig& w = c.witness;
    Json wj = {{"set", w.set},
               {"k", w.k},
               {"t0", w.t0},
               {"eps", w.eps},
               {"delta", w.delta},
               {"j", w.j},
               {"enforce_window", w.enforce_window},
               {"R", w.R},
               {"n", w.n},
               {"max_verify", w.max_verify},
               {"planar_q", w.planar_q}};
    if (w.cutoff_half_width) wj["cutoff_half_width"] = *w.cutoff_half_width;
    j["witness"] = wj;
    return j;
}

Curve resolve_curve(const ExperimentConfig& c) {
    const std::string prefix = "builtin:";
    if (c.curve.rfind(prefix, 0) == 0) return builtin_curve(c.curve.substr(prefix.size()));
    std::filesystem::path p(c.curve);
    if (p.is_relative() && !c.base_dir.empty() && std::filesystem::exists(c.base_dir / p)) p = c.base_dir / p;
    return load_curve(p);
}

}  // namespace curvedecay
