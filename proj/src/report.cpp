#include "curvedecay/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "curvedecay/errors.hpp"

#ifndef CURVEDECAY_VERSION
#define CURVEDECAY_VERSION "unknown"
#endif

namespace curvedecay {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const Json& config) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

std::string artifact_version() { return CURVEDECAY_VERSION; }

Provenance Provenance::from(const Json& config) {
    Provenance p;
    p.config = config;
    p.hash = config_hash(config);
    return p;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != columns_.size()) throw DomainError("CSV row width differs from the header");
    rows_.push_back(std::move(row));
}

namespace {

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string CsvTable::render(const Provenance* provenance) const {
    std::string out;
    if (provenance) {
        out += "# version " + artifact_version() + "\n";
        out += "# config_hash " + provenance->hash + "\n";
        if (!provenance->config.is_null()) out += "# config " + provenance->config.dump() + "\n";
        for (const auto& p : provenance->predictions) out += "# prediction " + p + "\n";
    }
    out += join(columns_) + "\n";
    for (const auto& r : rows_) out += join(r) + "\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

int CsvDocument::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvDocument parse_csv(const std::string& text) {
    CsvDocument doc;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(line.find_first_not_of("# ") == std::string::npos
                                                     ? line.size()
                                                     : line.find_first_not_of("# "));
            const auto sp = body.find(' ');
            doc.meta.emplace(body.substr(0, sp), sp == std::string::npos ? "" : body.substr(sp + 1));
            continue;
        }
        if (!header) {
            doc.columns = split(line);
            header = true;
            continue;
        }
        auto row = split(line);
        if (row.size() != doc.columns.size()) throw ValidationError("CSV row width differs from the header");
        doc.rows.push_back(std::move(row));
    }
    if (!header) throw ValidationError("CSV has no header line");
    return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return parse_csv(s.str());
}

CsvTable series_table(const DecaySeries& series, const std::string& q_text) {
    CsvTable t({"curve_id", "d", "K", "q", "R", "Gq", "m", "resolved_fraction"});
    for (const DecayRow& r : series.rows) {
        t.add({series.curve_id, std::to_string(series.d), std::to_string(series.K), q_text, format_double(r.R),
               format_double(r.Gq), std::to_string(r.m), format_double(r.resolved_fraction)});
    }
    return t;
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("bad " + what + " value '" + s + "'");
    }
}

}  // namespace

SeriesData series_from_csv(const CsvDocument& doc) {
    const char* needed[] = {"curve_id", "d", "K", "q", "R", "Gq", "m", "resolved_fraction"};
    for (const char* c : needed) {
        if (doc.column(c) < 0) throw ValidationError(std::string("series CSV lacks column '") + c + "'");
    }
    if (doc.rows.empty()) throw ValidationError("series CSV has no rows");
    SeriesData s;
    const auto& first = doc.rows.front();
    s.curve_id = first[doc.column("curve_id")];
    s.d = static_cast<int>(parse_number(first[doc.column("d")], "d"));
    s.K = static_cast<int>(parse_number(first[doc.column("K")], "K"));
    s.q_text = first[doc.column("q")];
    s.q = parse_q(s.q_text).to_double();
    for (const auto& row : doc.rows) {
        if (row[doc.column("q")] != s.q_text || row[doc.column("curve_id")] != s.curve_id) {
            throw ValidationError("series CSV mixes curves or q values");
        }
        DecayRow r;
        r.R = parse_number(row[doc.column("R")], "R");
        r.Gq = parse_number(row[doc.column("Gq")], "Gq");
        r.m = static_cast<int>(parse_number(row[doc.column("m")], "m"));
        r.resolved_fraction = parse_number(row[doc.column("resolved_fraction")], "resolved_fraction");
        r.excluded = r.resolved_fraction < 1.0;
        s.rows.push_back(r);
    }
    const auto it = doc.meta.find("config_hash");
    if (it != doc.meta.end()) s.config_hash = it->second;
    return s;
}

namespace {

Json model_json(const ModelFit& m) {
    return {{"sigma", m.sigma},
            {"beta", m.beta},
            {"amplitude", m.amplitude},
            {"residual_rms", m.residual_rms},
            {"residual_rms_log2", m.residual_rms_log2},
            {"aic", m.aic}};
}

}  // namespace

Json fit_to_json(const DecayFit& fit, const SeriesData& series, const std::vector<std::string>& predictions) {
    Json j;
    j["version"] = artifact_version();
    j["series_config_hash"] = series.config_hash;
    j["curve_id"] = series.curve_id;
    j["d"] = series.d;
    j["K"] = series.K;
    j["q"] = series.q_text;
    j["prediction"] = predictions;
    j["sigma_hat"] = fit.sigma_hat();
    j["beta_hat"] = fit.beta_hat();
    j["beta_forced"] = fit.beta_forced;
    j["amplitude"] = fit.free.amplitude;
    j["residual"] = {{"rms", fit.free.residual_rms}, {"rms_log2", fit.free.residual_rms_log2}};
    j["window"] = {{"R_min", fit.R_min}, {"R_max", fit.R_max}, {"used", fit.used}, {"excluded", fit.excluded}};
    j["unreliable"] = fit.unreliable;
    j["model_comparison"] = {{"free", model_json(fit.free)},
                             {"beta0", model_json(fit.beta0)},
                             {"free_residual_smaller", fit.free_residual_smaller},
                             {"log_model_preferred_by_aic", fit.log_model_preferred}};
    return j;
}

namespace {

struct Plot {
    double x0, x1, y0, y1;
    static constexpr double W = 640, H = 480, L = 70, Rm = 20, T = 30, B = 60;

    double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - Rm); }
    double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (f * mag >= raw) return f * mag;
    }
    return 10.0 * mag;
}

std::string frame(const Plot& p, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Plot::W << "\" height=\"" << Plot::H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << Plot::W / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "<line x1=\"" << num(p.px(p.x0)) << "\" y1=\"" << num(p.py(p.y0)) << "\" x2=\"" << num(p.px(p.x1))
      << "\" y2=\"" << num(p.py(p.y0)) << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << num(p.px(p.x0)) << "\" y1=\"" << num(p.py(p.y0)) << "\" x2=\"" << num(p.px(p.x0))
      << "\" y2=\"" << num(p.py(p.y1)) << "\" stroke=\"black\"/>\n";
    const double sx = nice_step(p.x1 - p.x0), sy = nice_step(p.y1 - p.y0);
    for (double x = std::ceil(p.x0 / sx) * sx; x <= p.x1 + 1e-9 * sx; x += sx) {
        s << "<line x1=\"" << num(p.px(x)) << "\" y1=\"" << num(p.py(p.y0)) << "\" x2=\"" << num(p.px(x))
          << "\" y2=\"" << num(p.py(p.y0) + 5) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(p.px(x)) << "\" y=\"" << num(p.py(p.y0) + 18) << "\" text-anchor=\"middle\">"
          << tick_label(x) << "</text>\n";
    }
    for (double y = std::ceil(p.y0 / sy) * sy; y <= p.y1 + 1e-9 * sy; y += sy) {
        s << "<line x1=\"" << num(p.px(p.x0) - 5) << "\" y1=\"" << num(p.py(y)) << "\" x2=\"" << num(p.px(p.x0))
          << "\" y2=\"" << num(p.py(y)) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(p.px(p.x0) - 8) << "\" y=\"" << num(p.py(y) + 4) << "\" text-anchor=\"end\">"
          << tick_label(y) << "</text>\n";
    }
    s << "<text x=\"" << num((p.px(p.x0) + p.px(p.x1)) / 2) << "\" y=\"" << Plot::H - 15
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    s << "<text x=\"18\" y=\"" << num((p.py(p.y0) + p.py(p.y1)) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num((p.py(p.y0) + p.py(p.y1)) / 2) << ")\">" << ylabel << "</text>\n";
    return s.str();
}

}  // namespace

std::string svg_theory(int d, int K, const std::vector<Vertex>& vertices) {
    if (vertices.empty()) throw DomainError("no vertices to plot");
    double ymax = 0.0;
    for (const auto& v : vertices) ymax = std::max(ymax, to_double(v.sigma));
    Plot p{0.0, 0.5, 0.0, std::max(0.1, 1.1 * ymax)};
    std::ostringstream s;
    s << frame(p, "sigma_K^d(q), d = " + std::to_string(d) + ", K = " + std::to_string(K), "1/q", "sigma");
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i) s << ' ';
        s << num(p.px(to_double(vertices[i].inv_q))) << ',' << num(p.py(to_double(vertices[i].sigma)));
    }
    s << "\"/>\n";
    for (const auto& v : vertices) {
        s << "<circle cx=\"" << num(p.px(to_double(v.inv_q))) << "\" cy=\"" << num(p.py(to_double(v.sigma)))
          << "\" r=\"3.5\" fill=\"#1f77b4\"><title>(" << rational_str(v.inv_q) << ", " << rational_str(v.sigma)
          << ")</title></circle>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string svg_fit(const SeriesData& series, const DecayFit& fit) {
    std::vector<double> xs, ys;
    for (const auto& r : series.rows) {
        if (r.Gq > 0.0 && r.R > 0.0) {
            xs.push_back(std::log2(r.R));
            ys.push_back(std::log2(r.Gq));
        }
    }
    if (xs.empty()) throw DomainError("no positive rows to plot");
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const double padx = std::max(0.5, 0.05 * (*xmax - *xmin)), pady = std::max(0.25, 0.1 * (*ymax - *ymin));
    Plot p{*xmin - padx, *xmax + padx, *ymin - pady, *ymax + pady};
    std::ostringstream s;
    s << frame(p, "G_q(R), " + series.curve_id + ", q = " + series.q_text, "log2 R", "log2 G_q");
    auto curve = [&](const ModelFit& m, const std::string& colour, const std::string& dash) {
        s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"" << dash << " points=\"";
        const int n = 100;
        const double a = std::max(std::log2(std::exp(1.0)) + 1e-9, fit.R_min > 0 ? std::log2(fit.R_min) : p.x0);
        const double b = fit.R_max > 0 ? std::log2(fit.R_max) : p.x1;
        for (int i = 0; i <= n; ++i) {
            const double x = a + (b - a) * i / n;
            const double R = std::exp2(x);
            const double g = m.amplitude * std::pow(R, -m.sigma) * std::pow(std::log(R), m.beta);
            if (i) s << ' ';
            s << num(p.px(x)) << ',' << num(p.py(std::log2(g)));
        }
        s << "\"/>\n";
    };
    curve(fit.free, "#d62728", "");
    curve(fit.beta0, "#2ca02c", " stroke-dasharray=\"6,4\"");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s << "<circle cx=\"" << num(p.px(xs[i])) << "\" cy=\"" << num(p.py(ys[i])) << "\" r=\"3\" fill=\"black\"/>\n";
    }
    char legend[160];
    std::snprintf(legend, sizeof legend, "free: sigma %.4f beta %.4f; beta = 0: sigma %.4f", fit.free.sigma,
                  fit.free.beta, fit.beta0.sigma);
    s << "<text x=\"" << Plot::L + 10 << "\" y=\"" << Plot::T + 15 << "\">" << legend << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace curvedecay
