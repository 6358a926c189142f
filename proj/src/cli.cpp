#include "curvedecay/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "curvedecay/asymptotics.hpp"
#include "curvedecay/config.hpp"
#include "curvedecay/decay.hpp"
#include "curvedecay/errors.hpp"
#include "curvedecay/parallel.hpp"
#include "curvedecay/report.hpp"
#include "curvedecay/theory.hpp"
#include "curvedecay/witness.hpp"

namespace curvedecay::cli {

namespace fs = std::filesystem;

namespace {

// Raised when a run completes but its hypothesis check fails.
struct StatisticalFailure {
    std::string message;
};

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool verbose = false;
    std::optional<int> witness_k;
};

struct Context {
    Globals g;
    std::ostream& out;
    std::ostream& err;

    void log(const std::string& msg) const {
        if (g.verbose) err << msg << '\n';
    }
};

fs::path output_dir(const Context& ctx, const std::string& from_config = {}) {
    if (!ctx.g.out.empty()) return ctx.g.out;
    if (!from_config.empty()) return from_config;
    if (const char* env = std::getenv("CURVEDECAY_OUT"); env && *env) return env;
    return "out";
}

ExperimentConfig require_config(const Context& ctx) {
    if (ctx.g.config.empty()) throw ValidationError("this subcommand needs --config PATH");
    ExperimentConfig c = load_config(ctx.g.config);
    if (ctx.g.seed) c.seed = *ctx.g.seed;
    if (ctx.g.workers) c.workers = *ctx.g.workers;
    return c;
}

int workers_of(const ExperimentConfig& c) { return c.workers > 0 ? c.workers : default_workers(); }

std::string slug(std::string s) {
    for (char& ch : s) {
        if (ch == '/' || ch == ' ' || ch == ':') ch = '_';
    }
    return s;
}

std::string prediction_text(const ExponentPrediction& p, bool degenerate) {
    std::ostringstream s;
    s << "d=" << p.d << " K=" << p.K << " q=" << p.q.str() << " degenerate=" << (degenerate ? 1 : 0)
      << " sigma=" << rational_str(p.sigma) << " beta=" << rational_str(p.beta)
      << " kstar=" << (p.k_over_q_branch ? std::string("K/q") : std::to_string(p.kstar));
    return s.str();
}

// K: configured, else the derivative rank over the cutoff support.
int infer_K(const ExperimentConfig& c, const Curve& curve) {
    if (c.K) {
        if (*c.K < 2 || *c.K > curve.dim()) throw ValidationError("'K' must satisfy 2 <= K <= d");
        return *c.K;
    }
    int K = minimum_derivative_rank(curve, Interval{c.cutoff.lo(), c.cutoff.hi()}, curve.dim());
    return std::max(2, K);
}

bool infer_degenerate(const ExperimentConfig& c, const Curve& curve, int K) {
    if (c.degenerate) return *c.degenerate;
    return curve.kind() == CurveKind::polynomial && curve.derivative_vanishes_identically(K + 1);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, ',')) {
        if (cell.empty()) continue;
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + cell + "'");
        }
    }
    return out;
}

// theory -------------------------------------------------------------------

struct TheoryArgs {
    int d = 0;
    int K = 0;
    std::vector<std::string> q;
    bool breakpoints = false;
    bool degenerate = false;
};

void cmd_theory(const Context& ctx, const TheoryArgs& a) {
    const int K = a.K > 0 ? a.K : a.d;
    if (a.d < 2 || K < 2 || K > a.d) throw ValidationError("theory needs 2 <= K <= d");
    if (a.q.empty() && !a.breakpoints) throw ValidationError("theory needs --q or --breakpoints");
    Json args = {{"command", "theory"}, {"d", a.d}, {"K", K}, {"q", a.q}, {"breakpoints", a.breakpoints},
                 {"degenerate", a.degenerate}};
    Provenance prov = Provenance::from(args);
    const fs::path dir = output_dir(ctx);
    if (!a.q.empty()) {
        CsvTable t({"d", "K", "q_num", "q_den", "sigma_num", "sigma_den", "kstar", "beta_num", "beta_den"});
        for (const auto& qs : a.q) {
            const QValue q = parse_q(qs);
            const ExponentPrediction p = predicted_model(a.d, K, q, a.degenerate);
            prov.predictions.push_back(prediction_text(p, a.degenerate));
            t.add({std::to_string(a.d), std::to_string(K), std::to_string(q.num()), std::to_string(q.den()),
                   std::to_string(p.sigma.numerator()), std::to_string(p.sigma.denominator()),
                   p.k_over_q_branch ? std::string("K/q") : std::to_string(p.kstar),
                   std::to_string(p.beta.numerator()), std::to_string(p.beta.denominator())});
            ctx.out << "sigma_" << K << "^" << a.d << "(" << q.str() << ") = " << rational_str(p.sigma)
                    << "  beta = " << rational_str(p.beta) << '\n';
        }
        write_text(dir / "theory.csv", t.render(&prov));
    }
    if (a.breakpoints) {
        const auto v = breakpoints(a.d, K);
        CsvTable t({"inv_q", "sigma", "inv_q_value", "sigma_value"});
        ctx.out << "breakpoints:";
        for (const auto& x : v) {
            t.add({rational_str(x.inv_q), rational_str(x.sigma), format_double(to_double(x.inv_q)),
                   format_double(to_double(x.sigma))});
            ctx.out << " (" << rational_str(x.inv_q) << ", " << rational_str(x.sigma) << ")";
        }
        ctx.out << '\n';
        write_text(dir / "breakpoints.csv", t.render(&prov));
        write_text(dir / "theory.svg", svg_theory(a.d, K, v));
    }
}

// gq -----------------------------------------------------------------------

void cmd_gq(const Context& ctx, std::optional<double> refine_R) {
    const ExperimentConfig c = require_config(ctx);
    const Curve curve = resolve_curve(c);
    const int K = infer_K(c, curve);
    const bool degenerate = infer_degenerate(c, curve, K);
    const Json frozen = config_to_json(c);
    const fs::path dir = output_dir(ctx, c.output);
    std::vector<double> qs;
    for (const auto& q : c.q) qs.push_back(parse_q(q).to_double());
    const auto Rs = c.R.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const auto series = compute_series(curve, c.cutoff, qs, Rs, c.grid, K, c.tol, workers_of(c));
    ctx.log("gq: " + std::to_string(elapsed(t0)) + " s");
    for (std::size_t i = 0; i < series.size(); ++i) {
        Provenance prov = Provenance::from(frozen);
        prov.predictions.push_back(prediction_text(predicted_model(curve.dim(), K, parse_q(c.q[i]), degenerate),
                                                   degenerate));
        if (refine_R) {
            const double delta =
                refinement_delta(curve, c.cutoff, qs[i], *refine_R, c.grid, c.tol, workers_of(c));
            prov.predictions.push_back("refinement R=" + format_double(*refine_R) +
                                       " relative_change=" + format_double(delta));
            if (delta > 0.01) ctx.err << "warning: grid under-resolved at R = " << *refine_R << '\n';
        }
        const fs::path file = dir / ("gq_" + slug(curve.id()) + "_q" + slug(c.q[i]) + ".csv");
        write_text(file, series_table(series[i], c.q[i]).render(&prov));
        std::size_t excluded = 0;
        for (const auto& r : series[i].rows) excluded += r.excluded ? 1 : 0;
        ctx.out << "wrote " << file.string() << " (" << series[i].rows.size() << " rows, " << excluded
                << " excluded)\n";
    }
}

// fit ----------------------------------------------------------------------

void cmd_fit(const Context& ctx, const std::string& path, std::optional<double> force_beta,
             std::optional<double> check_tolerance) {
    const CsvDocument doc = read_csv(path);
    const SeriesData s = series_from_csv(doc);
    std::vector<std::string> predictions;
    for (auto [it, end] = doc.meta.equal_range("prediction"); it != end; ++it) predictions.push_back(it->second);
    const DecayFit fit = fit_exponent(s.rows, force_beta);
    const Json j = fit_to_json(fit, s, predictions);
    const fs::path dir = output_dir(ctx);
    const std::string stem = fs::path(path).stem().string();
    write_text(dir / ("fit_" + stem + ".json"), j.dump(2) + "\n");
    write_text(dir / ("fit_" + stem + ".svg"), svg_fit(s, fit));
    ctx.out << "sigma_hat = " << format_double(fit.sigma_hat()) << "  beta_hat = " << format_double(fit.beta_hat())
            << "  rms_log2 = " << format_double(fit.free.residual_rms_log2) << '\n';
    ctx.out << "beta = 0 fit: sigma = " << format_double(fit.beta0.sigma)
            << "  rms_log2 = " << format_double(fit.beta0.residual_rms_log2) << '\n';
    if (fit.unreliable) throw StatisticalFailure{"more than 10% of rows excluded; fit unreliable"};
    if (check_tolerance) {
        const ExponentPrediction p = sigma(s.d, s.K, parse_q(s.q_text));
        const double target = to_double(p.sigma);
        if (std::abs(fit.sigma_hat() - target) > *check_tolerance) {
            throw StatisticalFailure{"sigma_hat " + format_double(fit.sigma_hat()) + " differs from " +
                                     rational_str(p.sigma) + " by more than " + format_double(*check_tolerance)};
        }
    }
}

// envelope -----------------------------------------------------------------

void cmd_envelope(const Context& ctx) {
    const ExperimentConfig c = require_config(ctx);
    const Curve curve = resolve_curve(c);
    const auto t0 = std::chrono::steady_clock::now();
    const EnvelopeReport rep =
        envelope_check(curve, c.cutoff, c.envelope.R, c.envelope.n, c.grid, c.tol, workers_of(c));
    ctx.log("envelope: " + std::to_string(elapsed(t0)) + " s");
    Provenance prov = Provenance::from(config_to_json(c));
    prov.predictions.push_back("C stable within factor 2 across R");
    CsvTable t({"R", "C", "resolved_fraction", "level_measures"});
    for (const auto& r : rep.rows) {
        std::string levels;
        for (std::size_t i = 0; i < r.level_measure.size(); ++i) {
            if (i) levels += ';';
            levels += format_double(r.level_measure[i]);
        }
        t.add({format_double(r.R), format_double(r.C), format_double(r.resolved_fraction), levels});
    }
    const fs::path file = output_dir(ctx, c.output) / ("envelope_" + slug(curve.id()) + ".csv");
    write_text(file, t.render(&prov));
    ctx.out << "C = " << format_double(rep.C) << "  spread = " << format_double(rep.spread) << '\n';
    if (!rep.stable) throw StatisticalFailure{"envelope constant not stable within factor 2"};
}


// witness ------------------------------------------------------------------

double spread(const std::vector<double>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

void witness_planar(const Context& ctx, const ExperimentConfig& c, const Curve& curve) {
    Provenance prov = Provenance::from(config_to_json(c));
    CsvTable t({"q", "R", "l", "contribution", "measure", "nodes"});
    Json summary = Json::array();
    std::vector<std::string> failures;
    for (double R : c.witness.R) {
        const SphericalGrid grid = make_grid(c.grid, curve.dim(), R);
        for (double q : c.witness.planar_q) {
            const PlanarScan s = planar_scan(curve, c.cutoff, q, R, grid, c.tol, workers_of(c));
            for (const auto& sh : s.shells) {
                t.add({format_double(q), format_double(R), std::to_string(sh.l), format_double(sh.contribution),
                       format_double(sh.measure), std::to_string(sh.nodes)});
            }
            const bool at_breakpoint = std::abs(q - to_double(qk(s.k))) < 1e-12;
            // Flat within a factor 4 at q = q_k; otherwise geometric with the
            // predicted sign and at least half the predicted rate.
            const bool ok = at_breakpoint ? s.ratio <= 4.0
                                          : s.slope * s.predicted_slope > 0.0 &&
                                                std::abs(s.slope) >= 0.5 * std::abs(s.predicted_slope);
            summary.push_back({{"q", q},
                               {"R", R},
                               {"k", s.k},
                               {"l_window", {s.l_lo, s.l_hi}},
                               {"ratio", s.ratio},
                               {"slope_log2", s.slope},
                               {"predicted_slope_log2", s.predicted_slope},
                               {"total", s.total},
                               {"pass", ok}});
            ctx.out << "planar q=" << format_double(q) << " R=" << format_double(R) << ": ratio "
                    << format_double(s.ratio) << ", slope " << format_double(s.slope) << " (predicted "
                    << format_double(s.predicted_slope) << ")" << (ok ? "" : "  FAIL") << '\n';
            if (!ok) failures.push_back("q=" + format_double(q));
        }
    }
    const fs::path dir = output_dir(ctx, c.output);
    write_text(dir / ("planar_" + slug(curve.id()) + ".csv"), t.render(&prov));
    write_text(dir / ("planar_" + slug(curve.id()) + "_summary.json"),
               Json{{"config_hash", prov.hash}, {"version", artifact_version()}, {"scans", summary}}.dump(2) + "\n");
    if (!failures.empty()) throw StatisticalFailure{"planar shell pattern not as predicted"};
}

void cmd_witness(const Context& ctx) {
    ExperimentConfig c = require_config(ctx);
    if (ctx.g.witness_k) c.witness.k = *ctx.g.witness_k;
    const Curve curve = resolve_curve(c);
    const WitnessConfig& w = c.witness;
    if (w.set == "planar") return witness_planar(ctx, c, curve);
    if (w.R.empty()) throw ValidationError("'witness.R' is empty");
    CutoffSpec cutoff = default_witness_cutoff(curve, w.t0);
    if (w.cutoff_half_width) cutoff.half_width = *w.cutoff_half_width;
    const int k = w.k;
    const int d = curve.dim();
    Provenance prov = Provenance::from(config_to_json(c));
    const double rate_exp = -static_cast<double>(k * k - k - 2) / (2.0 * k);
    prov.predictions.push_back("rate_slope_logR=" + format_double(rate_exp));
    if (w.set == "V") {
        prov.predictions.push_back("rate_slope_j_log2=" + format_double((k * k - k + 2) / (4.0 * (k - 1))));
    }
    prov.predictions.push_back("min_scaled_FR stable within factor 2; cutoff half_width=" +
                               format_double(cutoff.half_width));
    CsvTable t({"k", "d", "R", "epsilon_or_delta", "j", "n", "accepted", "rate", "stderr", "measure",
                "min_scaled_FR"});
    struct Row {
        double R;
        int j;
        double rate;
        double min_scaled;
    };
    std::vector<Row> rows;
    bool empty = false;
    const int workers = workers_of(c);
    auto record = [&](double R, std::optional<int> j, const SampleReport& rep) {
        double min_scaled = std::numeric_limits<double>::quiet_NaN();
        if (!rep.samples.empty()) {
            const std::size_t m = std::min(rep.samples.size(), w.max_verify > 0 ? w.max_verify : rep.samples.size());
            const std::vector<WitnessSample> subset(rep.samples.begin(), rep.samples.begin() + m);
            min_scaled = verify_lower(curve, cutoff, subset, R, k, c.tol, workers).min_scaled;
            rows.push_back({R, j.value_or(0), rep.rate.fraction, min_scaled});
        } else {
            empty = true;
        }
        t.add({std::to_string(k), std::to_string(d), format_double(R),
               format_double(w.set == "U" ? w.eps : w.delta), j ? std::to_string(*j) : std::string(),
               std::to_string(rep.n), std::to_string(rep.samples.size()), format_double(rep.rate.fraction),
               format_double(rep.rate.std_error), format_double(rep.measure), format_double(min_scaled)});
        ctx.out << "R=" << format_double(R) << (j ? " j=" + std::to_string(*j) : std::string())
                << " accepted=" << rep.samples.size() << "/" << rep.n << " rate=" << format_double(rep.rate.fraction)
                << " min_scaled_FR=" << format_double(min_scaled) << '\n';
    };
    for (double R : w.R) {
        if (w.set == "U") {
            record(R, std::nullopt, sample_U(curve, w.t0, k, w.eps, R, w.n, c.seed, workers));
            continue;
        }
        for (int j : w.j) {
            record(R, j, sample_V(curve, w.t0, k, w.delta, j, R, w.n, c.seed, w.enforce_window, workers));
        }
    }
    Json summary = {{"config_hash", prov.hash}, {"version", artifact_version()}, {"set", w.set}, {"k", k}, {"d", d}};
    std::vector<std::string> failures;
    if (empty) failures.push_back("zero acceptances");
    // Fixed j: rate slope in log R and spread of the scaled minimum across R.
    Json by_j = Json::array();
    for (int j : w.set == "U" ? std::vector<int>{0} : w.j) {
        std::vector<double> x, y, mins;
        for (const Row& r : rows) {
            if (r.j != j) continue;
            x.push_back(std::log(r.R));
            y.push_back(std::log(r.rate));
            mins.push_back(r.min_scaled);
        }
        if (x.size() < 2) continue;
        const double slope = fit_line(x, y).slope;
        const double s = spread(mins);
        Json e = {{"rate_slope_logR", slope}, {"predicted_rate_slope_logR", rate_exp}, {"min_scaled_spread", s}};
        if (w.set == "V") e["j"] = j;
        by_j.push_back(e);
        ctx.out << (w.set == "V" ? "j=" + std::to_string(j) + ": " : std::string()) << "rate slope "
                << format_double(slope) << " (predicted " << format_double(rate_exp) << "), min_scaled_FR spread "
                << format_double(s) << '\n';
        if (std::abs(slope - rate_exp) > 0.15) failures.push_back("rate slope in log R");
        if (s > 2.0) failures.push_back("lower bound spread");
    }
    summary["across_R"] = by_j;
    // Fixed R: rate slope in j (V only).
    if (w.set == "V") {
        const double pred = (k * k - k + 2) / (4.0 * (k - 1));
        Json by_R = Json::array();
        for (double R : w.R) {
            std::vector<double> x, y;
            for (const Row& r : rows) {
                if (r.R != R) continue;
                x.push_back(r.j);
                y.push_back(std::log2(r.rate));
            }
            if (x.size() < 2) continue;
            const double slope = fit_line(x, y).slope;
            by_R.push_back({{"R", R}, {"rate_slope_j_log2", slope}, {"predicted_rate_slope_j_log2", pred}});
            ctx.out << "R=" << format_double(R) << ": rate slope in j " << format_double(slope) << " (predicted "
                    << format_double(pred) << ")\n";
            if (std::abs(slope - pred) > 0.3) failures.push_back("rate slope in j");
        }
        summary["across_j"] = by_R;
    }
    summary["pass"] = failures.empty();
    const fs::path dir = output_dir(ctx, c.output);
    const std::string stem = "witness_" + slug(curve.id()) + "_" + w.set;
    write_text(dir / (stem + ".csv"), t.render(&prov));
    write_text(dir / (stem + "_summary.json"), summary.dump(2) + "\n");
    if (!failures.empty()) {
        std::string msg = "witness checks failed:";
        for (const auto& f : failures) msg += " " + f + ";";
        throw StatisticalFailure{msg};
    }
}

// airy ---------------------------------------------------------------------

void cmd_airy(const Context& ctx, const std::string& taus_text, const std::string& ts_text) {
    const auto taus = parse_list(taus_text);
    const auto ts = parse_list(ts_text);
    Provenance prov = Provenance::from(Json{{"command", "airy"}, {"tau", taus}, {"t", ts}});
    prov.predictions.push_back("|Ai(-t) - leading| / (pi^{-1/2} t^{-1/4}) <= 2 t^{-3/4}");
    CsvTable values({"tau", "value", "method", "error", "cross_difference"});
    for (double tau : taus) {
        const AiryValue v = airy(tau);
        values.add({format_double(tau), format_double(v.value),
                    v.method == AiryMethod::series ? "series" : "asymptotic", format_double(v.error),
                    format_double(v.cross_difference)});
    }
    CsvTable lead({"t", "airy", "leading", "relative_deviation", "bound", "pass"});
    bool ok = true;
    for (double t : ts) {
        const double a = airy(-t).value;
        const double l = airy_leading(t);
        const double rel = std::abs(a - l) * std::sqrt(M_PI) * std::pow(t, 0.25);
        const double bound = 2.0 * std::pow(t, -0.75);
        const bool pass = rel <= bound;
        ok = ok && pass;
        lead.add({format_double(t), format_double(a), format_double(l), format_double(rel), format_double(bound),
                  pass ? "1" : "0"});
        ctx.out << "t=" << format_double(t) << " relative deviation " << format_double(rel) << " bound "
                << format_double(bound) << (pass ? "" : "  FAIL") << '\n';
    }
    const fs::path dir = output_dir(ctx);
    write_text(dir / "airy_values.csv", values.render(&prov));
    write_text(dir / "airy_leading.csv", lead.render(&prov));
    if (!ok) throw StatisticalFailure{"Airy leading-term deviation above bound"};
}

// lemma51 ------------------------------------------------------------------

void cmd_lemma51(const Context& ctx, const std::string& ks_text, const std::string& lambdas_text,
                 const std::string& xi_text, const std::string& g_text, double h, const std::string& family) {
    std::vector<int> ks;
    for (double k : parse_list(ks_text)) ks.push_back(static_cast<int>(k));
    const auto lambdas = parse_list(lambdas_text);
    const auto xi = parse_list(xi_text);
    const auto g = parse_list(g_text);
    const CutoffSpec cutoff{0.0, h, cutoff_family_from_string(family), 1.0};
    Provenance prov = Provenance::from(Json{{"command", "lemma51"}, {"k", ks}, {"lambda", lambdas}, {"xi", xi},
                                            {"g", g}, {"h", h}, {"family", family}});
    CsvTable t({"k", "lambda", "re_I", "im_I", "re_leading", "im_leading", "residual", "envelope", "resolved"});
    CsvTable s({"k", "delta", "A0", "A1", "fitted_order", "required_order", "fitted_constant", "pass"});
    bool ok = true;
    for (int k : ks) {
        std::vector<double> xk(xi.begin(), xi.begin() + std::min<std::size_t>(xi.size(), std::max(0, k - 2)));
        const Lemma51Report rep = check_lemma51(k, lambdas, xk, g, cutoff);
        for (const auto& r : rep.rows) {
            t.add({std::to_string(k), format_double(r.lambda), format_double(r.integral.real()),
                   format_double(r.integral.imag()), format_double(r.leading.real()),
                   format_double(r.leading.imag()), format_double(r.residual), format_double(r.envelope),
                   r.resolved ? "1" : "0"});
        }
        s.add({std::to_string(k), format_double(rep.delta), format_double(rep.A0), format_double(rep.A1),
               format_double(rep.fitted_order), format_double(rep.required_order),
               format_double(rep.fitted_constant), rep.passes ? "1" : "0"});
        ctx.out << "k=" << k << " fitted order " << format_double(rep.fitted_order) << " required "
                << format_double(rep.required_order) << " - 0.1" << (rep.passes ? "" : "  FAIL") << '\n';
        ok = ok && rep.passes;
    }
    const fs::path dir = output_dir(ctx);
    write_text(dir / "lemma51.csv", t.render(&prov));
    write_text(dir / "lemma51_summary.csv", s.render(&prov));
    if (!ok) throw StatisticalFailure{"residual decay order below requirement"};
}

// lemma52 ------------------------------------------------------------------

void cmd_lemma52(const Context& ctx, const std::string& lambdas_text, const std::string& thetas_text,
                 const std::vector<std::string>& g_texts, double eps, double max_constant) {
    const auto lambdas = parse_list(lambdas_text);
    const auto thetas = parse_list(thetas_text);
    std::vector<std::vector<double>> gs;
    for (const auto& g : g_texts) gs.push_back(parse_list(g));
    if (gs.empty()) gs.push_back({});
    Provenance prov = Provenance::from(Json{{"command", "lemma52"}, {"lambda", lambdas}, {"theta", thetas},
                                            {"g", gs}, {"eps", eps}, {"max_constant", max_constant}});
    const Lemma52Summary sum = check_lemma52_grid(lambdas, thetas, gs, eps);
    CsvTable t({"g_index", "lambda", "theta", "re_J", "im_J", "airy_model", "cosine_model", "E1", "E2", "envelope",
                "resolved"});
    std::size_t i = 0;
    const std::size_t per_g = lambdas.size() * thetas.size();
    for (const auto& r : sum.rows) {
        t.add({std::to_string(i++ / per_g), format_double(r.lambda), format_double(r.theta), format_double(r.J.real()),
               format_double(r.J.imag()), format_double(r.airy_model), format_double(r.cosine_model),
               format_double(r.E1), format_double(r.E2), format_double(r.envelope), r.resolved ? "1" : "0"});
    }
    write_text(output_dir(ctx) / "lemma52.csv", t.render(&prov));
    ctx.out << "fitted constant " << format_double(sum.fitted_constant) << " (limit " << format_double(max_constant)
            << ")\n";
    if (!sum.all_resolved) throw StatisticalFailure{"unresolved quadrature in the modified Airy grid"};
    if (sum.fitted_constant > max_constant) throw StatisticalFailure{"fitted constant above limit"};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fourier decay of curve measures: exponents, fits, asymptotics and witness sets", "curvedecay"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", artifact_version());
    Globals g;
    app.add_option("--config", g.config, "Experiment config (JSON)");
    app.add_option("--out", g.out, "Output directory (default: $CURVEDECAY_OUT or ./out)");
    app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { g.seed = s; }, "Random seed");
    app.add_option_function<int>("--workers", [&](const int& w) { g.workers = w; }, "Worker threads")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", g.verbose, "Timing and progress on stderr");

    TheoryArgs ta;
    auto* theory = app.add_subcommand("theory", "Exact exponent sigma_K^d(q), breakpoints and log exponents");
    theory->add_option("--d", ta.d, "Dimension")->required();
    theory->add_option("--K", ta.K, "Independent derivatives (default d)");
    theory->add_option("--q", ta.q, "Exponent(s): integer, p/q or inf");
    theory->add_flag("--breakpoints", ta.breakpoints, "Emit the breakpoint polyline and SVG");
    theory->add_flag("--degenerate", ta.degenerate, "gamma^{(K+1)} vanishes identically");

    std::optional<double> refine_R;
    auto* gq = app.add_subcommand("gq", "G_q(R) series from a config");
    gq->add_option_function<double>("--refine-check", [&](const double& r) { refine_R = r; },
                                    "Compare grids m and 2m at this R");

    std::string series_path;
    std::optional<double> force_beta, check_tol;
    auto* fit = app.add_subcommand("fit", "Fit c R^-sigma (log R)^beta to a series CSV");
    fit->add_option("series", series_path, "Series CSV from gq")->required()->check(CLI::ExistingFile);
    fit->add_option_function<double>("--force-beta", [&](const double& b) { force_beta = b; }, "Fix beta");
    fit->add_option_function<double>("--check", [&](const double& t) { check_tol = t; },
                                     "Exit 3 when |sigma_hat - sigma| exceeds this");

    auto* envelope = app.add_subcommand("envelope", "Pointwise envelope constant from a config");

    auto* witness = app.add_subcommand("witness", "Witness-set sampling and lower bounds from a config");
    witness->add_option_function<int>("--k", [&](const int& k) { g.witness_k = k; }, "Override witness.k");

    std::string taus = "-100,-50,-25,-20,-10,-7,-6,-5,-2.338107410459767,-1,0,1,2,5,10";
    std::string ts = "5,10,20,50";
    auto* airy_cmd = app.add_subcommand("airy", "Airy function values and leading-term check");
    airy_cmd->add_option("--tau", taus, "Comma-separated arguments");
    airy_cmd->add_option("--t", ts, "Comma-separated t for the Ai(-t) leading-term check");

    std::string ks = "2,3,4,5", lambdas = "1e2,1e3,1e4,1e5,1e6", xi, gtext, family = "bump";
    double h = 0.1;
    auto* l51 = app.add_subcommand("lemma51", "Perturbed stationary-phase asymptotics");
    l51->add_option("--k", ks, "Comma-separated orders");
    l51->add_option("--lambda", lambdas, "Comma-separated lambda values");
    l51->add_option("--xi", xi, "Scaled lower coefficients xi_1..xi_{k-2}");
    l51->add_option("--g", gtext, "Perturbation polynomial coefficients");
    l51->add_option("--half-width", h, "Cutoff half-width");
    l51->add_option("--family", family, "Cutoff family: bump, cosine-window, plateau");

    std::string lambdas52 = "1e3,1e4,1e5", thetas = "0.003,0.01,0.03";
    std::vector<std::string> g52{"0", "0.1"};
    double eps = 0.5, max_constant = 50.0;
    auto* l52 = app.add_subcommand("lemma52", "Modified Airy integral against its models");
    l52->add_option("--lambda", lambdas52, "Comma-separated lambda values");
    l52->add_option("--theta", thetas, "Comma-separated theta values");
    l52->add_option("--g", g52, "Perturbation coefficients, one comma list per option");
    l52->add_option("--eps", eps, "Plateau cutoff half-width");
    l52->add_option("--max-constant", max_constant, "Exit 3 above this fitted constant");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    Context ctx{g, out, err};
    try {
        if (*theory) {
            cmd_theory(ctx, ta);
        } else if (*gq) {
            cmd_gq(ctx, refine_R);
        } else if (*fit) {
            cmd_fit(ctx, series_path, force_beta, check_tol);
        } else if (*envelope) {
            cmd_envelope(ctx);
        } else if (*witness) {
            cmd_witness(ctx);
        } else if (*airy_cmd) {
            cmd_airy(ctx, taus, ts);
        } else if (*l51) {
            cmd_lemma51(ctx, ks, lambdas, xi, gtext, h, family);
        } else if (*l52) {
            cmd_lemma52(ctx, lambdas52, thetas, g52, eps, max_constant);
        }
    } catch (const StatisticalFailure& f) {
        err << "check failed: " << f.message << '\n';
        return kExitStatistical;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DiagnosticError& e) {
        err << "diagnostic error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const CapabilityError& e) {
        err << "capability error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DegeneracyError& e) {
        err << "degeneracy error at order " << e.order() << ": " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("curvedecay");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace curvedecay::cli
