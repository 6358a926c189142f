#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvedecay/cli.hpp"
#include "curvedecay/config.hpp"
#include "curvedecay/errors.hpp"
#include "curvedecay/report.hpp"

using namespace curvedecay;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    Run r;
    r.code = cli::run(args, o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("curvedecay_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("theory subcommand examples") {
    const fs::path dir = scratch("theory");
    Run r = run({"--out", dir.string(), "theory", "--d", "3", "--K", "3", "--q", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("= 3/7") != std::string::npos);
    r = run({"--out", dir.string(), "theory", "--d", "4", "--K", "3", "--q", "9"});
    CHECK(r.code == 0);
    CHECK(r.out.find("= 1/3") != std::string::npos);

    r = run({"--out", dir.string(), "theory", "--d", "10", "--K", "10", "--breakpoints"});
    CHECK(r.code == 0);
    const CsvDocument doc = read_csv(dir / "breakpoints.csv");
    REQUIRE(doc.rows.size() == 10);
    const int iq = doc.column("inv_q"), sg = doc.column("sigma");
    for (int k = 1; k <= 9; ++k) {
        const int qk = (k * k + k + 2) / 2;
        const int g = std::gcd(k, qk);
        CHECK(doc.rows[k - 1][iq] == "1/" + std::to_string(qk));
        CHECK(doc.rows[k - 1][sg] == std::to_string(k / g) + "/" + std::to_string(qk / g));
    }
    CHECK(doc.rows[9][iq] == "0");
    CHECK(doc.rows[9][sg] == "1/10");
    const std::string svg = slurp(dir / "theory.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("validation failures exit with 2") {
    const fs::path dir = scratch("bad");
    CHECK(run({"--out", dir.string(), "theory", "--d", "1"}).code == 2);
    CHECK(run({"--out", dir.string(), "theory", "--d", "3", "--K", "4", "--q", "2"}).code == 2);
    CHECK(run({"--out", dir.string(), "theory", "--d", "3", "--q", "0.5"}).code == 2);
    CHECK(run({"--out", dir.string(), "theory", "--d", "x"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--out", dir.string(), "gq"}).code == 2);
    CHECK(run({"--out", dir.string(), "--config", (dir / "missing.json").string(), "gq"}).code == 2);
    spit(dir / "unknown.json", R"({"curve": "builtin:helix", "colour": 1})");
    CHECK(run({"--out", dir.string(), "--config", (dir / "unknown.json").string(), "gq"}).code == 2);
    spit(dir / "nested.json", R"({"curve": "builtin:helix", "grid": {"kind": "product", "m": 3}})");
    CHECK(run({"--out", dir.string(), "--config", (dir / "nested.json").string(), "gq"}).code == 2);
    CHECK(run({"--workers", "0", "theory", "--d", "3", "--q", "2"}).code == 2);
    CHECK(run({"--version"}).code == 0);
}

TEST_CASE("fit on a synthetic series recovers the exponent exactly") {
    const fs::path dir = scratch("fit");
    std::string csv = "curve_id,d,K,q,R,Gq,m,resolved_fraction\n";
    for (int j = 4; j <= 12; ++j) {
        const double R = std::ldexp(1.0, j);
        csv += "synthetic,3,3,2," + format_double(R) + "," + format_double(std::pow(R, -0.4)) + ",64,1\n";
    }
    spit(dir / "synthetic.csv", csv);
    const Run r = run({"--out", dir.string(), "fit", (dir / "synthetic.csv").string()});
    CHECK(r.code == 0);
    const Json j = Json::parse(slurp(dir / "fit_synthetic.json"));
    CHECK(std::abs(j["sigma_hat"].get<double>() - 0.4) < 1e-12);
    CHECK(fs::exists(dir / "fit_synthetic.svg"));
    // sigma_3^3(2) = 1/2, so a tolerance of 0.05 around it fails with exit 3
    CHECK(run({"--out", dir.string(), "fit", (dir / "synthetic.csv").string(), "--check", "0.05"}).code == 3);
    CHECK(run({"--out", dir.string(), "fit", (dir / "synthetic.csv").string(), "--check", "0.2"}).code == 0);
    CHECK(run({"--out", dir.string(), "fit", (dir / "absent.csv").string()}).code == 2);
}

TEST_CASE("reruns are byte-identical and carry provenance") {
    const fs::path dir = scratch("rerun");
    spit(dir / "cfg.json", R"({"curve": "builtin:helix", "q": ["2", "inf"], "R": {"values": [16, 32, 64, 128, 256, 512, 1024, 2048]},
                            "cutoff": {"family": "bump", "center": 0, "half_width": 0.25},
                            "grid": {"kind": "product", "m_min": 16, "m_factor": 2}})");
    const fs::path a = dir / "a", b = dir / "b";
    REQUIRE(run({"--out", a.string(), "--config", (dir / "cfg.json").string(), "--workers", "1", "gq"}).code == 0);
    REQUIRE(run({"--out", b.string(), "--config", (dir / "cfg.json").string(), "--workers", "3", "gq"}).code == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        const std::string text = slurp(e.path());
        CHECK(text.find("# version ") != std::string::npos);
        CHECK(text.find("# config_hash ") != std::string::npos);
        CHECK(text.find("# config {") != std::string::npos);
        CHECK(text.find("# prediction ") != std::string::npos);
    }
    CHECK(files == 2);
    const fs::path series = a / "gq_helix_q2.csv";
    REQUIRE(run({"--out", a.string(), "fit", series.string()}).code == 0);
    REQUIRE(run({"--out", b.string(), "fit", series.string()}).code == 0);
    CHECK(slurp(a / "fit_gq_helix_q2.json") == slurp(b / "fit_gq_helix_q2.json"));
    const Json j = Json::parse(slurp(a / "fit_gq_helix_q2.json"));
    CHECK(j.contains("prediction"));
    const CsvDocument doc = read_csv(series);
    REQUIRE(doc.meta.count("config_hash") == 1);
    CHECK(j["series_config_hash"] == doc.meta.find("config_hash")->second);
    CHECK(j["version"] == artifact_version());
}

TEST_CASE("float formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(format_double(NAN) == "nan");
    for (double x : {1.0 / 3.0, 6.02e23, -2.5e-300, 4096.0}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("series CSV round trip") {
    DecaySeries s;
    s.curve_id = "helix";
    s.d = 3;
    s.K = 3;
    s.q = 2.0;
    s.rows = {{16.0, 0.123456789012345678, 128, 32768, 1.0, false}, {32.0, 1.0 / 3.0, 128, 32768, 0.5, true}};
    const std::string text = series_table(s, "2").render();
    const SeriesData back = series_from_csv(parse_csv(text));
    CHECK(back.curve_id == "helix");
    CHECK(back.d == 3);
    CHECK(back.q_text == "2");
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].Gq == s.rows[0].Gq);
    CHECK(back.rows[1].Gq == s.rows[1].Gq);
    CHECK_FALSE(back.rows[0].excluded);
    CHECK(back.rows[1].excluded);
}

TEST_CASE("config validation and round trip") {
    const ExperimentConfig c = load_config(fs::path(CURVEDECAY_DATA_DIR) / "configs" / "witness_V.json");
    const Json j = config_to_json(c);
    CHECK(config_to_json(config_from_json(j, c.base_dir)) == j);
    CHECK(c.witness.set == "V");
    CHECK(c.witness.k == 4);
    CHECK_FALSE(c.witness.enforce_window);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"curve": "builtin:helix", "extra": 1})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"curve": "builtin:helix", "q": "2"})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"curve": "builtin:helix", "witness": {"sett": "U"}})")),
                    ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"q": ["2"]})")), ValidationError);
    for (const auto& e : fs::directory_iterator(fs::path(CURVEDECAY_DATA_DIR) / "configs")) {
        const ExperimentConfig cfg = load_config(e.path());
        CHECK_NOTHROW(resolve_curve(cfg));
    }
}

TEST_CASE("curve file round trip") {
    for (const char* name : {"helix.json", "moment3.json", "moment4.json", "parabola3.json"}) {
        const Curve c = load_curve(fs::path(CURVEDECAY_DATA_DIR) / "curves" / name);
        const Curve back = curve_from_json(curve_to_json(c));
        CHECK(back.id() == c.id());
        CHECK(back.dim() == c.dim());
        for (double t : {-0.9, -0.3, 0.0, 0.41, 0.97}) {
            for (int order = 0; order <= 3; ++order) CHECK(back.derivative(t, order) == c.derivative(t, order));
        }
    }
    const Curve h = builtin_curve("helix");
    const Curve f = load_curve(fs::path(CURVEDECAY_DATA_DIR) / "curves" / "helix.json");
    for (double t : {-0.5, 0.2}) {
        const Vec a = h.derivative(t, 0), b = f.derivative(t, 0);
        for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(curve_from_json(Json::parse(R"({"id": "x", "dim": 2, "kind": "poly", "coordinates": [[0, 1]], "interval": [-1, 1]})")),
                    ValidationError);
    CHECK_THROWS(builtin_curve("moment:1"));
    CHECK_THROWS(builtin_curve("spiral"));
}

TEST_CASE("asymptotics subcommands succeed on defaults") {
    const fs::path dir = scratch("asym");
    CHECK(run({"--out", dir.string(), "airy"}).code == 0);
    CHECK(run({"--out", dir.string(), "lemma52"}).code == 0);
    CHECK(run({"--out", dir.string(), "lemma51", "--k", "2,3"}).code == 0);
    CHECK(fs::exists(dir / "airy_values.csv"));
    CHECK(fs::exists(dir / "lemma51_summary.csv"));
    CHECK(fs::exists(dir / "lemma52.csv"));
    CHECK(run({"--out", dir.string(), "lemma52", "--max-constant", "0.01"}).code == 3);
}
