#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "curvedecay/config.hpp"
#include "curvedecay/decay.hpp"
#include "curvedecay/theory.hpp"

namespace curvedecay {

// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

std::uint64_t fnv1a64(const std::string& bytes);
// 16 hex digits of FNV-1a over the compact dump of `config`.
std::string config_hash(const Json& config);

std::string artifact_version();

// Comment lines written before the CSV header, "# key value".
struct Provenance {
    std::string hash;
    Json config;
    std::vector<std::string> predictions;

    static Provenance from(const Json& config);
};

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add(std::vector<std::string> row);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return rows_.size(); }

    std::string render(const Provenance* provenance = nullptr) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

// Parsed CSV: "# key value" comment lines, header and string cells.
struct CsvDocument {
    std::multimap<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvDocument parse_csv(const std::string& text);
CsvDocument read_csv(const std::filesystem::path& path);

// Series CSV columns: curve_id, d, K, q, R, Gq, m, resolved_fraction.
// q_text is the exact spelling of q (e.g. "15/2", "inf").
CsvTable series_table(const DecaySeries& series, const std::string& q_text);

struct SeriesData {
    std::string curve_id;
    int d = 0;
    int K = 0;
    double q = 0.0;
    std::string q_text;
    std::vector<DecayRow> rows;
    std::string config_hash;
};

// Rows with resolved_fraction < 1 come back excluded.
SeriesData series_from_csv(const CsvDocument& doc);

Json fit_to_json(const DecayFit& fit, const SeriesData& series, const std::vector<std::string>& predictions);

// (1/q, sigma) polyline of the exponent function.
std::string svg_theory(int d, int K, const std::vector<Vertex>& vertices);
// (log2 R, log2 G) points with the free and beta = 0 model curves.
std::string svg_fit(const SeriesData& series, const DecayFit& fit);

}  // namespace curvedecay
