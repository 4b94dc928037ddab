#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "optocav/dynamics.hpp"
#include "optocav/perturb.hpp"

namespace optocav {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view version_string = "0.1.0";

Json to_json(const complex& z);
Json to_json(const ModelParams& params);
Json to_json(const BasisSpec& cutoffs);
Json to_json(const FormulaResult& r);
Json to_json(const ShiftFit& fit);
Json to_json(const ConvergenceSeries& series);
Json to_json(const SpectralReport& report);

enum class Status { pass, fail, reported };

std::string_view to_string(Status s);

struct ResultRow {
    std::string id;
    Json formula_value;
    Json oracle_value;
    Json delta;
    Json tolerance;
    Status status = Status::reported;
    Json extra = Json::object();  // appended after the fixed keys
};

/// Relative comparison; passes when |oracle - formula| <= tol * |formula|.
ResultRow compare_relative(std::string id, double formula, double oracle, double tolerance);
ResultRow compare_absolute(std::string id, double formula, double oracle, double tolerance);
/// Comparison recorded without a verdict.
ResultRow report_only(std::string id, double formula, double oracle);

struct Series {
    std::string name;
    std::string abscissa;  // "t", "delay", or a swept key
    std::vector<double> x;
    std::vector<complex> y;
};

class Report {
public:
    Json config = Json::object();
    Json derived_params = Json::object();
    std::vector<std::string> warnings;

    /// Failed rows also land in the paper-delta block.
    void add(ResultRow row);
    void add_paper_delta(const std::string& id, double paper, double oracle, const std::string& note);
    void add_series(Series s) { series_.push_back(std::move(s)); }
    void add_convergence(Json entry) { convergence_.push_back(std::move(entry)); }
    void add_error(const Error& e);
    void add_section(const std::string& key, Json value) { sections_[key] = std::move(value); }

    const std::vector<ResultRow>& results() const { return results_; }
    const std::vector<Series>& series() const { return series_; }
    const Json& errors() const { return errors_; }

    Json to_json() const;
    /// Two-space indented JSON with a trailing newline.
    std::string dump() const;

private:
    std::vector<ResultRow> results_;
    std::vector<Series> series_;
    Json convergence_ = Json::array();
    Json paper_deltas_ = Json::array();
    Json errors_ = Json::array();
    Json sections_ = Json::object();
};

/// "# {header}" line, then t,re,im rows.
std::string series_csv(const Json& header, const Series& s);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Dressed energies, level shifts against the closed forms, Z-factors and a
/// cutoff convergence series for the ground state.
SpectralReport build_spectral_report(const ModelParams& params, const BasisSpec& cutoffs,
                                     const std::vector<double>& g_sweep,
                                     const std::vector<std::pair<int, int>>& ladder);

} // namespace optocav
