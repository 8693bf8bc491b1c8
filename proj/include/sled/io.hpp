#pragma once

// Matrix ingestion and result serialization.
//
// Matrices are delimited text (CSV or TSV). Numbers are parsed and printed
// with std::from_chars / std::to_chars, so neither direction depends on the
// locale and printed values round-trip exactly.

#include "sled/matrix.hpp"
#include "sled/simgen.hpp"
#include "sled/test_engine.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sled {

using ordered_json = nlohmann::ordered_json;

enum class Delimiter { Auto, Csv, Tsv };
enum class Orientation { SamplesByFeatures, FeaturesBySamples };

struct MatrixFileSpec {
    std::string path;
    Delimiter delimiter = Delimiter::Auto;  // Auto: by extension, TSV for .tsv/.txt
    bool has_header = true;
    bool row_names = false;  // first column holds labels
    Orientation orientation = Orientation::SamplesByFeatures;
};

/// Header cells (after an optional corner cell) name the columns. For
/// FeaturesBySamples input the matrix is transposed on load and the row
/// labels, if any, become feature names.
DataMatrix read_matrix(const MatrixFileSpec& spec);
DataMatrix parse_matrix(std::string_view text, const MatrixFileSpec& spec);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

void write_matrix(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& names = {},
                  char delimiter = ',');
void write_matrix(const std::string& path, const DataMatrix& m, char delimiter = ',');

/// Restricts both inputs to the features they share, in the order of `x`.
std::pair<DataMatrix, DataMatrix> align_by_name(const DataMatrix& x, const DataMatrix& y);

inline constexpr int kResultSchemaVersion = 1;

struct ResultDocument {
    std::string tool_version;
    std::string rng;
    ordered_json config = ordered_json::object();
    PermutationTestResult result;
    std::vector<std::string> primary;
    std::vector<std::string> secondary;
    bool include_null_stats = false;
    std::optional<ordered_json> runtime;  // threads and wall-clock; omitted for reproducible output
};

ordered_json to_json(const ResultDocument& doc);
ResultDocument result_from_json(const ordered_json& j);
std::string serialize(const ResultDocument& doc);
ResultDocument parse_result(std::string_view text);
void write_result(const ResultDocument& doc, const std::string& path);

/// Scenario grid: {"cells": [{"base": ..., "diff": ..., ...}, ...]}.
std::vector<Scenario> parse_grid(const ordered_json& j);
ordered_json scenario_to_json(const Scenario& s);

void write_power_csv(const std::vector<PowerTable>& tables, const std::string& path);
ordered_json power_to_json(const std::vector<PowerTable>& tables);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace sled
