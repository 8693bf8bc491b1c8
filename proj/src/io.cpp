#include "sled/io.hpp"

#include "sled/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace sled {
namespace {

char resolve_delimiter(const MatrixFileSpec& spec) {
    switch (spec.delimiter) {
        case Delimiter::Csv: return ',';
        case Delimiter::Tsv: return '\t';
        case Delimiter::Auto: break;
    }
    const auto ends_with = [&](std::string_view suffix) {
        return spec.path.size() >= suffix.size() &&
               std::string_view(spec.path).substr(spec.path.size() - suffix.size()) == suffix;
    };
    return ends_with(".tsv") || ends_with(".txt") ? '\t' : ',';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

bool parse_number(std::string_view cell, double& out) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return false;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

DataMatrix parse_matrix(std::string_view text, const MatrixFileSpec& spec) {
    const char delim = resolve_delimiter(spec);
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        if (!trim(line).empty()) lines.emplace_back(line_no, line);
        start = end + 1;
    }

    std::size_t first_data = 0;
    std::vector<std::string> header;
    std::size_t expected = 0;
    if (spec.has_header) {
        if (lines.empty()) throw ParseError(spec.path, 1, 1, "missing header row");
        const auto cells = split(lines[0].second, delim);
        for (std::size_t k = spec.row_names ? 1 : 0; k < cells.size(); ++k) header.push_back(unquote(cells[k]));
        expected = cells.size();
        first_data = 1;
    }
    if (lines.size() <= first_data) throw ParseError(spec.path, line_no, 1, "no data rows");
    if (!spec.has_header) expected = split(lines[first_data].second, delim).size();

    const std::size_t value_cols = expected - (spec.row_names ? 1 : 0);
    if (value_cols == 0) throw ParseError(spec.path, lines[first_data].first, 1, "no numeric columns");
    const std::size_t rows = lines.size() - first_data;
    Eigen::MatrixXd values(static_cast<Index>(rows), static_cast<Index>(value_cols));
    std::vector<std::string> row_labels;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& [number, line] = lines[first_data + r];
        const auto cells = split(line, delim);
        if (cells.size() != expected) throw RaggedRows(spec.path, number, cells.size(), expected);
        std::size_t offset = 0;
        if (spec.row_names) {
            row_labels.push_back(unquote(cells[0]));
            offset = 1;
        }
        for (std::size_t c = 0; c < value_cols; ++c) {
            double v;
            if (!parse_number(cells[c + offset], v)) {
                throw NonNumericCell(spec.path, number, c + offset + 1, std::string(trim(cells[c + offset])));
            }
            values(static_cast<Index>(r), static_cast<Index>(c)) = v;
        }
    }

    try {
        if (spec.orientation == Orientation::FeaturesBySamples) {
            return DataMatrix(values.transpose(), spec.row_names ? row_labels : std::vector<std::string>{});
        }
        return DataMatrix(std::move(values), spec.has_header ? header : std::vector<std::string>{});
    } catch (const Error& e) {
        throw DataError(spec.path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path + ": read failed");
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(path + ": write failed");
}

DataMatrix read_matrix(const MatrixFileSpec& spec) { return parse_matrix(read_text_file(spec.path), spec); }

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& names,
                  char delimiter) {
    std::string text;
    if (!names.empty()) {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (k > 0) text += delimiter;
            text += names[k];
        }
        text += '\n';
    }
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) {
            if (j > 0) text += delimiter;
            text += format_double(values(i, j));
        }
        text += '\n';
    }
    write_text_file(path, text);
}

void write_matrix(const std::string& path, const DataMatrix& m, char delimiter) {
    write_matrix(path, m.values(), m.feature_names(), delimiter);
}

std::pair<DataMatrix, DataMatrix> align_by_name(const DataMatrix& x, const DataMatrix& y) {
    if (!x.has_names() || !y.has_names()) throw InvalidArgument("align-by-name needs feature names in both inputs");
    std::unordered_map<std::string, Index> in_y;
    for (Index j = 0; j < y.p(); ++j) in_y.emplace(y.feature_names()[static_cast<std::size_t>(j)], j);
    std::vector<Index> cols_x, cols_y;
    for (Index j = 0; j < x.p(); ++j) {
        const auto it = in_y.find(x.feature_names()[static_cast<std::size_t>(j)]);
        if (it == in_y.end()) continue;
        cols_x.push_back(j);
        cols_y.push_back(it->second);
    }
    if (cols_x.empty()) throw DataError("align-by-name: inputs share no feature names");
    return {x.select_features(cols_x), y.select_features(cols_y)};
}

// ---------------------------------------------------------------------------
// Result document

ordered_json to_json(const ResultDocument& doc) {
    const PermutationTestResult& r = doc.result;
    ordered_json result;
    result["method"] = std::string(to_string(r.method));
    result["statistic"] = r.statistic;
    result["p_value"] = r.p_value;
    result["permutations"] = r.permutations;
    result["seed"] = r.seed;
    result["negated"] = r.negated;
    result["observed_converged"] = r.observed_converged;
    result["nonconverged_replicates"] = r.nonconverged;
    result["leverage"] = std::vector<double>(r.leverage.data(), r.leverage.data() + r.leverage.size());
    if (doc.include_null_stats) result["null_stats"] = r.null_stats;

    ordered_json j;
    j["schema_version"] = kResultSchemaVersion;
    j["tool_version"] = doc.tool_version;
    j["rng"] = doc.rng;
    j["config"] = doc.config;
    j["result"] = std::move(result);
    j["ranked_features"] = {{"primary", doc.primary}, {"secondary", doc.secondary}};
    if (doc.runtime) j["runtime"] = *doc.runtime;
    return j;
}

ResultDocument result_from_json(const ordered_json& j) {
    try {
        if (j.at("schema_version").get<int>() != kResultSchemaVersion) {
            throw DataError("result document: unsupported schema_version");
        }
        ResultDocument doc;
        doc.tool_version = j.at("tool_version").get<std::string>();
        doc.rng = j.at("rng").get<std::string>();
        doc.config = j.at("config");
        const auto& r = j.at("result");
        doc.result.method = parse_method(r.at("method").get<std::string>());
        doc.result.statistic = r.at("statistic").get<double>();
        doc.result.p_value = r.at("p_value").get<double>();
        doc.result.permutations = r.at("permutations").get<int>();
        doc.result.seed = r.at("seed").get<std::uint64_t>();
        doc.result.negated = r.at("negated").get<bool>();
        doc.result.observed_converged = r.at("observed_converged").get<bool>();
        doc.result.nonconverged = r.at("nonconverged_replicates").get<int>();
        const auto lev = r.at("leverage").get<std::vector<double>>();
        doc.result.leverage = Eigen::Map<const Eigen::VectorXd>(lev.data(), static_cast<Index>(lev.size()));
        if (r.contains("null_stats")) {
            doc.include_null_stats = true;
            doc.result.null_stats = r.at("null_stats").get<std::vector<double>>();
        }
        doc.primary = j.at("ranked_features").at("primary").get<std::vector<std::string>>();
        doc.secondary = j.at("ranked_features").at("secondary").get<std::vector<std::string>>();
        if (j.contains("runtime")) doc.runtime = j.at("runtime");
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("result document: ") + e.what());
    }
}

std::string serialize(const ResultDocument& doc) { return to_json(doc).dump(2) + "\n"; }

ResultDocument parse_result(std::string_view text) {
    try {
        return result_from_json(ordered_json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("result document: ") + e.what());
    }
}

void write_result(const ResultDocument& doc, const std::string& path) { write_text_file(path, serialize(doc)); }

// ---------------------------------------------------------------------------
// Scenario grids and power tables

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["base"] = std::string(to_string(s.base));
    j["diff"] = std::string(to_string(s.diff));
    j["noise"] = std::string(to_string(s.noise));
    j["n"] = s.n;
    j["m"] = s.m;
    j["p"] = s.p;
    j["c"] = s.c;
    j["B"] = s.permutations;
    j["reps"] = s.reps;
    j["seed"] = s.seed;
    return j;
}

std::vector<Scenario> parse_grid(const ordered_json& j) {
    if (!j.is_object() || !j.contains("cells") || !j.at("cells").is_array()) {
        throw InvalidArgument("grid: expected an object with a \"cells\" array");
    }
    std::vector<Scenario> cells;
    std::size_t index = 0;
    for (const auto& cell : j.at("cells")) {
        try {
            Scenario s;
            s.base = parse_base_kind(cell.at("base").get<std::string>());
            s.diff = parse_diff_kind(cell.value("diff", std::string("sparse_block")));
            s.noise = parse_noise(cell.value("noise", std::string("normal")));
            s.n = cell.value("n", s.n);
            s.m = cell.value("m", s.n);
            s.p = cell.value("p", s.p);
            s.c = cell.value("c", s.c);
            s.permutations = cell.value("B", s.permutations);
            s.reps = cell.value("reps", s.reps);
            s.seed = cell.value("seed", s.seed);
            validate(s);
            cells.push_back(s);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("grid cell " + std::to_string(index) + ": " + e.what());
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("grid cell " + std::to_string(index) + ": " + e.what());
        }
        ++index;
    }
    return cells;
}

void write_power_csv(const std::vector<PowerTable>& tables, const std::string& path) {
    std::string text = "base,diff,noise,n,m,p,c,B,reps,seed,kind,alpha,method,power,ci_low,ci_high,rejections,completed,"
                       "failures\n";
    for (const auto& t : tables) {
        const Scenario& s = t.scenario;
        for (const auto& row : t.rows) {
            text += std::string(to_string(s.base)) + ',' + std::string(to_string(s.diff)) + ',' +
                    std::string(to_string(s.noise)) + ',' + std::to_string(s.n) + ',' + std::to_string(s.m) + ',' +
                    std::to_string(s.p) + ',' + format_double(s.c) + ',' + std::to_string(s.permutations) + ',' +
                    std::to_string(s.reps) + ',' + std::to_string(s.seed) + ',' + t.kind.name() + ',' +
                    format_double(t.alpha) + ',' + std::string(to_string(row.method)) + ',' +
                    format_double(row.power) + ',' + format_double(row.ci_low) + ',' + format_double(row.ci_high) +
                    ',' + std::to_string(row.rejections) + ',' + std::to_string(row.completed) + ',' +
                    std::to_string(row.failures) + '\n';
        }
    }
    write_text_file(path, text);
}

ordered_json power_to_json(const std::vector<PowerTable>& tables) {
    ordered_json cells = ordered_json::array();
    for (const auto& t : tables) {
        ordered_json cell;
        cell["scenario"] = scenario_to_json(t.scenario);
        cell["kind"] = t.kind.name();
        if (t.kind.type() == RelationshipKind::Type::Adjacency) cell["beta"] = t.kind.beta();
        cell["alpha"] = t.alpha;
        ordered_json rows = ordered_json::array();
        for (const auto& row : t.rows) {
            rows.push_back({{"method", std::string(to_string(row.method))},
                            {"power", row.power},
                            {"ci_low", row.ci_low},
                            {"ci_high", row.ci_high},
                            {"rejections", row.rejections},
                            {"completed", row.completed},
                            {"failures", row.failures},
                            {"nonconverged_replicates", row.nonconverged}});
        }
        cell["methods"] = std::move(rows);
        cells.push_back(std::move(cell));
    }
    return {{"schema_version", kResultSchemaVersion}, {"cells", std::move(cells)}};
}

}  // namespace sled
