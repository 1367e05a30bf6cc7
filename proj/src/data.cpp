#include "mebb/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "mebb/numfmt.hpp"
#include "mebb/random.hpp"

namespace mebb {

namespace {

using Record = std::vector<std::string>;

// Splits text into records of fields. Quoted fields may contain the
// delimiter, doubled quotes and line breaks. Blank lines are dropped.
std::vector<Record> split_records(const std::string& text, char delimiter) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        current.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        if (current.empty() && field.empty() && !field_started) return;
        end_field();
        records.push_back(std::move(current));
        current.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            field_started = true;
            end_field();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw FormatError("unterminated quoted field");
    end_record();
    return records;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
    return text;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::size_t Dataset::distinct_labels() const {
    if (!labels) return 0;
    return std::unordered_set<std::string>(labels->begin(), labels->end()).size();
}

void Dataset::validate() const {
    if (points.rows() < 1 || points.cols() < 1) throw std::invalid_argument("Dataset: need at least one row and column");
    for (double v : points.flat()) {
        if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite value");
    }
    if (labels && labels->size() != points.rows()) {
        throw std::invalid_argument("Dataset: label count does not match row count");
    }
}

std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path, char delimiter) {
    return split_records(read_file(path), delimiter);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    const std::vector<Record> records = read_csv_records(path, schema.delimiter);
    if (records.empty()) throw FormatError("'" + path.string() + "' is empty");

    const std::size_t columns = records.front().size();
    const std::size_t first_data = schema.has_header ? 1 : 0;
    if (records.size() <= first_data) throw FormatError("'" + path.string() + "' has no data rows");

    std::optional<std::size_t> label_index;
    if (schema.label_column) {
        if (const auto* idx = std::get_if<std::size_t>(&*schema.label_column)) {
            label_index = *idx;
        } else {
            const auto& name = std::get<std::string>(*schema.label_column);
            if (!schema.has_header) throw FormatError("label column given by name but the file has no header");
            const auto& header = records.front();
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) throw FormatError("no column named '" + name + "'");
            label_index = static_cast<std::size_t>(it - header.begin());
        }
        if (*label_index >= columns) {
            throw FormatError("label column " + std::to_string(*label_index) + " out of range (" +
                              std::to_string(columns) + " columns)");
        }
    }
    for (std::size_t c : schema.skip_columns) {
        if (c >= columns) throw FormatError("skip column " + std::to_string(c) + " out of range");
    }

    std::vector<std::size_t> feature_columns;
    for (std::size_t c = 0; c < columns; ++c) {
        if (c != label_index && !schema.skip_columns.contains(c)) feature_columns.push_back(c);
    }
    if (feature_columns.empty()) throw FormatError("no feature columns left after label/skip selection");

    const std::size_t n = records.size() - first_data;
    Matrix points(n, feature_columns.size());
    std::vector<std::string> labels;
    if (label_index) labels.reserve(n);

    for (std::size_t r = first_data; r < records.size(); ++r) {
        const Record& rec = records[r];
        if (rec.size() != columns) {
            throw FormatError("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                              " columns, expected " + std::to_string(columns));
        }
        for (std::size_t f = 0; f < feature_columns.size(); ++f) {
            const std::size_t c = feature_columns[f];
            const auto value = parse_double(rec[c]);
            if (!value || !std::isfinite(*value)) {
                throw ParseError(r + 1, c + 1,
                                 "row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                                     ": cannot parse '" + rec[c] + "' as a finite number");
            }
            points(r - first_data, f) = *value;
        }
        if (label_index) labels.push_back(rec[*label_index]);
    }

    Dataset ds{std::move(points), std::nullopt, path.stem().string()};
    if (label_index) ds.labels = std::move(labels);
    return ds;
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    for (std::size_t c = 0; c < dataset.features(); ++c) out << (c ? "," : "") << "f" << c;
    if (dataset.labels) out << ",label";
    out << '\n';
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        for (std::size_t c = 0; c < dataset.features(); ++c) {
            out << (c ? "," : "") << format_double(dataset.points(r, c));
        }
        if (dataset.labels) out << ',' << quote_if_needed((*dataset.labels)[r]);
        out << '\n';
    }
    if (!out) throw std::ios_base::failure("write failed for '" + path.string() + "'");
}

Dataset synthetic_blobs(std::size_t k, std::size_t points_per_blob, std::size_t d, const Matrix& centers,
                        double spread, std::uint64_t seed) {
    if (!(spread > 0.0)) throw std::invalid_argument("synthetic_blobs: spread must be positive");
    if (centers.rows() != k || centers.cols() != d) {
        throw std::invalid_argument("synthetic_blobs: centers must be k x d");
    }
    Rng rng(seed);
    Matrix points(k * points_per_blob, d);
    std::vector<std::string> labels;
    labels.reserve(k * points_per_blob);
    for (std::size_t b = 0; b < k; ++b) {
        for (std::size_t p = 0; p < points_per_blob; ++p) {
            const std::size_t r = b * points_per_blob + p;
            for (std::size_t j = 0; j < d; ++j) points(r, j) = centers(b, j) + spread * rng.normal();
            labels.push_back(std::to_string(b));
        }
    }
    return Dataset{std::move(points), std::move(labels), "blobs"};
}

Bounds feature_bounds(const Matrix& points) {
    if (points.rows() < 1 || points.cols() < 1) throw std::invalid_argument("feature_bounds: empty data");
    Bounds b{std::vector<double>(points.row(0).begin(), points.row(0).end()),
             std::vector<double>(points.row(0).begin(), points.row(0).end())};
    for (std::size_t r = 1; r < points.rows(); ++r) {
        for (std::size_t c = 0; c < points.cols(); ++c) {
            b.lower[c] = std::min(b.lower[c], points(r, c));
            b.upper[c] = std::max(b.upper[c], points(r, c));
        }
    }
    for (std::size_t c = 0; c < points.cols(); ++c) {
        if (b.lower[c] == b.upper[c]) {
            const double v = b.lower[c];
            b.lower[c] = v - kConstantFeaturePad;
            b.upper[c] = v + kConstantFeaturePad;
            // At large magnitudes the pad vanishes in rounding.
            if (b.lower[c] == v) b.lower[c] = std::nextafter(v, -HUGE_VAL);
            if (b.upper[c] == v) b.upper[c] = std::nextafter(v, HUGE_VAL);
        }
    }
    return b;
}

Bounds feature_bounds(const Dataset& dataset) { return feature_bounds(dataset.points); }

}  // namespace mebb
