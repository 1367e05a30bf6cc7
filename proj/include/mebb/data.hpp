#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mebb/matrix.hpp"
#include "mebb/objective.hpp"

namespace mebb {

/// Numeric data matrix (rows are points) with optional class labels.
struct Dataset {
    Matrix points;
    std::optional<std::vector<std::string>> labels;
    std::string name;

    std::size_t size() const { return points.rows(); }
    std::size_t features() const { return points.cols(); }

    /// Number of distinct labels, 0 when unlabeled.
    std::size_t distinct_labels() const;

    /// Throws std::invalid_argument on an empty matrix, non-finite values or
    /// a label count different from the row count.
    void validate() const;
};

struct CsvSchema {
    /// Column holding the class label, by zero-based index or header name.
    std::optional<std::variant<std::size_t, std::string>> label_column;
    char delimiter = ',';
    bool has_header = false;
    std::set<std::size_t> skip_columns;
};

/// A cell could not be parsed as a finite number. Row and column are
/// one-based positions in the file (header included).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : std::runtime_error(what), row_(row), column_(column) {}
    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Structural problem with the file: empty, ragged rows, bad schema.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw records of a delimited text file (RFC-4180 quoting, blank lines
/// dropped). Throws std::ios_base::failure if the file cannot be opened.
std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path, char delimiter = ',');

/// Reads a delimited text file (RFC-4180 quoting). The dataset name is the
/// file stem. Throws std::ios_base::failure if the file cannot be opened.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes features (and labels as a trailing `label` column when present)
/// with a header row and shortest round-trip number formatting.
void save_csv(const std::filesystem::path& path, const Dataset& dataset);

/// Isotropic Gaussian blobs; labels are the blob index. Deterministic per seed.
Dataset synthetic_blobs(std::size_t k, std::size_t points_per_blob, std::size_t d, const Matrix& centers,
                        double spread, std::uint64_t seed);

/// Width added on each side of a constant feature so lower < upper holds.
inline constexpr double kConstantFeaturePad = 1e-9;

/// Per-feature min/max over all rows.
Bounds feature_bounds(const Matrix& points);
Bounds feature_bounds(const Dataset& dataset);

}  // namespace mebb
