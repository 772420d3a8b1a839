#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aspen {

struct SparseEntry {
  int index;  // 1-based feature index
  double value;

  bool operator==(const SparseEntry&) const = default;
};

struct SparseRow {
  int label;  // -1 or +1
  std::vector<SparseEntry> entries;

  bool operator==(const SparseRow&) const = default;
};

struct SparseDataset {
  std::vector<SparseRow> rows;
  int n_features = 0;

  std::size_t n_rows() const { return rows.size(); }
  bool operator==(const SparseDataset&) const = default;
};

class LibsvmParseError : public std::runtime_error {
 public:
  LibsvmParseError(std::size_t line, const std::string& detail, const std::string& source = {})
      : std::runtime_error((source.empty() ? std::string() : source + ":") + "line " +
                           std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Parses LIBSVM sparse text. Labels in {-1,+1}, {0,1} or {1,2} are mapped
/// to {-1,+1} (0 -> -1, 2 -> -1). Blank lines are skipped. Throws
/// LibsvmParseError naming the offending 1-based line.
SparseDataset parse_libsvm(std::string_view text);

/// Reads and parses a file; I/O failures throw std::runtime_error.
SparseDataset load_libsvm(const std::string& path);

/// Writes one row per line with shortest round-trip values.
std::string serialize_libsvm(const SparseDataset& data);

/// Rescales every nonzero row to unit Euclidean norm.
void scale_rows_to_unit_norm(SparseDataset& data);

}  // namespace aspen
