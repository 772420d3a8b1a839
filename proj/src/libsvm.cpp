#include "aspen/libsvm.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aspen {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_int(std::string_view tok, long& out) {
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

// Which of the three supported label conventions a raw label pins down.
enum class LabelConvention { Unknown, PlusMinus, ZeroOne, OneTwo };

}  // namespace

SparseDataset parse_libsvm(std::string_view text) {
  SparseDataset data;
  LabelConvention convention = LabelConvention::Unknown;
  std::size_t convention_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    const auto tokens = split_tokens(line);
    if (tokens.empty()) {
      if (end == text.size()) {
        if (line.empty() && line_no > 1) --line_no;  // text after the final newline is not a line
        break;
      }
      continue;
    }

    double label_value = 0.0;
    if (!parse_double(tokens[0], label_value)) {
      throw LibsvmParseError(line_no, fmt::format("malformed label '{}'", tokens[0]));
    }
    const int label = static_cast<int>(label_value);
    if (label_value != label || label < -1 || label > 2) {
      throw LibsvmParseError(line_no, fmt::format("unsupported label '{}'", tokens[0]));
    }
    LabelConvention implied = LabelConvention::Unknown;
    if (label == -1) implied = LabelConvention::PlusMinus;
    if (label == 0) implied = LabelConvention::ZeroOne;
    if (label == 2) implied = LabelConvention::OneTwo;
    if (implied != LabelConvention::Unknown) {
      if (convention == LabelConvention::Unknown) {
        convention = implied;
        convention_line = line_no;
      } else if (convention != implied) {
        throw LibsvmParseError(
            line_no, fmt::format("label '{}' mixes label conventions (first fixed on line {})",
                                 tokens[0], convention_line));
      }
    }

    SparseRow row;
    row.label = label;
    int previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw LibsvmParseError(line_no, fmt::format("expected <index>:<value>, got '{}'", tok));
      }
      long index = 0;
      double value = 0.0;
      if (!parse_int(tok.substr(0, colon), index)) {
        throw LibsvmParseError(line_no, fmt::format("malformed feature index in '{}'", tok));
      }
      if (index < 1) {
        throw LibsvmParseError(line_no, fmt::format("feature index {} is below 1", index));
      }
      if (index > 1'000'000'000L) {
        throw LibsvmParseError(line_no, fmt::format("feature index {} is too large", index));
      }
      if (index <= previous) {
        throw LibsvmParseError(line_no,
                               fmt::format("feature index {} does not increase (previous {})",
                                           index, previous));
      }
      if (!parse_double(tok.substr(colon + 1), value)) {
        throw LibsvmParseError(line_no, fmt::format("malformed feature value in '{}'", tok));
      }
      previous = static_cast<int>(index);
      row.entries.push_back({previous, value});
      data.n_features = std::max(data.n_features, previous);
    }
    data.rows.push_back(std::move(row));
    if (end == text.size()) break;
  }

  if (data.rows.empty()) {
    throw LibsvmParseError(line_no == 0 ? 1 : line_no, "empty input: no data rows");
  }

  for (auto& row : data.rows) {
    switch (convention) {
      case LabelConvention::ZeroOne:
        row.label = row.label == 0 ? -1 : 1;
        break;
      case LabelConvention::OneTwo:
        row.label = row.label == 2 ? -1 : 1;
        break;
      default:
        break;
    }
  }
  return data;
}

SparseDataset load_libsvm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_libsvm(buf.str());
  } catch (const LibsvmParseError& e) {
    throw LibsvmParseError(e.line(), e.detail(), path);
  }
}

std::string serialize_libsvm(const SparseDataset& data) {
  fmt::memory_buffer out;
  for (const auto& row : data.rows) {
    fmt::format_to(std::back_inserter(out), "{}", row.label > 0 ? "+1" : "-1");
    for (const auto& e : row.entries) {
      fmt::format_to(std::back_inserter(out), " {}:{}", e.index, e.value);
    }
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

void scale_rows_to_unit_norm(SparseDataset& data) {
  for (auto& row : data.rows) {
    double sq = 0.0;
    for (const auto& e : row.entries) sq += e.value * e.value;
    if (sq <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : row.entries) e.value *= inv;
  }
}

}  // namespace aspen
