#include "aspen/harness/trace_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace aspen::harness {
namespace {

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename Int>
Int to_int(std::string_view cell, std::size_t line, const char* column) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw TraceFormatError(fmt::format("trace line {}: bad integer '{}' in column {}", line, cell, column));
  }
  return v;
}

double to_real(std::string_view cell, std::size_t line, const char* column) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw TraceFormatError(fmt::format("trace line {}: bad number '{}' in column {}", line, cell, column));
  }
  return v;
}

}  // namespace

std::string format_trace_row(const TraceRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", r.k, to_string(r.phase), r.n_k, real(r.mu_k),
                     real(r.alpha_k), r.accepted ? 1 : 0, r.fev, real(r.feas), real(r.grad_norm),
                     real(r.full_grad_norm), real(r.gap), real(r.eps_k));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) out << format_trace_row(r) << '\n';
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw TraceFormatError("trace line 1: expected header '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceRecord> trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split_commas(line);
    if (cells.size() != 12) {
      throw TraceFormatError(fmt::format("trace line {}: expected 12 cells, found {}", line_no, cells.size()));
    }
    TraceRecord r;
    r.k = to_int<std::uint64_t>(cells[0], line_no, "k");
    if (cells[1] == "MB") {
      r.phase = Phase::MiniBatch;
    } else if (cells[1] == "FS") {
      r.phase = Phase::FullSample;
    } else {
      throw TraceFormatError(fmt::format("trace line {}: phase must be MB or FS, got '{}'", line_no, cells[1]));
    }
    r.n_k = to_int<Index>(cells[2], line_no, "n_k");
    r.mu_k = to_real(cells[3], line_no, "mu_k");
    r.alpha_k = to_real(cells[4], line_no, "alpha_k");
    const int accepted = to_int<int>(cells[5], line_no, "accepted");
    if (accepted != 0 && accepted != 1) {
      throw TraceFormatError(fmt::format("trace line {}: accepted must be 0 or 1", line_no));
    }
    r.accepted = accepted == 1;
    r.fev = to_int<std::uint64_t>(cells[6], line_no, "fev");
    r.feas = to_real(cells[7], line_no, "feas");
    r.grad_norm = to_real(cells[8], line_no, "grad_norm");
    r.full_grad_norm = to_real(cells[9], line_no, "full_grad_norm");
    r.gap = to_real(cells[10], line_no, "gap");
    r.eps_k = to_real(cells[11], line_no, "eps_k");
    if (!trace.empty() && r.fev < trace.back().fev) {
      throw TraceFormatError(fmt::format("trace line {}: fev decreased", line_no));
    }
    trace.push_back(r);
  }
  return trace;
}

std::vector<TraceRecord> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  return read_trace_csv(in);
}

}  // namespace aspen::harness
