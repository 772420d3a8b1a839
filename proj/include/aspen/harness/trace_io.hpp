#pragma once

#include "aspen/solver.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace aspen::harness {

inline constexpr const char* kTraceHeader =
    "k,phase,n_k,mu_k,alpha_k,accepted,fev,feas,grad_norm,full_grad_norm,gap,eps_k";

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reals are written in shortest round-trip form, so reading a trace back
/// recovers every value exactly. Unmonitored values are written as "nan".
std::string format_trace_row(const TraceRecord& r);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::string trace_to_csv(const std::vector<TraceRecord>& trace);

/// Strict reader: header must match, every row has all 12 cells and fev is
/// nondecreasing. Errors name the 1-based line.
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> trace_from_csv(const std::string& text);

}  // namespace aspen::harness
