#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmm/solvers.hpp"

namespace nmm {

enum class TraceFormat { csv, json };
TraceFormat parse_trace_format(const std::string& s);
std::string to_string(TraceFormat f);

class TraceIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column order of the CSV form; JSON records use the same keys.
inline constexpr const char* kTraceColumns =
    "iter,time_s,lambda,step_norm,grad_norm,gap,hat_dist,samples,subproblem_iters";

// Reals are written with 17 significant digits so that parsing reproduces
// them bit for bit. Absent values (gap without a reference, time_s without
// timing) are empty CSV cells and JSON nulls.
std::string trace_to_csv(const std::vector<IterateTrace>& trace);
std::vector<IterateTrace> trace_from_csv(const std::string& text);

nlohmann::json trace_to_json(const std::vector<IterateTrace>& trace, const nlohmann::json& header);
std::vector<IterateTrace> trace_from_json(const nlohmann::json& doc);

void emit_trace(const std::vector<IterateTrace>& trace, const std::string& path, TraceFormat format,
                const nlohmann::json& header = nlohmann::json::object());
std::vector<IterateTrace> read_trace(const std::string& path, TraceFormat format);

/// Equality on the fields that are persisted.
bool same_persisted_fields(const IterateTrace& a, const IterateTrace& b);

}  // namespace nmm
