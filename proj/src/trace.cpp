#include "nmm/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nmm {

TraceFormat parse_trace_format(const std::string& s) {
  if (s == "csv") return TraceFormat::csv;
  if (s == "json") return TraceFormat::json;
  throw ContractError("unknown trace format '" + s + "' (expected csv or json)");
}

std::string to_string(TraceFormat f) { return f == TraceFormat::csv ? "csv" : "json"; }

namespace {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw TraceIoError("trace line " + std::to_string(line) + ": bad number '" + cell + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& cell, std::size_t line) {
  Int v = 0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw TraceIoError("trace line " + std::to_string(line) + ": bad integer '" + cell + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string trace_to_csv(const std::vector<IterateTrace>& trace) {
  std::string out = kTraceColumns;
  out += '\n';
  for (const IterateTrace& r : trace) {
    out += std::to_string(r.k);
    out += ',';
    if (r.wall_time) out += fmt_real(*r.wall_time);
    out += ',' + fmt_real(r.lambda);
    out += ',' + fmt_real(r.step_norm);
    out += ',' + fmt_real(r.grad_norm);
    out += ',';
    if (r.gap) out += fmt_real(*r.gap);
    out += ',' + fmt_real(r.hat_dist);
    out += ',' + std::to_string(r.samples);
    out += ',' + std::to_string(r.subproblem_iters);
    out += '\n';
  }
  return out;
}

std::vector<IterateTrace> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceColumns)
    throw TraceIoError("trace: missing or unexpected CSV header");
  std::vector<IterateTrace> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> c = split_csv(line);
    if (c.size() != 9)
      throw TraceIoError("trace line " + std::to_string(lineno) + ": expected 9 columns");
    IterateTrace r;
    r.k = parse_int<int>(c[0], lineno);
    if (!c[1].empty()) r.wall_time = parse_real(c[1], lineno);
    r.lambda = parse_real(c[2], lineno);
    r.step_norm = parse_real(c[3], lineno);
    r.grad_norm = parse_real(c[4], lineno);
    if (!c[5].empty()) r.gap = parse_real(c[5], lineno);
    r.hat_dist = parse_real(c[6], lineno);
    r.samples = parse_int<std::size_t>(c[7], lineno);
    r.subproblem_iters = parse_int<int>(c[8], lineno);
    out.push_back(r);
  }
  return out;
}

nlohmann::json trace_to_json(const std::vector<IterateTrace>& trace, const nlohmann::json& header) {
  nlohmann::json records = nlohmann::json::array();
  for (const IterateTrace& r : trace) {
    nlohmann::json j;
    j["iter"] = r.k;
    j["time_s"] = r.wall_time ? nlohmann::json(*r.wall_time) : nlohmann::json(nullptr);
    j["lambda"] = r.lambda;
    j["step_norm"] = r.step_norm;
    j["grad_norm"] = r.grad_norm;
    j["gap"] = r.gap ? nlohmann::json(*r.gap) : nlohmann::json(nullptr);
    j["hat_dist"] = r.hat_dist;
    j["samples"] = r.samples;
    j["subproblem_iters"] = r.subproblem_iters;
    records.push_back(std::move(j));
  }
  return nlohmann::json{{"header", header}, {"records", std::move(records)}};
}

std::vector<IterateTrace> trace_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
    throw TraceIoError("trace: JSON document lacks a records array");
  std::vector<IterateTrace> out;
  try {
    for (const auto& j : doc["records"]) {
      IterateTrace r;
      r.k = j.at("iter").get<int>();
      if (!j.at("time_s").is_null()) r.wall_time = j["time_s"].get<double>();
      r.lambda = j.at("lambda").get<double>();
      r.step_norm = j.at("step_norm").get<double>();
      r.grad_norm = j.at("grad_norm").get<double>();
      if (!j.at("gap").is_null()) r.gap = j["gap"].get<double>();
      r.hat_dist = j.at("hat_dist").get<double>();
      r.samples = j.at("samples").get<std::size_t>();
      r.subproblem_iters = j.at("subproblem_iters").get<int>();
      out.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw TraceIoError(std::string("trace: malformed JSON record: ") + e.what());
  }
  return out;
}

void emit_trace(const std::vector<IterateTrace>& trace, const std::string& path, TraceFormat format,
                const nlohmann::json& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceIoError("cannot open '" + path + "' for writing");
  if (format == TraceFormat::csv) {
    out << trace_to_csv(trace);
  } else {
    out << trace_to_json(trace, header).dump(2) << '\n';
  }
  if (!out) throw TraceIoError("write to '" + path + "' failed");
}

std::vector<IterateTrace> read_trace(const std::string& path, TraceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceIoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (format == TraceFormat::csv) return trace_from_csv(buf.str());
  try {
    return trace_from_json(nlohmann::json::parse(buf.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceIoError("'" + path + "': " + e.what());
  }
}

bool same_persisted_fields(const IterateTrace& a, const IterateTrace& b) {
  return a.k == b.k && a.wall_time == b.wall_time && a.lambda == b.lambda &&
         a.step_norm == b.step_norm && a.grad_norm == b.grad_norm && a.gap == b.gap &&
         a.hat_dist == b.hat_dist && a.samples == b.samples &&
         a.subproblem_iters == b.subproblem_iters;
}

}  // namespace nmm
