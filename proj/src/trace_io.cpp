#include "restartagd/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace restartagd {

TraceFormatError::TraceFormatError(std::size_t line, const std::string& what)
    : Error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string format_real(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_int(std::string_view s, std::size_t line, std::string_view column) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw TraceFormatError(line, "column " + std::string(column) + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::size_t line, std::string_view column) {
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw TraceFormatError(line, "column " + std::string(column) + ": expected a number, got '" + buf + "'");
  }
  return v;
}

}  // namespace

void write_trace_header(std::ostream& out) {
  for (std::size_t i = 0; i < kTraceColumns.size(); ++i) out << (i ? "," : "") << kTraceColumns[i];
  out << '\n';
}

void write_trace_row(std::ostream& out, const TraceRecord& r) {
  out << r.K << ',' << r.epoch << ',' << r.k << ',' << r.n_oracle << ',' << format_real(r.f_x) << ','
      << format_real(r.grad_norm_monitor) << ',' << (r.grad_norm_ybar ? format_real(*r.grad_norm_ybar) : "") << ','
      << format_real(r.L) << ',' << format_real(r.M) << ',' << format_real(r.S_k) << ',' << to_string(r.event)
      << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& rows) {
  write_trace_header(out);
  for (const auto& r : rows) write_trace_row(out, r);
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_trace_csv(out, rows);
  if (!out) throw Error("error writing " + path);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw TraceFormatError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() != kTraceColumns.size() || !std::equal(header.begin(), header.end(), kTraceColumns.begin())) {
    throw TraceFormatError(1, "header does not match the trace columns");
  }

  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kTraceColumns.size()) {
      throw TraceFormatError(lineno, "expected " + std::to_string(kTraceColumns.size()) + " fields, got " +
                                         std::to_string(f.size()));
    }
    TraceRecord r;
    r.K = parse_int(f[0], lineno, kTraceColumns[0]);
    r.epoch = parse_int(f[1], lineno, kTraceColumns[1]);
    r.k = parse_int(f[2], lineno, kTraceColumns[2]);
    r.n_oracle = parse_int(f[3], lineno, kTraceColumns[3]);
    r.f_x = parse_real(f[4], lineno, kTraceColumns[4]);
    r.grad_norm_monitor = parse_real(f[5], lineno, kTraceColumns[5]);
    if (!f[6].empty()) r.grad_norm_ybar = parse_real(f[6], lineno, kTraceColumns[6]);
    r.L = parse_real(f[7], lineno, kTraceColumns[7]);
    r.M = parse_real(f[8], lineno, kTraceColumns[8]);
    r.S_k = parse_real(f[9], lineno, kTraceColumns[9]);
    const auto ev = parse_trace_event(f[10]);
    if (!ev) throw TraceFormatError(lineno, "unknown event '" + std::string(f[10]) + "'");
    r.event = *ev;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_trace_csv(in);
}

TraceCsvWriter::TraceCsvWriter(std::ostream& out) : out_(&out) { write_trace_header(out); }

void TraceCsvWriter::write(const TraceRecord& row, bool end_of_epoch) {
  write_trace_row(*out_, row);
  if (end_of_epoch) out_->flush();
}

TraceSink TraceCsvWriter::sink() {
  return [this](const TraceRecord& row, bool end_of_epoch) { write(row, end_of_epoch); };
}

namespace {

nlohmann::json real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json report_to_json(const RunReport& r, const nlohmann::json& context) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["solver"] = r.solver;
  doc["reason"] = std::string(to_string(r.reason));
  doc["certified_grad_norm"] = real(r.certified_grad_norm);
  doc["total_K"] = r.total_K;
  doc["total_epochs"] = r.total_epochs;
  doc["n_value"] = r.n_value;
  doc["n_grad"] = r.n_grad;
  doc["n_oracle"] = r.n_oracle();
  doc["final_L"] = real(r.final_L);
  doc["final_M"] = real(r.final_M);
  doc["best_f"] = real(r.best_f);
  doc["seconds"] = real(r.seconds);
  doc["trace_rows"] = r.trace.size();
  doc["solution"] = std::vector<double>(r.solution.data(), r.solution.data() + r.solution.size());
  doc["anchor_values"] = r.anchor_values;
  doc["ledger"] = {{"initial", r.ledger.initial},
                   {"iteration", r.ledger.iteration},
                   {"certification", r.ledger.certification},
                   {"memo_hits", r.ledger.memo_hits}};
  doc["context"] = context;
  return doc;
}

std::vector<std::string> validate_report_json(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"document is not an object"};

  auto require = [&](const char* key) -> const nlohmann::json* {
    if (!doc.contains(key)) {
      errors.push_back(std::string("missing key '") + key + "'");
      return nullptr;
    }
    return &doc.at(key);
  };
  auto nonneg_int = [&](const nlohmann::json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) {
      errors.push_back("missing key '" + where + key + "'");
    } else if (!parent.at(key).is_number_integer() || parent.at(key).get<std::int64_t>() < 0) {
      errors.push_back("'" + where + key + "' must be a nonnegative integer");
    }
  };

  if (const auto* v = require("schema_version"); v && *v != 1) errors.push_back("unsupported schema_version");
  if (const auto* v = require("solver")) {
    static const std::set<std::string> solvers = {"proposed", "gd", "ll2022"};
    if (!v->is_string() || !solvers.count(v->get<std::string>())) errors.push_back("'solver' out of range");
  }
  if (const auto* v = require("reason")) {
    if (!v->is_string() || !parse_stop_reason(v->get<std::string>())) errors.push_back("'reason' out of range");
  }
  for (const char* key : {"certified_grad_norm", "final_L", "final_M", "best_f", "seconds"}) {
    if (const auto* v = require(key); v && !v->is_number() && !v->is_null()) {
      errors.push_back(std::string("'") + key + "' must be a number or null");
    }
  }
  for (const char* key : {"total_K", "total_epochs", "n_value", "n_grad", "n_oracle", "trace_rows"}) {
    nonneg_int(doc, key, "");
  }
  if (errors.empty() && doc["n_oracle"].get<std::int64_t>() !=
                            doc["n_value"].get<std::int64_t>() + doc["n_grad"].get<std::int64_t>()) {
    errors.push_back("n_oracle != n_value + n_grad");
  }
  for (const char* key : {"solution", "anchor_values"}) {
    if (const auto* v = require(key)) {
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) ok = ok && e.is_number();
      }
      if (!ok) errors.push_back(std::string("'") + key + "' must be an array of numbers");
    }
  }
  if (const auto* v = require("ledger")) {
    if (!v->is_object()) {
      errors.push_back("'ledger' must be an object");
    } else {
      for (const char* key : {"initial", "iteration", "certification", "memo_hits"}) nonneg_int(*v, key, "ledger.");
    }
  }
  if (const auto* v = require("context"); v && !v->is_object()) errors.push_back("'context' must be an object");
  return errors;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error("error writing " + path);
}

}  // namespace restartagd
