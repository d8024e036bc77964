#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "restartagd/report.hpp"

namespace restartagd {

/// Malformed trace CSV; line() is 1-based, the header being line 1.
class TraceFormatError : public Error {
 public:
  TraceFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Column order of every trace CSV. The header row is mandatory.
inline constexpr std::array<std::string_view, 11> kTraceColumns = {
    "K", "epoch", "k", "n_oracle", "f_x", "grad_norm_monitor", "grad_norm_ybar", "L", "M", "S_k", "event"};

/// Reals are written with 17 significant digits, so reading a trace back
/// reproduces every field bit for bit. An absent grad_norm_ybar is an
/// empty field.
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRecord& row);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows);

std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

/// Streams rows to a CSV as a run produces them; the header goes out on
/// construction and the stream is flushed at every epoch end.
class TraceCsvWriter {
 public:
  explicit TraceCsvWriter(std::ostream& out);

  void write(const TraceRecord& row, bool end_of_epoch);
  /// A sink bound to this writer; the writer must outlive the run.
  TraceSink sink();

 private:
  std::ostream* out_;
};

/// Report document. Keys:
///   schema_version (1), solver ("proposed" | "gd" | "ll2022"),
///   reason (EpsReached | BudgetExhausted | TimeLimit | Stationary),
///   certified_grad_norm, final_L, final_M, best_f, seconds (number, or null
///   when not finite), total_K, total_epochs, n_value, n_grad, n_oracle
///   (nonnegative integers, n_oracle = n_value + n_grad), trace_rows,
///   solution and anchor_values (arrays of numbers),
///   ledger {initial, iteration, certification, memo_hits},
///   context (object supplied by the caller: problem, parameters, seed).
nlohmann::json report_to_json(const RunReport& report, const nlohmann::json& context = nlohmann::json::object());

/// Schema violations of a report document; empty when it conforms.
std::vector<std::string> validate_report_json(const nlohmann::json& doc);

void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace restartagd
