#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restartagd/oracle.hpp"

namespace restartagd {

enum class CertifyMode { EveryIter, OnCandidate };

/// When to stop a run. At least one of eps, max_oracle_calls and max_seconds
/// must be set.
struct TerminationPolicy {
  std::optional<double> eps;
  std::optional<std::int64_t> max_oracle_calls;
  std::optional<double> max_seconds;
  CertifyMode certify_mode = CertifyMode::OnCandidate;

  void validate() const;
};

enum class TraceEvent { Step, RestartUnsuccessful, RestartSuccessful, Terminated };

enum class StopReason { EpsReached, BudgetExhausted, TimeLimit, Stationary };

/// One row per iteration. L is the estimate in force during the iteration,
/// M the estimate after this iteration's update; k and S_k are the epoch
/// counters before any restart reset.
struct TraceRecord {
  std::int64_t K = 0;
  std::int64_t epoch = 0;
  std::int64_t k = 0;
  std::int64_t n_oracle = 0;
  double f_x = 0.0;
  double grad_norm_monitor = 0.0;
  std::optional<double> grad_norm_ybar;
  double L = 0.0;
  double M = 0.0;
  double S_k = 0.0;
  TraceEvent event = TraceEvent::Step;

  bool operator==(const TraceRecord&) const = default;
};

/// Breakdown of n_oracle by purpose, used to reconcile the trace.
struct OracleLedger {
  std::int64_t initial = 0;        // f and grad at x_init
  std::int64_t iteration = 0;      // per-iteration evaluations of the method itself
  std::int64_t certification = 0;  // gradients at averaged points
  std::int64_t memo_hits = 0;
};

struct RunReport {
  std::string solver;
  Point solution;
  double certified_grad_norm = 0.0;
  std::int64_t total_K = 0;
  std::int64_t total_epochs = 0;
  std::int64_t n_value = 0;
  std::int64_t n_grad = 0;
  StopReason reason = StopReason::BudgetExhausted;
  double final_L = 0.0;
  double final_M = 0.0;
  /// Lowest objective value among evaluated iterates.
  double best_f = 0.0;
  double seconds = 0.0;
  std::vector<double> anchor_values;
  OracleLedger ledger;
  std::vector<TraceRecord> trace;

  std::int64_t n_oracle() const { return n_value + n_grad; }
};

/// Thrown when an oracle failure interrupts a run; carries everything
/// recorded up to the failure.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, RunReport partial) : Error(what), partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

/// Receives trace rows as they are produced. `end_of_epoch` is set on rows
/// that close an epoch (restart or termination).
using TraceSink = std::function<void(const TraceRecord&, bool end_of_epoch)>;

std::string_view to_string(TraceEvent e);
std::string_view to_string(StopReason r);
std::string_view to_string(CertifyMode m);
std::optional<TraceEvent> parse_trace_event(std::string_view s);
std::optional<StopReason> parse_stop_reason(std::string_view s);
std::optional<CertifyMode> parse_certify_mode(std::string_view s);

}  // namespace restartagd
