#pragma once

// Bookkeeping shared by every solver's run loop: best certificate, trace,
// budget and clock checks.

#include <chrono>
#include <limits>
#include <string>

#include "restartagd/report.hpp"

namespace restartagd::detail {

class RunRecorder {
 public:
  RunRecorder(std::string solver, const TerminationPolicy& policy, const TraceSink& sink)
      : policy_(policy), sink_(sink), started_(std::chrono::steady_clock::now()) {
    report_.solver = std::move(solver);
    report_.certified_grad_norm = std::numeric_limits<double>::infinity();
    report_.best_f = std::numeric_limits<double>::infinity();
  }

  void offer_candidate(double norm, const Point& x) {
    if (norm < report_.certified_grad_norm || report_.solution.size() == 0) {
      report_.certified_grad_norm = norm;
      report_.solution = x;
    }
  }

  void offer_value(double f) {
    if (f < report_.best_f) report_.best_f = f;
  }

  void anchor(double f) { report_.anchor_values.push_back(f); }

  void push(const TraceRecord& row, bool end_of_epoch) {
    report_.trace.push_back(row);
    if (sink_) sink_(row, end_of_epoch);
  }

  bool eps_reached() const {
    return policy_.eps && report_.certified_grad_norm <= *policy_.eps;
  }

  /// True if spending `cost` more oracle calls stays within the budget.
  bool budget_allows(std::int64_t n_oracle, std::int64_t cost) const {
    return !policy_.max_oracle_calls || n_oracle + cost <= *policy_.max_oracle_calls;
  }

  bool out_of_time() const { return policy_.max_seconds && elapsed() >= *policy_.max_seconds; }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  }

  RunReport& report() { return report_; }

  RunReport finish(StopReason reason, const EvalCounter& counter) {
    report_.reason = reason;
    report_.n_value = counter.n_value;
    report_.n_grad = counter.n_grad;
    report_.ledger.memo_hits = counter.n_memo_hits;
    report_.seconds = elapsed();
    return std::move(report_);
  }

  RunReport partial(const EvalCounter& counter) {
    report_.n_value = counter.n_value;
    report_.n_grad = counter.n_grad;
    report_.ledger.memo_hits = counter.n_memo_hits;
    report_.seconds = elapsed();
    return report_;
  }

 private:
  const TerminationPolicy& policy_;
  const TraceSink& sink_;
  std::chrono::steady_clock::time_point started_;
  RunReport report_;
};

}  // namespace restartagd::detail
