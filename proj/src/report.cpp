#include "restartagd/report.hpp"

namespace restartagd {

void TerminationPolicy::validate() const {
  if (!eps && !max_oracle_calls && !max_seconds) {
    throw ParamError("termination policy needs at least one of eps, max_oracle_calls, max_seconds");
  }
  if (eps && !(*eps > 0.0)) throw ParamError("eps must be positive");
  if (max_oracle_calls && *max_oracle_calls <= 0) throw ParamError("max_oracle_calls must be positive");
  if (max_seconds && !(*max_seconds > 0.0)) throw ParamError("max_seconds must be positive");
}

std::string_view to_string(TraceEvent e) {
  switch (e) {
    case TraceEvent::Step: return "Step";
    case TraceEvent::RestartUnsuccessful: return "RestartUnsuccessful";
    case TraceEvent::RestartSuccessful: return "RestartSuccessful";
    case TraceEvent::Terminated: return "Terminated";
  }
  return "?";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::EpsReached: return "EpsReached";
    case StopReason::BudgetExhausted: return "BudgetExhausted";
    case StopReason::TimeLimit: return "TimeLimit";
    case StopReason::Stationary: return "Stationary";
  }
  return "?";
}

std::string_view to_string(CertifyMode m) {
  return m == CertifyMode::EveryIter ? "EveryIter" : "OnCandidate";
}

std::optional<TraceEvent> parse_trace_event(std::string_view s) {
  for (auto e : {TraceEvent::Step, TraceEvent::RestartUnsuccessful, TraceEvent::RestartSuccessful,
                 TraceEvent::Terminated}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::optional<StopReason> parse_stop_reason(std::string_view s) {
  for (auto r : {StopReason::EpsReached, StopReason::BudgetExhausted, StopReason::TimeLimit,
                 StopReason::Stationary}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<CertifyMode> parse_certify_mode(std::string_view s) {
  if (s == "EveryIter" || s == "every-iter") return CertifyMode::EveryIter;
  if (s == "OnCandidate" || s == "on-candidate") return CertifyMode::OnCandidate;
  return std::nullopt;
}

}  // namespace restartagd
