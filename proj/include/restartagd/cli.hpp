#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "restartagd/agd_solver.hpp"
#include "restartagd/problems.hpp"

namespace restartagd {

enum class SolverKind { Proposed, GD, LL2022 };

std::string_view to_string(SolverKind s);
std::optional<SolverKind> parse_solver(std::string_view s);
std::string_view to_string(MVariant v);
std::optional<MVariant> parse_m_variant(std::string_view s);

/// Everything one solver run needs besides the problem. LL2022 takes
/// l_init and m0 as its fixed constants L_f and M_f.
struct RunConfig {
  ProblemOptions problem;
  SolverKind solver = SolverKind::Proposed;
  MVariant m_variant = MVariant::Practical;
  double l_init = 1e-3;
  double m0 = 1e-16;
  double alpha = 2.0;
  double beta = 0.9;
  double ll_eps = 1e-16;
  TerminationPolicy termination;
};

RunReport execute(const RunConfig& config, const ProblemSpec& problem, const TraceSink& sink = {});

nlohmann::json config_to_json(const RunConfig& config);

/// n_oracle of the first trace row whose genuinely evaluated gradient norm
/// (monitor or averaged point) is <= eps.
std::optional<std::int64_t> calls_to_reach(const std::vector<TraceRecord>& trace, double eps);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kOracleFailure = 3;
}  // namespace exit_code

/// Subcommands run | grid | plot | verify. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace restartagd
