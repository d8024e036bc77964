#include "restartagd/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "restartagd/baselines.hpp"
#include "restartagd/hessian_free_checks.hpp"
#include "restartagd/svg_plot.hpp"
#include "restartagd/trace_io.hpp"

namespace restartagd {

namespace fs = std::filesystem;

std::string_view to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Proposed: return "proposed";
    case SolverKind::GD: return "gd";
    case SolverKind::LL2022: return "ll2022";
  }
  return "?";
}

std::optional<SolverKind> parse_solver(std::string_view s) {
  if (s == "proposed") return SolverKind::Proposed;
  if (s == "gd") return SolverKind::GD;
  if (s == "ll2022") return SolverKind::LL2022;
  return std::nullopt;
}

std::string_view to_string(MVariant v) { return v == MVariant::Practical ? "practical" : "theoretical"; }

std::optional<MVariant> parse_m_variant(std::string_view s) {
  if (s == "practical") return MVariant::Practical;
  if (s == "theoretical") return MVariant::Theoretical;
  return std::nullopt;
}

RunReport execute(const RunConfig& c, const ProblemSpec& problem, const TraceSink& sink) {
  switch (c.solver) {
    case SolverKind::Proposed: {
      SolverParams p;
      p.L_init = c.l_init;
      p.M_0 = c.m0;
      p.alpha = c.alpha;
      p.beta = c.beta;
      p.m_variant = c.m_variant;
      p.termination = c.termination;
      return run(problem.objective, problem.x_init, p, sink);
    }
    case SolverKind::GD: {
      GdParams p;
      p.L_init = c.l_init;
      p.alpha = c.alpha;
      p.beta = c.beta;
      p.termination = c.termination;
      return gd_run(problem.objective, problem.x_init, p, sink);
    }
    case SolverKind::LL2022: {
      LL2022Params p;
      p.L_f = c.l_init;
      p.M_f = c.m0;
      p.eps = c.ll_eps;
      p.termination = c.termination;
      return ll2022_run(problem.objective, problem.x_init, p, sink);
    }
  }
  throw ParamError("unknown solver");
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["problem"] = {{"name", c.problem.name},         {"dim", c.problem.dim},   {"lambda", c.problem.lambda},
                  {"rows", c.problem.rows},         {"cols", c.problem.cols}, {"rank", c.problem.rank},
                  {"density", c.problem.density},   {"seed", c.problem.seed}, {"data_file", c.problem.data_file}};
  j["solver"] = std::string(to_string(c.solver));
  j["m_variant"] = std::string(to_string(c.m_variant));
  j["l_init"] = c.l_init;
  j["m0"] = c.m0;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  if (c.solver == SolverKind::LL2022) j["ll_eps"] = c.ll_eps;
  const auto& t = c.termination;
  j["eps"] = t.eps ? nlohmann::json(*t.eps) : nlohmann::json(nullptr);
  j["max_oracle_calls"] = t.max_oracle_calls ? nlohmann::json(*t.max_oracle_calls) : nlohmann::json(nullptr);
  j["max_seconds"] = t.max_seconds ? nlohmann::json(*t.max_seconds) : nlohmann::json(nullptr);
  j["certify"] = std::string(to_string(t.certify_mode));
  return j;
}

std::optional<std::int64_t> calls_to_reach(const std::vector<TraceRecord>& trace, double eps) {
  for (const auto& r : trace) {
    const double g = r.grad_norm_ybar ? std::min(r.grad_norm_monitor, *r.grad_norm_ybar) : r.grad_norm_monitor;
    if (g <= eps) return r.n_oracle;
  }
  return std::nullopt;
}

namespace {

/// Raw option values as bound to CLI11; enums stay strings until checked.
struct RunOptions {
  ProblemOptions problem;
  std::string solver = "proposed";
  std::string m_variant = "practical";
  std::string certify = "on-candidate";
  double l_init = 1e-3;
  double m0 = 1e-16;
  double alpha = 2.0;
  double beta = 0.9;
  double ll_eps = 1e-16;
  std::optional<double> eps;
  std::int64_t max_oracle_calls = 100000;
  std::optional<double> max_seconds;
  std::string out = "restartagd_out";
};

void add_problem_options(CLI::App* app, ProblemOptions& p) {
  app->add_option("--problem", p.name, "rosenbrock | quadratic | cosine_sum | matrix_completion | movielens")
      ->capture_default_str();
  app->add_option("--dim", p.dim, "Dimension of quadratic / cosine_sum")->capture_default_str();
  app->add_option("--lambda", p.lambda, "Curvature of quadratic")->capture_default_str();
  app->add_option("--rows", p.rows, "Synthetic completion rows")->capture_default_str();
  app->add_option("--cols", p.cols, "Synthetic completion columns")->capture_default_str();
  app->add_option("--rank", p.rank, "Factorization rank")->capture_default_str();
  app->add_option("--density", p.density, "Observed fraction for synthetic completion")->capture_default_str();
  app->add_option("--seed", p.seed, "Seed for problem data and initial point")->capture_default_str();
  app->add_option("--data-file", p.data_file, "MovieLens u.data (default: $RESTARTAGD_DATA/u.data)");
}

void add_solver_options(CLI::App* app, RunOptions& o) {
  app->add_option("--m-variant", o.m_variant, "practical | theoretical")->capture_default_str();
  app->add_option("--alpha", o.alpha, "L growth factor after an unsuccessful epoch")->capture_default_str();
  app->add_option("--beta", o.beta, "L shrink factor after a successful epoch")->capture_default_str();
  app->add_option("--ll-eps", o.ll_eps, "Target accuracy built into LL2022's parameters")->capture_default_str();
  app->add_option("--eps", o.eps, "Stop once a certified gradient norm is <= eps");
  app->add_option("--max-oracle-calls", o.max_oracle_calls, "Oracle budget")->capture_default_str();
  app->add_option("--max-seconds", o.max_seconds, "Wall-clock limit");
  app->add_option("--certify", o.certify, "on-candidate | every-iter")->capture_default_str();
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
}

/// Resolves enum strings and the dataset path; throws ParamError.
RunConfig resolve(const RunOptions& o, std::string_view solver) {
  RunConfig c;
  c.problem = o.problem;
  const auto s = parse_solver(solver);
  if (!s) throw ParamError("unknown solver '" + std::string(solver) + "' (proposed | gd | ll2022)");
  c.solver = *s;
  const auto v = parse_m_variant(o.m_variant);
  if (!v) throw ParamError("unknown m-variant '" + o.m_variant + "' (practical | theoretical)");
  c.m_variant = *v;
  const auto cm = parse_certify_mode(o.certify);
  if (!cm) throw ParamError("unknown certify mode '" + o.certify + "' (on-candidate | every-iter)");
  c.termination.certify_mode = *cm;
  c.termination.eps = o.eps;
  c.termination.max_oracle_calls = o.max_oracle_calls;
  c.termination.max_seconds = o.max_seconds;
  c.termination.validate();
  c.l_init = o.l_init;
  c.m0 = o.m0;
  c.alpha = o.alpha;
  c.beta = o.beta;
  c.ll_eps = o.ll_eps;
  if (c.problem.name == "movielens" && c.problem.data_file.empty()) {
    if (const char* dir = std::getenv("RESTARTAGD_DATA")) {
      const fs::path p(dir);
      c.problem.data_file = fs::is_directory(p) ? (p / "u.data").string() : p.string();
    }
  }
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParamError("cannot create output directory " + dir + ": " + ec.message());
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolve(o, o.solver);
  const ProblemSpec problem = make_problem(c.problem);
  ensure_dir(o.out);
  const std::string trace_path = (fs::path(o.out) / "trace.csv").string();
  const std::string report_path = (fs::path(o.out) / "report.json").string();

  std::ofstream trace_file(trace_path);
  if (!trace_file) throw ParamError("cannot write " + trace_path);
  TraceCsvWriter writer(trace_file);
  nlohmann::json context = config_to_json(c);
  try {
    const RunReport r = execute(c, problem, writer.sink());
    write_json(report_path, report_to_json(r, context));
    out << to_string(c.solver) << " on " << c.problem.name << ": " << to_string(r.reason)
        << ", |grad| = " << fmt_short(r.certified_grad_norm) << ", f = " << fmt_short(r.best_f)
        << ", oracle calls = " << r.n_oracle() << ", K = " << r.total_K << '\n';
    out << "wrote " << trace_path << " and " << report_path << '\n';
    return exit_code::kOk;
  } catch (const RunAborted& e) {
    context["error"] = e.what();
    write_json(report_path, report_to_json(e.partial(), context));
    err << "oracle failure: " << e.what() << '\n';
    return exit_code::kOracleFailure;
  }
}

struct GridOptions {
  RunOptions base;
  // Filled with the defaults below only when the option is absent, so that
  // an axis given with no values is an error rather than the default.
  std::vector<double> l_inits;
  std::vector<double> m0s;
  std::vector<std::string> solvers;
  std::vector<double> thresholds;
  int parallel = 1;
};

struct CellResult {
  bool ok = false;
  std::string error;
  RunReport report;
};

int cmd_grid(const GridOptions& g, std::ostream& out, std::ostream& err) {
  if (g.l_inits.empty() || g.m0s.empty() || g.solvers.empty()) throw ParamError("grid: every axis needs a value");
  if (g.thresholds.empty()) throw ParamError("grid: no thresholds");
  if (g.parallel < 1) throw ParamError("grid: parallel must be at least 1");

  std::vector<RunConfig> cells;
  for (const auto& s : g.solvers)
    for (double m0 : g.m0s)
      for (double l : g.l_inits) {
        RunConfig c = resolve(g.base, s);
        c.l_init = l;
        c.m0 = m0;
        cells.push_back(c);
      }
  // Fail fast on problem configuration before spawning workers.
  (void)make_problem(cells.front().problem);
  ensure_dir(g.base.out);

  auto trace_name = [](std::size_t i, const RunConfig& c) {
    return "cell" + std::to_string(i) + "_" + std::string(to_string(c.solver)) + "_L" + fmt_short(c.l_init) + "_M" +
           fmt_short(c.m0) + ".csv";
  };

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      CellResult& res = results[i];
      try {
        const ProblemSpec problem = make_problem(cells[i].problem);
        std::ofstream trace_file(fs::path(g.base.out) / trace_name(i, cells[i]));
        if (!trace_file) throw Error("cannot write trace for cell " + std::to_string(i));
        TraceCsvWriter writer(trace_file);
        res.report = execute(cells[i], problem, writer.sink());
        res.ok = true;
      } catch (const RunAborted& e) {
        res.error = e.what();
        res.report = e.partial();
      } catch (const std::exception& e) {
        res.error = e.what();
      }
    }
  };
  const int n_threads = std::min<int>(g.parallel, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::string summary_path = (fs::path(g.base.out) / "summary.csv").string();
  std::ofstream summary(summary_path);
  if (!summary) throw ParamError("cannot write " + summary_path);
  summary << "cell,solver,l_init,m0,status,reason,n_oracle,total_K,certified_grad_norm,best_f";
  for (double t : g.thresholds) summary << ",calls_to_" << fmt_short(t);
  summary << ",trace\n";
  bool any_error = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    any_error = any_error || !r.ok;
    summary << i << ',' << to_string(c.solver) << ',' << fmt_real(c.l_init) << ',' << fmt_real(c.m0) << ','
            << (r.ok ? "ok" : "error") << ',' << (r.ok ? to_string(r.report.reason) : "") << ','
            << r.report.n_oracle() << ',' << r.report.total_K << ','
            << (r.ok ? fmt_real(r.report.certified_grad_norm) : "") << ','
            << (r.ok ? fmt_real(r.report.best_f) : "");
    for (double t : g.thresholds) {
      const auto calls = calls_to_reach(r.report.trace, t);
      summary << ',' << (calls ? std::to_string(*calls) : "");
    }
    summary << ',' << trace_name(i, c) << '\n';
    if (!r.ok) err << "cell " << i << " (" << to_string(c.solver) << ", L " << fmt_short(c.l_init) << ", M "
                   << fmt_short(c.m0) << ") failed: " << r.error << '\n';
  }
  out << "ran " << cells.size() << " cells; wrote " << summary_path << '\n';
  return any_error ? exit_code::kOracleFailure : exit_code::kOk;
}

int cmd_plot(const std::vector<std::string>& traces, const std::vector<std::string>& labels,
             const std::string& output, const std::string& title, std::ostream& out) {
  if (!labels.empty() && labels.size() != traces.size()) throw ParamError("plot: one label per trace required");
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    PlotSeries s;
    s.label = labels.empty() ? fs::path(traces[i]).stem().string() : labels[i];
    s.rows = read_trace_csv(traces[i]);
    series.push_back(std::move(s));
  }
  PlotOptions opt;
  opt.title = title;
  write_svg(output, series, opt);
  out << "wrote " << output << '\n';
  return exit_code::kOk;
}

struct VerifyOptions {
  std::vector<std::string> problems = {"quadratic", "cosine_sum", "rosenbrock"};
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  double m_scale = 1.0;
  double l_scale = 1.0;
  Eigen::Index dim = 10;
};

int cmd_verify(const VerifyOptions& v, std::ostream& out) {
  SuiteOptions opt;
  opt.samples = v.samples;
  opt.seed = v.seed;
  opt.m_scale = v.m_scale;
  opt.l_scale = v.l_scale;
  opt.validate();
  if (v.problems.empty()) throw ParamError("verify: no problems selected");

  const auto suite = default_suite(v.dim);
  std::vector<const SuiteProblem*> chosen;
  for (const auto& name : v.problems) {
    auto it = std::find_if(suite.begin(), suite.end(), [&](const SuiteProblem& p) { return p.name == name; });
    if (it == suite.end()) throw ParamError("verify: no inequality suite for problem '" + name + "'");
    chosen.push_back(&*it);
  }

  bool all = true;
  for (const auto* p : chosen) {
    for (const auto& s : run_inequality_suite(*p, opt)) {
      all = all && s.passed();
      out << (s.passed() ? "PASS " : "FAIL ") << s.problem << ' ' << s.check << " samples=" << s.samples
          << " violations=" << s.violations << " worst_slack=" << fmt_short(s.worst_slack) << '\n';
    }
  }
  out << (all ? "all checks passed" : "some checks failed") << '\n';
  return all ? exit_code::kOk : exit_code::kCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parameter-free restarted accelerated gradient descent: runs, grids, plots and checks", "restartagd"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML/INI; [run], [grid], [verify] sections); flags win");

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run one solver on one problem; write trace.csv and report.json");
  add_problem_options(run_cmd, run_opt.problem);
  run_cmd->add_option("--solver", run_opt.solver, "proposed | gd | ll2022")->capture_default_str();
  run_cmd->add_option("--l-init", run_opt.l_init, "Initial L (L_f for ll2022)")->capture_default_str();
  run_cmd->add_option("--m0", run_opt.m0, "Initial M (M_f for ll2022)")->capture_default_str();
  add_solver_options(run_cmd, run_opt);

  GridOptions grid_opt;
  grid_opt.base.out = "restartagd_grid";
  auto* grid_cmd = app.add_subcommand("grid", "Run the Cartesian product of L and M guesses and solvers");
  add_problem_options(grid_cmd, grid_opt.base.problem);
  auto* grid_solvers =
      grid_cmd->add_option("--solver", grid_opt.solvers, "Solvers to run [proposed gd]")->expected(0, -1);
  auto* grid_l = grid_cmd->add_option("--l-init", grid_opt.l_inits, "L guesses [100 1000 10000]")->expected(0, -1);
  auto* grid_m = grid_cmd->add_option("--m0", grid_opt.m0s, "M guesses [1 10 100]")->expected(0, -1);
  auto* grid_t = grid_cmd->add_option("--thresholds", grid_opt.thresholds,
                                      "Gradient-norm levels for the summary [1e-2 ... 1e-6]")
                     ->expected(0, -1);
  grid_cmd->add_option("--parallel", grid_opt.parallel, "Worker threads")->capture_default_str();
  add_solver_options(grid_cmd, grid_opt.base);

  std::vector<std::string> plot_traces, plot_labels;
  std::string plot_out = "plot.svg", plot_title;
  auto* plot_cmd = app.add_subcommand("plot", "Plot objective and gradient norm against oracle calls");
  plot_cmd->add_option("traces", plot_traces, "Trace CSV files")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--label", plot_labels, "Legend label per trace (default: file stem)");
  plot_cmd->add_option("-o,--out", plot_out, "Output SVG")->capture_default_str();
  plot_cmd->add_option("--title", plot_title, "Figure title");

  VerifyOptions verify_opt;
  auto* verify_cmd = app.add_subcommand("verify", "Check the descent, Jensen and trapezoid inequalities on samples");
  verify_cmd->add_option("--problem", verify_opt.problems, "quadratic | cosine_sum | rosenbrock")
      ->capture_default_str();
  verify_cmd->add_option("--samples", verify_opt.samples, "Draws per check")->capture_default_str();
  verify_cmd->add_option("--seed", verify_opt.seed, "Sampling seed")->capture_default_str();
  verify_cmd->add_option("--m-scale", verify_opt.m_scale, "Multiply M fed to the checks")->capture_default_str();
  verify_cmd->add_option("--l-scale", verify_opt.l_scale, "Multiply L fed to the checks")->capture_default_str();
  verify_cmd->add_option("--dim", verify_opt.dim, "cosine_sum dimension")->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("restartagd");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opt, out, err);
    if (grid_cmd->parsed()) {
      auto axis = [](CLI::Option* opt, auto& values, std::initializer_list<typename std::decay_t<decltype(values)>::value_type> defaults) {
        const auto& given = opt->results();
        if (opt->count() == 0) {
          values.assign(defaults);
        } else if (std::all_of(given.begin(), given.end(), [](const std::string& r) { return r.empty(); })) {
          values.clear();  // "--l-init" with no values, or an empty list in the config file
        }
      };
      axis(grid_solvers, grid_opt.solvers, {"proposed", "gd"});
      axis(grid_l, grid_opt.l_inits, {1e2, 1e3, 1e4});
      axis(grid_m, grid_opt.m0s, {1.0, 10.0, 100.0});
      axis(grid_t, grid_opt.thresholds, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
      return cmd_grid(grid_opt, out, err);
    }
    if (plot_cmd->parsed()) return cmd_plot(plot_traces, plot_labels, plot_out, plot_title, out);
    if (verify_cmd->parsed()) return cmd_verify(verify_opt, out);
  } catch (const RunAborted& e) {
    err << "oracle failure: " << e.what() << '\n';
    return exit_code::kOracleFailure;
  } catch (const NonFiniteValue& e) {
    err << "oracle failure: " << e.what() << '\n';
    return exit_code::kOracleFailure;
  } catch (const NonFiniteGradient& e) {
    err << "oracle failure: " << e.what() << '\n';
    return exit_code::kOracleFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfigError;
  }
  return exit_code::kConfigError;
}

}  // namespace restartagd
