#pragma once

#include "restartagd/oracle.hpp"
#include "restartagd/report.hpp"

namespace restartagd {

struct GdParams {
  double L_init = 1e-3;
  double alpha = 2.0;
  double beta = 0.9;
  TerminationPolicy termination;

  void validate() const;
};

/// Gradient descent with Armijo-type backtracking on the inverse step L.
/// A trial x+ = x - grad/L is accepted when f(x+) <= f(x) - |grad|^2/(2L);
/// otherwise L <- alpha L. After acceptance L <- beta L.
/// Every trial is one trace row; rejected trials carry RestartUnsuccessful.
RunReport gd_run(const Objective& objective, const Point& x_init, const GdParams& params,
                 const TraceSink& sink = {});

/// Fixed-parameter restarted AGD: step 1/L_f, constant momentum
/// theta = 1 - 2 (M_f eps)^(1/4) / sqrt(L_f), restart from x_k once
/// k M_f S_k > eps.
struct LL2022Params {
  double L_f = 1.0;
  double M_f = 1.0;
  double eps = 1e-16;
  TerminationPolicy termination;

  void validate() const;
  double theta() const;
};

RunReport ll2022_run(const Objective& objective, const Point& x_init, const LL2022Params& params,
                     const TraceSink& sink = {});

}  // namespace restartagd
