#pragma once

#include <functional>
#include <string>
#include <vector>

#include "acmri/types.hpp"

namespace acmri {

// Evaluates f(x) and writes its gradient into `grad` (already sized).
using ObjectiveFn = std::function<double(const RVector& x, RVector& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 500;
  double grad_tol = 1e-8;   // on the infinity norm of the gradient
  double rel_tol = 1e-14;   // (f_prev - f) / max(|f_prev|, |f|)
  int max_line_search = 40;
  double c1 = 1e-4;         // sufficient decrease
  double c2 = 0.9;          // curvature
};

enum class LbfgsStatus {
  gradient_converged,
  objective_converged,
  max_iterations,
  line_search_failed,
  non_finite,
};

std::string to_string(LbfgsStatus status);

struct LbfgsResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  std::vector<double> history;  // objective at each accepted iterate, starting with x0

  bool converged() const {
    return status == LbfgsStatus::gradient_converged || status == LbfgsStatus::objective_converged;
  }
};

// Limited-memory BFGS with a strong-Wolfe line search for smooth
// unconstrained problems.
LbfgsResult minimize_lbfgs(const ObjectiveFn& f, RVector x0, const LbfgsOptions& options = {});

}  // namespace acmri
