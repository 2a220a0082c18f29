#pragma once

#include <string>
#include <vector>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/lbfgs.hpp"
#include "acmri/operators.hpp"
#include "acmri/types.hpp"

namespace acmri {

inline constexpr double kDefaultBeta = 0.01;

struct TvParams {
  double alpha = 0.0;
  double beta = kDefaultBeta;

  void validate() const;
};

// How finite differences run across the stacked map vectors.
enum class TvChain {
  per_map,        // differences stay inside each map's n-vector
  single_chain,  // one chain over the full n*p stacked vector
};

struct TvValue {
  double value;
  RVector grad_x;
  RVector grad_y;
};

// sqrt(sum (x_{i+1}-x_i)^2 + sum (y_{i+1}-y_i)^2 + beta^2) and its gradient.
// With segment > 0, differences across multiples of `segment` are skipped.
TvValue smoothed_tv(const RVector& x, const RVector& y, double beta, Eigen::Index segment = 0);

struct ObjectiveValue {
  double value;
  RVector gradient;
};

// ||M z - b||^2 + alpha * TV_beta(Re, Im) for the stacked real unknown z.
ObjectiveValue slice_objective(const RealifiedSystem& sys, const RVector& z, const TvParams& params,
                               int maps = 1, TvChain chain = TvChain::per_map);

// Reusable form of slice_objective; used inside the solver.
class SliceObjective {
 public:
  SliceObjective(const RealifiedSystem& sys, const TvParams& params, int maps, TvChain chain);

  double operator()(const RVector& z, RVector& grad) const;
  Eigen::Index size() const { return M_.cols(); }

 private:
  RMatrix M_;
  RVector b_;
  TvParams params_;
  Eigen::Index half_;
  Eigen::Index segment_;
};

struct SolverOptions {
  int max_iter = 500;
  double grad_tol = 1e-8;
  double rel_tol = 1e-14;
  int memory = 10;
  TvChain chain = TvChain::per_map;
};

enum class SolveStatus { ok, not_converged, numerical_failure };

std::string to_string(SolveStatus status);

struct SliceSolution {
  std::vector<CVector> F_maps;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::ok;
  std::vector<double> history;
};

// Sensitivity-weighted combination of the data column: F_q = sum_j conj(s_jq) b_j / sum_jq |s_jq|^2.
std::vector<CVector> zero_filled_estimate(const SliceSystem& sys, const CoilStack& maps);

SliceSolution solve_slice(const SliceSystem& sys, const TvParams& params, const SolverOptions& opts,
                          const std::vector<CVector>& initial = {});

struct SliceDiagnostics {
  int column = 0;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  SolveStatus status = SolveStatus::ok;
};

struct ReconResult {
  std::string method;
  RMatrix magnitude;
  std::vector<CMatrix> map_images;
  std::vector<SliceDiagnostics> slices;
  SolveStatus status = SolveStatus::ok;

  std::vector<int> failed_slices() const;
};

// sqrt(sum_q |F_q|^2) pointwise.
RMatrix combine_maps(const std::vector<CMatrix>& map_images);

// Root-sum-of-squares over coils (first map of each coil).
RMatrix sos_combine(const CoilStack& coil_images);

// Slice-by-slice reconstruction with the DFT-variant operator built from
// `mask`. Slices are independent and may run on `threads` workers.
ReconResult reconstruct(const CoilStack& g, const CoilStack& maps, const SamplingMask& mask,
                        const TvParams& params, const SolverOptions& opts = {}, int threads = 1);

}  // namespace acmri
