#pragma once

#include <string>
#include <vector>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/solver.hpp"
#include "acmri/types.hpp"

namespace acmri {

enum class BaselineMethod { zero_fill, tikhonov, tv2d };

std::string to_string(BaselineMethod method);
BaselineMethod baseline_method_from_string(const std::string& name);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::zero_fill;
  double alpha = 0.0;
  double beta = kDefaultBeta;
  int max_iter = 500;
  double tolerance = 1e-10;

  void validate() const;
};

// Per coil: masked centered 2-D DFT of sum_q s_jq F_q.
CoilStack forward_2d(const std::vector<CMatrix>& F_maps, const CoilStack& maps, const SamplingMask& mask);
// Adjoint of forward_2d.
std::vector<CMatrix> adjoint_2d(const CoilStack& kspace, const CoilStack& maps, const SamplingMask& mask);

// Real stacked unknown [Re F_1..F_p ; Im F_1..F_p], each image column-major.
RVector pack_images(const std::vector<CMatrix>& images);
std::vector<CMatrix> unpack_images(const RVector& z, int n, int m, int maps);

// sqrt(||grad Re F||^2 + ||grad Im F||^2 + beta^2) over all maps, forward
// differences along both axes without wrap-around.
TvValue smoothed_tv_2d(const RVector& z, int n, int m, int maps, double beta);

// ||forward(F) - data||^2 + alpha * smoothed_tv_2d(F).
ObjectiveValue tv2d_objective(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask,
                              const RVector& z, double alpha, double beta);

struct CgResult {
  std::vector<CMatrix> F_maps;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::vector<double> residual_norms;  // ||r_k|| of the normal equations
};

// Conjugate gradient on (E^H E + alpha I) F = E^H data, E = forward_2d.
CgResult tikhonov_cg(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask, double alpha,
                     int max_iter, double tolerance);

ReconResult reconstruct_baseline(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask,
                                 const BaselineSpec& spec);

}  // namespace acmri
