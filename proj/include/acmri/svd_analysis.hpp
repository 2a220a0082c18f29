#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/operators.hpp"
#include "acmri/types.hpp"

namespace acmri {

inline constexpr double kDefaultNullThreshold = 0.01;

struct SvdReport {
  RVector sigma;                    // pooled, non-increasing
  std::vector<RVector> block_sigma;  // per block, non-increasing
  double kappa = 1.0;               // sigma_max / sigma_min, +inf when sigma_min == 0
  int null_dim = 0;                 // count of sigma < t
  int null_dim_argmin = 0;          // total - argmin_i |sigma_i - t| (1-based i, last minimizer)
  double threshold = kDefaultNullThreshold;
  CMatrix rsv_image;                // column i: right singular vector of block i for its smallest sigma
};

// Singular values of a block-diagonal operator from its diagonal blocks.
SvdReport svd_blocks(std::span<const CMatrix> blocks, double threshold = kDefaultNullThreshold,
                     int threads = 1);

double condition_number(const RVector& sigma_desc);
int null_dimension(const RVector& sigma_desc, double threshold);
int null_dimension_argmin(const RVector& sigma_desc, double threshold);

struct Truncation {
  std::optional<double> threshold;  // keep sigma > threshold
  std::optional<int> rank;          // keep the `rank` largest per block
};

struct PseudoinverseResult {
  CVector x;
  int retained = 0;
  bool all_truncated = false;
};

// sum_i (u_i^H b / sigma_i) v_i over retained singular triplets of the
// block-diagonal operator; b stacks the blocks' row segments in order.
PseudoinverseResult pseudoinverse_apply(std::span<const CMatrix> blocks, const CVector& b,
                                        const Truncation& truncation = {});

// A_i = [A S^(1)_i; ...; A S^(K)_i] for each column i (single-map form).
std::vector<CMatrix> single_map_blocks(const FredholmMatrix& op, const CoilStack& maps);
// C_i with all p maps of every coil.
std::vector<CMatrix> multi_map_blocks(const FredholmMatrix& op, const CoilStack& maps);

struct SweepConfig {
  std::string label;
  SamplingMask mask;
  std::vector<int> coils;  // subset of coil indices into the map stack
};

struct SweepRow {
  std::string label;
  double kappa;
  int null_dim;
  int null_dim_argmin;
  double threshold;
  double scan_time;
  SvdReport report;
};

struct SweepOptions {
  double threshold = kDefaultNullThreshold;
  bool multi_map = false;
  int threads = 1;
};

std::vector<SweepRow> stability_sweep(std::span<const SweepConfig> configs, const CoilStack& maps,
                                      const SweepOptions& options = {});

}  // namespace acmri
