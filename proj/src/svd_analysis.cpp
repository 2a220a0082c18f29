#include "acmri/svd_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "acmri/parallel.hpp"

namespace acmri {

namespace {

using Svd = Eigen::JacobiSVD<CMatrix, Eigen::ColPivHouseholderQRPreconditioner>;

struct BlockDecomposition {
  RVector sigma;   // length cols, zero-padded for wide blocks
  CVector weakest; // right singular vector of the smallest sigma
};

BlockDecomposition decompose(const CMatrix& block) {
  Svd svd(block, Eigen::ComputeFullV);
  BlockDecomposition out;
  const auto cols = block.cols();
  out.sigma = RVector::Zero(cols);
  out.sigma.head(svd.singularValues().size()) = svd.singularValues();
  out.weakest = svd.matrixV().col(cols - 1);

  // Fix the phase: largest-magnitude entry real and positive.
  Eigen::Index peak = 0;
  out.weakest.cwiseAbs().maxCoeff(&peak);
  const cplx pivot = out.weakest(peak);
  if (std::abs(pivot) > 0.0) {
    out.weakest *= std::conj(pivot) / std::abs(pivot);
    out.weakest(peak) = cplx(out.weakest(peak).real(), 0.0);
  }
  out.weakest.normalize();
  return out;
}

RVector sorted_desc(RVector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

}  // namespace

double condition_number(const RVector& sigma_desc) {
  if (sigma_desc.size() == 0) return 1.0;
  const double hi = sigma_desc(0);
  const double lo = sigma_desc(sigma_desc.size() - 1);
  if (hi == 0.0) return std::numeric_limits<double>::infinity();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

int null_dimension(const RVector& sigma_desc, double threshold) {
  return static_cast<int>((sigma_desc.array() < threshold).count());
}

int null_dimension_argmin(const RVector& sigma_desc, double threshold) {
  const auto total = static_cast<int>(sigma_desc.size());
  if (total == 0) return 0;
  // Ties resolve to the largest index, so a flat spectrum gives 0.
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < total; ++i) {
    const double dist = std::abs(sigma_desc(i) - threshold);
    if (dist <= best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return total - (best + 1);
}

SvdReport svd_blocks(std::span<const CMatrix> blocks, double threshold, int threads) {
  if (blocks.empty()) {
    throw std::invalid_argument("svd_blocks needs at least one block");
  }
  const auto cols = blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols) {
      throw std::invalid_argument("all blocks must share a column count");
    }
  }
  std::vector<BlockDecomposition> parts(blocks.size());
  parallel_for(static_cast<int>(blocks.size()), threads,
               [&](int i) { parts[static_cast<std::size_t>(i)] = decompose(blocks[static_cast<std::size_t>(i)]); });

  SvdReport report;
  report.threshold = threshold;
  report.rsv_image.resize(cols, static_cast<Eigen::Index>(blocks.size()));
  RVector pooled(cols * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    report.block_sigma.push_back(parts[i].sigma);
    pooled.segment(static_cast<Eigen::Index>(i) * cols, cols) = parts[i].sigma;
    report.rsv_image.col(static_cast<Eigen::Index>(i)) = parts[i].weakest;
  }
  report.sigma = sorted_desc(std::move(pooled));
  report.kappa = condition_number(report.sigma);
  report.null_dim = null_dimension(report.sigma, threshold);
  report.null_dim_argmin = null_dimension_argmin(report.sigma, threshold);
  return report;
}

PseudoinverseResult pseudoinverse_apply(std::span<const CMatrix> blocks, const CVector& b,
                                        const Truncation& truncation) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& block : blocks) {
    rows += block.rows();
    cols += block.cols();
  }
  if (b.size() != rows) {
    throw std::invalid_argument("data length " + std::to_string(b.size()) + " does not match " +
                                std::to_string(rows) + " stacked rows");
  }
  PseudoinverseResult out;
  out.x = CVector::Zero(cols);
  Eigen::Index row0 = 0;
  Eigen::Index col0 = 0;
  for (const auto& block : blocks) {
    Svd svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& s = svd.singularValues();
    const CVector rhs = b.segment(row0, block.rows());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const bool keep_rank = !truncation.rank || k < *truncation.rank;
      const double floor = truncation.threshold.value_or(0.0);
      if (!keep_rank || !(s(k) > floor)) continue;
      const cplx coeff = svd.matrixU().col(k).dot(rhs) / s(k);  // dot conjugates the left side
      out.x.segment(col0, block.cols()) += coeff * svd.matrixV().col(k);
      ++out.retained;
    }
    row0 += block.rows();
    col0 += block.cols();
  }
  out.all_truncated = out.retained == 0;
  return out;
}

std::vector<CMatrix> single_map_blocks(const FredholmMatrix& op, const CoilStack& maps) {
  return multi_map_blocks(op, maps.select_maps(1));
}

std::vector<CMatrix> multi_map_blocks(const FredholmMatrix& op, const CoilStack& maps) {
  const int n = op.grid.n();
  if (maps.n() != n || maps.m() != op.grid.m()) {
    throw std::invalid_argument("maps do not match the operator grid");
  }
  const int coils = maps.coils();
  const int p = maps.maps();
  std::vector<CMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(maps.m()));
  for (int i = 0; i < maps.m(); ++i) {
    CMatrix block(static_cast<Eigen::Index>(n) * coils, static_cast<Eigen::Index>(n) * p);
    for (int j = 0; j < coils; ++j) {
      for (int q = 0; q < p; ++q) {
        block.block(j * n, q * n, n, n) = op.A * maps.at(j, q).col(i).asDiagonal();
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<SweepRow> stability_sweep(std::span<const SweepConfig> configs, const CoilStack& maps,
                                      const SweepOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  const Grid grid = maps.grid();
  for (const auto& config : configs) {
    if (config.mask.n() != grid.n()) {
      throw std::invalid_argument("mask for '" + config.label + "' does not match the grid");
    }
    const FredholmMatrix op = build_A_dft(config.mask, grid);
    const CoilStack subset = maps.select(config.coils, options.multi_map ? maps.maps() : 1);
    const auto blocks = multi_map_blocks(op, subset);
    SvdReport report = svd_blocks(blocks, options.threshold, options.threads);
    rows.push_back(SweepRow{config.label, report.kappa, report.null_dim, report.null_dim_argmin,
                            options.threshold, config.mask.scan_time(), std::move(report)});
  }
  return rows;
}

}  // namespace acmri
