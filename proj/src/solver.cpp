#include "acmri/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acmri/parallel.hpp"

namespace acmri {

void TvParams::validate() const {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("TV smoothing beta must be positive, got " + std::to_string(beta));
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("TV weight alpha must be non-negative, got " + std::to_string(alpha));
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::ok:
      return "ok";
    case SolveStatus::not_converged:
      return "not_converged";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

namespace {

// Forward differences d_i = v_{i+1} - v_i, zeroed where i+1 starts a new segment.
RVector differences(const RVector& v, Eigen::Index segment) {
  const Eigen::Index len = v.size();
  RVector d = RVector::Zero(std::max<Eigen::Index>(len - 1, 0));
  for (Eigen::Index i = 0; i + 1 < len; ++i) {
    if (segment > 0 && (i + 1) % segment == 0) continue;
    d(i) = v(i + 1) - v(i);
  }
  return d;
}

// Adjoint of `differences`.
RVector differences_adjoint(const RVector& d, Eigen::Index len) {
  RVector out = RVector::Zero(len);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    out(i) -= d(i);
    out(i + 1) += d(i);
  }
  return out;
}

Eigen::Index segment_for(TvChain chain, Eigen::Index half, int maps) {
  if (chain == TvChain::single_chain || maps <= 1) return 0;
  return half / maps;
}

}  // namespace

TvValue smoothed_tv(const RVector& x, const RVector& y, double beta, Eigen::Index segment) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("smoothed TV needs beta > 0");
  }
  if (x.size() != y.size() || x.size() < 1) {
    throw std::invalid_argument("smoothed TV needs equal, non-empty real and imaginary parts");
  }
  const RVector dx = differences(x, segment);
  const RVector dy = differences(y, segment);
  const double value = std::sqrt(dx.squaredNorm() + dy.squaredNorm() + beta * beta);
  return TvValue{value, differences_adjoint(dx, x.size()) / value,
                 differences_adjoint(dy, y.size()) / value};
}

ObjectiveValue slice_objective(const RealifiedSystem& sys, const RVector& z, const TvParams& params,
                               int maps, TvChain chain) {
  params.validate();
  if (z.size() != sys.M.cols()) {
    throw std::invalid_argument("unknown has length " + std::to_string(z.size()) + ", system expects " +
                                std::to_string(sys.M.cols()));
  }
  const RVector residual = sys.M * z - sys.b;
  ObjectiveValue out{residual.squaredNorm(), 2.0 * (sys.M.transpose() * residual)};
  if (params.alpha > 0.0) {
    const Eigen::Index half = z.size() / 2;
    const TvValue tv = smoothed_tv(z.head(half), z.tail(half), params.beta, segment_for(chain, half, maps));
    out.value += params.alpha * tv.value;
    out.gradient.head(half) += params.alpha * tv.grad_x;
    out.gradient.tail(half) += params.alpha * tv.grad_y;
  }
  return out;
}

SliceObjective::SliceObjective(const RealifiedSystem& sys, const TvParams& params, int maps,
                               TvChain chain)
    : M_(sys.M),
      b_(sys.b),
      params_(params),
      half_(sys.M.cols() / 2),
      segment_(segment_for(chain, sys.M.cols() / 2, maps)) {
  params.validate();
}

double SliceObjective::operator()(const RVector& z, RVector& grad) const {
  // Residual form: the expanded Gram form cancels badly near the solution.
  const RVector r = M_ * z - b_;
  double value = r.squaredNorm();
  grad.noalias() = 2.0 * (M_.transpose() * r);
  if (params_.alpha > 0.0) {
    const TvValue tv = smoothed_tv(z.head(half_), z.tail(half_), params_.beta, segment_);
    value += params_.alpha * tv.value;
    grad.head(half_) += params_.alpha * tv.grad_x;
    grad.tail(half_) += params_.alpha * tv.grad_y;
  }
  return value;
}

std::vector<CVector> zero_filled_estimate(const SliceSystem& sys, const CoilStack& maps) {
  const int n = maps.n();
  std::vector<CVector> out(static_cast<std::size_t>(sys.maps), CVector::Zero(n));
  RVector energy = RVector::Zero(n);
  for (int j = 0; j < sys.coils; ++j) {
    for (int q = 0; q < sys.maps; ++q) {
      energy += maps.at(j, q).col(sys.column).cwiseAbs2();
    }
  }
  for (int q = 0; q < sys.maps; ++q) {
    for (int j = 0; j < sys.coils; ++j) {
      out[static_cast<std::size_t>(q)] +=
          maps.at(j, q).col(sys.column).conjugate().cwiseProduct(sys.b.segment(j * n, n));
    }
    for (int r = 0; r < n; ++r) {
      if (energy(r) > 1e-12) {
        out[static_cast<std::size_t>(q)](r) /= energy(r);
      } else {
        out[static_cast<std::size_t>(q)](r) = 0.0;
      }
    }
  }
  return out;
}

SliceSolution solve_slice(const SliceSystem& sys, const TvParams& params, const SolverOptions& opts,
                          const std::vector<CVector>& initial) {
  params.validate();
  const Eigen::Index unknowns = sys.C.cols();
  const Eigen::Index n = sys.maps > 0 ? unknowns / sys.maps : unknowns;

  CVector start = CVector::Zero(unknowns);
  if (!initial.empty()) {
    if (static_cast<int>(initial.size()) != sys.maps) {
      throw std::invalid_argument("initial point must carry one vector per map");
    }
    for (int q = 0; q < sys.maps; ++q) start.segment(q * n, n) = initial[static_cast<std::size_t>(q)];
  }

  const RealifiedSystem real = realify(sys);
  const SliceObjective objective(real, params, sys.maps, opts.chain);
  LbfgsOptions lopts;
  lopts.memory = opts.memory;
  lopts.max_iter = opts.max_iter;
  lopts.grad_tol = opts.grad_tol;
  lopts.rel_tol = opts.rel_tol;
  const LbfgsResult res = minimize_lbfgs(
      [&objective](const RVector& z, RVector& g) { return objective(z, g); }, stack_complex(start), lopts);

  SliceSolution out;
  out.iterations = res.iterations;
  out.objective = res.value;
  out.converged = res.converged();
  out.history = res.history;
  if (res.status == LbfgsStatus::non_finite || !res.x.allFinite() || !std::isfinite(res.value)) {
    out.status = SolveStatus::numerical_failure;
    out.converged = false;
  } else {
    out.status = out.converged ? SolveStatus::ok : SolveStatus::not_converged;
  }
  const CVector x = unstack_complex(res.x);
  for (int q = 0; q < sys.maps; ++q) out.F_maps.push_back(x.segment(q * n, n));
  return out;
}

std::vector<int> ReconResult::failed_slices() const {
  std::vector<int> out;
  for (const auto& s : slices) {
    if (s.status == SolveStatus::numerical_failure) out.push_back(s.column);
  }
  return out;
}

RMatrix combine_maps(const std::vector<CMatrix>& map_images) {
  if (map_images.empty()) {
    throw std::invalid_argument("no map images to combine");
  }
  RMatrix acc = RMatrix::Zero(map_images.front().rows(), map_images.front().cols());
  for (const auto& img : map_images) acc += img.cwiseAbs2();
  return acc.cwiseSqrt();
}

RMatrix sos_combine(const CoilStack& coil_images) {
  RMatrix acc = RMatrix::Zero(coil_images.n(), coil_images.m());
  for (int j = 0; j < coil_images.coils(); ++j) acc += coil_images.at(j).cwiseAbs2();
  return acc.cwiseSqrt();
}

ReconResult reconstruct(const CoilStack& g, const CoilStack& maps, const SamplingMask& mask,
                        const TvParams& params, const SolverOptions& opts, int threads) {
  params.validate();
  const Grid grid = g.grid();
  if (maps.grid() != grid || maps.coils() != g.coils()) {
    throw std::invalid_argument("data and sensitivity maps have inconsistent shapes");
  }
  const FredholmMatrix op = build_A_dft(mask, grid);
  const int m = grid.m();
  const int p = maps.maps();

  ReconResult result;
  result.method = "ac";
  result.map_images.assign(static_cast<std::size_t>(p), CMatrix::Zero(grid.n(), m));
  result.slices.resize(static_cast<std::size_t>(m));

  parallel_for(m, threads, [&](int i) {
    const SliceSystem sys = assemble_slice(op, maps, g, i);
    const auto start = zero_filled_estimate(sys, maps);
    SliceSolution sol = solve_slice(sys, params, opts, start);
    auto& diag = result.slices[static_cast<std::size_t>(i)];
    diag = SliceDiagnostics{i, sol.iterations, sol.objective, sol.converged, sol.status};
    const auto& chosen = sol.status == SolveStatus::numerical_failure ? start : sol.F_maps;
    for (int q = 0; q < p; ++q) {
      auto column = result.map_images[static_cast<std::size_t>(q)].col(i);
      column = chosen[static_cast<std::size_t>(q)];
      for (Eigen::Index r = 0; r < column.size(); ++r) {
        if (!std::isfinite(column(r).real()) || !std::isfinite(column(r).imag())) column(r) = 0.0;
      }
    }
  });

  result.magnitude = combine_maps(result.map_images);
  if (!result.failed_slices().empty()) result.status = SolveStatus::numerical_failure;
  return result;
}

}  // namespace acmri
