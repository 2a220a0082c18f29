#include "acmri/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "acmri/fourier.hpp"
#include "acmri/lbfgs.hpp"
#include "acmri/operators.hpp"

namespace acmri {

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::zero_fill:
      return "zero_fill";
    case BaselineMethod::tikhonov:
      return "tikhonov";
    case BaselineMethod::tv2d:
      return "tv2d";
  }
  return "zero_fill";
}

BaselineMethod baseline_method_from_string(const std::string& name) {
  if (name == "zero_fill") return BaselineMethod::zero_fill;
  if (name == "tikhonov") return BaselineMethod::tikhonov;
  if (name == "tv2d") return BaselineMethod::tv2d;
  throw std::invalid_argument("unknown baseline method '" + name + "'");
}

void BaselineSpec::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("baseline alpha must be non-negative");
  if (method == BaselineMethod::tv2d && !(beta > 0.0)) {
    throw std::invalid_argument("tv2d needs beta > 0");
  }
  if (max_iter < 1) throw std::invalid_argument("baseline max_iter must be positive");
}

namespace {

void check_shapes(const CoilStack& maps, const SamplingMask& mask, Eigen::Index n, Eigen::Index m) {
  if (maps.n() != n || maps.m() != m || mask.n() != n) {
    throw std::invalid_argument("image, maps and mask disagree on the grid");
  }
}

void apply_mask(CMatrix& k, const SamplingMask& mask) {
  for (int row = 0; row < mask.n(); ++row) {
    if (!mask.acquired(row)) k.row(row).setZero();
  }
}

double inner(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  double acc = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) acc += (a[q].conjugate().cwiseProduct(b[q])).sum().real();
  return acc;
}

}  // namespace

CoilStack forward_2d(const std::vector<CMatrix>& F_maps, const CoilStack& maps, const SamplingMask& mask) {
  if (static_cast<int>(F_maps.size()) != maps.maps()) {
    throw std::invalid_argument("forward_2d: need one image per sensitivity map");
  }
  check_shapes(maps, mask, F_maps.front().rows(), F_maps.front().cols());
  CoilStack out(maps.n(), maps.m(), maps.coils(), 1, StackKind::kspace);
  for (int j = 0; j < maps.coils(); ++j) {
    CMatrix coil = CMatrix::Zero(maps.n(), maps.m());
    for (int q = 0; q < maps.maps(); ++q) coil += maps.at(j, q).cwiseProduct(F_maps[static_cast<std::size_t>(q)]);
    CMatrix k = fft2c(coil);
    apply_mask(k, mask);
    out.at(j) = std::move(k);
  }
  return out;
}

std::vector<CMatrix> adjoint_2d(const CoilStack& kspace, const CoilStack& maps, const SamplingMask& mask) {
  check_shapes(maps, mask, kspace.n(), kspace.m());
  if (kspace.coils() != maps.coils()) {
    throw std::invalid_argument("adjoint_2d: data and maps have different coil counts");
  }
  std::vector<CMatrix> out(static_cast<std::size_t>(maps.maps()), CMatrix::Zero(maps.n(), maps.m()));
  for (int j = 0; j < maps.coils(); ++j) {
    CMatrix k = kspace.at(j);
    apply_mask(k, mask);
    const CMatrix img = ifft2c(k);
    for (int q = 0; q < maps.maps(); ++q) {
      out[static_cast<std::size_t>(q)] += maps.at(j, q).conjugate().cwiseProduct(img);
    }
  }
  return out;
}

RVector pack_images(const std::vector<CMatrix>& images) {
  const Eigen::Index per = images.front().size();
  const Eigen::Index total = per * static_cast<Eigen::Index>(images.size());
  RVector z(2 * total);
  for (std::size_t q = 0; q < images.size(); ++q) {
    const auto off = static_cast<Eigen::Index>(q) * per;
    z.segment(off, per) = images[q].real().reshaped();
    z.segment(total + off, per) = images[q].imag().reshaped();
  }
  return z;
}

std::vector<CMatrix> unpack_images(const RVector& z, int n, int m, int maps) {
  const Eigen::Index per = static_cast<Eigen::Index>(n) * m;
  const Eigen::Index total = per * maps;
  if (z.size() != 2 * total) {
    throw std::invalid_argument("unpack_images: vector length does not match the shape");
  }
  std::vector<CMatrix> out;
  for (int q = 0; q < maps; ++q) {
    CMatrix img(n, m);
    img.real() = z.segment(q * per, per).reshaped(n, m);
    img.imag() = z.segment(total + q * per, per).reshaped(n, m);
    out.push_back(std::move(img));
  }
  return out;
}

TvValue smoothed_tv_2d(const RVector& z, int n, int m, int maps, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("smoothed TV needs beta > 0");
  const Eigen::Index per = static_cast<Eigen::Index>(n) * m;
  const Eigen::Index half = per * maps;
  RVector grad = RVector::Zero(z.size());
  double sum = 0.0;
  // Each n x m image block sits column-major at offset `base`.
  auto visit = [&](Eigen::Index base, auto&& fn) {
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < n; ++r) {
        const Eigen::Index here = base + static_cast<Eigen::Index>(c) * n + r;
        if (r + 1 < n) fn(here, here + 1);
        if (c + 1 < m) fn(here, here + n);
      }
    }
  };
  for (Eigen::Index block = 0; block < 2 * maps; ++block) {
    visit(block * per, [&](Eigen::Index a, Eigen::Index b) {
      const double d = z(b) - z(a);
      sum += d * d;
    });
  }
  const double value = std::sqrt(sum + beta * beta);
  for (Eigen::Index block = 0; block < 2 * maps; ++block) {
    visit(block * per, [&](Eigen::Index a, Eigen::Index b) {
      const double d = (z(b) - z(a)) / value;
      grad(b) += d;
      grad(a) -= d;
    });
  }
  return TvValue{value, grad.head(half), grad.tail(half)};
}

ObjectiveValue tv2d_objective(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask,
                              const RVector& z, double alpha, double beta) {
  const int n = maps.n();
  const int m = maps.m();
  const auto F = unpack_images(z, n, m, maps.maps());
  CoilStack residual = forward_2d(F, maps, mask);
  double value = 0.0;
  for (int j = 0; j < maps.coils(); ++j) {
    CMatrix d = data.at(j);
    apply_mask(d, mask);
    residual.at(j) -= d;
    value += residual.at(j).squaredNorm();
  }
  const auto back = adjoint_2d(residual, maps, mask);
  ObjectiveValue out{value, 2.0 * pack_images(back)};
  if (alpha > 0.0) {
    const TvValue tv = smoothed_tv_2d(z, n, m, maps.maps(), beta);
    const Eigen::Index half = z.size() / 2;
    out.value += alpha * tv.value;
    out.gradient.head(half) += alpha * tv.grad_x;
    out.gradient.tail(half) += alpha * tv.grad_y;
  }
  return out;
}

CgResult tikhonov_cg(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask, double alpha,
                     int max_iter, double tolerance) {
  auto normal = [&](const std::vector<CMatrix>& x) {
    auto y = adjoint_2d(forward_2d(x, maps, mask), maps, mask);
    for (std::size_t q = 0; q < y.size(); ++q) y[q] += alpha * x[q];
    return y;
  };
  const auto rhs = adjoint_2d(data, maps, mask);
  CgResult out;
  out.F_maps.assign(rhs.size(), CMatrix::Zero(maps.n(), maps.m()));
  auto r = rhs;
  auto p = r;
  double rr = inner(r, r);
  const double rhs_norm = std::sqrt(rr);
  out.residual_norms.push_back(rhs_norm);
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  for (int it = 0; it < max_iter; ++it) {
    const auto Ap = normal(p);
    const double pAp = inner(p, Ap);
    if (!std::isfinite(pAp) || pAp <= 0.0) {
      out.failed = !std::isfinite(pAp);
      break;
    }
    const double step = rr / pAp;
    for (std::size_t q = 0; q < r.size(); ++q) {
      out.F_maps[q] += step * p[q];
      r[q] -= step * Ap[q];
    }
    const double rr_next = inner(r, r);
    out.iterations = it + 1;
    out.residual_norms.push_back(std::sqrt(rr_next));
    if (!std::isfinite(rr_next)) {
      out.failed = true;
      break;
    }
    if (std::sqrt(rr_next) <= tolerance * rhs_norm) {
      out.converged = true;
      break;
    }
    const double beta = rr_next / rr;
    for (std::size_t q = 0; q < p.size(); ++q) p[q] = r[q] + beta * p[q];
    rr = rr_next;
  }
  return out;
}

ReconResult reconstruct_baseline(const CoilStack& data, const CoilStack& maps, const SamplingMask& mask,
                                 const BaselineSpec& spec) {
  spec.validate();
  if (data.coils() != maps.coils() || data.n() != maps.n() || data.m() != maps.m()) {
    throw std::invalid_argument("data and sensitivity maps have inconsistent shapes");
  }
  ReconResult result;
  result.method = to_string(spec.method);
  switch (spec.method) {
    case BaselineMethod::zero_fill: {
      const CoilStack g = prepare_g(data);
      for (int j = 0; j < g.coils(); ++j) result.map_images.push_back(g.at(j));
      result.magnitude = sos_combine(g);
      return result;
    }
    case BaselineMethod::tikhonov: {
      CgResult cg = tikhonov_cg(data, maps, mask, spec.alpha, spec.max_iter, spec.tolerance);
      result.map_images = std::move(cg.F_maps);
      result.status = cg.failed ? SolveStatus::numerical_failure
                                : (cg.converged ? SolveStatus::ok : SolveStatus::not_converged);
      result.slices.push_back(SliceDiagnostics{-1, cg.iterations, cg.residual_norms.back(), cg.converged,
                                               result.status});
      break;
    }
    case BaselineMethod::tv2d: {
      // Start from the adjoint (zero-filled, sensitivity-combined) image.
      const RVector z0 = pack_images(adjoint_2d(data, maps, mask));
      LbfgsOptions opts;
      opts.max_iter = spec.max_iter;
      opts.grad_tol = 1e-8;
      const LbfgsResult res = minimize_lbfgs(
          [&](const RVector& z, RVector& g) {
            ObjectiveValue v = tv2d_objective(data, maps, mask, z, spec.alpha, spec.beta);
            g = std::move(v.gradient);
            return v.value;
          },
          z0, opts);
      result.map_images = unpack_images(res.x, maps.n(), maps.m(), maps.maps());
      if (res.status == LbfgsStatus::non_finite || !res.x.allFinite()) {
        result.status = SolveStatus::numerical_failure;
      } else {
        result.status = res.converged() ? SolveStatus::ok : SolveStatus::not_converged;
      }
      result.slices.push_back(SliceDiagnostics{-1, res.iterations, res.value, res.converged(), result.status});
      break;
    }
  }
  result.magnitude = combine_maps(result.map_images);
  return result;
}

}  // namespace acmri
