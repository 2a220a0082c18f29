#include "acmri/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace acmri {

Roi::Roi(BoolMatrix mask) : mask_(std::move(mask)) {
  if (mask_.count() == 0) {
    throw std::invalid_argument("region of interest is empty");
  }
}

Roi Roi::full(Eigen::Index n, Eigen::Index m) { return Roi(BoolMatrix::Constant(n, m, true)); }

namespace {

BoolMatrix morph(const BoolMatrix& in, bool dilate) {
  const Eigen::Index n = in.rows();
  const Eigen::Index m = in.cols();
  BoolMatrix out(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      bool acc = !dilate;
      for (Eigen::Index dc = -1; dc <= 1; ++dc) {
        for (Eigen::Index dr = -1; dr <= 1; ++dr) {
          const Eigen::Index rr = r + dr;
          const Eigen::Index cc = c + dc;
          // Outside the image counts as background for dilation and
          // foreground for erosion, so closing never shrinks at the border.
          const bool v = (rr < 0 || rr >= n || cc < 0 || cc >= m) ? !dilate : in(rr, cc);
          acc = dilate ? (acc || v) : (acc && v);
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

Roi default_roi(const RMatrix& truth, double fraction) {
  const double cutoff = fraction * truth.maxCoeff();
  const BoolMatrix above = (truth.array() > cutoff).matrix();
  return Roi(morph(morph(above, true), false));
}

double rel_error(const RMatrix& truth, const RMatrix& est, const Roi& roi) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols() || truth.rows() != roi.mask().rows() ||
      truth.cols() != roi.mask().cols()) {
    throw std::invalid_argument("rel_error: image and ROI shapes differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index c = 0; c < truth.cols(); ++c) {
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
      if (!roi.mask()(r, c)) continue;
      const double d = truth(r, c) - est(r, c);
      num += d * d;
      den += truth(r, c) * truth(r, c);
    }
  }
  if (den == 0.0) {
    throw std::invalid_argument("rel_error: truth has zero norm on the ROI");
  }
  return std::sqrt(num / den);
}

double ssim_window(const Eigen::Ref<const RMatrix>& x, const Eigen::Ref<const RMatrix>& y, double c1,
                   double c2) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.size() == 0) {
    throw std::invalid_argument("ssim_window: patches must share a non-empty shape");
  }
  const double count = static_cast<double>(x.size());
  const double mu_x = x.sum() / count;
  const double mu_y = y.sum() / count;
  const double var_x = (x.array() - mu_x).square().sum() / count;
  const double var_y = (y.array() - mu_y).square().sum() / count;
  const double cov = ((x.array() - mu_x) * (y.array() - mu_y)).sum() / count;
  return ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
         ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
}

double ssim_mean(const RMatrix& truth, const RMatrix& est, const Roi& roi, int window, double c1,
                 double c2) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("ssim window must be odd");
  }
  if (truth.rows() != est.rows() || truth.cols() != est.cols() || truth.rows() != roi.mask().rows() ||
      truth.cols() != roi.mask().cols()) {
    throw std::invalid_argument("ssim_mean: image and ROI shapes differ");
  }
  const Eigen::Index half = window / 2;
  double total = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index c = half; c + half < truth.cols(); ++c) {
    for (Eigen::Index r = half; r + half < truth.rows(); ++r) {
      if (!roi.mask()(r, c)) continue;
      total += ssim_window(truth.block(r - half, c - half, window, window),
                           est.block(r - half, c - half, window, window), c1, c2);
      ++used;
    }
  }
  if (used == 0) {
    throw std::invalid_argument("ssim_mean: no complete window is centered in the ROI");
  }
  return total / static_cast<double>(used);
}

}  // namespace acmri
