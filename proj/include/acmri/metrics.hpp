#pragma once

#include "acmri/types.hpp"

namespace acmri {

inline constexpr double kSsimC1 = 0.0001;
inline constexpr double kSsimC2 = 0.0009;

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

class Roi {
 public:
  explicit Roi(BoolMatrix mask);

  // Everything inside an n x m image.
  static Roi full(Eigen::Index n, Eigen::Index m);

  const BoolMatrix& mask() const { return mask_; }
  Eigen::Index count() const { return mask_.count(); }

 private:
  BoolMatrix mask_;
};

// Pixels above `fraction` of the maximum, closed with a 3x3 structuring element.
Roi default_roi(const RMatrix& truth, double fraction = 0.05);

// ||truth - est|| / ||truth|| over ROI pixels.
double rel_error(const RMatrix& truth, const RMatrix& est, const Roi& roi);

// SSIM of two equally sized patches with population statistics.
double ssim_window(const Eigen::Ref<const RMatrix>& x, const Eigen::Ref<const RMatrix>& y,
                   double c1 = kSsimC1, double c2 = kSsimC2);

// Mean SSIM over all window x window patches whose center lies in the ROI
// and which fit inside the image.
double ssim_mean(const RMatrix& truth, const RMatrix& est, const Roi& roi, int window = 3,
                 double c1 = kSsimC1, double c2 = kSsimC2);

}  // namespace acmri
