#include "acmri/fourier.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace acmri {

namespace {

// FFTW's planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

int wrap(int k, int size) {
  const int r = k % size;
  return r < 0 ? r + size : r;
}

CMatrix transform2(const CMatrix& in, int sign) {
  const int n = static_cast<int>(in.rows());
  const int m = static_cast<int>(in.cols());
  if (n < 1 || m < 1) {
    throw std::invalid_argument("transform of an empty array");
  }
  const int cn = n / 2;
  const int cm = m / 2;

  // ifftshift on the way in.
  CMatrix buffer(n, m);
  for (int col = 0; col < m; ++col) {
    for (int row = 0; row < n; ++row) {
      buffer(row, col) = in(wrap(row + cn, n), wrap(col + cm, m));
    }
  }

  // Eigen stores column-major, which FFTW sees as a row-major m x n array.
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(m, n, data, data, sign, FFTW_ESTIMATE);
  }
  fftw_execute_dft(plan, data, data);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * m);
  CMatrix out(n, m);
  for (int col = 0; col < m; ++col) {
    for (int row = 0; row < n; ++row) {
      out(row, col) = scale * buffer(wrap(row - cn, n), wrap(col - cm, m));
    }
  }
  return out;
}

}  // namespace

CMatrix dft_matrix(int size) {
  if (size < 1) {
    throw std::invalid_argument("DFT size must be positive");
  }
  const int c = size / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  CMatrix w(size, size);
  for (int k = 0; k < size; ++k) {
    for (int j = 0; j < size; ++j) {
      // Reduce the phase index exactly before taking the angle.
      const long long phase = wrap(static_cast<int>((static_cast<long long>(k - c) * (j - c)) % size), size);
      const double angle = -2.0 * kPi * static_cast<double>(phase) / size;
      w(k, j) = scale * cplx(std::cos(angle), std::sin(angle));
    }
  }
  return w;
}

CMatrix fft2c(const CMatrix& image) { return transform2(image, FFTW_FORWARD); }

CMatrix ifft2c(const CMatrix& kspace) { return transform2(kspace, FFTW_BACKWARD); }

}  // namespace acmri
