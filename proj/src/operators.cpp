#include "acmri/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acmri/fourier.hpp"

namespace acmri {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

}  // namespace

cplx kernel_eval(const BandSet& bands, double x2) {
  cplx sum(0.0, 0.0);
  for (const auto& band : bands.bands()) {
    sum += band.half_width * std::polar(1.0, band.center * x2) * sinc(band.half_width * x2);
  }
  return sum / kPi;
}

FredholmMatrix build_A_analytic(const BandSet& bands, const Grid& grid) {
  const int n = grid.n();
  // Toeplitz: entries depend on a - b only.
  std::vector<cplx> diagonal(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d) {
    diagonal[static_cast<std::size_t>(d + n - 1)] =
        kernel_eval(bands, static_cast<double>(d) / n) / static_cast<double>(n);
  }
  CMatrix A(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      A(a, b) = (a == b ? 1.0 : 0.0) - diagonal[static_cast<std::size_t>(a - b + n - 1)];
    }
  }
  return FredholmMatrix{std::move(A), Discretization::analytic, grid, bands, {}};
}

FredholmMatrix build_A_dft(const std::vector<bool>& acquired, const Grid& grid) {
  const int n = grid.n();
  if (static_cast<int>(acquired.size()) != n) {
    throw std::invalid_argument("mask has " + std::to_string(acquired.size()) +
                                " lines but grid has n=" + std::to_string(n));
  }
  const CMatrix W = dft_matrix(n);
  CMatrix kept = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (acquired[static_cast<std::size_t>(k)]) kept.row(k) = W.row(k);
  }
  CMatrix A = W.adjoint() * kept;
  // Symmetrize away round-off so the projection is Hermitian to the last bit.
  A = (0.5 * (A + A.adjoint())).eval();

  BandSet bands;
  bool any = false;
  for (bool f : acquired) any = any || f;
  if (any) {
    bands = mask_to_bands(SamplingMask(acquired, 0));
  }
  return FredholmMatrix{std::move(A), Discretization::dft, grid, std::move(bands), acquired};
}

FredholmMatrix build_A_dft(const SamplingMask& mask, const Grid& grid) {
  return build_A_dft(mask.flags(), grid);
}

CoilStack prepare_g(const CoilStack& kspace) {
  if (kspace.maps() != 1) {
    throw std::invalid_argument("k-space stack must carry one map per coil");
  }
  CoilStack g(kspace.n(), kspace.m(), kspace.coils(), 1, StackKind::image);
  for (int j = 0; j < kspace.coils(); ++j) {
    g.at(j) = ifft2c(kspace.at(j));
  }
  return g;
}

CoilStack prepare_g(const CoilStack& kspace, const Grid& grid) {
  if (kspace.n() != grid.n() || kspace.m() != grid.m()) {
    throw std::invalid_argument("k-space is " + std::to_string(kspace.n()) + "x" +
                                std::to_string(kspace.m()) + ", grid is " + std::to_string(grid.n()) +
                                "x" + std::to_string(grid.m()));
  }
  return prepare_g(kspace);
}

SliceSystem assemble_slice(const FredholmMatrix& op, const CoilStack& maps, const CoilStack& g,
                           int column) {
  const int n = op.grid.n();
  if (maps.n() != n || g.n() != n || maps.m() != g.m() || maps.m() != op.grid.m()) {
    throw std::invalid_argument("operator, sensitivity maps and data disagree on the grid");
  }
  if (maps.coils() != g.coils()) {
    throw std::invalid_argument("maps carry " + std::to_string(maps.coils()) + " coils, data " +
                                std::to_string(g.coils()));
  }
  if (column < 0 || column >= maps.m()) {
    throw std::out_of_range("column index " + std::to_string(column) + " outside [0, " +
                            std::to_string(maps.m()) + ")");
  }
  const int coils = maps.coils();
  const int p = maps.maps();
  SliceSystem sys;
  sys.column = column;
  sys.coils = coils;
  sys.maps = p;
  sys.C.resize(static_cast<Eigen::Index>(n) * coils, static_cast<Eigen::Index>(n) * p);
  sys.b.resize(static_cast<Eigen::Index>(n) * coils);
  for (int j = 0; j < coils; ++j) {
    for (int q = 0; q < p; ++q) {
      // A * diag(s) scales column b of A by s_b.
      sys.C.block(j * n, q * n, n, n) = op.A * maps.at(j, q).col(column).asDiagonal();
    }
    sys.b.segment(j * n, n) = g.at(j).col(column);
  }
  return sys;
}

RealifiedSystem realify(const SliceSystem& sys) {
  const auto rows = sys.C.rows();
  const auto cols = sys.C.cols();
  RealifiedSystem out;
  out.M.resize(2 * rows, 2 * cols);
  const RMatrix re = sys.C.real();
  const RMatrix im = sys.C.imag();
  out.M.topLeftCorner(rows, cols) = re;
  out.M.topRightCorner(rows, cols) = -im;
  out.M.bottomLeftCorner(rows, cols) = im;
  out.M.bottomRightCorner(rows, cols) = re;
  out.b = stack_complex(sys.b);
  return out;
}

RVector stack_complex(const CVector& x) {
  RVector z(2 * x.size());
  z.head(x.size()) = x.real();
  z.tail(x.size()) = x.imag();
  return z;
}

CVector unstack_complex(const RVector& z) {
  const auto half = z.size() / 2;
  CVector x(half);
  x.real() = z.head(half);
  x.imag() = z.tail(half);
  return x;
}

}  // namespace acmri
