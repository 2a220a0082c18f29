#pragma once

#include <vector>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/types.hpp"

namespace acmri {

// L(x2) = pi^-1 sum_b w_b exp(i c_b x2) sinc(w_b x2), with sinc(0) = 1.
cplx kernel_eval(const BandSet& bands, double x2);

enum class Discretization { analytic, dft };

// Discretized I - L acting on one n-sample column profile.
struct FredholmMatrix {
  CMatrix A;
  Discretization provenance;
  Grid grid;
  BandSet bands;
  std::vector<bool> acquired;  // empty for the analytic variant
};

// A[a][b] = delta_ab - L(v_a - v_b) / n  (midpoint rule on the column grid).
FredholmMatrix build_A_analytic(const BandSet& bands, const Grid& grid);

// A = W^H diag(acquired) W with W the centered unitary DFT; an orthogonal
// projection that reproduces zero-filled discrete data exactly.
FredholmMatrix build_A_dft(const SamplingMask& mask, const Grid& grid);
FredholmMatrix build_A_dft(const std::vector<bool>& acquired, const Grid& grid);

// g_j = centered inverse 2-D DFT of each coil's zero-filled k-space.
CoilStack prepare_g(const CoilStack& kspace);
CoilStack prepare_g(const CoilStack& kspace, const Grid& grid);

// Per-column system C_i F_i = b_i. C has K blocks of n rows; block j is
// A [S^(j,1), ..., S^(j,p)], so columns are ordered map-major.
struct SliceSystem {
  CMatrix C;
  CVector b;
  int column = 0;
  int coils = 0;
  int maps = 0;
};

// `column` is zero-based.
SliceSystem assemble_slice(const FredholmMatrix& op, const CoilStack& maps, const CoilStack& g,
                           int column);

// [[Re C, -Im C], [Im C, Re C]] acting on stack(Re x, Im x).
struct RealifiedSystem {
  RMatrix M;
  RVector b;
};

RealifiedSystem realify(const SliceSystem& sys);

RVector stack_complex(const CVector& x);
CVector unstack_complex(const RVector& z);

}  // namespace acmri
