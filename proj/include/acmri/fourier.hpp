#pragma once

#include "acmri/types.hpp"

namespace acmri {

// All transforms in the library are unitary and centered: sample j of an
// N-point axis carries offset j - floor(N/2) in both domains, so that
//   X[k] = N^{-1/2} sum_j x[j] exp(-2 pi i (k - c)(j - c) / N),  c = floor(N/2).

// Dense N x N centered unitary DFT matrix.
CMatrix dft_matrix(int size);

// Centered unitary 2-D forward / inverse DFT of an n x m array.
CMatrix fft2c(const CMatrix& image);
CMatrix ifft2c(const CMatrix& kspace);

}  // namespace acmri
