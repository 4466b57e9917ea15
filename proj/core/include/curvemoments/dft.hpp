#pragma once

#include <complex>
#include <vector>

namespace curvemoments {

using cplx = std::complex<double>;

// In-place unnormalized 1-d transform of a contiguous line:
//   inverse=false:  X_k = sum_j x_j e^{-2 pi i jk/M}
//   inverse=true:   X_k = sum_j x_j e^{+2 pi i jk/M}
// Radix-2 for power-of-two lengths, Bluestein chirp-z otherwise.
void dft_line(cplx* data, std::size_t m, bool inverse);

// In-place unnormalized multidimensional transform over a row-major array
// with the last axis fastest. Axis passes run their lines independently (and
// in parallel); output is deterministic for a fixed input.
void dft_nd(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse);

} // namespace curvemoments
