#include "curvemoments/dft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "curvemoments/parallel.hpp"

namespace curvemoments {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

std::size_t next_pow2(std::size_t m) {
    std::size_t p = 1;
    while (p < m) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey; twiddles are computed from the angle
// directly (no recurrence) so every call is bit-reproducible.
void fft_pow2(cplx* a, std::size_t m, bool inverse) {
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const std::size_t half = len >> 1;
        for (std::size_t k = 0; k < half; ++k) {
            const cplx w = std::polar(1.0, sign * kTwoPi * static_cast<double>(k) / static_cast<double>(len));
            for (std::size_t i = k; i < m; i += len) {
                const cplx u = a[i];
                const cplx v = a[i + half] * w;
                a[i] = u + v;
                a[i + half] = u - v;
            }
        }
    }
}

// Bluestein chirp-z for arbitrary length: jk = (j^2 + k^2 - (k-j)^2)/2 turns
// the transform into a convolution, done with a power-of-two FFT. The chirp
// exponent is reduced mod 2m before the trig call to keep angles small.
void bluestein(cplx* a, std::size_t m, bool inverse) {
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t l = next_pow2(2 * m - 1);
    std::vector<cplx> chirp(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t jsq = (j * j) % (2 * m);
        chirp[j] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(jsq) / static_cast<double>(m));
    }
    std::vector<cplx> u(l, cplx{0.0, 0.0}), v(l, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) u[j] = a[j] * chirp[j];
    v[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < m; ++j) v[j] = v[l - j] = std::conj(chirp[j]);
    fft_pow2(u.data(), l, false);
    fft_pow2(v.data(), l, false);
    for (std::size_t j = 0; j < l; ++j) u[j] *= v[j];
    fft_pow2(u.data(), l, true);
    const double scale = 1.0 / static_cast<double>(l);
    for (std::size_t j = 0; j < m; ++j) a[j] = u[j] * chirp[j] * scale;
}

} // namespace

void dft_line(cplx* data, std::size_t m, bool inverse) {
    if (m <= 1) return;
    if (is_pow2(m))
        fft_pow2(data, m, inverse);
    else
        bluestein(data, m, inverse);
}

void dft_nd(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse) {
    std::size_t total = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("dft_nd: dimensions must be >= 1");
        total *= static_cast<std::size_t>(d);
    }
    if (data.size() != total) throw std::invalid_argument("dft_nd: data size does not match dims");
    if (total == 0) return;

    std::size_t stride = 1; // last axis fastest
    for (int axis = static_cast<int>(dims.size()) - 1; axis >= 0; --axis) {
        const auto m = static_cast<std::size_t>(dims[axis]);
        const std::size_t lines = total / m;
        if (m > 1) {
            const std::size_t block = stride * m;
            const std::size_t cur_stride = stride;
            parallel_for(lines, [&](std::size_t lo, std::size_t hi) {
                std::vector<cplx> scratch(m);
                for (std::size_t line = lo; line < hi; ++line) {
                    const std::size_t base = (line / cur_stride) * block + (line % cur_stride);
                    if (cur_stride == 1) {
                        dft_line(data.data() + base, m, inverse);
                    } else {
                        for (std::size_t j = 0; j < m; ++j) scratch[j] = data[base + j * cur_stride];
                        dft_line(scratch.data(), m, inverse);
                        for (std::size_t j = 0; j < m; ++j) data[base + j * cur_stride] = scratch[j];
                    }
                }
            });
        }
        stride *= m;
    }
}

} // namespace curvemoments
