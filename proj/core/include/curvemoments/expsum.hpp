#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvemoments/surfaces.hpp"

namespace curvemoments {

using cplx = std::complex<double>;

enum class CoefficientModel { Unit, RandomPhase, RandomSign, Gaussian, CapConcentrated };

std::string model_name(CoefficientModel m);
CoefficientModel model_from_name(const std::string& name);

struct ModelSpec {
    CoefficientModel kind = CoefficientModel::Unit;
    std::uint64_t seed = 0;
    // cap-concentrated only: partition scale and cap choice (-1 = the most
    // populated cap, ties to the smallest index).
    double cap_K = 8.0;
    int cap_index = -1;
};

// Amplitudes a_z, parallel to the companion FrequencySet's points. Seeds are
// drawn with a fixed platform-independent scheme so replays are exact.
struct CoefficientAssignment {
    ModelSpec model;
    std::vector<cplx> amps;

    double sum_sq() const;      // sum |a_z|^2
    double l2() const;          // sqrt(sum |a_z|^2)
};

CoefficientAssignment make_coefficients(const FrequencySet& fs, const ModelSpec& spec);

struct TorusGrid {
    std::vector<int> dims; // per-axis sample counts, last axis fastest in memory

    std::size_t size() const {
        std::size_t s = 1;
        for (int d : dims) s *= static_cast<std::size_t>(d);
        return s;
    }
    std::string label() const; // "64x64"
};

struct FieldSamples {
    TorusGrid grid;
    std::vector<cplx> values; // row-major

    void write_binary(std::ostream& os) const; // header line + interleaved LE f64
    void write_csv(std::ostream& os) const;
    static FieldSamples read_binary(std::istream& is);
};

// Sampled values of sum_z a_z e^{2 pi i x.z} on the uniform torus grid
// x_j = j/M, computed by scattering amplitudes mod M and one unnormalized
// inverse DFT. Throws when two frequencies collide mod M (aliasing) or when
// the set carries non-integer coordinates.
FieldSamples evaluate_periodic(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                               const TorusGrid& grid);

// Direct summation sum a(xi) e^{2 pi i x.xi} at arbitrary points; the
// reference oracle for the fast path.
std::vector<cplx> evaluate_direct(const std::vector<Vec>& freqs, const std::vector<cplx>& amps,
                                  const std::vector<Vec>& points);

// Space-time samples of F(x,t) = sum_z a_z e^{2 pi i (x.z + t q(z))} on an
// x-grid times t_count uniform samples of [0,1). Integer temporal parts run
// as one (n+1)-dimensional transform; real temporal parts (irrational tori)
// phase-adjust the coefficients per t slice and run the n-dimensional fast
// path. The t axis is the last grid axis.
FieldSamples schrodinger_samples(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                                 const std::vector<int>& x_dims, int t_count);

// Smallest power-of-two grid exceeding order*max|coordinate| per axis
// (temporal axis included for periodic space-time sets).
TorusGrid auto_grid(const FrequencySet& fs, double order);

// Deterministic uniform [0,1) stream used by the coefficient models.
double uniform01(std::uint64_t& state);

} // namespace curvemoments
