#include "curvemoments/expsum.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "curvemoments/caps.hpp"
#include "curvemoments/dft.hpp"
#include "curvemoments/parallel.hpp"

namespace curvemoments {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// splitmix64: fixed-width integer mixing, identical on every platform.
std::uint64_t next_u64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

double uniform01(std::uint64_t& state) {
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

std::string model_name(CoefficientModel m) {
    switch (m) {
        case CoefficientModel::Unit: return "unit";
        case CoefficientModel::RandomPhase: return "random-phase";
        case CoefficientModel::RandomSign: return "random-sign";
        case CoefficientModel::Gaussian: return "gaussian";
        case CoefficientModel::CapConcentrated: return "cap-concentrated";
    }
    return "unknown";
}

CoefficientModel model_from_name(const std::string& name) {
    if (name == "unit") return CoefficientModel::Unit;
    if (name == "random-phase") return CoefficientModel::RandomPhase;
    if (name == "random-sign") return CoefficientModel::RandomSign;
    if (name == "gaussian") return CoefficientModel::Gaussian;
    if (name == "cap-concentrated") return CoefficientModel::CapConcentrated;
    throw std::invalid_argument("unknown coefficient model: " + name);
}

double CoefficientAssignment::sum_sq() const {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    return s;
}

double CoefficientAssignment::l2() const { return std::sqrt(sum_sq()); }

CoefficientAssignment make_coefficients(const FrequencySet& fs, const ModelSpec& spec) {
    CoefficientAssignment out;
    out.model = spec;
    out.amps.resize(fs.size());
    std::uint64_t state = spec.seed;
    switch (spec.kind) {
        case CoefficientModel::Unit:
            for (auto& a : out.amps) a = 1.0;
            break;
        case CoefficientModel::RandomPhase:
            for (auto& a : out.amps) a = std::polar(1.0, kTwoPi * uniform01(state));
            break;
        case CoefficientModel::RandomSign:
            for (auto& a : out.amps) a = uniform01(state) < 0.5 ? 1.0 : -1.0;
            break;
        case CoefficientModel::Gaussian:
            // standard complex normal, E|a|^2 = 1
            for (auto& a : out.amps) {
                const double u1 = uniform01(state);
                const double u2 = uniform01(state);
                a = std::polar(std::sqrt(-std::log1p(-u1)), kTwoPi * u2);
            }
            break;
        case CoefficientModel::CapConcentrated: {
            const CapPartition part(fs.surface(), spec.cap_K);
            std::vector<int> cap_of(fs.size());
            std::map<int, std::size_t> population;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                cap_of[i] = part.assign(fs.unit_point(i));
                ++population[cap_of[i]];
            }
            int chosen = spec.cap_index;
            if (chosen < 0) {
                std::size_t best = 0;
                for (const auto& [idx, count] : population)
                    if (count > best) {
                        best = count;
                        chosen = idx;
                    }
            }
            for (std::size_t i = 0; i < fs.size(); ++i) out.amps[i] = (cap_of[i] == chosen) ? 1.0 : 0.0;
            break;
        }
    }
    return out;
}

std::string TorusGrid::label() const {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

void FieldSamples::write_binary(std::ostream& os) const {
    os << "dims";
    for (int d : grid.dims) os << ' ' << d;
    os << '\n';
    // interleaved (re, im) f64, native little-endian layout
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(cplx)));
}

FieldSamples FieldSamples::read_binary(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("dims", 0) != 0)
        throw std::runtime_error("FieldSamples::read_binary: missing dims header");
    FieldSamples out;
    {
        std::size_t i = 4;
        while (i < header.size()) {
            while (i < header.size() && header[i] == ' ') ++i;
            if (i >= header.size()) break;
            std::size_t used = 0;
            out.grid.dims.push_back(std::stoi(header.substr(i), &used));
            i += used;
        }
    }
    out.values.resize(out.grid.size());
    is.read(reinterpret_cast<char*>(out.values.data()),
            static_cast<std::streamsize>(out.values.size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("FieldSamples::read_binary: truncated payload");
    return out;
}

void FieldSamples::write_csv(std::ostream& os) const {
    os << "# dims " << grid.label() << "\n";
    std::vector<int> idx(grid.dims.size(), 0);
    char buf[96];
    for (const cplx& v : values) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k) os << ' ';
            os << idx[k];
        }
        std::snprintf(buf, sizeof(buf), " %.17g %.17g", v.real(), v.imag());
        os << buf << "\n";
        for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
            if (++idx[k] < grid.dims[k]) break;
            idx[k] = 0;
        }
    }
}

FieldSamples evaluate_periodic(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                               const TorusGrid& grid) {
    if (coeffs.amps.size() != fs.size())
        throw std::invalid_argument("evaluate_periodic: coefficients do not match the set");
    if (fs.is_spacetime() && !fs.temporal_periodic())
        throw std::invalid_argument("evaluate_periodic: non-integer temporal frequencies");
    const int n = fs.surface().spatial_dim();
    const int axes = fs.is_spacetime() ? n + 1 : n;
    if (static_cast<int>(grid.dims.size()) != axes)
        throw std::invalid_argument("evaluate_periodic: grid dimension mismatch");

    FieldSamples out;
    out.grid = grid;
    out.values.assign(grid.size(), cplx{0.0, 0.0});
    std::vector<char> hit(out.values.size(), 0);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        std::size_t flat = 0;
        for (int k = 0; k < axes; ++k) {
            const std::int64_t m = grid.dims[k];
            const std::int64_t zk = (k < n)
                                        ? fs.points()[i].spatial[k]
                                        : static_cast<std::int64_t>(std::llround(*fs.points()[i].temporal));
            const std::int64_t r = ((zk % m) + m) % m;
            flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
        }
        if (hit[flat])
            throw std::invalid_argument("evaluate_periodic: two frequencies are congruent mod the grid");
        hit[flat] = 1;
        out.values[flat] = coeffs.amps[i];
    }
    dft_nd(out.values, grid.dims, /*inverse=*/true);
    return out;
}

std::vector<cplx> evaluate_direct(const std::vector<Vec>& freqs, const std::vector<cplx>& amps,
                                  const std::vector<Vec>& points) {
    if (freqs.size() != amps.size())
        throw std::invalid_argument("evaluate_direct: freqs/amps size mismatch");
    std::vector<cplx> out(points.size(), cplx{0.0, 0.0});
    parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            cplx acc = 0.0;
            for (std::size_t f = 0; f < freqs.size(); ++f) {
                double phase = 0.0;
                for (std::size_t k = 0; k < freqs[f].size(); ++k) phase += freqs[f][k] * points[p][k];
                acc += amps[f] * std::polar(1.0, kTwoPi * phase);
            }
            out[p] = acc;
        }
    });
    return out;
}

FieldSamples schrodinger_samples(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                                 const std::vector<int>& x_dims, int t_count) {
    if (!fs.is_spacetime())
        throw std::invalid_argument("schrodinger_samples: expected a space-time frequency set");
    if (t_count < 1) throw std::invalid_argument("schrodinger_samples: t_count must be >= 1");
    const int n = fs.surface().spatial_dim();
    if (static_cast<int>(x_dims.size()) != n)
        throw std::invalid_argument("schrodinger_samples: x grid dimension mismatch");

    if (fs.temporal_periodic()) {
        TorusGrid grid;
        grid.dims = x_dims;
        grid.dims.push_back(t_count);
        return evaluate_periodic(fs, coeffs, grid);
    }

    // irrational path: adjust phases per t slice and run the spatial DFT
    FieldSamples out;
    out.grid.dims = x_dims;
    out.grid.dims.push_back(t_count);
    out.values.assign(out.grid.size(), cplx{0.0, 0.0});
    TorusGrid xgrid{x_dims};
    const std::size_t x_total = xgrid.size();

    // spatial-only set for the per-slice evaluation
    std::vector<Frequency> spatial;
    spatial.reserve(fs.size());
    for (const auto& f : fs.points()) spatial.push_back(Frequency{f.spatial, std::nullopt});

    for (int j = 0; j < t_count; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(t_count);
        // scatter with per-point phase twist, then one spatial inverse DFT
        std::vector<cplx> slab(x_total, cplx{0.0, 0.0});
        std::vector<char> hit(x_total, 0);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::size_t flat = 0;
            for (int k = 0; k < n; ++k) {
                const std::int64_t m = x_dims[k];
                const std::int64_t r = ((fs.points()[i].spatial[k] % m) + m) % m;
                flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
            }
            if (hit[flat])
                throw std::invalid_argument("schrodinger_samples: spatial frequencies collide mod grid");
            hit[flat] = 1;
            slab[flat] = coeffs.amps[i] * std::polar(1.0, kTwoPi * t * (*fs.points()[i].temporal));
        }
        dft_nd(slab, x_dims, /*inverse=*/true);
        for (std::size_t x = 0; x < x_total; ++x)
            out.values[x * static_cast<std::size_t>(t_count) + static_cast<std::size_t>(j)] = slab[x];
    }
    return out;
}

TorusGrid auto_grid(const FrequencySet& fs, double order) {
    TorusGrid grid;
    for (std::int64_t b : fs.coordinate_bounds()) {
        std::int64_t m = 1;
        while (static_cast<double>(m) <= order * static_cast<double>(b)) m <<= 1;
        grid.dims.push_back(static_cast<int>(m));
    }
    return grid;
}

} // namespace curvemoments
