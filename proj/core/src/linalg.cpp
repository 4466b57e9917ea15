#include "curvemoments/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace curvemoments {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_symmetric(double tol) const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

SymMatrixI SymMatrixI::identity(int n) {
    SymMatrixI m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

SymMatrixI SymMatrixI::diag(std::span<const std::int64_t> d) {
    SymMatrixI m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n; ++i) m.at(i, i) = d[i];
    return m;
}

bool SymMatrixI::is_symmetric() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

bool SymMatrixI::is_positive_definite() const {
    // Bareiss fraction-free elimination; the pivot after step k equals the
    // k-th leading principal minor, so all pivots must stay positive.
    std::vector<__int128> w(a.begin(), a.end());
    auto el = [&](int i, int j) -> __int128& { return w[static_cast<std::size_t>(i) * n + j]; };
    __int128 prev = 1;
    for (int k = 0; k < n; ++k) {
        if (el(k, k) <= 0) return false;
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                el(i, j) = (el(i, j) * el(k, k) - el(i, k) * el(k, j)) / prev;
        prev = el(k, k);
    }
    return true;
}

std::int64_t SymMatrixI::quad(std::span<const std::int64_t> z) const {
    std::int64_t s = 0;
    for (int i = 0; i < n; ++i) {
        std::int64_t row = 0;
        for (int j = 0; j < n; ++j) row += at(i, j) * z[j];
        s += row * z[i];
    }
    return s;
}

double SymMatrixI::quad(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += static_cast<double>(at(i, j)) * x[j];
        s += row * x[i];
    }
    return s;
}

Matrix SymMatrixI::to_real() const {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(at(i, j));
    return m;
}

double dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

Vec normalized(const Vec& x) {
    const double r = norm(x);
    if (r == 0.0) throw std::invalid_argument("normalized: zero vector");
    Vec y(x);
    for (double& v : y) v /= r;
    return y;
}

double gram_volume(const std::vector<Vec>& vectors) {
    const int k = static_cast<int>(vectors.size());
    if (k == 0) return 1.0;
    Matrix g(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = dot(vectors[i], vectors[j]);
    // determinant by elimination with partial pivoting
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(g(r, c)) > std::abs(g(piv, c))) piv = r;
        if (g(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j) std::swap(g(piv, j), g(c, j));
            det = -det;
        }
        det *= g(c, c);
        for (int r = c + 1; r < k; ++r) {
            const double f = g(r, c) / g(c, c);
            for (int j = c; j < k; ++j) g(r, j) -= f * g(c, j);
        }
    }
    // Gram determinants are >= 0; rounding can leave a tiny negative.
    return det > 0.0 ? std::sqrt(det) : 0.0;
}

Matrix invert_spd(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("invert_spd: not square");
    const int n = m.rows;
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (std::abs(a(piv, c)) < 1e-300) throw std::invalid_argument("invert_spd: singular matrix");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        const double d = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

std::optional<Matrix> cholesky_upper(const Matrix& m) {
    if (m.rows != m.cols) return std::nullopt;
    const int n = m.rows;
    Matrix r(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = m(i, j);
            for (int k = 0; k < i; ++k) s -= r(k, i) * r(k, j);
            if (i == j) {
                if (s <= 0.0) return std::nullopt;
                r(i, i) = std::sqrt(s);
            } else {
                r(i, j) = s / r(i, i);
            }
        }
    }
    return r;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("symmetric_eigen: not square");
    const int n = m.rows;
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a(order[j], order[j]) < a(order[i], order[i])) std::swap(order[i], order[j]);
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n);
    for (int i = 0; i < n; ++i) {
        out.values[i] = a(order[i], order[i]);
        Vec vec(n);
        for (int k = 0; k < n; ++k) vec[k] = v(k, order[i]);
        for (int k = 0; k < n; ++k) {
            if (std::abs(vec[k]) > 1e-12) {
                if (vec[k] < 0)
                    for (double& x : vec) x = -x;
                break;
            }
        }
        out.vectors[i] = std::move(vec);
    }
    return out;
}

} // namespace curvemoments
