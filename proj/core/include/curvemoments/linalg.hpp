#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace curvemoments {

using Vec = std::vector<double>;

// Small dense row-major matrix. Dimensions here never exceed a handful, so
// everything below is plain O(n^3) with no blocking.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    static Matrix identity(int n);

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    bool is_symmetric(double tol = 1e-12) const;
};

// Integer symmetric quadratic form, exact arithmetic throughout.
struct SymMatrixI {
    int n = 0;
    std::vector<std::int64_t> a; // row-major n*n

    SymMatrixI() = default;
    explicit SymMatrixI(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0) {}
    static SymMatrixI identity(int n);
    static SymMatrixI diag(std::span<const std::int64_t> d);

    std::int64_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    std::int64_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    bool is_symmetric() const;
    // Leading principal minors all positive (Bareiss, exact in __int128).
    bool is_positive_definite() const;
    std::int64_t quad(std::span<const std::int64_t> z) const; // z^T Q z
    double quad(std::span<const double> x) const;             // x^T Q x
    Matrix to_real() const;
};

double dot(const Vec& x, const Vec& y);
double norm(const Vec& x);
Vec normalized(const Vec& x);

// sqrt(det(Gram(v_1..v_k))): k-volume of the parallelepiped spanned.
double gram_volume(const std::vector<Vec>& vectors);

// Inverse of a symmetric positive definite matrix (Gauss-Jordan with partial
// pivoting); throws std::invalid_argument if numerically singular.
Matrix invert_spd(const Matrix& m);

// Upper-triangular R with m = R^T R, or nullopt if m is not numerically PD.
std::optional<Matrix> cholesky_upper(const Matrix& m);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues ascending with matching unit eigenvectors; deterministic
// (fixed sweep order, sign fixed so the first nonzero component is positive).
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<Vec> vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& m);

} // namespace curvemoments
