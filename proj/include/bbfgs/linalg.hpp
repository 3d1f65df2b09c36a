#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bbfgs {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSymmetric : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonFiniteEntry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Vector = std::vector<double>;

/// Dense matrix, row-major: entry (i,j) lives at data[i*cols + j].
/// Constructors reject NaN/Inf entries.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const;
    double frobenius_norm() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Vector matvec_transposed(const Matrix& a, const Vector& x);

/// Lower-triangular Cholesky factor R with R*R^T equal to the factored
/// SPD matrix. Diagonal entries are strictly positive.
class LowerTriangularFactor {
  public:
    explicit LowerTriangularFactor(Matrix lower);

    std::size_t dim() const { return lower_.rows(); }
    const Matrix& lower() const { return lower_; }

    /// Solves (R R^T) X = B by forward then back substitution.
    Matrix solve(const Matrix& b) const;
    Vector solve(const Vector& b) const;

  private:
    Matrix lower_;
};

/// Cholesky factorization of a symmetric positive definite matrix.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// pivot_tolerance (relative to the largest diagonal entry).
LowerTriangularFactor cholesky(const Matrix& a, double pivot_rel_tolerance = 1e-12);

inline Matrix solve_with_factor(const LowerTriangularFactor& r, const Matrix& b) {
    return r.solve(b);
}

/// Eigenvalues of a symmetric matrix in ascending order, by cyclic Jacobi.
/// Test-oracle quality, not a hot path.
Vector sym_eigenvalues(const Matrix& a, double symmetry_tolerance = 1e-8);

}  // namespace bbfgs
