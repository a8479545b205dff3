#pragma once

#include <cstddef>
#include <vector>

#include "abccs/common.hpp"

namespace abccs {

/// Small dense row-major matrix. Sized for the d x d information matrices and
/// n x q datasets this library works with; no sparse or blocked paths.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    /// Row i as a copy.
    std::vector<double> row(std::size_t i) const;
    std::vector<double> col(std::size_t j) const;

    bool all_finite() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Dataset convention: rows are independent replicates (clusters, years),
/// columns are the within-replicate coordinates.
using Dataset = Matrix;

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);

/// Throws DomainError unless |a(i,j) - a(j,i)| <= tol * max_abs(a) for all i, j.
void require_symmetric(const Matrix& a, double tol = 1e-10);

/// Lower Cholesky factor L with L L^T = m. Requires m symmetric positive
/// definite; a non-positive pivot raises DecompositionError naming its index.
Matrix cholesky(const Matrix& m);

/// Solve L x = b with L lower triangular.
std::vector<double> forward_subst(const Matrix& L, const std::vector<double>& b);
/// Solve L^T x = b with L lower triangular.
std::vector<double> back_subst_transposed(const Matrix& L, const std::vector<double>& b);

/// Solve m x = b for symmetric positive definite m via Cholesky.
std::vector<double> solve_spd(const Matrix& m, const std::vector<double>& b);
/// Multi-RHS variant: returns X with m X = B.
Matrix solve_spd(const Matrix& m, const Matrix& B);
Matrix inverse_spd(const Matrix& m);

/// General square solve with partial pivoting (for non-SPD but invertible systems).
std::vector<double> lu_solve(Matrix a, std::vector<double> b);
Matrix lu_solve(Matrix a, const Matrix& B);

}  // namespace abccs
