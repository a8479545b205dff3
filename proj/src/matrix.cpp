#include "abccs/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace abccs {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

std::vector<double> Matrix::row(std::size_t i) const {
    return std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                               data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

std::vector<double> Matrix::col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= s;
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DomainError("matmul: inner dimensions disagree");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw DomainError("matvec: dimension mismatch");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
    return std::sqrt(s);
}

double trace(const Matrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

void require_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) throw DomainError("matrix is not square");
    if (!a.all_finite()) throw DomainError("matrix has non-finite entries");
    const double scale = std::max(max_abs(a), 1e-300);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol * scale)
                throw DomainError("matrix is not symmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
}

Matrix cholesky(const Matrix& m) {
    require_symmetric(m);
    const std::size_t n = m.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (!(diag > 0.0))
            throw DecompositionError(
                "cholesky: non-positive pivot " + std::to_string(diag) + " at index " +
                    std::to_string(j),
                j);
        const double ljj = std::sqrt(diag);
        L(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = m(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
            L(i, j) = acc / ljj;
        }
    }
    return L;
}

std::vector<double> forward_subst(const Matrix& L, const std::vector<double>& b) {
    const std::size_t n = L.rows();
    if (b.size() != n) throw DomainError("forward_subst: dimension mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= L(i, k) * x[k];
        x[i] = acc / L(i, i);
    }
    return x;
}

std::vector<double> back_subst_transposed(const Matrix& L, const std::vector<double>& b) {
    const std::size_t n = L.rows();
    if (b.size() != n) throw DomainError("back_subst: dimension mismatch");
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= L(k, ii) * x[k];
        x[ii] = acc / L(ii, ii);
    }
    return x;
}

std::vector<double> solve_spd(const Matrix& m, const std::vector<double>& b) {
    const Matrix L = cholesky(m);
    return back_subst_transposed(L, forward_subst(L, b));
}

Matrix solve_spd(const Matrix& m, const Matrix& B) {
    const Matrix L = cholesky(m);
    Matrix X(B.rows(), B.cols());
    for (std::size_t j = 0; j < B.cols(); ++j) {
        const auto x = back_subst_transposed(L, forward_subst(L, B.col(j)));
        for (std::size_t i = 0; i < B.rows(); ++i) X(i, j) = x[i];
    }
    return X;
}

Matrix inverse_spd(const Matrix& m) { return solve_spd(m, Matrix::identity(m.rows())); }

namespace {

// In-place LU with partial pivoting; perm holds the row permutation.
void lu_factor(Matrix& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DomainError("lu_solve: matrix not square");
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (!(best > 0.0)) throw DecompositionError("lu_solve: singular at column " + std::to_string(k), k);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(perm[k], perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double f = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
}

std::vector<double> lu_apply(const Matrix& a, const std::vector<std::size_t>& perm,
                             const std::vector<double>& b) {
    const std::size_t n = a.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) x[i] -= a(i, k) * x[k];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= a(ii, k) * x[k];
        x[ii] /= a(ii, ii);
    }
    return x;
}

}  // namespace

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
    std::vector<std::size_t> perm;
    lu_factor(a, perm);
    return lu_apply(a, perm, b);
}

Matrix lu_solve(Matrix a, const Matrix& B) {
    std::vector<std::size_t> perm;
    lu_factor(a, perm);
    Matrix X(B.rows(), B.cols());
    for (std::size_t j = 0; j < B.cols(); ++j) {
        const auto x = lu_apply(a, perm, B.col(j));
        for (std::size_t i = 0; i < B.rows(); ++i) X(i, j) = x[i];
    }
    return X;
}

}  // namespace abccs
