#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace jamsim {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Sized for desk-scale control problems
/// (n up to ~8); no attempt at cache blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zero(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transpose() const;
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Vector matvec(const Matrix& a, std::span<const double> x);

double norm2(std::span<const double> x);
/// sqrt(x' P x); P assumed symmetric.
double p_vector_norm(std::span<const double> x, const Matrix& p);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. The input is
/// symmetrized as (S + S')/2 before iterating; converges to near machine
/// precision for the small matrices this project handles.
SymmetricEigen symmetric_eigen(const Matrix& s);

/// Largest singular value, via the symmetric eigenproblem on M'M.
double spectral_norm(const Matrix& m);

}  // namespace jamsim
