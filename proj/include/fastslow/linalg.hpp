#pragma once

// Exact linear algebra over Eigen matrices with a field-valued scalar.
// Everything here is templated on the scalar; the library instantiates it
// with GMP rationals.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace fastslow::linalg {

using Rational = mpq_class;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using IntMatrix = Matrix<std::int64_t>;
using IntRowVector = RowVector<std::int64_t>;
using RationalMatrix = Matrix<Rational>;

template <typename Scalar>
struct Echelon {
  Matrix<Scalar> reduced;              // reduced row echelon form, zero rows dropped
  std::vector<Eigen::Index> pivots;    // pivot column of each row
};

/// Gauss-Jordan elimination; exact when Scalar is an exact field.
template <typename Derived>
Echelon<typename Derived::Scalar> rref(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  static_assert(!Eigen::NumTraits<Scalar>::IsInteger, "rref needs a field scalar");
  Matrix<Scalar> m = input;
  Echelon<Scalar> out;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r) {
      if (m(r, col) != Scalar(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    m.row(row).swap(m.row(pivot));
    const Scalar lead = m(row, col);
    m.row(row) /= lead;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == Scalar(0)) continue;
      const Scalar factor = m(r, col);
      m.row(r) -= factor * m.row(row);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = m.topRows(row);
  return out;
}

template <typename Derived>
Eigen::Index rank(const Eigen::MatrixBase<Derived>& m) {
  return static_cast<Eigen::Index>(rref(m).pivots.size());
}

/// Rows form a basis of {x | m x = 0}.
template <typename Derived>
Matrix<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto ech = rref(m);
  const Eigen::Index n = m.cols();
  std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
  for (auto p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = 1;
  Matrix<Scalar> basis(n - static_cast<Eigen::Index>(ech.pivots.size()), n);
  Eigen::Index k = 0;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    basis.row(k).setZero();
    basis(k, free) = Scalar(1);
    for (std::size_t i = 0; i < ech.pivots.size(); ++i) {
      basis(k, ech.pivots[i]) = -ech.reduced(static_cast<Eigen::Index>(i), free);
    }
    ++k;
  }
  return basis;
}

/// Rows form a basis of {y | y^T m = 0}.
template <typename Derived>
Matrix<typename Derived::Scalar> left_null_space(const Eigen::MatrixBase<Derived>& m) {
  return null_space(m.transpose());
}

template <typename DA, typename DB>
Matrix<typename DA::Scalar> vstack(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  Matrix<typename DA::Scalar> out(a.rows() + b.rows(), a.rows() ? a.cols() : b.cols());
  if (a.rows()) out.topRows(a.rows()) = a;
  if (b.rows()) out.bottomRows(b.rows()) = b;
  return out;
}

/// Whether the row spaces of a and b coincide.
template <typename DA, typename DB>
bool same_row_span(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const auto ra = rank(a);
  return ra == rank(b) && ra == rank(vstack(a, b));
}

template <typename DA, typename DB>
bool in_row_span(const Eigen::MatrixBase<DA>& rows, const Eigen::MatrixBase<DB>& v) {
  return rank(vstack(rows, v)) == rank(rows);
}

/// Scales a rational row to coprime integers with a positive leading entry.
IntRowVector primitive(const RowVector<Rational>& row);
IntMatrix primitive_rows(const RationalMatrix& rows);

template <typename Derived>
RationalMatrix to_rational(const Eigen::MatrixBase<Derived>& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(static_cast<long>(m(i, j)));
  }
  return out;
}

}  // namespace fastslow::linalg
