#include "fastslow/linalg.hpp"

#include <stdexcept>

namespace fastslow::linalg {

IntRowVector primitive(const RowVector<Rational>& row) {
  mpz_class denom_lcm = 1;
  for (Eigen::Index j = 0; j < row.cols(); ++j) {
    mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), row(j).get_den_mpz_t());
  }
  std::vector<mpz_class> ints(static_cast<std::size_t>(row.cols()));
  mpz_class g = 0;
  for (Eigen::Index j = 0; j < row.cols(); ++j) {
    mpz_class v = row(j).get_num() * (denom_lcm / row(j).get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    ints[static_cast<std::size_t>(j)] = v;
  }
  IntRowVector out = IntRowVector::Zero(row.cols());
  if (g == 0) return out;
  int sign = 0;
  for (const auto& v : ints) {
    if (v != 0) {
      sign = v > 0 ? 1 : -1;
      break;
    }
  }
  for (Eigen::Index j = 0; j < row.cols(); ++j) {
    mpz_class v = ints[static_cast<std::size_t>(j)] / g * sign;
    if (!v.fits_slong_p()) throw std::overflow_error("integer vector entry exceeds 64 bits");
    out(j) = v.get_si();
  }
  return out;
}

IntMatrix primitive_rows(const RationalMatrix& rows) {
  IntMatrix out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = primitive(rows.row(i));
  return out;
}

}  // namespace fastslow::linalg
