// Test-local helpers: deterministic random matrices built directly on the
// pinned PRNG, independent of the library's instance generators.
#pragma once

#include <qmaj/linalg.hpp>
#include <qmaj/rng.hpp>

namespace qmaj::testutil {

inline Mat random_mat(int rows, int cols, Pcg32& rng) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

inline Mat random_hermitian(int d, Pcg32& rng) {
  Mat m = random_mat(d, d, rng);
  return 0.5 * (m + m.adjoint());
}

inline Mat random_unitary(int d, Pcg32& rng) {
  Mat m = random_mat(d, d, rng);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

inline Mat random_density_mat(int d, int rank, Pcg32& rng) {
  Mat g = random_mat(d, rank, rng);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Mat max_entangled(int d) {
  Mat psi = Mat::Zero(d * d, 1);
  for (int i = 0; i < d; ++i) psi(i * d + i, 0) = 1.0 / std::sqrt(static_cast<double>(d));
  return psi * psi.adjoint();
}

// Haar-style random isometry d_in -> d_out * env via QR, returned as Kraus
// blocks K_e[o,i] = V[(o,e),i]. Independent Stinespring-based construction.
inline std::vector<Mat> random_kraus(int d_in, int d_out, int env, Pcg32& rng) {
  Mat g = random_mat(d_out * env, d_in, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = Mat(qr.householderQ()).leftCols(d_in);
  std::vector<Mat> kraus;
  for (int e = 0; e < env; ++e) {
    Mat k(d_out, d_in);
    for (int o = 0; o < d_out; ++o)
      for (int i = 0; i < d_in; ++i) k(o, i) = q(o * env + e, i);
    kraus.push_back(k);
  }
  return kraus;
}

}  // namespace qmaj::testutil
