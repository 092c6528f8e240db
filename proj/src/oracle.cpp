// Copyright 2026 The qmaj developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmaj/oracle.hpp"

#include <cmath>

namespace qmaj::oracle {

namespace {

Mat gaussian_mat(int rows, int cols, Pcg32& rng) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = rng.normal();
      double im = rng.normal();
      m(i, j) = Complex(re, im);
    }
  return m;
}

}  // namespace

Mat random_density(int d, int rank, Seed seed) {
  if (rank < 1 || rank > d) throw InputError("random_density: rank outside [1, d]");
  Pcg32 rng(seed);
  Mat g = gaussian_mat(d, rank, rng);
  Mat rho = g * g.adjoint();
  return hermitian_part(rho / rho.trace().real());
}

Mat random_unitary_mat(int d, Seed seed) {
  Pcg32 rng(seed);
  Mat g = gaussian_mat(d, d, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    q.col(i) *= std::abs(rii) > 0 ? rii / std::abs(rii) : Complex(1, 0);
  }
  return q;
}

Channel random_cptp(int d_in, int d_out, int env, Seed seed) {
  if (env < 1) throw InputError("random_cptp: env must be >= 1");
  Pcg32 rng(seed);
  Mat g = gaussian_mat(d_out * env, d_in, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = Mat(qr.householderQ()).leftCols(d_in);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d_in; ++i) {
    Complex rii = r(i, i);
    q.col(i) *= std::abs(rii) > 0 ? std::conj(rii) / std::abs(rii) : Complex(1, 0);
  }
  std::vector<Mat> kraus;
  for (int e = 0; e < env; ++e) {
    Mat k(d_out, d_in);
    for (int o = 0; o < d_out; ++o)
      for (int i = 0; i < d_in; ++i) k(o, i) = q(o * env + e, i);
    kraus.push_back(k);
  }
  return choi_from_kraus(kraus);
}

Mat random_separable(const FactoredDims& dims, int terms, Seed seed) {
  if (terms < 1) throw InputError("random_separable: terms must be >= 1");
  Mat rho = zeros(dims.total());
  Pcg32 mix(Pcg32::derive(seed, 0));
  double total = 0;
  for (int t = 0; t < terms; ++t) {
    double w = mix.uniform();
    Mat a = random_density(dims.d_A, dims.d_A, Pcg32::derive(seed, 2 * t + 1));
    Mat b = random_density(dims.d_B, dims.d_B, Pcg32::derive(seed, 2 * t + 2));
    rho += w * tensor(a, b);
    total += w;
  }
  return rho / total;
}

namespace {

// Bloch-shape scan state for d_B = 2: w = s * D(r, theta, phi) with
// D = (I + r n.sigma)/2, Tr D = 1, D > 0 for r < 1.
Mat bloch_shape(double r, double theta, double phi) {
  double nx = std::sin(theta) * std::cos(phi);
  double ny = std::sin(theta) * std::sin(phi);
  double nz = std::cos(theta);
  Mat d = zeros(2);
  d(0, 0) = 0.5 * (1.0 + r * nz);
  d(1, 1) = 0.5 * (1.0 - r * nz);
  d(0, 1) = 0.5 * (r * nx - Complex(0, 1) * r * ny);
  d(1, 0) = std::conj(d(0, 1));
  return d;
}

// Smallest signed scale s with s * (1 (x) D) >= x: the top eigenvalue of
// the congruence (1 (x) D)^(-1/2) x (1 (x) D)^(-1/2).
double scale_for_shape(const Mat& x, int d_a, const Mat& shape) {
  Mat isq = psd_inv_sqrt(shape, 1e-12);
  Mat lifted = tensor(identity(d_a), isq);
  return eig_max(hermitian_part(lifted * x * lifted));
}

}  // namespace

//! map: min-entropy-grid-oracle :: qmaj::grid_lambda
double grid_lambda(const Mat& x, const FactoredDims& dims, int resolution) {
  require_hermitian(x, "grid_lambda");
  if (dims.d_B != 2) throw DimensionError("grid_lambda: only d_B = 2 is supported");
  if (x.rows() != dims.total()) throw DimensionError("grid_lambda: dims mismatch");

  const double golden = 2.39996322972865332;  // 2*pi*(1 - 1/phi)
  int n_r = 24;
  int n_dir = std::max(8, resolution / n_r);

  double best = std::numeric_limits<double>::infinity();
  double br = 0, bt = 0, bp = 0;
  for (int k = 0; k < n_dir; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / n_dir;
    double theta = std::acos(z);
    double phi = std::fmod(k * golden, 2 * M_PI);
    for (int j = 0; j < n_r; ++j) {
      double r = 0.999 * j / (n_r - 1);
      double s = scale_for_shape(x, dims.d_A, bloch_shape(r, theta, phi));
      if (s < best) {
        best = s;
        br = r;
        bt = theta;
        bp = phi;
      }
    }
  }
  // Local refinement by shrinking coordinate steps.
  double step_r = 0.05, step_a = 0.2;
  for (int round = 0; round < 60; ++round) {
    bool moved = false;
    const double cand[6][3] = {{br + step_r, bt, bp}, {br - step_r, bt, bp},
                               {br, bt + step_a, bp}, {br, bt - step_a, bp},
                               {br, bt, bp + step_a}, {br, bt, bp - step_a}};
    for (const auto& c : cand) {
      double r = std::clamp(c[0], 0.0, 0.999999);
      double s = scale_for_shape(x, dims.d_A, bloch_shape(r, c[1], c[2]));
      if (s < best - 1e-15) {
        best = s;
        br = r;
        bt = c[1];
        bp = c[2];
        moved = true;
      }
    }
    if (!moved) {
      step_r *= 0.5;
      step_a *= 0.5;
      if (step_r < 1e-9) break;
    }
  }
  return best;
}

double grid_hmin(const Mat& rho, const FactoredDims& dims, int resolution) {
  if (!is_psd(rho, 1e-8) || std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw InputError("grid_hmin: density matrix required");
  return grid_lambda(rho, dims, resolution);
}

namespace {

Mat qr_isometry(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  return Mat(qr.householderQ()).leftCols(m.cols());
}

}  // namespace

double channel_search_sup(const Mat& w, const Mat& rho, const FactoredDims& dims, int d_out,
                          int restarts, int iters, Seed seed) {
  const int d_in = dims.d_B;
  const int d_a = dims.d_A;
  const int env = d_in * d_out;

  // The pairing value is a Hermitian quadratic form in the Kraus entries:
  //   Tr(W (id (x) Phi_K) rho) = sum_e vec(K_e)^dag H vec(K_e),
  //   H[(o,i),(o',i')] = sum_{a,a'} rho[(a,i'),(a',i)]^* ... assembled below
  // directly from the Kraus action, with no Choi bookkeeping involved.
  Mat h = zeros(d_out * d_in);
  for (int o = 0; o < d_out; ++o)
    for (int i2 = 0; i2 < d_in; ++i2)
      for (int o2 = 0; o2 < d_out; ++o2)
        for (int i = 0; i < d_in; ++i) {
          Complex acc = 0;
          for (int a = 0; a < d_a; ++a)
            for (int a2 = 0; a2 < d_a; ++a2)
              acc += w(a * d_out + o, a2 * d_out + o2) * rho(a2 * d_in + i, a * d_in + i2);
          // row (o,i2) pairs with conj(K[o,i2]); column (o2,i) with K[o2,i].
          h(o * d_in + i2, o2 * d_in + i) = acc;
        }
  h = hermitian_part(h);
  double shift = std::max(0.0, -eig_min(h)) + 0.1 * std::max(1.0, operator_norm(h));

  auto value_of = [&](const Mat& v) {
    Mat out = zeros(d_a * d_out);
    for (int e = 0; e < env; ++e) {
      Mat k(d_out, d_in);
      for (int o = 0; o < d_out; ++o)
        for (int i = 0; i < d_in; ++i) k(o, i) = v(o * env + e, i);
      Mat lift = tensor(identity(d_a), k);
      out += lift * rho * lift.adjoint();
    }
    return frobenius_inner(w, out).real();
  };

  auto polar = [](const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return Mat(svd.matrixU() * svd.matrixV().adjoint());
  };

  // Monotone majorize-minimize ascent: V <- polar((H + shift) . V) applied
  // per Kraus column, plus random restarts and kicks.
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Pcg32 rng(Pcg32::derive(seed, static_cast<Seed>(r)));
    Mat v = qr_isometry(gaussian_mat(d_out * env, d_in, rng));
    for (int it = 0; it < iters; ++it) {
      Mat amb = Mat::Zero(v.rows(), v.cols());
      for (int e = 0; e < env; ++e) {
        Eigen::VectorXcd vk(d_out * d_in);
        for (int o = 0; o < d_out; ++o)
          for (int i = 0; i < d_in; ++i) vk(o * d_in + i) = v(o * env + e, i);
        Eigen::VectorXcd g = h * vk + shift * vk;
        for (int o = 0; o < d_out; ++o)
          for (int i = 0; i < d_in; ++i) amb(o * env + e, i) = g(o * d_in + i);
      }
      Mat next = polar(amb);
      if ((next - v).norm() < 1e-13) break;
      v = next;
    }
    best = std::max(best, value_of(v));
  }
  return best;
}

}  // namespace qmaj::oracle
