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

#include "qmaj/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qmaj {

namespace {
constexpr double kRoot2Inv = 0.70710678118654752440;
}

Mat identity(int d) { return Mat::Identity(d, d); }
Mat zeros(int d) { return Mat::Zero(d, d); }

bool finite_entries(const Mat& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!std::isfinite(x(i, j).real()) || !std::isfinite(x(i, j).imag())) return false;
  return true;
}

void require_square(const Mat& x, const char* who) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw DimensionError(std::string(who) + ": square matrix required");
  if (!finite_entries(x)) throw InputError(std::string(who) + ": non-finite entries");
}

bool is_hermitian(const Mat& x, double rel_tol) {
  if (x.rows() != x.cols()) return false;
  double scale = std::max(1.0, x.norm());
  return (x - x.adjoint()).norm() <= rel_tol * scale;
}

void require_hermitian(const Mat& x, const char* who) {
  require_square(x, who);
  if (!is_hermitian(x)) throw InputError(std::string(who) + ": Hermitian matrix required");
}

Complex frobenius_inner(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DimensionError("frobenius_inner: shape mismatch");
  return (x.adjoint() * y).trace();
}

double frobenius_norm(const Mat& x) { return x.norm(); }

Mat hermitian_part(const Mat& x) {
  require_square(x, "hermitian_part");
  return 0.5 * (x + x.adjoint());
}

Mat tensor(const Mat& a, const Mat& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  Mat out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

//! map: reduced-state :: qmaj::partial_trace
Mat partial_trace(const Mat& x, const FactoredDims& dims, Which traced) {
  require_square(x, "partial_trace");
  if (x.rows() != dims.total()) throw DimensionError("partial_trace: dims do not match matrix");
  const int dA = dims.d_A, dB = dims.d_B;
  if (traced == Which::A) {
    Mat out = zeros(dB);
    for (int a = 0; a < dA; ++a)
      for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) out(k, l) += x(a * dB + k, a * dB + l);
    return out;
  }
  Mat out = zeros(dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      for (int b = 0; b < dB; ++b) out(i, j) += x(i * dB + b, j * dB + b);
  return out;
}

Mat partial_transpose(const Mat& x, const FactoredDims& dims, Which w) {
  require_square(x, "partial_transpose");
  if (x.rows() != dims.total()) throw DimensionError("partial_transpose: dims do not match matrix");
  const int dA = dims.d_A, dB = dims.d_B;
  Mat out(x.rows(), x.cols());
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b)
      for (int a2 = 0; a2 < dA; ++a2)
        for (int b2 = 0; b2 < dB; ++b2) {
          if (w == Which::A)
            out(a * dB + b, a2 * dB + b2) = x(a2 * dB + b, a * dB + b2);
          else
            out(a * dB + b, a2 * dB + b2) = x(a * dB + b2, a2 * dB + b);
        }
  return out;
}

Mat swap_factors(const Mat& x, const FactoredDims& dims) {
  return permute_factors(x, {dims.d_A, dims.d_B}, {1, 0});
}

namespace {
// Decompose a flat A-major index into per-factor digits.
void unflatten(int idx, const std::vector<int>& dims, std::vector<int>& digits) {
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    digits[k] = idx % dims[k];
    idx /= dims[k];
  }
}
}  // namespace

Mat permute_factors(const Mat& x, const std::vector<int>& dims, const std::vector<int>& perm) {
  require_square(x, "permute_factors");
  const int n = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) total *= d;
  if (x.rows() != total) throw DimensionError("permute_factors: dims do not match matrix");
  if (static_cast<int>(perm.size()) != n) throw DimensionError("permute_factors: bad permutation");

  std::vector<int> out_dims(n);
  for (int k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];

  // Maps an input flat index to the output flat index.
  std::vector<int> digits(n);
  std::vector<int> map(total);
  for (int idx = 0; idx < total; ++idx) {
    unflatten(idx, dims, digits);
    int out = 0;
    for (int k = 0; k < n; ++k) out = out * out_dims[k] + digits[perm[k]];
    map[idx] = out;
  }

  Mat out = Mat::Zero(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) out(map[i], map[j]) = x(i, j);
  return out;
}

Mat trace_factor(const Mat& x, const std::vector<int>& dims, int which) {
  const int n = static_cast<int>(dims.size());
  if (which < 0 || which >= n) throw DimensionError("trace_factor: bad factor index");
  // Rotate the traced factor to the front, then do a bipartite trace.
  std::vector<int> perm;
  perm.push_back(which);
  for (int k = 0; k < n; ++k)
    if (k != which) perm.push_back(k);
  Mat moved = permute_factors(x, dims, perm);
  int rest = 1;
  for (int k = 0; k < n; ++k)
    if (k != which) rest *= dims[k];
  return partial_trace(moved, FactoredDims(dims[which], rest), Which::A);
}

Eigh eigh(const Mat& h) {
  require_hermitian(h, "eigh");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  if (es.info() != Eigen::Success) throw InputError("eigh: eigensolver failed");
  return Eigh{es.eigenvalues(), es.eigenvectors()};
}

double eig_min(const Mat& h) { return eigh(h).values(0); }
double eig_max(const Mat& h) {
  auto e = eigh(h);
  return e.values(e.values.size() - 1);
}

bool is_psd(const Mat& h, double tolerance) {
  auto e = eigh(h);
  double sup = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  return e.values(0) >= -tolerance * std::max(1.0, sup);
}

Mat psd_sqrt(const Mat& h, double floor) {
  auto e = eigh(h);
  RVec v = e.values.cwiseMax(floor).cwiseSqrt();
  return e.vectors * v.asDiagonal() * e.vectors.adjoint();
}

Mat psd_inv_sqrt(const Mat& h, double floor) {
  auto e = eigh(h);
  RVec v = e.values.cwiseMax(floor);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 1.0 / std::sqrt(v(i));
  return e.vectors * v.asDiagonal() * e.vectors.adjoint();
}

Mat psd_clip(const Mat& h) {
  auto e = eigh(h);
  RVec v = e.values.cwiseMax(0.0);
  return e.vectors * v.asDiagonal() * e.vectors.adjoint();
}

//! map: trace-norm :: qmaj::trace_norm
double trace_norm(const Mat& x) {
  require_square(x, "trace_norm");
  if (is_hermitian(x)) {
    auto e = eigh(x);
    return e.values.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Mat> svd(x);
  return svd.singularValues().sum();
}

double operator_norm(const Mat& x) {
  require_square(x, "operator_norm");
  if (is_hermitian(x)) {
    auto e = eigh(x);
    return e.values.cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Mat> svd(x);
  return svd.singularValues()(0);
}

double positive_part_trace(const Mat& h) {
  auto e = eigh(h);
  return e.values.cwiseMax(0.0).sum();
}

std::vector<Mat> hermitian_basis(int d) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d; ++k) {
    Mat m = zeros(d);
    m(k, k) = 1.0;
    basis.push_back(m);
  }
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      Mat s = zeros(d);
      s(k, l) = kRoot2Inv;
      s(l, k) = kRoot2Inv;
      basis.push_back(s);
      Mat a = zeros(d);
      a(k, l) = Complex(0, -kRoot2Inv);
      a(l, k) = Complex(0, kRoot2Inv);
      basis.push_back(a);
    }
  return basis;
}

namespace {

// Realignment of a bipartite operator: rows indexed by the A index pair,
// columns by the B index pair, so that X = sum R[(ij),(kl)] e_ij (x) e_kl.
Mat realign(const Mat& x, const FactoredDims& dims) {
  const int dA = dims.d_A, dB = dims.d_B;
  Mat r(dA * dA, dB * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) r(i * dA + j, k * dB + l) = x(i * dB + k, j * dB + l);
  return r;
}

Mat unvec(const Eigen::VectorXcd& v, int d) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v(i * d + j);
  return m;
}

}  // namespace

//! map: hermitian-schmidt-split :: qmaj::operator_schmidt
std::vector<SchmidtTerm> operator_schmidt(const Mat& x, const FactoredDims& dims) {
  require_square(x, "operator_schmidt");
  if (x.rows() != dims.total()) throw DimensionError("operator_schmidt: dims do not match matrix");
  const int dA = dims.d_A, dB = dims.d_B;
  std::vector<SchmidtTerm> terms;

  if (is_hermitian(x)) {
    // Expand over a Hermitian product basis; the coefficient matrix is real,
    // so a real SVD yields Hermitian Schmidt factors directly.
    auto fa = hermitian_basis(dA);
    auto fb = hermitian_basis(dB);
    RMat c(dA * dA, dB * dB);
    for (size_t m = 0; m < fa.size(); ++m)
      for (size_t n = 0; n < fb.size(); ++n)
        c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
            frobenius_inner(tensor(fa[m], fb[n]), x).real();
    Eigen::JacobiSVD<RMat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    double cutoff = s.size() ? tol::schmidt_drop * s(0) : 0.0;
    for (Eigen::Index m = 0; m < s.size(); ++m) {
      if (s(m) <= cutoff || s(m) == 0.0) continue;
      Mat a = zeros(dA), b = zeros(dB);
      for (size_t p = 0; p < fa.size(); ++p) a += svd.matrixU()(static_cast<Eigen::Index>(p), m) * fa[p];
      for (size_t q = 0; q < fb.size(); ++q) b += svd.matrixV()(static_cast<Eigen::Index>(q), m) * fb[q];
      terms.push_back({s(m), a, b});
    }
    return terms;
  }

  Mat r = realign(x, dims);
  Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  double cutoff = s.size() ? tol::schmidt_drop * s(0) : 0.0;
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    if (s(m) <= cutoff || s(m) == 0.0) continue;
    terms.push_back({s(m), unvec(svd.matrixU().col(m), dA), unvec(svd.matrixV().col(m).conjugate(), dB)});
  }
  return terms;
}

}  // namespace qmaj
