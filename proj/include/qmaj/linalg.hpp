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

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qmaj/errors.hpp"
#include "qmaj/tolerances.hpp"

namespace qmaj {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Selects a tensor factor of a bipartite space ordered A (x) B with the
// A-major index convention: composite index = a * d_B + b.
enum class Which { A, B };

// Dimensions of a bipartite factorization. Any operator tagged with a
// FactoredDims has total dimension d_A * d_B.
struct FactoredDims {
  int d_A = 1;
  int d_B = 1;
  FactoredDims() = default;
  FactoredDims(int a, int b) : d_A(a), d_B(b) {
    if (a < 1 || b < 1) throw DimensionError("FactoredDims: factors must be positive");
  }
  int total() const { return d_A * d_B; }
  int factor(Which w) const { return w == Which::A ? d_A : d_B; }
};

Mat identity(int d);
Mat zeros(int d);

bool finite_entries(const Mat& x);

// Requires a square matrix with finite entries; throws InputError otherwise.
void require_square(const Mat& x, const char* who);

// ||X - X'||_F <= herm_tol * max(1, ||X||_F). Non-conforming inputs are
// rejected by require_hermitian, never symmetrized silently.
bool is_hermitian(const Mat& x, double rel_tol = tol::herm);
void require_hermitian(const Mat& x, const char* who);

Complex frobenius_inner(const Mat& x, const Mat& y);  // Tr(X^dag Y)
double frobenius_norm(const Mat& x);

Mat hermitian_part(const Mat& x);  // (X + X^dag)/2

// Kronecker product with (A (x) B)[(i*dB+k),(j*dB+l)] = A[i,j]*B[k,l].
Mat tensor(const Mat& a, const Mat& b);

// Partial trace over the named factor; the result lives on the other one.
Mat partial_trace(const Mat& x, const FactoredDims& dims, Which traced);

// Partial transpose on the named factor.
Mat partial_transpose(const Mat& x, const FactoredDims& dims, Which w);

// Swap the two tensor factors: result[(b,a),(b',a')] = x[(a,b),(a',b')].
Mat swap_factors(const Mat& x, const FactoredDims& dims);

// General factor utilities on an n-fold tensor product (A-major indexing
// throughout). perm gives, for each output slot, the input slot it takes.
Mat permute_factors(const Mat& x, const std::vector<int>& dims, const std::vector<int>& perm);
Mat trace_factor(const Mat& x, const std::vector<int>& dims, int which);

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct Eigh {
  RVec values;
  Mat vectors;  // columns
};
Eigh eigh(const Mat& h);

double eig_min(const Mat& h);
double eig_max(const Mat& h);

// PSD test: lambda_min(X) >= -tol * max(1, ||X||_inf).
bool is_psd(const Mat& h, double tolerance);

// Symmetric square root / inverse square root of a PSD matrix; eigenvalues
// below floor are clamped to floor before the power is taken.
Mat psd_sqrt(const Mat& h, double floor = 0.0);
Mat psd_inv_sqrt(const Mat& h, double floor);

// Nearest PSD matrix: eigenvalue clip at zero.
Mat psd_clip(const Mat& h);

double trace_norm(const Mat& x);     // sum of singular values
double operator_norm(const Mat& x);  // largest singular value

// Tr (rho - sigma)_+ : the positive-part trace of a Hermitian difference.
double positive_part_trace(const Mat& h);

// One term of an operator-Schmidt decomposition across an A|B cut.
struct SchmidtTerm {
  double coeff;  // nonnegative, nonincreasing across the list
  Mat a;         // d_A x d_A, Frobenius-orthonormal across terms
  Mat b;         // d_B x d_B, Frobenius-orthonormal across terms
};

// X = sum_j coeff_j A_j (x) B_j. For Hermitian X the factors are returned
// Hermitian (real expansion over a Hermitian product basis). Terms with
// coeff < schmidt_drop * coeff_max are dropped.
std::vector<SchmidtTerm> operator_schmidt(const Mat& x, const FactoredDims& dims);

// Orthonormal Hermitian basis of d x d matrices (diagonal units first,
// then symmetric and antisymmetric off-diagonal pairs), Frobenius-normalized.
std::vector<Mat> hermitian_basis(int d);

}  // namespace qmaj
