#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace echoqfi {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Hard cap on dense operator dimension (memory guard).
inline constexpr int kMaxDenseDim = 4096;

/// Absolute entrywise tolerance for Hermiticity contracts.
inline constexpr double kHermitianTol = 1e-10;

/// Absolute entrywise tolerance for unitarity contracts.
inline constexpr double kUnitaryTol = 1e-10;

/// Throws capacity_error if dim exceeds the dense cap.
void check_dense_dim(Eigen::Index dim);

double max_abs(const DenseOperator& a);

bool is_hermitian(const DenseOperator& a, double tol = kHermitianTol);
bool is_unitary(const DenseOperator& u, double tol = kUnitaryTol);

/// rho -> U rho U^dagger. U must be unitary within kUnitaryTol.
DenseOperator conjugate(const DenseOperator& rho, const DenseOperator& u);

/// Eigendecomposition of a Hermitian operator; eigenvalues ascending,
/// eigenvectors column-orthonormal.
std::pair<Eigen::VectorXd, DenseOperator> eig_hermitian(const DenseOperator& a);

DenseOperator kron(const DenseOperator& a, const DenseOperator& b);

/// Haar-random unitary via QR of a Ginibre matrix with phase fixing.
DenseOperator random_unitary(int dim, std::mt19937_64& rng);

/// Random Hermitian matrix with entries of scale O(1).
DenseOperator random_hermitian(int dim, std::mt19937_64& rng);

/// Random density matrix: random spectrum (normalized exponentials) rotated
/// by a Haar-random unitary.
DenseOperator random_density_matrix(int dim, std::mt19937_64& rng);

/// Random normalized state vector.
StateVector random_state_vector(int dim, std::mt19937_64& rng);

} // namespace echoqfi
