#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "steerkit/errors.hpp"

namespace steerkit {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// Real 3-vector (trace(rho sigma_x), trace(rho sigma_y), trace(rho sigma_z)).
/// Norm <= 1 for physical states; hidden-state candidates may exceed 1.
using BlochVector = Eigen::Vector3d;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kUnitAxisTol = 1e-9;

/// Which tensor factor an operation refers to. Alice is always the first
/// (left) factor of a two-qubit state.
enum class Side { Alice, Bob };

// --- Pauli calculus -------------------------------------------------------

/// sigma_x, sigma_y, sigma_z for axis = 0, 1, 2.
const Matrix2c& pauli(int axis);

/// n . sigma for a unit 3-vector n. Hermitian, traceless, eigenvalues +-1.
/// Throws NormalizationError unless |n| = 1 within kUnitAxisTol.
Matrix2c pauli_along(const Eigen::Vector3d& n);

/// Bloch vector of a unit-trace 2x2 matrix (component i = trace(rho sigma_i)).
/// Throws TraceError for non-unit trace, ValidationError if a component has a
/// non-negligible imaginary part.
BlochVector bloch_of(const Matrix2c& rho);

/// (I + b . sigma) / 2, the inverse of bloch_of for unit-trace matrices.
Matrix2c matrix_of(const BlochVector& b);

/// trace(m sigma_i) without any trace requirement; real parts only.
/// Used for unnormalized conditional states.
Eigen::Vector3d bloch_unnormalized(const Matrix2c& m);

// --- Two-qubit structure --------------------------------------------------

/// Kronecker product with Alice as the left factor.
Matrix4c kron(const Matrix2c& a, const Matrix2c& b);

/// Trace out one side; returns the other side's 2x2 operator.
Matrix2c partial_trace(const Matrix4c& rho, Side traced_out);

/// Exchange the two tensor factors.
Matrix4c swap_sides(const Matrix4c& rho);

// --- Eigenvalues ----------------------------------------------------------

/// Eigenvalues of a 2x2 Hermitian matrix in closed form, ascending.
std::array<double, 2> hermitian_eigenvalues(const Matrix2c& m);

/// Eigenvalues of a 4x4 Hermitian matrix, ascending.
Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m);

// --- Density-operator validation ------------------------------------------

struct ValidationReport {
  double hermiticity_error = 0.0;  // max entrywise |M - M^dagger|
  double trace_error = 0.0;        // |trace - 1|
  double min_eigenvalue = 0.0;
  bool hermitian = false;
  bool unit_trace = false;
  bool positive = false;

  bool ok() const { return hermitian && unit_trace && positive; }
  std::string describe() const;
};

ValidationReport validate_density(const Matrix2c& m, double psd_tol = kPsdTol);
ValidationReport validate_density(const Matrix4c& m, double psd_tol = kPsdTol);

// --- Validated state wrappers ----------------------------------------------

/// A 2x2 density operator: Hermitian, unit trace, PSD within tolerance.
class QubitState {
 public:
  explicit QubitState(Matrix2c m);  // throws ValidationError
  const Matrix2c& matrix() const { return m_; }
  BlochVector bloch() const { return bloch_of(m_); }

 private:
  Matrix2c m_;
};

/// A 4x4 density operator with Alice as the first tensor factor.
class TwoQubitState {
 public:
  explicit TwoQubitState(Matrix4c m);  // throws ValidationError
  const Matrix4c& matrix() const { return m_; }

 private:
  Matrix4c m_;
};

/// Typed partial trace: side names the factor that is traced out.
QubitState partial_trace(const TwoQubitState& rho, Side traced_out);

}  // namespace steerkit
