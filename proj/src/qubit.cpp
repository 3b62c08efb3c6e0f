#include "steerkit/qubit.hpp"

#include <cmath>
#include <cstdio>
#include <complex>

namespace steerkit {

using std::complex;
namespace {
const complex<double> kI(0.0, 1.0);
}

const Matrix2c& pauli(int axis) {
  static const Matrix2c sx = (Matrix2c() << 0, 1, 1, 0).finished();
  static const Matrix2c sy = (Matrix2c() << 0, -kI, kI, 0).finished();
  static const Matrix2c sz = (Matrix2c() << 1, 0, 0, -1).finished();
  switch (axis) {
    case 0: return sx;
    case 1: return sy;
    default: return sz;
  }
}

Matrix2c pauli_along(const Eigen::Vector3d& n) {
  if (std::abs(n.norm() - 1.0) > kUnitAxisTol) {
    throw NormalizationError("measurement axis is not unit length: |n| = " +
                             std::to_string(n.norm()));
  }
  Matrix2c m;
  m << n.z(), complex<double>(n.x(), -n.y()),
       complex<double>(n.x(), n.y()), -n.z();
  return m;
}

BlochVector bloch_of(const Matrix2c& rho) {
  const complex<double> tr = rho.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw TraceError("bloch_of requires unit trace, got " +
                     std::to_string(tr.real()));
  }
  BlochVector b;
  for (int i = 0; i < 3; ++i) {
    const complex<double> c = (rho * pauli(i)).trace();
    if (std::abs(c.imag()) > 1e-9) {
      throw ValidationError("Bloch component has imaginary part " +
                            std::to_string(c.imag()) + "; matrix is not Hermitian");
    }
    b[i] = c.real();
  }
  return b;
}

Matrix2c matrix_of(const BlochVector& b) {
  Matrix2c m = Matrix2c::Identity();
  for (int i = 0; i < 3; ++i) m += b[i] * pauli(i);
  return 0.5 * m;
}

Eigen::Vector3d bloch_unnormalized(const Matrix2c& m) {
  Eigen::Vector3d w;
  for (int i = 0; i < 3; ++i) w[i] = (m * pauli(i)).trace().real();
  return w;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Matrix2c partial_trace(const Matrix4c& rho, Side traced_out) {
  Matrix2c out = Matrix2c::Zero();
  if (traced_out == Side::Alice) {
    for (int a = 0; a < 2; ++a) out += rho.block<2, 2>(2 * a, 2 * a);
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b) out(i, j) += rho(2 * i + b, 2 * j + b);
  }
  return out;
}

Matrix4c swap_sides(const Matrix4c& rho) {
  Matrix4c out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          out(2 * b + a, 2 * d + c) = rho(2 * a + b, 2 * c + d);
  return out;
}

std::array<double, 2> hermitian_eigenvalues(const Matrix2c& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(1, 0)));
  return {mean - disc, mean + disc};
}

Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::string ValidationReport::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "hermiticity_error=%.3e trace_error=%.3e min_eigenvalue=%.3e",
                hermiticity_error, trace_error, min_eigenvalue);
  std::string s = buf;
  if (!hermitian) s += " [not Hermitian]";
  if (!unit_trace) s += " [trace != 1]";
  if (!positive) s += " [not PSD]";
  return s;
}

namespace {

template <typename M>
ValidationReport validate_impl(const M& m, double psd_tol) {
  ValidationReport r;
  r.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.hermitian = r.hermiticity_error <= kHermitianTol;
  r.trace_error = std::abs(m.trace() - std::complex<double>(1.0));
  r.unit_trace = r.trace_error <= kTraceTol;
  const M h = 0.5 * (m + m.adjoint().eval());
  if constexpr (M::RowsAtCompileTime == 2) {
    r.min_eigenvalue = hermitian_eigenvalues(Matrix2c(h))[0];
  } else {
    r.min_eigenvalue = hermitian_eigenvalues(Matrix4c(h)).minCoeff();
  }
  r.positive = r.min_eigenvalue >= -psd_tol;
  return r;
}

}  // namespace

ValidationReport validate_density(const Matrix2c& m, double psd_tol) {
  return validate_impl(m, psd_tol);
}

ValidationReport validate_density(const Matrix4c& m, double psd_tol) {
  return validate_impl(m, psd_tol);
}

QubitState::QubitState(Matrix2c m) : m_(std::move(m)) {
  const ValidationReport r = validate_density(m_);
  if (!r.ok()) throw ValidationError("invalid qubit state: " + r.describe());
}

TwoQubitState::TwoQubitState(Matrix4c m) : m_(std::move(m)) {
  const ValidationReport r = validate_density(m_);
  if (!r.ok()) throw ValidationError("invalid two-qubit state: " + r.describe());
}

QubitState partial_trace(const TwoQubitState& rho, Side traced_out) {
  return QubitState(partial_trace(rho.matrix(), traced_out));
}

}  // namespace steerkit
