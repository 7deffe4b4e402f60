#include "fewphoton/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <complex>
#include <mutex>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

extern "C" {
void openblas_set_num_threads(int threads);
void zgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const std::complex<double>* alpha, const std::complex<double>* a, const int* lda,
            const std::complex<double>* b, const int* ldb, const std::complex<double>* beta,
            std::complex<double>* c, const int* ldc, std::size_t transa_len,
            std::size_t transb_len);
}

namespace fewphoton {

namespace {

void check_square(const Matrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::SectorMismatch, "matrix is not square");
}

// BLAS runs single-threaded so results do not depend on the machine.
void init_blas() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  if (c.size() == 0) return c;
  if (a.cols() == 0) return Matrix::Zero(a.rows(), b.cols());
  const int m = int(a.rows()), n = int(b.cols()), k = int(a.cols());
  const Complex one{1.0, 0.0}, zero{0.0, 0.0};
  zgemm_("N", "N", &m, &n, &k, &one, a.data(), &m, b.data(), &k, &zero, c.data(), &m, 1, 1);
  return c;
}

// (E - H)^{-1} rhs through LAPACK LU; rcond is the 1-norm estimate.
Matrix lu_solve(const Matrix& h, Complex energy, Matrix rhs) {
  init_blas();
  const int n = int(h.rows());
  if (n == 0) return rhs;
  Matrix lu = -h;
  lu.diagonal().array() += energy;
  std::vector<lapack_int> pivots(n);
  const double anorm = lu.cwiseAbs().colwise().sum().maxCoeff();
  int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, pivots.data());
  double rcond = 0.0;
  if (info == 0) LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
  if (info != 0 || !(rcond > 1e-15)) throw Error(ErrorKind::Singular, "E - H is singular");
  info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, int(rhs.cols()), lu.data(), n, pivots.data(),
                        rhs.data(), n);
  if (info != 0) throw Error(ErrorKind::Singular, "E - H is singular");
  return rhs;
}

constexpr double kDarkGap = 1e-8;
constexpr double kDarkWeight = 1e-12;

void pole_hit(Complex energy, Complex lambda) {
  std::ostringstream msg;
  msg << "energy " << energy << " on eigenvalue " << lambda;
  throw Error(ErrorKind::PoleHit, msg.str());
}

void check_pole(const Eigensystem& eig, Complex energy) {
  for (Eigen::Index l = 0; l < eig.dim(); ++l) {
    if (std::abs(energy - eig.lambdas(l)) <= kPoleDistance) pole_hit(energy, eig.lambdas(l));
  }
}

void check_tau(double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeDelay, "tau = " + std::to_string(tau));
}

}  // namespace

Eigensystem biorth_eig(const SectorMatrix& h) { return biorth_eig(h.data, h.to); }

Eigensystem biorth_eig(const Matrix& h, int photons) {
  check_square(h);
  Eigensystem eig;
  eig.photons = photons;
  if (h.rows() == 0) return eig;

  init_blas();
  const int n = int(h.rows());
  Matrix work = h;
  eig.lambdas.resize(n);
  eig.right.resize(n, n);
  int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, eig.lambdas.data(),
                           nullptr, n, eig.right.data(), n);
  if (info != 0) {
    throw Error(ErrorKind::DefectiveMatrix, "eigensolver failed, info " + std::to_string(info));
  }
  eig.right.colwise().normalize();

  // Left eigenvectors as rows of the inverse of the right basis; this keeps
  // degenerate but diagonalizable eigenspaces bi-orthonormal.
  Matrix lu = eig.right;
  std::vector<lapack_int> pivots(n);
  const double anorm = lu.cwiseAbs().colwise().sum().maxCoeff();
  info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, pivots.data());
  double rcond = 0.0;
  if (info == 0) LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
  if (info != 0 || !(rcond > 1.0 / kDefectiveCondition)) {
    throw Error(ErrorKind::DefectiveMatrix, "eigenvector basis is numerically singular");
  }
  info = LAPACKE_zgetri(LAPACK_COL_MAJOR, n, lu.data(), n, pivots.data());
  if (info != 0) throw Error(ErrorKind::DefectiveMatrix, "eigenvector basis is singular");
  eig.left = std::move(lu);

  eig.condition = 1.0;
  for (Eigen::Index l = 0; l < eig.dim(); ++l) {
    eig.condition = std::max(eig.condition, eig.left.row(l).norm());
  }
  if (eig.condition > kDefectiveCondition) {
    throw Error(ErrorKind::DefectiveMatrix, "eigenvalue condition " + std::to_string(eig.condition));
  }

  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const Matrix reconstructed = multiply(eig.right * eig.lambdas.asDiagonal(), eig.left);
  const double recon = (reconstructed - h).cwiseAbs().maxCoeff() / scale;
  const double biorth = biorth_residual(eig);
  if (!(biorth <= kBiorthTolerance) || !(recon <= kBiorthTolerance * 100.0)) {
    std::ostringstream msg;
    msg << "bi-orthonormality residual " << biorth << ", reconstruction residual " << recon;
    throw Error(ErrorKind::DefectiveMatrix, msg.str());
  }
  return eig;
}

double biorth_residual(const Eigensystem& eig) {
  if (eig.dim() == 0) return 0.0;
  const Matrix overlap = multiply(eig.left, eig.right);
  return (overlap - Matrix::Identity(eig.dim(), eig.dim())).cwiseAbs().maxCoeff();
}

double completeness_residual(const Eigensystem& eig) {
  if (eig.dim() == 0) return 0.0;
  const Matrix sum = multiply(eig.right, eig.left);
  return (sum - Matrix::Identity(eig.dim(), eig.dim())).cwiseAbs().maxCoeff();
}

SectorMatrix greens_resolvent(const Eigensystem& eig, Complex energy) {
  check_pole(eig, energy);
  const Vector weights = (energy - eig.lambdas.array()).inverse().matrix();
  return {eig.photons, eig.photons, eig.right * weights.asDiagonal() * eig.left};
}

SectorMatrix propagator(const Eigensystem& eig, double tau, double omega0) {
  check_tau(tau);
  const Vector phases = (kI * (omega0 - eig.lambdas.array()) * tau).exp().matrix();
  return {eig.photons, eig.photons, eig.right * phases.asDiagonal() * eig.left};
}

SectorMatrix direct_resolvent(const SectorMatrix& h, Complex energy) {
  check_square(h.data);
  const auto d = h.data.rows();
  return {h.from, h.to, lu_solve(h.data, energy, Matrix::Identity(d, d))};
}

SectorMatrix direct_propagator(const SectorMatrix& h, double tau, double omega0) {
  check_square(h.data);
  check_tau(tau);
  const auto d = h.data.rows();
  const Matrix generator = kI * tau * (omega0 * Matrix::Identity(d, d) - h.data);
  return {h.from, h.to, generator.exp()};
}

Vector divide_by_gaps(const Vector& coords, const Vector& lambdas, Complex energy) {
  const double dark = kDarkWeight * std::max(1.0, coords.norm());
  Vector out(coords.size());
  for (Eigen::Index l = 0; l < coords.size(); ++l) {
    const Complex gap = energy - lambdas(l);
    const double distance = std::abs(gap);
    if (distance <= kDarkGap && std::abs(coords(l)) <= dark) {
      out(l) = 0.0;
    } else if (distance <= kPoleDistance) {
      pole_hit(energy, lambdas(l));
    } else {
      out(l) = coords(l) / gap;
    }
  }
  return out;
}

Vector apply_resolvent(const Eigensystem& eig, Complex energy, const Vector& v) {
  return eig.right * divide_by_gaps(eig.left * v, eig.lambdas, energy);
}

Vector apply_propagator(const Eigensystem& eig, double tau, double omega0, const Vector& v) {
  check_tau(tau);
  Vector coords = eig.left * v;
  coords.array() *= (kI * (omega0 - eig.lambdas.array()) * tau).exp();
  return eig.right * coords;
}

Matrix solve_resolvent(const Matrix& h, Complex energy, const Matrix& rhs) {
  check_square(h);
  if (rhs.rows() != h.rows()) throw Error(ErrorKind::SectorMismatch, "right-hand side size");
  return lu_solve(h, energy, rhs);
}

}  // namespace fewphoton
