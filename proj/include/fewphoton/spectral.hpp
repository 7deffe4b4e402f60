#pragma once

#include "fewphoton/fock.hpp"
#include "fewphoton/types.hpp"

namespace fewphoton {

inline constexpr double kDefectiveCondition = 1e8;
inline constexpr double kBiorthTolerance = 1e-10;
inline constexpr double kPoleDistance = 1e-13;

/// Bi-orthogonal spectral data of a non-Hermitian sector Hamiltonian:
/// H = sum_l lambda_l |l><bar l|, with <bar l|l'> = delta_ll'.
///
/// Columns of `right` are the right eigenvectors (unit norm), rows of `left`
/// the matching left eigenvectors. `condition` is the largest eigenvalue
/// condition number max_l |<bar l|| * ||l>|.
struct Eigensystem {
  int photons = 0;
  Vector lambdas;
  Matrix right;
  Matrix left;
  double condition = 1.0;

  Eigen::Index dim() const noexcept { return lambdas.size(); }
  /// P_l = |l><bar l|
  Matrix projector(Eigen::Index l) const { return right.col(l) * left.row(l); }
};

/// Throws DefectiveMatrix when the eigenvector basis is too ill conditioned
/// (condition > 1e8) or fails the bi-orthonormality/reconstruction checks.
Eigensystem biorth_eig(const SectorMatrix& h);
Eigensystem biorth_eig(const Matrix& h, int photons);

/// max |<bar l|l'> - delta_ll'|
double biorth_residual(const Eigensystem& eig);
/// max |sum_l P_l - 1|
double completeness_residual(const Eigensystem& eig);

/// G(E) = sum_l P_l / (E - lambda_l); throws PoleHit within 1e-13 of a pole.
SectorMatrix greens_resolvent(const Eigensystem& eig, Complex energy);

/// exp(i (omega0 - H) tau) = sum_l exp(i (omega0 - lambda_l) tau) P_l.
SectorMatrix propagator(const Eigensystem& eig, double tau, double omega0);

/// (E - H)^{-1} by dense LU. Throws Singular.
SectorMatrix direct_resolvent(const SectorMatrix& h, Complex energy);

/// exp(i (omega0 - H) tau) by scaling and squaring.
SectorMatrix direct_propagator(const SectorMatrix& h, double tau, double omega0);

/// coords_l / (E - lambda_l). A component that sits on its pole is dropped
/// when its coordinate vanishes (a dark state), otherwise PoleHit.
Vector divide_by_gaps(const Vector& coords, const Vector& lambdas, Complex energy);

// Vector forms used by the observables; O(d^2) per call.
Vector apply_resolvent(const Eigensystem& eig, Complex energy, const Vector& v);
Vector apply_propagator(const Eigensystem& eig, double tau, double omega0, const Vector& v);
Matrix solve_resolvent(const Matrix& h, Complex energy, const Matrix& rhs);

}  // namespace fewphoton
