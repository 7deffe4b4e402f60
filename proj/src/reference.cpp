#include "fewphoton/reference.hpp"

#include <algorithm>
#include <cmath>

#include "fewphoton/fock.hpp"

namespace fewphoton::reference {

namespace {

Complex checked(Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw Error(ErrorKind::PoleHit, "closed form evaluated on a pole");
  }
  return value;
}

}  // namespace

double kerr_g1_closed(double delta, double gamma, double flux) {
  return flux * 4.0 * gamma * gamma / (delta * delta + 4.0 * gamma * gamma);
}

double kerr_g2_closed(double delta, double U, double gamma, double tau) {
  const Complex z{delta, 2.0 * gamma};
  return std::norm(1.0 - std::exp(kI * z * tau) * (1.0 - z / (z - 0.5 * U)));
}

Complex kerr_a1_closed(double delta, double gamma, double tau) {
  const Complex z{delta, 2.0 * gamma};
  return checked(-2.0 * kI * gamma * std::exp(kI * z * tau) / z);
}

Complex kerr_a2_closed(double delta, double U, double gamma, double tau) {
  const Complex z{delta, 2.0 * gamma};
  return checked(-4.0 * gamma * gamma * std::exp(kI * z * tau) / ((z - 0.5 * U) * z));
}

Complex dimer_a1_closed(double delta, double t, double Gamma) {
  const Complex z{delta, Gamma};
  return checked(-2.0 * kI * Gamma * t / (z * z - t * t));
}

Complex dimer_a2_closed(double delta, double U, double t, double Gamma) {
  const Complex z{delta, Gamma};
  const Complex num = 2.0 * t * t * (4.0 * z - U);
  const Complex den = (2.0 * z - U) * (4.0 * z * z - 2.0 * z * U - 4.0 * t * t) * (z * z - t * t);
  return checked(-4.0 * Gamma * Gamma * num / den);
}

Complex dimer_pathway_bracket(double delta, double U, double Gamma) {
  const Complex z{delta, Gamma};
  return checked(2.0 * z / (2.0 * z - U) + 1.0);
}

std::array<double, 3> dimer_two_photon_energies(double epsilon, double U, double t) {
  const double root = std::sqrt(U * U / (16.0 * t * t) + 1.0);
  const double alpha_plus = (U / (4.0 * t) + root) / std::sqrt(2.0);
  const double alpha_minus = (U / (4.0 * t) - root) / std::sqrt(2.0);
  return {2.0 * epsilon + U, 2.0 * epsilon + 2.0 * std::sqrt(2.0) * t * alpha_plus,
          2.0 * epsilon + 2.0 * std::sqrt(2.0) * t * alpha_minus};
}

std::vector<double> chain_spectrum_closed(std::size_t num_sites, double epsilon, double t) {
  if (num_sites == 0) throw Error(ErrorKind::InvalidSize, "chain needs at least one site");
  std::vector<double> out;
  out.reserve(num_sites);
  const double n = static_cast<double>(num_sites);
  for (std::size_t k = 1; k <= num_sites; ++k) {
    out.push_back(epsilon + 2.0 * t * std::cos(static_cast<double>(k) * kPi / (n + 1.0)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector doublon_splinter(std::size_t num_sites) {
  if (num_sites == 0) throw Error(ErrorKind::InvalidSize, "chain needs at least one site");
  const SectorBasis basis(num_sites, 2);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  // (b†_i)^2 |0> = sqrt(2) |2_i>, overall 1/sqrt(2N)
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(num_sites));
  for (std::size_t i = 0; i < num_sites; ++i) {
    Occupation n(num_sites, 0);
    n[i] = 2;
    v(static_cast<Eigen::Index>(*basis.index(n))) = (i % 2 == 0) ? amplitude : -amplitude;
  }
  return v;
}

}  // namespace fewphoton::reference
