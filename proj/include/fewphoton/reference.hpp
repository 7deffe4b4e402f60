#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fewphoton/types.hpp"

namespace fewphoton::reference {

// Closed forms for a single Kerr site with two local ports of rate gamma
// each, detuning delta = omega0 - epsilon. Amplitudes use the library's
// (-2 pi i)^n normalisation.
double kerr_g1_closed(double delta, double gamma, double flux = 1.0);
double kerr_g2_closed(double delta, double U, double gamma, double tau);
Complex kerr_a1_closed(double delta, double gamma, double tau);
Complex kerr_a2_closed(double delta, double U, double gamma, double tau);

// Parallel dimer: two sites (epsilon, U), hopping t, port 1 on site 0 and
// port 2 on site 1, rate Gamma each; delta = omega0 - epsilon, tau = 0.
Complex dimer_a1_closed(double delta, double t, double Gamma);
Complex dimer_a2_closed(double delta, double U, double t, double Gamma);
/// 2(delta + i Gamma)/(2(delta + i Gamma) - U) + 1
Complex dimer_pathway_bracket(double delta, double U, double Gamma);
/// {E0, E+, E-} of the isolated dimer's two-photon sector.
std::array<double, 3> dimer_two_photon_energies(double epsilon, double U, double t);

/// epsilon + 2t cos(k pi / (N + 1)), k = 1..N, ascending.
std::vector<double> chain_spectrum_closed(std::size_t num_sites, double epsilon, double t);

/// Alternating doublon state of a uniform chain in the M = 2 Fock basis,
/// unit norm, eigenvector of the isolated chain with eigenvalue 2 epsilon + U.
Vector doublon_splinter(std::size_t num_sites);

}  // namespace fewphoton::reference
