#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewphoton/fock.hpp"
#include "fewphoton/lattice.hpp"
#include "fewphoton/types.hpp"

namespace fewphoton {

enum class ChannelRole { Port, Decay };

enum class CouplingMode {
  Local,                // one point per channel, positions gauged away
  QuasiLocalPositions,  // points carry positions x, phases (omega_ref + delta) * x
  QuasiLocalPhases,     // points carry a fixed phase and an ordering index
};

std::string_view to_string(CouplingMode mode) noexcept;

struct Channel {
  std::string id;
  ChannelRole role = ChannelRole::Port;
};

/// One coupling term between channel `channel` and graph site `site`.
///
/// `gamma` is the rate pi |g|^2; the amplitude is g = sqrt(gamma / pi) *
/// exp(i g_phase). `x` is used by QuasiLocalPositions, `phi` and `order` by
/// QuasiLocalPhases.
struct CouplingPoint {
  std::size_t channel = 0;
  std::size_t site = 0;
  double gamma = 0.0;
  double g_phase = 0.0;
  std::optional<double> x{};
  std::optional<double> phi{};
  int order = 0;

  Complex amplitude() const;
};

class ChannelSet {
 public:
  ChannelSet(std::vector<Channel> channels, std::vector<CouplingPoint> points,
             CouplingMode mode = CouplingMode::Local, double omega_ref = 0.0);

  std::span<const Channel> channels() const noexcept { return channels_; }
  std::span<const CouplingPoint> points() const noexcept { return points_; }
  CouplingMode mode() const noexcept { return mode_; }
  double omega_ref() const noexcept { return omega_ref_; }

  std::size_t num_channels() const noexcept { return channels_.size(); }
  /// Channel indices with role Port, in declaration order.
  std::vector<std::size_t> ports() const;
  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t require(std::string_view id) const;

  /// Throws IndexOutOfRange if a coupling point refers to a missing site.
  void check_sites(std::size_t num_sites) const;

  /// Propagation phase omega0 * x_n (positions), phi_n (phases) or 0 (local).
  double phase(const CouplingPoint& p, double omega0) const;

  /// Step function on the ordering of two points on the same channel, with
  /// the tie value 1/2.
  double step(const CouplingPoint& n, const CouplingPoint& m) const;

 private:
  std::vector<Channel> channels_;
  std::vector<CouplingPoint> points_;
  CouplingMode mode_;
  double omega_ref_;
};

/// Convenience builder: one local port per (site, gamma) entry, ids "p0", "p1", ...
ChannelSet local_ports(std::span<const std::pair<std::size_t, double>> ports,
                       std::span<const std::pair<std::size_t, double>> decay = {});

/// Site-space coefficient matrix C with Sigma = sum_ab C_ab b†_a b_b.
Matrix self_energy_coefficients(const ChannelSet& channels, std::size_t num_sites,
                                double omega0);

SectorMatrix self_energy(const ChannelSet& channels, const SectorBasis& basis, double omega0);
inline SectorMatrix self_energy(const ChannelSet& channels, const SectorBasis& basis) {
  return self_energy(channels, basis, channels.omega_ref());
}

/// Collective annihilator b~_sigma = sum_n conj(g_n) exp(-i phase_n) b_{j_n},
/// the adjoint of the emission vertex b~†_sigma; maps `from` (M) to `to` (M-1).
SectorMatrix collective_operator(const ChannelSet& channels, std::size_t channel,
                                 const SectorBasis& from, const SectorBasis& to, double omega0);
inline SectorMatrix collective_operator(const ChannelSet& channels, std::size_t channel,
                                        const SectorBasis& from, const SectorBasis& to) {
  return collective_operator(channels, channel, from, to, channels.omega_ref());
}

SectorMatrix effective_hamiltonian(const Graph& graph, const ChannelSet& channels, int photons,
                                   double omega0);
inline SectorMatrix effective_hamiltonian(const Graph& graph, const ChannelSet& channels,
                                          int photons) {
  return effective_hamiltonian(graph, channels, photons, channels.omega_ref());
}

inline constexpr double kMarkovThreshold = 0.1;

struct MarkovReport {
  double worst_D = 0.0;          // max pi |g_n g_m| |x_n - x_m|
  double worst_lambda_dx = 0.0;  // max |lambda - M omega0| |x_n - x_m|
  bool evaluated = false;        // false when no separations are defined
  bool pass = true;
};

MarkovReport markov_check(const Graph& graph, const ChannelSet& channels,
                          double threshold = kMarkovThreshold);

/// Same report from precomputed sector eigenvalues (index = photon number).
MarkovReport markov_check(const ChannelSet& channels, std::span<const Vector> eigenvalues,
                          double threshold = kMarkovThreshold);

}  // namespace fewphoton
