#include "fewphoton/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fewphoton {

std::string_view to_string(CouplingMode mode) noexcept {
  switch (mode) {
    case CouplingMode::Local: return "local";
    case CouplingMode::QuasiLocalPositions: return "quasilocal-positions";
    case CouplingMode::QuasiLocalPhases: return "quasilocal-phases";
  }
  return "unknown";
}

Complex CouplingPoint::amplitude() const { return std::polar(std::sqrt(gamma / kPi), g_phase); }

ChannelSet::ChannelSet(std::vector<Channel> channels, std::vector<CouplingPoint> points,
                       CouplingMode mode, double omega_ref)
    : channels_(std::move(channels)), points_(std::move(points)), mode_(mode),
      omega_ref_(omega_ref) {
  if (!std::isfinite(omega_ref_)) throw Error(ErrorKind::NonFiniteParameter, "omega_ref");

  for (std::size_t a = 0; a < channels_.size(); ++a) {
    for (std::size_t b = a + 1; b < channels_.size(); ++b) {
      if (channels_[a].id == channels_[b].id) {
        throw Error(ErrorKind::InvalidParameter, "duplicate channel id '" + channels_[a].id + "'");
      }
    }
  }

  std::vector<int> count(channels_.size(), 0);
  for (const auto& p : points_) {
    if (p.channel >= channels_.size()) {
      throw Error(ErrorKind::UnknownChannel, "coupling point on channel " + std::to_string(p.channel));
    }
    if (!std::isfinite(p.gamma) || !std::isfinite(p.g_phase) ||
        (p.x && !std::isfinite(*p.x)) || (p.phi && !std::isfinite(*p.phi))) {
      throw Error(ErrorKind::NonFiniteParameter,
                  "coupling point on channel '" + channels_[p.channel].id + "'");
    }
    if (p.gamma < 0.0) {
      throw Error(ErrorKind::InvalidParameter,
                  "negative rate on channel '" + channels_[p.channel].id + "'");
    }
    ++count[p.channel];

    switch (mode_) {
      case CouplingMode::Local:
        if (p.x || p.phi) {
          throw Error(ErrorKind::ModeMismatch, "local coupling points carry no position or phase");
        }
        break;
      case CouplingMode::QuasiLocalPositions:
        if (p.phi) throw Error(ErrorKind::ModeMismatch, "phase given in quasilocal-positions mode");
        if (!p.x) {
          throw Error(ErrorKind::MissingPositions,
                      "channel '" + channels_[p.channel].id + "' has a point without x");
        }
        break;
      case CouplingMode::QuasiLocalPhases:
        if (p.x) throw Error(ErrorKind::ModeMismatch, "position given in quasilocal-phases mode");
        if (!p.phi) {
          throw Error(ErrorKind::MissingPositions,
                      "channel '" + channels_[p.channel].id + "' has a point without phi");
        }
        break;
    }
  }

  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const bool single = mode_ == CouplingMode::Local || channels_[c].role == ChannelRole::Decay;
    if (single && count[c] != 1) {
      throw Error(ErrorKind::ModeMismatch, "channel '" + channels_[c].id + "' needs exactly one "
                                               "coupling point, has " + std::to_string(count[c]));
    }
    if (count[c] == 0) {
      throw Error(ErrorKind::ModeMismatch, "channel '" + channels_[c].id + "' has no coupling point");
    }
  }
}

std::vector<std::size_t> ChannelSet::ports() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c].role == ChannelRole::Port) out.push_back(c);
  }
  return out;
}

std::optional<std::size_t> ChannelSet::find(std::string_view id) const {
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c].id == id) return c;
  }
  return std::nullopt;
}

std::size_t ChannelSet::require(std::string_view id) const {
  if (auto c = find(id)) return *c;
  throw Error(ErrorKind::UnknownChannel, "'" + std::string(id) + "'");
}

void ChannelSet::check_sites(std::size_t num_sites) const {
  for (const auto& p : points_) {
    if (p.site >= num_sites) {
      throw Error(ErrorKind::IndexOutOfRange, "channel '" + channels_[p.channel].id +
                                                  "' couples to site " + std::to_string(p.site));
    }
  }
}

double ChannelSet::phase(const CouplingPoint& p, double omega0) const {
  switch (mode_) {
    case CouplingMode::Local: return 0.0;
    case CouplingMode::QuasiLocalPositions: return omega0 * *p.x;
    case CouplingMode::QuasiLocalPhases: return *p.phi;
  }
  return 0.0;
}

double ChannelSet::step(const CouplingPoint& n, const CouplingPoint& m) const {
  double diff = 0.0;
  switch (mode_) {
    case CouplingMode::Local: diff = 0.0; break;
    case CouplingMode::QuasiLocalPositions: diff = *n.x - *m.x; break;
    case CouplingMode::QuasiLocalPhases: diff = static_cast<double>(n.order - m.order); break;
  }
  if (diff > 0.0) return 1.0;
  if (diff < 0.0) return 0.0;
  return 0.5;
}

ChannelSet local_ports(std::span<const std::pair<std::size_t, double>> ports,
                       std::span<const std::pair<std::size_t, double>> decay) {
  std::vector<Channel> channels;
  std::vector<CouplingPoint> points;
  for (const auto& [site, gamma] : ports) {
    points.push_back({.channel = channels.size(), .site = site, .gamma = gamma});
    channels.push_back({"p" + std::to_string(channels.size()), ChannelRole::Port});
  }
  for (std::size_t k = 0; k < decay.size(); ++k) {
    points.push_back({.channel = channels.size(), .site = decay[k].first, .gamma = decay[k].second});
    channels.push_back({"decay" + std::to_string(k), ChannelRole::Decay});
  }
  return ChannelSet(std::move(channels), std::move(points), CouplingMode::Local, 0.0);
}

Matrix self_energy_coefficients(const ChannelSet& channels, std::size_t num_sites, double omega0) {
  channels.check_sites(num_sites);
  const auto ns = static_cast<Eigen::Index>(num_sites);
  Matrix c = Matrix::Zero(ns, ns);
  const auto points = channels.points();
  for (const auto& n : points) {
    for (const auto& m : points) {
      if (n.channel != m.channel) continue;
      const double theta = channels.step(n, m);
      if (theta == 0.0) continue;
      // -2 i pi g_n g_m* Theta(x_n - x_m) e^{i(phase_n - phase_m)}, Theta(0) = 1/2
      const Complex prefactor{0.0, -2.0 * kPi * theta};
      const double dphase = channels.phase(n, omega0) - channels.phase(m, omega0);
      const Complex term = prefactor * n.amplitude() * std::conj(m.amplitude());
      c(n.site, m.site) += dphase == 0.0 ? term : term * std::polar(1.0, dphase);
    }
  }
  return c;
}

SectorMatrix self_energy(const ChannelSet& channels, const SectorBasis& basis, double omega0) {
  return one_body_operator(basis, self_energy_coefficients(channels, basis.num_sites(), omega0));
}

SectorMatrix collective_operator(const ChannelSet& channels, std::size_t channel,
                                 const SectorBasis& from, const SectorBasis& to, double omega0) {
  if (channel >= channels.num_channels()) {
    throw Error(ErrorKind::UnknownChannel, "channel index " + std::to_string(channel));
  }
  channels.check_sites(from.num_sites());
  SectorMatrix out{from.photons(), to.photons(),
                   Matrix::Zero(static_cast<Eigen::Index>(to.dim()),
                                static_cast<Eigen::Index>(from.dim()))};
  for (const auto& p : channels.points()) {
    if (p.channel != channel) continue;
    const Complex weight = std::conj(p.amplitude() * std::polar(1.0, channels.phase(p, omega0)));
    out.data += weight * annihilation_block(p.site, from, to).data;
  }
  return out;
}

SectorMatrix effective_hamiltonian(const Graph& graph, const ChannelSet& channels, int photons,
                                   double omega0) {
  const SectorBasis basis(graph.num_sites(), photons);
  auto h = hamiltonian_sector(graph, basis);
  h.data += self_energy(channels, basis, omega0).data;
  return h;
}

namespace {

// Largest |x_n - x_m| over same-channel pairs, and the worst D_nm.
struct Separations {
  double max_dx = 0.0;
  double worst_D = 0.0;
  bool defined = false;
};

Separations separations(const ChannelSet& channels) {
  Separations out;
  if (channels.mode() == CouplingMode::Local) return out;
  if (channels.mode() == CouplingMode::QuasiLocalPhases && channels.omega_ref() == 0.0) return out;

  const auto points = channels.points();
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      if (points[a].channel != points[b].channel) continue;
      double dx = 0.0;
      if (channels.mode() == CouplingMode::QuasiLocalPositions) {
        dx = std::abs(*points[a].x - *points[b].x);
      } else {
        dx = std::abs(*points[a].phi - *points[b].phi) / std::abs(channels.omega_ref());
      }
      out.max_dx = std::max(out.max_dx, dx);
      out.worst_D = std::max(out.worst_D, std::sqrt(points[a].gamma * points[b].gamma) * dx);
    }
  }
  out.defined = true;
  return out;
}

}  // namespace

MarkovReport markov_check(const ChannelSet& channels, std::span<const Vector> eigenvalues,
                          double threshold) {
  MarkovReport report;
  const auto sep = separations(channels);
  if (!sep.defined) return report;
  report.evaluated = true;
  report.worst_D = sep.worst_D;
  for (std::size_t m = 1; m < eigenvalues.size(); ++m) {
    const double carrier = static_cast<double>(m) * channels.omega_ref();
    for (Eigen::Index l = 0; l < eigenvalues[m].size(); ++l) {
      report.worst_lambda_dx =
          std::max(report.worst_lambda_dx, std::abs(eigenvalues[m](l) - carrier) * sep.max_dx);
    }
  }
  report.pass = report.worst_D < threshold && report.worst_lambda_dx < threshold;
  return report;
}

MarkovReport markov_check(const Graph& graph, const ChannelSet& channels, double threshold) {
  if (!separations(channels).defined) return MarkovReport{};
  std::vector<Vector> eigenvalues(kMaxPhotons + 1);
  eigenvalues[0] = Vector::Zero(1);
  for (int m = 1; m <= kMaxPhotons; ++m) {
    const auto h = effective_hamiltonian(graph, channels, m);
    Eigen::ComplexEigenSolver<Matrix> solver(h.data, false);
    eigenvalues[m] = solver.eigenvalues();
  }
  return markov_check(channels, eigenvalues, threshold);
}

}  // namespace fewphoton
