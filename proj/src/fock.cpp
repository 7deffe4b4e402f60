#include "fewphoton/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace fewphoton {

namespace {

constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

void enumerate(std::size_t site, int remaining, Occupation& current,
               std::vector<Occupation>& out) {
  if (site + 1 == current.size()) {
    current[site] = remaining;
    out.push_back(current);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[site] = n;
    enumerate(site + 1, remaining - n, current, out);
  }
  current[site] = 0;
}

void check_pair(const SectorBasis& from, const SectorBasis& to, int shift) {
  if (from.num_sites() != to.num_sites()) {
    throw Error(ErrorKind::SectorMismatch, "bases on different site counts");
  }
  if (to.photons() != from.photons() + shift) {
    throw Error(ErrorKind::SectorMismatch,
                "sector " + std::to_string(from.photons()) + " -> " + std::to_string(to.photons()));
  }
}

}  // namespace

SectorBasis::SectorBasis(std::size_t num_sites, int photons)
    : num_sites_(num_sites), photons_(photons) {
  if (photons < 0 || photons > kMaxPhotons) {
    throw Error(ErrorKind::UnsupportedPhotonNumber, "M = " + std::to_string(photons));
  }
  if (num_sites < 1) throw Error(ErrorKind::InvalidSize, "basis needs at least one site");

  Occupation current(num_sites, 0);
  enumerate(0, photons, current, states_);
  std::sort(states_.begin(), states_.end(), std::greater<>());

  std::size_t table = 1;
  for (int m = 0; m < photons; ++m) table *= num_sites;
  lookup_.assign(table, kAbsent);
  for (std::size_t k = 0; k < states_.size(); ++k) lookup_[key(states_[k])] = k;
}

std::size_t SectorBasis::key(const Occupation& n) const {
  std::size_t k = 0;
  for (std::size_t site = 0; site < n.size(); ++site) {
    for (int q = 0; q < n[site]; ++q) k = k * num_sites_ + site;
  }
  return k;
}

std::optional<std::size_t> SectorBasis::index(const Occupation& n) const {
  if (n.size() != num_sites_) return std::nullopt;
  int total = 0;
  for (int v : n) {
    if (v < 0) return std::nullopt;
    total += v;
  }
  if (total != photons_) return std::nullopt;
  const std::size_t k = lookup_[key(n)];
  if (k == kAbsent) return std::nullopt;
  return k;
}

SectorBasis sector_basis(std::size_t num_sites, int photons) {
  return SectorBasis(num_sites, photons);
}

SectorMatrix annihilation_block(std::size_t site, const SectorBasis& from, const SectorBasis& to) {
  check_pair(from, to, -1);
  if (site >= from.num_sites()) throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(site));

  SectorMatrix out{from.photons(), to.photons(),
                   Matrix::Zero(static_cast<Eigen::Index>(to.dim()),
                                static_cast<Eigen::Index>(from.dim()))};
  Occupation work;
  for (std::size_t col = 0; col < from.dim(); ++col) {
    const auto& n = from.state(col);
    if (n[site] == 0) continue;
    work = n;
    work[site] -= 1;
    const auto row = *to.index(work);
    out.data(row, col) = std::sqrt(static_cast<double>(n[site]));
  }
  return out;
}

SectorMatrix creation_block(std::size_t site, const SectorBasis& from, const SectorBasis& to) {
  check_pair(from, to, +1);
  auto lowered = annihilation_block(site, to, from);
  return SectorMatrix{from.photons(), to.photons(), lowered.data.adjoint()};
}

SectorMatrix one_body_operator(const SectorBasis& basis, const Matrix& coeffs) {
  const auto ns = static_cast<Eigen::Index>(basis.num_sites());
  if (coeffs.rows() != ns || coeffs.cols() != ns) {
    throw Error(ErrorKind::SectorMismatch, "coefficient matrix does not match the site count");
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  SectorMatrix out{basis.photons(), basis.photons(), Matrix::Zero(d, d)};

  Occupation work;
  for (Eigen::Index col = 0; col < d; ++col) {
    const auto& n = basis.state(static_cast<std::size_t>(col));
    for (Eigen::Index b = 0; b < ns; ++b) {
      if (n[b] == 0) continue;
      for (Eigen::Index a = 0; a < ns; ++a) {
        const Complex c = coeffs(a, b);
        if (c == Complex{}) continue;
        if (a == b) {
          out.data(col, col) += c * static_cast<double>(n[a]);
          continue;
        }
        work = n;
        work[b] -= 1;
        work[a] += 1;
        const auto row = static_cast<Eigen::Index>(*basis.index(work));
        // sqrt(n_b) sqrt(n_a + 1); the transposed term evaluates the same product
        const double amp = std::sqrt(static_cast<double>(n[b]) * static_cast<double>(n[a] + 1));
        out.data(row, col) += c * amp;
      }
    }
  }
  return out;
}

SectorMatrix hamiltonian_sector(const Graph& graph, const SectorBasis& basis) {
  if (graph.num_sites() != basis.num_sites()) {
    throw Error(ErrorKind::SectorMismatch, "graph and basis have different site counts");
  }
  auto h = one_body_operator(basis, graph.one_body_matrix());
  const auto sites = graph.sites();
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto& n = basis.state(k);
    double interaction = 0.0;
    for (std::size_t s = 0; s < n.size(); ++s) {
      interaction += 0.5 * sites[s].U * n[s] * (n[s] - 1);
    }
    const auto kk = static_cast<Eigen::Index>(k);
    h.data(kk, kk) += interaction;
  }
  return h;
}

SectorMatrix number_operator_sector(const SectorBasis& basis) {
  const auto ns = static_cast<Eigen::Index>(basis.num_sites());
  return one_body_operator(basis, Matrix::Identity(ns, ns));
}

}  // namespace fewphoton
