#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fewphoton/lattice.hpp"
#include "fewphoton/types.hpp"

namespace fewphoton {

using Occupation = std::vector<int>;

inline constexpr int kMaxPhotons = 2;

/// Fock basis of the M-photon sector (M = 0, 1, 2) of an N_s-site graph.
///
/// States are ordered lexicographically descending on their occupation
/// vectors, so for M = 1 the state index equals the site index and for
/// M = 2 the order is |2,0,..>, |1,1,0,..>, |1,0,1,..>, ..., |0,2,..>, ...
/// This ordering is part of the public contract.
class SectorBasis {
 public:
  SectorBasis(std::size_t num_sites, int photons);

  int photons() const noexcept { return photons_; }
  std::size_t num_sites() const noexcept { return num_sites_; }
  std::size_t dim() const noexcept { return states_.size(); }

  const Occupation& state(std::size_t k) const { return states_.at(k); }
  std::span<const Occupation> states() const noexcept { return states_; }

  std::optional<std::size_t> index(const Occupation& n) const;

 private:
  std::size_t key(const Occupation& n) const;

  std::size_t num_sites_;
  int photons_;
  std::vector<Occupation> states_;
  std::vector<std::size_t> lookup_;  // dense table over sorted occupied-site tuples
};

SectorBasis sector_basis(std::size_t num_sites, int photons);

/// Operator block mapping sector `from` into sector `to`; `data` has shape
/// d_to x d_from.
struct SectorMatrix {
  int from = 0;
  int to = 0;
  Matrix data;
};

/// b_site : sector M -> sector M-1.
SectorMatrix annihilation_block(std::size_t site, const SectorBasis& from, const SectorBasis& to);

/// b†_site : sector M-1 -> sector M.
SectorMatrix creation_block(std::size_t site, const SectorBasis& from, const SectorBasis& to);

/// sum_ab coeffs(a, b) b†_a b_b restricted to one sector. If `coeffs` is
/// Hermitian the result is exactly Hermitian.
SectorMatrix one_body_operator(const SectorBasis& basis, const Matrix& coeffs);

SectorMatrix hamiltonian_sector(const Graph& graph, const SectorBasis& basis);

SectorMatrix number_operator_sector(const SectorBasis& basis);

}  // namespace fewphoton
