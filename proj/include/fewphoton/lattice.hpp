#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fewphoton/types.hpp"

namespace fewphoton {

/// Onsite parameters of a Bose-Hubbard site, in units of the reference rate.
struct Site {
  double epsilon = 0.0;
  double U = 0.0;
};

/// Hopping between sites i and j. The amplitude `t` multiplies b†_i b_j and
/// conj(t) multiplies b†_j b_i.
struct Link {
  std::size_t i = 0;
  std::size_t j = 0;
  Complex t{0.0, 0.0};
};

/// Immutable Bose-Hubbard graph. Construction validates indices, rejects
/// duplicate unordered pairs and non-finite parameters.
class Graph {
 public:
  Graph(std::vector<Site> sites, std::vector<Link> links);

  std::size_t num_sites() const noexcept { return sites_.size(); }
  std::span<const Site> sites() const noexcept { return sites_; }
  std::span<const Link> links() const noexcept { return links_; }

  double mean_epsilon() const noexcept;
  bool is_noninteracting() const noexcept;

  /// Single-particle matrix h with h_ii = epsilon_i, h_ij = t, h_ji = conj(t).
  Matrix one_body_matrix() const;

 private:
  std::vector<Site> sites_;
  std::vector<Link> links_;
};

Graph make_graph(std::vector<Site> sites, std::vector<Link> links);

Graph preset_kerr(double epsilon, double U);

/// Open chain, sites numbered sequentially.
Graph preset_chain(std::size_t num_sites, double epsilon, double U, Complex t);

/// Closed ring; requires at least three sites.
Graph preset_ring(std::size_t num_sites, double epsilon, double U, Complex t);

// Rectangular lattice, row-major site order (site = row * width + col).
// Links along row k carry t * exp(i k phi) from (k, c+1) to (k, c), i.e.
// Link{i = (k, c), j = (k, c+1)}; vertical links carry plain t. A particle
// hopping counter-clockwise around a plaquette in (col, row) coordinates picks
// up a total phase of exp(+i phi).
Graph preset_square_flux(std::size_t width, std::size_t height, double epsilon, double U,
                         Complex t, double phi);

inline std::size_t plane_site(std::size_t width, std::size_t row, std::size_t col) {
  return row * width + col;
}

}  // namespace fewphoton
