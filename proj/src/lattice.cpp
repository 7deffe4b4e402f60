#include "fewphoton/lattice.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace fewphoton {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

Graph::Graph(std::vector<Site> sites, std::vector<Link> links)
    : sites_(std::move(sites)), links_(std::move(links)) {
  if (sites_.empty()) throw Error(ErrorKind::InvalidSize, "a graph needs at least one site");

  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (!std::isfinite(sites_[k].epsilon) || !std::isfinite(sites_[k].U)) {
      throw Error(ErrorKind::NonFiniteParameter, "site " + std::to_string(k));
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& link : links_) {
    if (link.i >= sites_.size() || link.j >= sites_.size()) {
      throw Error(ErrorKind::IndexOutOfRange, "link (" + std::to_string(link.i) + ", " +
                                                  std::to_string(link.j) + ") on " +
                                                  std::to_string(sites_.size()) + " sites");
    }
    if (link.i == link.j) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "self link on site " + std::to_string(link.i));
    }
    if (!finite(link.t)) {
      throw Error(ErrorKind::NonFiniteParameter, "hopping on link (" + std::to_string(link.i) +
                                                     ", " + std::to_string(link.j) + ")");
    }
    auto key = std::minmax(link.i, link.j);
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::DuplicateLink,
                  "(" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
    }
  }
}

double Graph::mean_epsilon() const noexcept {
  double sum = 0.0;
  for (const auto& s : sites_) sum += s.epsilon;
  return sum / static_cast<double>(sites_.size());
}

bool Graph::is_noninteracting() const noexcept {
  for (const auto& s : sites_) {
    if (s.U != 0.0) return false;
  }
  return true;
}

Matrix Graph::one_body_matrix() const {
  const auto n = static_cast<Eigen::Index>(sites_.size());
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) h(k, k) = sites_[k].epsilon;
  for (const auto& link : links_) {
    h(link.i, link.j) = link.t;
    h(link.j, link.i) = std::conj(link.t);
  }
  return h;
}

Graph make_graph(std::vector<Site> sites, std::vector<Link> links) {
  return Graph(std::move(sites), std::move(links));
}

Graph preset_kerr(double epsilon, double U) { return Graph({Site{epsilon, U}}, {}); }

Graph preset_chain(std::size_t num_sites, double epsilon, double U, Complex t) {
  if (num_sites < 1) throw Error(ErrorKind::InvalidSize, "chain needs at least one site");
  std::vector<Site> sites(num_sites, Site{epsilon, U});
  std::vector<Link> links;
  for (std::size_t k = 0; k + 1 < num_sites; ++k) links.push_back({k, k + 1, t});
  return Graph(std::move(sites), std::move(links));
}

Graph preset_ring(std::size_t num_sites, double epsilon, double U, Complex t) {
  if (num_sites < 3) {
    throw Error(ErrorKind::InvalidSize, "ring needs at least three sites, got " +
                                            std::to_string(num_sites));
  }
  std::vector<Site> sites(num_sites, Site{epsilon, U});
  std::vector<Link> links;
  for (std::size_t k = 0; k < num_sites; ++k) links.push_back({k, (k + 1) % num_sites, t});
  return Graph(std::move(sites), std::move(links));
}

Graph preset_square_flux(std::size_t width, std::size_t height, double epsilon, double U,
                         Complex t, double phi) {
  if (width < 1 || height < 1) throw Error(ErrorKind::InvalidSize, "plane needs width, height >= 1");
  std::vector<Site> sites(width * height, Site{epsilon, U});
  std::vector<Link> links;
  for (std::size_t row = 0; row < height; ++row) {
    const Complex row_t = t * std::polar(1.0, static_cast<double>(row) * phi);
    for (std::size_t col = 0; col + 1 < width; ++col) {
      links.push_back({plane_site(width, row, col), plane_site(width, row, col + 1), row_t});
    }
  }
  for (std::size_t row = 0; row + 1 < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      links.push_back({plane_site(width, row, col), plane_site(width, row + 1, col), t});
    }
  }
  return Graph(std::move(sites), std::move(links));
}

}  // namespace fewphoton
