// Triangular grid geometry: the 2K x 3L triangular lattice with periodic
// boundaries, its natural tripartition, rows, columns, stripes, triangular
// faces and the three axial reflections.
//
// Coordinates are row-first (row, col) with row in [0, 2K) and col in
// [0, 6L). A site exists iff row and col have the same parity, so row r
// holds the 3L columns of parity r and column c holds the K rows of parity
// c. Neighbours of (i, j) are (i, j +- 2) and (i +- 1, j +- 1), wrapping
// rows mod 2K and columns mod 6L. Sites are indexed row-major.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hardhex {

struct GridSpec {
  int K = 2;  // half the row count
  int L = 1;  // one third of the sites per row

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws std::domain_error unless K >= 2 and L >= 1.
void validate(const GridSpec& spec);

/// Energy barrier between the stable configurations: min{K, 2L} + 1.
int gamma(const GridSpec& spec);

using SiteIndex = std::int32_t;

struct Site {
  int row = 0;
  int col = 0;

  friend bool operator==(const Site&, const Site&) = default;
};

/// Component of the tripartition; the colour of column c is c mod 3.
enum class Component : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Component, 3> kComponents = {Component::A, Component::B,
                                                         Component::C};

char component_letter(Component x);
/// Lower-case state label of the stable configuration ('a', 'b', 'c').
char stable_label(Component x);
/// Accepts 'a'/'A', 'b'/'B', 'c'/'C'; throws std::invalid_argument otherwise.
Component parse_component(char ch);

/// A triangular face; every face is a 3-clique holding one site per component.
using Face = std::array<SiteIndex, 3>;

class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int K() const { return spec_.K; }
  int L() const { return spec_.L; }
  int rows() const { return 2 * spec_.K; }
  int columns() const { return 6 * spec_.L; }
  /// N = 6KL.
  int size() const { return static_cast<int>(sites_.size()); }
  int edge_count() const { return 3 * size(); }

  Site site(SiteIndex v) const { return sites_[static_cast<std::size_t>(v)]; }
  /// Wraps row and column; throws std::out_of_range on a parity mismatch.
  SiteIndex at(int row, int col) const;
  /// Returns -1 when (row, col) (after wrapping) is not a site.
  SiteIndex find(int row, int col) const;

  std::span<const SiteIndex, 6> neighbors(SiteIndex v) const {
    return std::span<const SiteIndex, 6>(neighbors_[static_cast<std::size_t>(v)]);
  }
  bool adjacent(SiteIndex u, SiteIndex v) const;

  Component component(SiteIndex v) const {
    return static_cast<Component>(sites_[static_cast<std::size_t>(v)].col % 3);
  }
  std::span<const SiteIndex> component_sites(Component x) const {
    return component_sites_[static_cast<std::size_t>(x)];
  }

  /// Sites of row r (wrapped), ordered by column.
  std::span<const SiteIndex> row_sites(int r) const;
  /// Sites of column c (wrapped), ordered by row.
  std::span<const SiteIndex> column_sites(int c) const;

  /// All 2N triangular faces.
  const std::vector<Face>& faces() const { return faces_; }

  int wrap_row(int r) const;
  int wrap_col(int c) const;

 private:
  GridSpec spec_;
  std::vector<Site> sites_;
  std::vector<SiteIndex> index_;  // rows x columns, -1 where no site
  std::vector<std::array<SiteIndex, 6>> neighbors_;
  std::array<std::vector<SiteIndex>, 3> component_sites_;
  std::vector<std::vector<SiteIndex>> row_sites_;
  std::vector<std::vector<SiteIndex>> column_sites_;
  std::vector<Face> faces_;
};

/// Same as Grid{spec}; kept for symmetry with the other module entry points.
Grid build_grid(GridSpec spec);

Component component(const Grid& grid, SiteIndex v);

/// JSON dump of sites, components, edges and faces for debugging.
std::string grid_to_json(const Grid& grid);

// ---------------------------------------------------------------------------
// Stripes
// ---------------------------------------------------------------------------

/// S_i = r_{2i} u r_{2i+1}, i in [0, K).
std::vector<SiteIndex> horizontal_stripe(const Grid& grid, int i);
/// C_j = c_j u c_{j+1} u c_{j+2}, columns mod 6L, j in [0, 6L).
std::vector<SiteIndex> vertical_stripe(const Grid& grid, int j);

struct Stripes {
  std::vector<std::vector<SiteIndex>> horizontal;  // K stripes
  std::vector<std::vector<SiteIndex>> vertical;    // 6L stripes
};
Stripes stripes(const Grid& grid);

enum class StripeKind { Horizontal, Vertical };

struct StripeRef {
  StripeKind kind = StripeKind::Horizontal;
  int index = 0;
};

std::vector<SiteIndex> stripe_sites(const Grid& grid, StripeRef stripe);

/// Faces whose three vertices all lie in the stripe: 6L for a horizontal
/// stripe, 2K for a vertical stripe.
std::vector<Face> stripe_faces(const Grid& grid, StripeRef stripe);

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// A permutation of the sites. The axial reflections and their compositions
/// are grid automorphisms; arbitrary permutations can also be represented so
/// that checks can reject them.
class Automorphism {
 public:
  Automorphism() = default;
  Automorphism(std::string name, std::vector<SiteIndex> image);

  const std::string& name() const { return name_; }
  SiteIndex operator()(SiteIndex v) const { return image_[static_cast<std::size_t>(v)]; }
  std::span<const SiteIndex> image() const { return image_; }
  std::size_t size() const { return image_.size(); }

  Automorphism inverse() const;

  friend bool operator==(const Automorphism& x, const Automorphism& y) {
    return x.image_ == y.image_;
  }

 private:
  std::string name_;
  std::vector<SiteIndex> image_;
};

/// f o g: applies g first.
Automorphism compose(const Automorphism& f, const Automorphism& g);
Automorphism identity_automorphism(const Grid& grid);

/// Reflection of the columns j -> (axis2 - j) mod 6L; rows are fixed.
/// axis2 must be even.
Automorphism column_reflection(const Grid& grid, int axis2, std::string name);

struct AxialAutomorphisms {
  Automorphism ab;  // swaps A and B, maps C onto itself
  Automorphism ac;  // swaps A and C, maps B onto itself
  Automorphism bc;  // swaps B and C, maps A onto itself
};
AxialAutomorphisms axial_automorphisms(const Grid& grid);

/// True iff u ~ v <=> f(u) ~ f(v) and f is a bijection.
bool preserves_adjacency(const Grid& grid, const Automorphism& f);

/// The component f maps all of x onto, or -1 if f does not map x onto a
/// single component.
int component_image(const Grid& grid, const Automorphism& f, Component x);

}  // namespace hardhex
