// Hard-core configurations: occupancy bit vectors over the sites of a grid,
// energies, per-stripe energy differences, bridges and face accounting.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hardhex/lattice.hpp"

namespace hardhex {

/// Occupancy vector; bit v is set iff site v holds a particle.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n_sites);

  /// Low n_sites bits of code; requires n_sites <= 64.
  static Configuration from_code(int n_sites, std::uint64_t code);
  static Configuration from_sites(int n_sites, const std::vector<SiteIndex>& occupied);

  int size() const { return n_; }
  bool test(SiteIndex v) const { return (words_[word(v)] >> bit(v)) & 1U; }
  void set(SiteIndex v) { words_[word(v)] |= mask(v); }
  void reset(SiteIndex v) { words_[word(v)] &= ~mask(v); }
  void flip(SiteIndex v) { words_[word(v)] ^= mask(v); }
  void assign(SiteIndex v, bool occupied) { occupied ? set(v) : reset(v); }

  int count() const;
  bool empty() const { return count() == 0; }
  std::vector<SiteIndex> occupied() const;

  /// Requires size() <= 64.
  std::uint64_t code() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  /// Number of occupied sites also set in m.
  int count_in(const Configuration& m) const;
  /// True iff this and other agree on every site set in m.
  bool agrees_on(const Configuration& other, const Configuration& m) const;
  /// Number of sites where the two configurations differ.
  int hamming(const Configuration& other) const;

  Configuration operator&(const Configuration& other) const;
  Configuration operator|(const Configuration& other) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  static std::size_t word(SiteIndex v) { return static_cast<std::size_t>(v) >> 6; }
  static unsigned bit(SiteIndex v) { return static_cast<unsigned>(v) & 63U; }
  static std::uint64_t mask(SiteIndex v) { return std::uint64_t{1} << bit(v); }

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Indicator of a set of sites.
Configuration site_mask(const Grid& grid, const std::vector<SiteIndex>& sites);

bool is_hardcore(const Grid& grid, const Configuration& sigma);
/// Adjacent occupied pairs (u < v).
std::vector<std::pair<SiteIndex, SiteIndex>> hardcore_violations(const Grid& grid,
                                                                 const Configuration& sigma);

/// Indicator configuration of component x.
Configuration stable_config(const Grid& grid, Component x);
/// a, b, c in that order.
std::array<Configuration, 3> stable_configs(const Grid& grid);
/// Component x if sigma equals its stable configuration, -1 otherwise.
int stable_index(const Grid& grid, const Configuration& sigma);

/// H(sigma) = -(number of particles).
int energy(const Configuration& sigma);
/// H(sigma) - H(a) = 2KL - (number of particles).
int delta_H(const Grid& grid, const Configuration& sigma);
/// 2L minus the particles in S_i, i in [0, K).
int delta_H_horizontal(const Grid& grid, const Configuration& sigma, int i);
/// K minus the particles in C_j, j in [0, 6L).
int delta_H_vertical(const Grid& grid, const Configuration& sigma, int j);

/// sigma coincides with the stable configuration of x on S_i.
bool agrees_on_horizontal_stripe(const Grid& grid, const Configuration& sigma, int i,
                                 Component x);
/// sigma coincides with the stable configuration of x on C_j.
bool agrees_on_vertical_stripe(const Grid& grid, const Configuration& sigma, int j,
                               Component x);

struct StripeColor {
  int index = 0;
  Component color = Component::A;
  friend bool operator==(const StripeColor&, const StripeColor&) = default;
};

struct BridgeReport {
  /// (i, X): sigma agrees with X's stable configuration on S_i.
  std::vector<StripeColor> horizontal;
  /// (j, X): column j + 1, the middle column of C_j, has colour X and is
  /// fully occupied. A vertical bridge of colour X exists on some C_k iff the
  /// X-coloured column of C_k is full, so this lists each one exactly once.
  std::vector<StripeColor> vertical;
  /// Colours with both a horizontal and a vertical bridge.
  std::vector<Component> crosses;
  /// (r, X): row r carries exactly the X-sites of that row. S_i has a
  /// horizontal bridge of colour X iff rows 2i and 2i+1 both appear with X.
  std::vector<StripeColor> rows;
  /// Columns c that are fully occupied.
  std::vector<int> full_columns;
};

BridgeReport detect_bridges(const Grid& grid, const Configuration& sigma);

bool has_horizontal_bridge(const BridgeReport& r, int i);
bool has_vertical_bridge_of(const BridgeReport& r, Component x);
bool has_horizontal_bridge_of(const BridgeReport& r, Component x);

struct TriangleCount {
  int blocked = 0;
  int free = 0;
};

/// Counts faces of the stripe with an occupied vertex (blocked) and without
/// one (free).
TriangleCount triangle_accounting(const Grid& grid, const Configuration& sigma, StripeRef stripe);

// ---------------------------------------------------------------------------
// Text forms
// ---------------------------------------------------------------------------

/// 2K lines of 3L characters; '.' for a vacancy and the component letter for
/// a particle. Row 0 is the first line.
std::string to_ascii(const Grid& grid, const Configuration& sigma);
/// Inverse of to_ascii. Blank lines and lines starting with '#' are skipped.
/// Throws std::invalid_argument on shape or letter mismatches.
Configuration from_ascii(const Grid& grid, std::string_view text);

/// Hex digits of the integer sum_v sigma(v) 2^v, most significant first,
/// zero-padded to ceil(N / 4) digits.
std::string to_hex(const Configuration& sigma);
/// Accepts an optional "0x" prefix; throws on bits beyond n_sites.
Configuration from_hex(int n_sites, std::string_view hex);

}  // namespace hardhex
