#include "hardhex/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace hardhex {

namespace {

int floor_mod(int x, int m) {
  int r = x % m;
  return r < 0 ? r + m : r;
}

}  // namespace

void validate(const GridSpec& spec) {
  if (spec.K < 2 || spec.L < 1) {
    throw std::domain_error("grid requires K >= 2 and L >= 1 (got K=" + std::to_string(spec.K) +
                            ", L=" + std::to_string(spec.L) + ")");
  }
  // Site indices are 32-bit and the landscape packs states into 64 bits;
  // the simulation side has no such limit but 6KL must still fit an int.
  if (spec.K > 1'000'000 || spec.L > 1'000'000 ||
      static_cast<long long>(spec.K) * spec.L > 100'000'000LL) {
    throw std::domain_error("grid too large");
  }
}

int gamma(const GridSpec& spec) {
  validate(spec);
  return std::min(spec.K, 2 * spec.L) + 1;
}

char component_letter(Component x) { return "ABC"[static_cast<int>(x)]; }

char stable_label(Component x) { return "abc"[static_cast<int>(x)]; }

Component parse_component(char ch) {
  switch (ch) {
    case 'a':
    case 'A':
      return Component::A;
    case 'b':
    case 'B':
      return Component::B;
    case 'c':
    case 'C':
      return Component::C;
    default:
      throw std::invalid_argument(std::string("unknown component '") + ch + "'");
  }
}

Grid::Grid(GridSpec spec) : spec_(spec) {
  validate(spec_);
  const int R = rows();
  const int W = columns();
  index_.assign(static_cast<std::size_t>(R) * W, -1);
  sites_.reserve(static_cast<std::size_t>(3) * R * spec_.L);
  for (int r = 0; r < R; ++r) {
    for (int c = r % 2; c < W; c += 2) {
      index_[static_cast<std::size_t>(r) * W + c] = static_cast<SiteIndex>(sites_.size());
      sites_.push_back({r, c});
    }
  }

  neighbors_.resize(sites_.size());
  row_sites_.resize(static_cast<std::size_t>(R));
  column_sites_.resize(static_cast<std::size_t>(W));
  faces_.reserve(2 * sites_.size());
  for (SiteIndex v = 0; v < static_cast<SiteIndex>(sites_.size()); ++v) {
    const auto [r, c] = sites_[static_cast<std::size_t>(v)];
    neighbors_[static_cast<std::size_t>(v)] = {at(r, c - 2),     at(r, c + 2),
                                               at(r - 1, c - 1), at(r - 1, c + 1),
                                               at(r + 1, c - 1), at(r + 1, c + 1)};
    component_sites_[static_cast<std::size_t>(c % 3)].push_back(v);
    row_sites_[static_cast<std::size_t>(r)].push_back(v);
    column_sites_[static_cast<std::size_t>(c)].push_back(v);
  }
  // Each face is identified by its horizontal edge (left endpoint v) and the
  // side of its apex. Upward faces first, then downward ones.
  for (SiteIndex v = 0; v < static_cast<SiteIndex>(sites_.size()); ++v) {
    const auto [r, c] = sites_[static_cast<std::size_t>(v)];
    faces_.push_back({v, at(r, c + 2), at(r + 1, c + 1)});
  }
  for (SiteIndex v = 0; v < static_cast<SiteIndex>(sites_.size()); ++v) {
    const auto [r, c] = sites_[static_cast<std::size_t>(v)];
    faces_.push_back({v, at(r, c + 2), at(r - 1, c + 1)});
  }
}

int Grid::wrap_row(int r) const { return floor_mod(r, rows()); }

int Grid::wrap_col(int c) const { return floor_mod(c, columns()); }

SiteIndex Grid::find(int row, int col) const {
  const int r = wrap_row(row);
  const int c = wrap_col(col);
  return index_[static_cast<std::size_t>(r) * columns() + c];
}

SiteIndex Grid::at(int row, int col) const {
  const SiteIndex v = find(row, col);
  if (v < 0) {
    throw std::out_of_range("(" + std::to_string(row) + "," + std::to_string(col) +
                            ") is not a site: row and column parity differ");
  }
  return v;
}

bool Grid::adjacent(SiteIndex u, SiteIndex v) const {
  const auto& nb = neighbors_[static_cast<std::size_t>(u)];
  return std::find(nb.begin(), nb.end(), v) != nb.end();
}

std::span<const SiteIndex> Grid::row_sites(int r) const {
  return row_sites_[static_cast<std::size_t>(wrap_row(r))];
}

std::span<const SiteIndex> Grid::column_sites(int c) const {
  return column_sites_[static_cast<std::size_t>(wrap_col(c))];
}

Grid build_grid(GridSpec spec) { return Grid(spec); }

Component component(const Grid& grid, SiteIndex v) { return grid.component(v); }

std::string grid_to_json(const Grid& grid) {
  nlohmann::ordered_json j;
  j["K"] = grid.K();
  j["L"] = grid.L();
  j["N"] = grid.size();
  auto& sites = j["sites"] = nlohmann::ordered_json::array();
  for (SiteIndex v = 0; v < grid.size(); ++v) {
    const Site s = grid.site(v);
    sites.push_back({{"id", v},
                     {"row", s.row},
                     {"col", s.col},
                     {"component", std::string(1, component_letter(grid.component(v)))}});
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (SiteIndex v = 0; v < grid.size(); ++v) {
    for (SiteIndex w : grid.neighbors(v)) {
      if (v < w) edges.push_back({v, w});
    }
  }
  auto& faces = j["faces"] = nlohmann::ordered_json::array();
  for (const Face& f : grid.faces()) faces.push_back({f[0], f[1], f[2]});
  return j.dump(2);
}

std::vector<SiteIndex> horizontal_stripe(const Grid& grid, int i) {
  if (i < 0 || i >= grid.K()) throw std::out_of_range("horizontal stripe index out of range");
  std::vector<SiteIndex> out;
  for (int r : {2 * i, 2 * i + 1}) {
    auto row = grid.row_sites(r);
    out.insert(out.end(), row.begin(), row.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SiteIndex> vertical_stripe(const Grid& grid, int j) {
  if (j < 0 || j >= grid.columns()) {
    throw std::out_of_range("vertical stripe index out of range");
  }
  std::vector<SiteIndex> out;
  for (int c = j; c < j + 3; ++c) {
    auto col = grid.column_sites(c);
    out.insert(out.end(), col.begin(), col.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Stripes stripes(const Grid& grid) {
  Stripes s;
  for (int i = 0; i < grid.K(); ++i) s.horizontal.push_back(horizontal_stripe(grid, i));
  for (int j = 0; j < grid.columns(); ++j) s.vertical.push_back(vertical_stripe(grid, j));
  return s;
}

std::vector<SiteIndex> stripe_sites(const Grid& grid, StripeRef stripe) {
  return stripe.kind == StripeKind::Horizontal ? horizontal_stripe(grid, stripe.index)
                                               : vertical_stripe(grid, stripe.index);
}

std::vector<Face> stripe_faces(const Grid& grid, StripeRef stripe) {
  const auto members = stripe_sites(grid, stripe);
  std::vector<char> inside(static_cast<std::size_t>(grid.size()), 0);
  for (SiteIndex v : members) inside[static_cast<std::size_t>(v)] = 1;
  std::vector<Face> out;
  for (const Face& f : grid.faces()) {
    if (inside[static_cast<std::size_t>(f[0])] && inside[static_cast<std::size_t>(f[1])] &&
        inside[static_cast<std::size_t>(f[2])]) {
      out.push_back(f);
    }
  }
  return out;
}

Automorphism::Automorphism(std::string name, std::vector<SiteIndex> image)
    : name_(std::move(name)), image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (SiteIndex w : image_) {
    if (w < 0 || static_cast<std::size_t>(w) >= image_.size() ||
        seen[static_cast<std::size_t>(w)]) {
      throw std::invalid_argument("automorphism image is not a permutation");
    }
    seen[static_cast<std::size_t>(w)] = 1;
  }
}

Automorphism Automorphism::inverse() const {
  std::vector<SiteIndex> inv(image_.size());
  for (std::size_t v = 0; v < image_.size(); ++v) {
    inv[static_cast<std::size_t>(image_[v])] = static_cast<SiteIndex>(v);
  }
  return Automorphism(name_ + "^-1", std::move(inv));
}

Automorphism compose(const Automorphism& f, const Automorphism& g) {
  if (f.size() != g.size()) throw std::invalid_argument("composing maps of different sizes");
  std::vector<SiteIndex> img(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) img[v] = f(g(static_cast<SiteIndex>(v)));
  return Automorphism(f.name() + "*" + g.name(), std::move(img));
}

Automorphism identity_automorphism(const Grid& grid) {
  std::vector<SiteIndex> img(static_cast<std::size_t>(grid.size()));
  for (SiteIndex v = 0; v < grid.size(); ++v) img[static_cast<std::size_t>(v)] = v;
  return Automorphism("id", std::move(img));
}

Automorphism column_reflection(const Grid& grid, int axis2, std::string name) {
  if (axis2 % 2 != 0) throw std::invalid_argument("reflection axis must be even");
  std::vector<SiteIndex> img(static_cast<std::size_t>(grid.size()));
  for (SiteIndex v = 0; v < grid.size(); ++v) {
    const Site s = grid.site(v);
    img[static_cast<std::size_t>(v)] = grid.at(s.row, axis2 - s.col);
  }
  return Automorphism(std::move(name), std::move(img));
}

AxialAutomorphisms axial_automorphisms(const Grid& grid) {
  // j -> m - j sends colour x to (m - x) mod 3.
  return {column_reflection(grid, 4, "xi_ab"), column_reflection(grid, 2, "xi_ac"),
          column_reflection(grid, 0, "xi_bc")};
}

bool preserves_adjacency(const Grid& grid, const Automorphism& f) {
  if (f.size() != static_cast<std::size_t>(grid.size())) return false;
  // f is a bijection by construction; since the graph is finite and
  // 6-regular, mapping every edge to an edge is enough.
  for (SiteIndex u = 0; u < grid.size(); ++u) {
    for (SiteIndex v : grid.neighbors(u)) {
      if (!grid.adjacent(f(u), f(v))) return false;
    }
  }
  return true;
}

int component_image(const Grid& grid, const Automorphism& f, Component x) {
  int target = -1;
  for (SiteIndex v : grid.component_sites(x)) {
    const int y = static_cast<int>(grid.component(f(v)));
    if (target < 0) {
      target = y;
    } else if (target != y) {
      return -1;
    }
  }
  return target;
}

}  // namespace hardhex
