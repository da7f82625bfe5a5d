#include "hardhex/configuration.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace hardhex {

Configuration::Configuration(int n_sites) : n_(n_sites) {
  if (n_sites < 0) throw std::invalid_argument("negative configuration size");
  words_.assign(static_cast<std::size_t>((n_sites + 63) / 64), 0);
}

Configuration Configuration::from_code(int n_sites, std::uint64_t code) {
  if (n_sites > 64) throw std::invalid_argument("codes cover at most 64 sites");
  Configuration s(n_sites);
  if (n_sites < 64 && (code >> n_sites) != 0) {
    throw std::invalid_argument("code has bits beyond the site count");
  }
  if (n_sites > 0) s.words_[0] = code;
  return s;
}

Configuration Configuration::from_sites(int n_sites, const std::vector<SiteIndex>& occupied) {
  Configuration s(n_sites);
  for (SiteIndex v : occupied) {
    if (v < 0 || v >= n_sites) throw std::out_of_range("site index out of range");
    s.set(v);
  }
  return s;
}

int Configuration::count() const {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

std::vector<SiteIndex> Configuration::occupied() const {
  std::vector<SiteIndex> out;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    std::uint64_t w = words_[k];
    while (w) {
      out.push_back(static_cast<SiteIndex>(k * 64 + static_cast<std::size_t>(std::countr_zero(w))));
      w &= w - 1;
    }
  }
  return out;
}

std::uint64_t Configuration::code() const {
  if (n_ > 64) throw std::logic_error("configuration too large for a 64-bit code");
  return words_.empty() ? 0 : words_[0];
}

int Configuration::count_in(const Configuration& m) const {
  int total = 0;
  for (std::size_t k = 0; k < words_.size(); ++k) total += std::popcount(words_[k] & m.words_[k]);
  return total;
}

bool Configuration::agrees_on(const Configuration& other, const Configuration& m) const {
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if ((words_[k] ^ other.words_[k]) & m.words_[k]) return false;
  }
  return true;
}

int Configuration::hamming(const Configuration& other) const {
  int total = 0;
  for (std::size_t k = 0; k < words_.size(); ++k) total += std::popcount(words_[k] ^ other.words_[k]);
  return total;
}

Configuration Configuration::operator&(const Configuration& other) const {
  Configuration out = *this;
  for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] &= other.words_[k];
  return out;
}

Configuration Configuration::operator|(const Configuration& other) const {
  Configuration out = *this;
  for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] |= other.words_[k];
  return out;
}

Configuration site_mask(const Grid& grid, const std::vector<SiteIndex>& sites) {
  return Configuration::from_sites(grid.size(), sites);
}

bool is_hardcore(const Grid& grid, const Configuration& sigma) {
  for (SiteIndex v : sigma.occupied()) {
    for (SiteIndex w : grid.neighbors(v)) {
      if (sigma.test(w)) return false;
    }
  }
  return true;
}

std::vector<std::pair<SiteIndex, SiteIndex>> hardcore_violations(const Grid& grid,
                                                                 const Configuration& sigma) {
  std::vector<std::pair<SiteIndex, SiteIndex>> out;
  for (SiteIndex v : sigma.occupied()) {
    for (SiteIndex w : grid.neighbors(v)) {
      if (v < w && sigma.test(w)) out.emplace_back(v, w);
    }
  }
  return out;
}

Configuration stable_config(const Grid& grid, Component x) {
  auto sites = grid.component_sites(x);
  return site_mask(grid, std::vector<SiteIndex>(sites.begin(), sites.end()));
}

std::array<Configuration, 3> stable_configs(const Grid& grid) {
  return {stable_config(grid, Component::A), stable_config(grid, Component::B),
          stable_config(grid, Component::C)};
}

int stable_index(const Grid& grid, const Configuration& sigma) {
  if (sigma.count() != 2 * grid.K() * grid.L() || sigma.empty()) return -1;
  const SiteIndex first = sigma.occupied().front();
  const Component x = grid.component(first);
  return sigma == stable_config(grid, x) ? static_cast<int>(x) : -1;
}

int energy(const Configuration& sigma) { return -sigma.count(); }

int delta_H(const Grid& grid, const Configuration& sigma) {
  return 2 * grid.K() * grid.L() - sigma.count();
}

int delta_H_horizontal(const Grid& grid, const Configuration& sigma, int i) {
  const auto mask = site_mask(grid, horizontal_stripe(grid, i));
  return 2 * grid.L() - sigma.count_in(mask);
}

int delta_H_vertical(const Grid& grid, const Configuration& sigma, int j) {
  const auto mask = site_mask(grid, vertical_stripe(grid, j));
  return grid.K() - sigma.count_in(mask);
}

bool agrees_on_horizontal_stripe(const Grid& grid, const Configuration& sigma, int i,
                                 Component x) {
  return sigma.agrees_on(stable_config(grid, x), site_mask(grid, horizontal_stripe(grid, i)));
}

bool agrees_on_vertical_stripe(const Grid& grid, const Configuration& sigma, int j,
                               Component x) {
  return sigma.agrees_on(stable_config(grid, x), site_mask(grid, vertical_stripe(grid, j)));
}

BridgeReport detect_bridges(const Grid& grid, const Configuration& sigma) {
  BridgeReport rep;
  const auto stable = stable_configs(grid);

  for (int r = 0; r < grid.rows(); ++r) {
    auto row = grid.row_sites(r);
    const auto mask = site_mask(grid, std::vector<SiteIndex>(row.begin(), row.end()));
    for (Component x : kComponents) {
      if (sigma.agrees_on(stable[static_cast<std::size_t>(x)], mask)) rep.rows.push_back({r, x});
    }
  }
  for (int i = 0; i < grid.K(); ++i) {
    const auto mask = site_mask(grid, horizontal_stripe(grid, i));
    for (Component x : kComponents) {
      if (sigma.agrees_on(stable[static_cast<std::size_t>(x)], mask)) {
        rep.horizontal.push_back({i, x});
      }
    }
  }
  for (int c = 0; c < grid.columns(); ++c) {
    auto col = grid.column_sites(c);
    const bool full =
        std::all_of(col.begin(), col.end(), [&](SiteIndex v) { return sigma.test(v); });
    if (!full) continue;
    rep.full_columns.push_back(c);
    rep.vertical.push_back({grid.wrap_col(c - 1), static_cast<Component>(c % 3)});
  }
  std::sort(rep.vertical.begin(), rep.vertical.end(),
            [](const StripeColor& p, const StripeColor& q) { return p.index < q.index; });
  for (Component x : kComponents) {
    if (has_horizontal_bridge_of(rep, x) && has_vertical_bridge_of(rep, x)) {
      rep.crosses.push_back(x);
    }
  }
  return rep;
}

bool has_horizontal_bridge(const BridgeReport& r, int i) {
  return std::any_of(r.horizontal.begin(), r.horizontal.end(),
                     [&](const StripeColor& s) { return s.index == i; });
}

bool has_vertical_bridge_of(const BridgeReport& r, Component x) {
  return std::any_of(r.vertical.begin(), r.vertical.end(),
                     [&](const StripeColor& s) { return s.color == x; });
}

bool has_horizontal_bridge_of(const BridgeReport& r, Component x) {
  return std::any_of(r.horizontal.begin(), r.horizontal.end(),
                     [&](const StripeColor& s) { return s.color == x; });
}

TriangleCount triangle_accounting(const Grid& grid, const Configuration& sigma,
                                  StripeRef stripe) {
  TriangleCount t;
  for (const Face& f : stripe_faces(grid, stripe)) {
    const bool hit = sigma.test(f[0]) || sigma.test(f[1]) || sigma.test(f[2]);
    (hit ? t.blocked : t.free) += 1;
  }
  return t;
}

std::string to_ascii(const Grid& grid, const Configuration& sigma) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.rows()) * (3 * grid.L() + 1));
  for (int r = 0; r < grid.rows(); ++r) {
    for (SiteIndex v : grid.row_sites(r)) {
      out.push_back(sigma.test(v) ? component_letter(grid.component(v)) : '.');
    }
    out.push_back('\n');
  }
  return out;
}

Configuration from_ascii(const Grid& grid, std::string_view text) {
  Configuration sigma(grid.size());
  std::istringstream in{std::string(text)};
  std::string line;
  int r = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (r >= grid.rows()) throw std::invalid_argument("too many rows in configuration text");
    auto row = grid.row_sites(r);
    if (line.size() != row.size()) {
      throw std::invalid_argument("row " + std::to_string(r) + " has " +
                                  std::to_string(line.size()) + " characters, expected " +
                                  std::to_string(row.size()));
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      const char ch = line[k];
      if (ch == '.') continue;
      const SiteIndex v = row[k];
      const char want = component_letter(grid.component(v));
      if (ch != want) {
        throw std::invalid_argument("row " + std::to_string(r) + " position " + std::to_string(k) +
                                    ": expected '.' or '" + want + "', got '" + ch + "'");
      }
      sigma.set(v);
    }
    ++r;
  }
  if (r != grid.rows()) {
    throw std::invalid_argument("configuration text has " + std::to_string(r) +
                                " rows, expected " + std::to_string(grid.rows()));
  }
  return sigma;
}

std::string to_hex(const Configuration& sigma) {
  const int digits = (sigma.size() + 3) / 4;
  std::string out(static_cast<std::size_t>(digits), '0');
  for (int d = 0; d < digits; ++d) {
    unsigned nibble = 0;
    for (int b = 0; b < 4; ++b) {
      const int v = 4 * d + b;
      if (v < sigma.size() && sigma.test(v)) nibble |= 1U << b;
    }
    out[static_cast<std::size_t>(digits - 1 - d)] = "0123456789abcdef"[nibble];
  }
  return out;
}

Configuration from_hex(int n_sites, std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) throw std::invalid_argument("empty hex string");
  Configuration sigma(n_sites);
  const int len = static_cast<int>(hex.size());
  for (int d = 0; d < len; ++d) {
    const char ch = hex[static_cast<std::size_t>(len - 1 - d)];
    unsigned nibble;
    if (ch >= '0' && ch <= '9') {
      nibble = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'a' && ch <= 'f') {
      nibble = static_cast<unsigned>(ch - 'a' + 10);
    } else if (ch >= 'A' && ch <= 'F') {
      nibble = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw std::invalid_argument(std::string("bad hex digit '") + ch + "'");
    }
    for (int b = 0; b < 4; ++b) {
      if (!((nibble >> b) & 1U)) continue;
      const int v = 4 * d + b;
      if (v >= n_sites) throw std::invalid_argument("hex value has bits beyond the site count");
      sigma.set(v);
    }
  }
  return sigma;
}

}  // namespace hardhex
