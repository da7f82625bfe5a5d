#include "hardhex/reduction.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "hardhex/symmetry.hpp"

namespace hardhex {

namespace {

class Builder {
 public:
  explicit Builder(const Configuration& start) { path_.states.push_back(start); }

  void begin(char kind) {
    kind_ = kind;
    begin_ = path_.states.size() - 1;
  }
  void end() { path_.stages.push_back({begin_, path_.states.size() - 1, kind_}); }

  const Configuration& current() const { return path_.states.back(); }
  // Both are void moves when the site already has the requested state.
  void add(SiteIndex v) {
    Configuration s = current();
    s.set(v);
    path_.states.push_back(std::move(s));
  }
  void remove(SiteIndex v) {
    Configuration s = current();
    s.reset(v);
    path_.states.push_back(std::move(s));
  }
  void stay() { path_.states.push_back(current()); }
  Path take() { return std::move(path_); }

 private:
  Path path_;
  char kind_ = 'p';
  std::size_t begin_ = 0;
};

// Removes the occupied one of two adjacent sites, or stays if both are empty.
void remove_either(Builder& b, SiteIndex u, SiteIndex v) {
  if (b.current().test(u)) {
    b.remove(u);
  } else if (b.current().test(v)) {
    b.remove(v);
  } else {
    b.stay();
  }
}

// Rows algorithm with target b; the caller has checked the precondition.
void rows_towards_b(const Grid& grid, Builder& b, int stripe) {
  for (int i = 1; i <= grid.rows(); ++i) {
    const int r = 2 * stripe + i;
    b.begin('r');
    for (SiteIndex v : grid.row_sites(r)) {
      if (grid.component(v) != Component::B) continue;
      const int c = grid.site(v).col;
      remove_either(b, grid.at(r + 1, c - 1), grid.at(r + 1, c + 1));
      b.add(v);
    }
    b.end();
  }
}

// Columns algorithm with target b, first column f = 2 mod 3.
void columns_towards_b(const Grid& grid, Builder& b, int f) {
  const int K = grid.K();
  for (int j = 1; j <= 2 * grid.L(); ++j) {
    const int p = grid.wrap_col(f - 1 + 3 * j);  // column of B sites
    const auto trailing = grid.column_sites(p + 1);
    const bool bridge = std::all_of(trailing.begin(), trailing.end(),
                                    [&](SiteIndex v) { return b.current().test(v); });
    if (bridge) {
      // Case (a): column p + 2 is empty; free two B sites' right sides at once.
      b.begin('a');
      const int r0 = grid.site(grid.column_sites(p)[0]).row;
      b.remove(grid.at(r0 - 1, p + 1));
      b.remove(grid.at(r0 + 1, p + 1));
      b.add(grid.at(r0, p));
      for (int t = 1; t < K; ++t) {
        const int r = r0 + 2 * t;
        if (t < K - 1) b.remove(grid.at(r + 1, p + 1));
        b.add(grid.at(r, p));
      }
      b.end();
      continue;
    }
    // Case (b): start just below an empty site w of column p + 1.
    b.begin('b');
    const auto w = *std::find_if(trailing.begin(), trailing.end(),
                                 [&](SiteIndex v) { return !b.current().test(v); });
    const int r0 = grid.site(w).row + 1;
    for (int t = 0; t < K; ++t) {
      const int r = r0 + 2 * t;
      remove_either(b, grid.at(r + 1, p + 1), grid.at(r, p + 2));
      b.add(grid.at(r, p));
    }
    b.end();
  }
}

// The reflection whose induced map swaps b with `target` (identity for b).
Automorphism conjugator(const Grid& grid, Component target) {
  const auto ax = axial_automorphisms(grid);
  switch (target) {
    case Component::A:
      return ax.ab;
    case Component::C:
      return ax.bc;
    default:
      return identity_automorphism(grid);
  }
}

Path map_path(const Automorphism& g, Path p) {
  for (auto& s : p.states) s = induced(g, s);
  return p;
}

void check_size(const Grid& grid, const Configuration& sigma) {
  if (sigma.size() != grid.size()) throw std::invalid_argument("configuration size mismatch");
  if (!is_hardcore(grid, sigma)) throw std::invalid_argument("configuration is not hard-core");
}

std::vector<SiteIndex> occupied_in(const Configuration& sigma, const std::vector<SiteIndex>& sites) {
  std::vector<SiteIndex> out;
  for (SiteIndex v : sites) {
    if (sigma.test(v)) out.push_back(v);
  }
  return out;
}

std::vector<SiteIndex> column_list(const Grid& grid, int c) {
  auto s = grid.column_sites(c);
  return {s.begin(), s.end()};
}

}  // namespace

int Path::height() const {
  int h = std::numeric_limits<int>::min();
  for (const auto& s : states) h = std::max(h, energy(s));
  return h;
}

PreconditionError::PreconditionError(const std::string& what, std::vector<SiteIndex> sites)
    : std::invalid_argument(what), sites_(std::move(sites)) {}

PathCheck validate_path(const Grid& grid, const Path& path) {
  PathCheck out;
  if (path.states.empty()) {
    out.valid = false;
    out.reason = "empty";
    return out;
  }
  out.height = path.height();
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const auto& s = path.states[i];
    std::string reason;
    if (s.size() != grid.size()) {
      reason = "size";
    } else if (!is_hardcore(grid, s)) {
      reason = "hard-core";
    } else if (i > 0 && s.hamming(path.states[i - 1]) > 1) {
      reason = "jump";
    }
    if (!reason.empty()) {
      out.valid = false;
      out.index = static_cast<std::ptrdiff_t>(i);
      out.reason = reason;
      return out;
    }
  }
  return out;
}

Path reduce_by_rows(const Grid& grid, const Configuration& sigma, Component target, int stripe) {
  check_size(grid, sigma);
  std::vector<SiteIndex> bad;
  for (SiteIndex v : occupied_in(sigma, horizontal_stripe(grid, stripe))) {
    if (grid.component(v) != target) bad.push_back(v);
  }
  if (!bad.empty()) {
    throw PreconditionError("rows algorithm towards " + std::string(1, stable_label(target)) +
                                " needs only " + component_letter(target) +
                                " particles on stripe S_" + std::to_string(stripe),
                            bad);
  }
  const auto g = conjugator(grid, target);
  Builder b(induced(g, sigma));
  rows_towards_b(grid, b, stripe);
  return map_path(g, b.take());
}

int default_first_column(Component target) {
  return (static_cast<int>(target) + 1) % 3;
}

Component case_a_trigger(Component target) {
  // In the b frame the trigger is a full C column; conjugate it.
  return target == Component::C ? Component::B : Component::C;
}

Path reduce_by_columns(const Grid& grid, const Configuration& sigma, Component target) {
  return reduce_by_columns(grid, sigma, target, default_first_column(target));
}

Path reduce_by_columns(const Grid& grid, const Configuration& sigma, Component target,
                       int first_column) {
  check_size(grid, sigma);
  const int f = grid.wrap_col(first_column);
  if (f % 3 != default_first_column(target)) {
    throw std::invalid_argument("first column for target " + std::string(1, stable_label(target)) +
                                " must be congruent to " +
                                std::to_string(default_first_column(target)) + " mod 3");
  }
  auto bad = occupied_in(sigma, column_list(grid, f));
  const auto more = occupied_in(sigma, column_list(grid, f + 1));
  bad.insert(bad.end(), more.begin(), more.end());
  if (!bad.empty()) {
    throw PreconditionError("columns algorithm needs columns " + std::to_string(f) + " and " +
                                std::to_string(grid.wrap_col(f + 1)) + " empty",
                            bad);
  }
  const auto g = conjugator(grid, target);
  // Columns f, f + 1 map onto a pair of columns; its B-frame first column is
  // the one congruent to 2 mod 3.
  int f_frame = grid.site(g(grid.column_sites(f)[0])).col;
  if (f_frame % 3 != 2) f_frame = grid.site(g(grid.column_sites(grid.wrap_col(f + 1))[0])).col;
  Builder b(induced(g, sigma));
  columns_towards_b(grid, b, f_frame);
  return map_path(g, b.take());
}

void append_path(Path& p, const Path& q) {
  if (q.states.empty()) return;
  if (p.states.empty()) {
    p = q;
    return;
  }
  if (!(p.states.back() == q.states.front())) {
    throw std::invalid_argument("paths do not share an endpoint");
  }
  const std::size_t shift = p.states.size() - 1;
  p.states.insert(p.states.end(), q.states.begin() + 1, q.states.end());
  for (auto st : q.stages) {
    st.begin += shift;
    st.end += shift;
    p.stages.push_back(st);
  }
}

namespace {

Path remove_all(const Configuration& sigma, const std::vector<SiteIndex>& sites) {
  Builder b(sigma);
  b.begin('p');
  for (SiteIndex v : sites) {
    if (b.current().test(v)) b.remove(v);
  }
  b.end();
  return b.take();
}

Path reference_a_to_b(const Grid& grid) {
  const auto a = stable_config(grid, Component::A);
  Path path;
  if (grid.K() <= 2 * grid.L()) {
    path = remove_all(a, column_list(grid, 3));
    append_path(path, reduce_by_columns(grid, path.back(), Component::B, 2));
  } else {
    path = remove_all(a, horizontal_stripe(grid, 0));
    append_path(path, reduce_by_rows(grid, path.back(), Component::B, 0));
  }
  return path;
}

}  // namespace

Path reference_path(const Grid& grid, Component from, Component to) {
  if (from == to) throw std::invalid_argument("reference path needs distinct endpoints");
  const auto g = relabeling(grid, Component::A, from, Component::B, to);
  return map_path(g, reference_a_to_b(grid));
}

Path descend_to_stable(const Grid& grid, const Configuration& sigma) {
  check_size(grid, sigma);
  if (stable_index(grid, sigma) >= 0) {
    throw std::invalid_argument("configuration is already stable");
  }
  if (grid.K() <= 2 * grid.L()) {
    const auto bridges = detect_bridges(grid, sigma);
    if (!bridges.full_columns.empty()) {
      const int q = bridges.full_columns.front();
      return reduce_by_columns(grid, sigma, static_cast<Component>(q % 3), q + 1);
    }
    for (int j = 0; j < 2 * grid.L(); ++j) {
      if (delta_H_vertical(grid, sigma, 3 * j + 1) <= 0) continue;
      auto sites = column_list(grid, 3 * j + 2);
      const auto next = column_list(grid, 3 * j + 3);
      sites.insert(sites.end(), next.begin(), next.end());
      Path path = remove_all(sigma, sites);
      append_path(path, reduce_by_columns(grid, path.back(), Component::B, 3 * j + 2));
      return path;
    }
    throw std::logic_error("no vertical stripe with positive energy difference");
  }
  const auto bridges = detect_bridges(grid, sigma);
  for (int k = 0; k < grid.K(); ++k) {
    if (has_horizontal_bridge(bridges, k)) continue;
    Path path = remove_all(sigma, horizontal_stripe(grid, k));
    append_path(path, reduce_by_rows(grid, path.back(), Component::B, k));
    return path;
  }
  throw std::logic_error("every horizontal stripe carries a bridge");
}

std::string path_to_json(const Path& path) {
  nlohmann::ordered_json j;
  j["height"] = path.states.empty() ? 0 : path.height();
  j["moves"] = path.moves();
  auto& states = j["states"] = nlohmann::ordered_json::array();
  auto& prof = j["energy"] = nlohmann::ordered_json::array();
  for (const auto& s : path.states) {
    states.push_back(to_hex(s));
    prof.push_back(energy(s));
  }
  auto& stages = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& st : path.stages) {
    stages.push_back({{"begin", st.begin}, {"end", st.end}, {"kind", std::string(1, st.kind)}});
  }
  return j.dump(2);
}

}  // namespace hardhex
