#include "hardhex/symmetry.hpp"

#include <algorithm>
#include <stdexcept>

#include "hardhex/dynamics.hpp"
#include "hardhex/stats.hpp"

namespace hardhex {

Configuration induced(const Automorphism& xi, const Configuration& sigma) {
  if (xi.size() != static_cast<std::size_t>(sigma.size())) {
    throw std::invalid_argument("automorphism and configuration sizes differ");
  }
  Configuration out(sigma.size());
  for (SiteIndex v = 0; v < sigma.size(); ++v) {
    if (sigma.test(xi(v))) out.set(v);
  }
  return out;
}

std::vector<int> induced_state_permutation(const LandscapeIndex& index, const Automorphism& xi) {
  std::vector<int> image(static_cast<std::size_t>(index.size()));
  for (int id = 0; id < index.size(); ++id) {
    image[static_cast<std::size_t>(id)] = index.id_of(induced(xi, index.config(id)));
  }
  return image;
}

bool verify_state_automorphism(const LandscapeIndex& index, const Automorphism& xi) {
  if (xi.size() != static_cast<std::size_t>(index.n_sites())) return false;
  const auto image = induced_state_permutation(index, xi);
  std::vector<char> hit(image.size(), 0);
  for (int y : image) {
    if (y < 0 || hit[static_cast<std::size_t>(y)]) return false;
    hit[static_cast<std::size_t>(y)] = 1;
  }
  for (int x = 0; x < index.size(); ++x) {
    const int fx = image[static_cast<std::size_t>(x)];
    if (index.energy(fx) != index.energy(x)) return false;
    const auto mx = index.moves(x);
    const auto mfx = index.moves(fx);
    if (mx.size() != mfx.size()) return false;
    for (int y : mx) {
      const int fy = image[static_cast<std::size_t>(y)];
      if (std::find(mfx.begin(), mfx.end(), fy) == mfx.end()) return false;
    }
  }
  return true;
}

std::vector<Automorphism> axial_group(const Grid& grid) {
  const auto ax = axial_automorphisms(grid);
  return {identity_automorphism(grid), ax.ab, ax.ac, ax.bc, compose(ax.ab, ax.ac),
          compose(ax.ac, ax.ab)};
}

Automorphism relabeling(const Grid& grid, Component x0, Component y0, Component x1, Component y1) {
  const auto s = stable_configs(grid);
  auto cfg = [&](Component x) -> const Configuration& { return s[static_cast<std::size_t>(x)]; };
  for (const auto& g : axial_group(grid)) {
    if (induced(g, cfg(x0)) == cfg(y0) && induced(g, cfg(x1)) == cfg(y1)) return g;
  }
  throw std::invalid_argument("no axial map realises the requested relabeling");
}

std::vector<double> exact_hitting_distribution(const LandscapeIndex& index, double beta) {
  return absorption_probabilities(index, beta, index.stable_id(Component::A),
                                  {index.stable_id(Component::B), index.stable_id(Component::C)});
}

CouplingReport coupling_checks(const Grid& grid, double beta, int n_samples, std::uint64_t seed,
                               const CouplingOptions& options) {
  if (n_samples < 100) throw std::invalid_argument("coupling checks need at least 100 samples");
  if (!(beta > 0.0)) throw std::invalid_argument("coupling checks need beta > 0");
  const auto s = stable_configs(grid);
  const auto& a = s[0];
  const auto& b = s[1];
  const auto& c = s[2];
  const BatchOptions batch{options.cap, options.workers};

  CouplingReport rep;
  rep.beta = beta;
  rep.samples = n_samples;
  rep.seed = seed;
  const auto from_a = run_batch(grid, a, {b, c}, {beta, seed}, n_samples, batch);
  // The second family uses an unrelated stream family of the same seed.
  const auto from_b = run_batch(grid, b, {a, c}, {beta, seed ^ 0x6a09e667f3bcc909ULL}, n_samples, batch);

  std::vector<double> ta, tb;
  std::vector<int> exit_state;
  for (const auto& h : from_a) {
    if (h.truncated) {
      ++rep.truncated;
      continue;
    }
    ta.push_back(static_cast<double>(h.steps));
    exit_state.push_back(h.hit_index);
    (h.hit_index == 0 ? rep.hits_b : rep.hits_c) += 1;
  }
  for (const auto& h : from_b) {
    if (h.truncated) {
      ++rep.truncated;
      continue;
    }
    tb.push_back(static_cast<double>(h.steps));
  }
  if (ta.empty() || tb.empty()) return rep;

  rep.binomial_p = stats::binomial_two_sided_p(static_cast<std::uint64_t>(rep.hits_b),
                                               static_cast<std::uint64_t>(rep.hits_b + rep.hits_c), 0.5);
  const auto ks = stats::ks_two_sample(ta, tb);
  rep.ks_statistic = ks.statistic;
  rep.ks_p = ks.p_value;

  std::vector<double> sorted = ta;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  rep.median = sorted[sorted.size() / 2];
  double table[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t k = 0; k < ta.size(); ++k) {
    const int low = ta[k] < rep.median ? 0 : 1;
    table[exit_state[k]][low] += 1;
  }
  const auto chi = stats::chi_square_2x2(table[0][0], table[0][1], table[1][0], table[1][1]);
  rep.chi2_statistic = chi.statistic;
  rep.chi2_p = chi.p_value;
  return rep;
}

}  // namespace hardhex
