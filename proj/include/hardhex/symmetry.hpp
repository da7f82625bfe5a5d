// Permutations of the state space induced by grid automorphisms, exact
// checks that they are automorphisms of the state graph, and the
// statistical tests of the hitting-time symmetries.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardhex/configuration.hpp"
#include "hardhex/landscape.hpp"
#include "hardhex/lattice.hpp"

namespace hardhex {

/// (xi-bar sigma)(v) = sigma(xi(v)).
Configuration induced(const Automorphism& xi, const Configuration& sigma);

/// Image id of every state, -1 where the image is not an enumerated state.
std::vector<int> induced_state_permutation(const LandscapeIndex& index, const Automorphism& xi);

/// True iff xi-bar permutes the states and preserves both the energy and the
/// single-site move relation.
bool verify_state_automorphism(const LandscapeIndex& index, const Automorphism& xi);

/// The six maps id, xi_ab, xi_ac, xi_bc, xi_ab*xi_ac, xi_ac*xi_ab.
std::vector<Automorphism> axial_group(const Grid& grid);

/// A map g among axial_group(grid) whose induced permutation sends the
/// stable configuration of x0 to that of y0 and of x1 to that of y1.
Automorphism relabeling(const Grid& grid, Component x0, Component y0, Component x1, Component y1);

/// Exit distribution over {b, c} from a, by the absorbing linear system.
std::vector<double> exact_hitting_distribution(const LandscapeIndex& index, double beta);

struct CouplingReport {
  double beta = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  int hits_b = 0;
  int hits_c = 0;
  int truncated = 0;
  double binomial_p = 1.0;
  /// Two-sample KS between tau_a->{b,c} and tau_b->{a,c}.
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  /// Chi-square of independence between the exit state and a median split
  /// of tau_a->{b,c}.
  double chi2_statistic = 0.0;
  double chi2_p = 1.0;
  double median = 0.0;
  bool passed(double alpha) const {
    return truncated == 0 && binomial_p > alpha && ks_p > alpha && chi2_p > alpha;
  }
};

struct CouplingOptions {
  int workers = 1;
  std::uint64_t cap = 10'000'000'000ULL;
};

/// Throws std::invalid_argument for fewer than 100 samples or beta <= 0.
CouplingReport coupling_checks(const Grid& grid, double beta, int n_samples, std::uint64_t seed,
                               const CouplingOptions& options = {});

}  // namespace hardhex
