// Exact analysis of enumerable grids: the full hard-core state space, its
// minimax communication heights, the structural checks on the stable set,
// hitting-time linear systems, the spectral gap and the mixing time.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "hardhex/configuration.hpp"
#include "hardhex/lattice.hpp"

namespace hardhex {

inline constexpr int kDefaultEnumerationLimit = 30;

/// Every hard-core configuration of a grid, identified by its 64-bit code.
/// State ids follow increasing code order.
class LandscapeIndex {
 public:
  /// codes must be sorted and closed under removal of particles.
  LandscapeIndex(const Grid& grid, std::vector<std::uint64_t> sorted_codes);

  const GridSpec& spec() const { return spec_; }
  int n_sites() const { return n_sites_; }
  int size() const { return static_cast<int>(codes_.size()); }

  std::uint64_t code(int id) const { return codes_[static_cast<std::size_t>(id)]; }
  int energy(int id) const { return energy_[static_cast<std::size_t>(id)]; }
  Configuration config(int id) const { return Configuration::from_code(n_sites_, code(id)); }
  /// -1 when the code is not an enumerated state.
  int id_of(std::uint64_t code) const;
  int id_of(const Configuration& sigma) const { return id_of(sigma.code()); }

  /// States at Hamming distance one.
  std::span<const int> moves(int id) const {
    return {moves_.data() + offsets_[static_cast<std::size_t>(id)],
            moves_.data() + offsets_[static_cast<std::size_t>(id) + 1]};
  }
  std::size_t move_count() const { return moves_.size(); }

  /// Ids of a, b, c.
  const std::array<int, 3>& stable() const { return stable_; }
  int stable_id(Component x) const { return stable_[static_cast<std::size_t>(x)]; }
  int empty_id() const { return empty_; }
  int min_energy() const { return min_energy_; }
  int max_energy() const { return 0; }

 private:
  GridSpec spec_;
  int n_sites_;
  std::vector<std::uint64_t> codes_;
  std::vector<int> energy_;
  std::vector<std::size_t> offsets_;
  std::vector<int> moves_;
  std::array<int, 3> stable_{};
  int empty_ = -1;
  int min_energy_ = 0;
};

/// Backtracking enumeration of independent sets. Throws std::length_error
/// for grids with more than site_limit sites (or more than 64).
LandscapeIndex enumerate(const Grid& grid, int site_limit = kDefaultEnumerationLimit);

/// Human-readable name: "a", "b", "c", "empty" or the hex code.
std::string state_label(const LandscapeIndex& index, int id);

// ---------------------------------------------------------------------------
// Communication heights
// ---------------------------------------------------------------------------

/// Phi(A, B): the least h such that some state of A and some state of B are
/// joined by a path staying at energies <= h. Throws std::invalid_argument if
/// a set is empty or the two intersect.
int comm_height(const LandscapeIndex& index, const std::vector<int>& source,
                const std::vector<int>& target);

/// Phi(sigma, A) for every state sigma (H(sigma) for sigma in A).
std::vector<int> comm_heights_to(const LandscapeIndex& index, const std::vector<int>& target);

struct Clause {
  std::string name;
  bool expected = true;  // the value the theory predicts
  bool value = false;    // what was observed
  std::string detail;
  bool passed() const { return value == expected; }
};

struct StructureReport {
  GridSpec spec;
  int state_count = 0;
  int gamma = 0;  // min{K, 2L} + 1
  std::vector<int> stable_set;
  /// Phi(a,b) - H(a), Phi(a,c) - H(a), Phi(b,c) - H(b).
  std::array<int, 3> phi_gaps{};
  /// max over sigma outside {a,b,c} of Phi(sigma, {a,b,c}) - H(sigma).
  int max_depth_outside = 0;
  int max_depth_witness = -1;
  /// max over sigma != b of Phi(sigma, b) - H(sigma).
  int max_depth_to_b = 0;
  std::vector<Clause> clauses;
  bool all_passed() const;
};

/// sigma's barrier to A is maximal over the states outside A.
bool condition_pe(const LandscapeIndex& index, int sigma, const std::vector<int>& target);
/// sigma's barrier to A strictly exceeds every other state's barrier to
/// A u {sigma}.
bool condition_ae(const LandscapeIndex& index, int sigma, const std::vector<int>& target);

StructureReport verify_structure(const LandscapeIndex& index);

// ---------------------------------------------------------------------------
// Markov chain
// ---------------------------------------------------------------------------

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-stochastic P_beta over the enumerated states.
SparseMatrix transition_matrix(const LandscapeIndex& index, double beta);
/// mu_beta(sigma) proportional to exp(-beta H(sigma)).
Eigen::VectorXd stationary_distribution(const LandscapeIndex& index, double beta);

/// E[tau_A] from every state (0 on A), from the absorbing linear system.
Eigen::VectorXd mean_hitting_times(const LandscapeIndex& index, double beta,
                                   const std::vector<int>& target);
double exact_mean_hitting(const LandscapeIndex& index, double beta, int start,
                          const std::vector<int>& target);

/// P(X_{tau_A} = target[k] | X_0 = start) for each k.
std::vector<double> absorption_probabilities(const LandscapeIndex& index, double beta, int start,
                                             const std::vector<int>& target);

/// Survival function P(tau_A > t | X_0 = start) for t = 0..t_max.
std::vector<double> hitting_survival(const LandscapeIndex& index, double beta, int start,
                                     const std::vector<int>& target, std::size_t t_max);

struct SpectralGapResult {
  double rho = 0.0;     // 1 - alpha_2
  double alpha2 = 0.0;  // second-largest eigenvalue of P_beta
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct LanczosOptions {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: dimension of the state space
};

/// Lanczos with full reorthogonalisation on I - D^{1/2} P D^{-1/2}, restricted
/// to the complement of sqrt(mu).
SpectralGapResult spectral_gap_detail(const LandscapeIndex& index, double beta,
                                      const LanczosOptions& options = {});
/// Throws std::runtime_error when Lanczos does not reach the tolerance.
double spectral_gap(const LandscapeIndex& index, double beta);

struct MixingOptions {
  std::uint64_t cap = std::uint64_t{1} << 40;
  /// Up to this many states the powers of P are formed densely.
  int dense_limit = 1024;
  /// Above this many states only a, b, c and the empty configuration are
  /// used as starts, which gives a lower bound.
  int all_starts_limit = 50'000;
};

struct MixingResult {
  std::uint64_t t_mix = 0;
  double tv_at = 0.0;      // worst TV distance after t_mix steps
  double tv_before = 1.0;  // worst TV distance after t_mix - 1 steps
  bool truncated = false;
  bool lower_bound = false;
  std::string mode;  // "dense-squaring" or "vector-iteration"
};

MixingResult mixing_time_detail(const LandscapeIndex& index, double beta, double eps,
                                const MixingOptions& options = {});
std::uint64_t mixing_time(const LandscapeIndex& index, double beta, double eps);

/// ||P^t(start, .) - mu||_TV for t = 0..t_max.
std::vector<double> tv_profile(const LandscapeIndex& index, double beta, int start,
                               std::size_t t_max);

}  // namespace hardhex
