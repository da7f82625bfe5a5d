// Metropolis single-site dynamics of the hard-core model at inverse
// temperature beta, exact one-step probabilities and hitting-time sampling.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hardhex/configuration.hpp"
#include "hardhex/lattice.hpp"

namespace hardhex {

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// xoshiro256** seeded through splitmix64. Satisfies
/// UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform integer in [0, n) by multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t s_[4];
};

/// Identifier recorded in run metadata.
inline constexpr const char* kRngId = "xoshiro256starstar+splitmix64/substream-v1";

std::uint64_t splitmix64(std::uint64_t& state);
/// Seed of the index-th independent substream of a run seeded with seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

struct DynamicsParams {
  double beta = 0.0;
  std::uint64_t seed = 0;
};

class MetropolisKernel {
 public:
  MetropolisKernel(const Grid& grid, double beta);

  const Grid& grid() const { return *grid_; }
  double beta() const { return beta_; }

  /// One proposal: picks a site uniformly; an isolated vacancy is filled, a
  /// blocked vacancy stays, a particle leaves with probability e^-beta.
  /// Returns +1 / -1 for an addition / removal and 0 for a self-loop.
  int step(Configuration& sigma, Rng& rng) const;

  /// Same as step on a single-word state; requires grid().size() <= 64.
  int step(std::uint64_t& state, Rng& rng) const {
    const auto v = static_cast<unsigned>(rng.below(n_));
    const std::uint64_t bit = std::uint64_t{1} << v;
    if (state & bit) {
      if (always_remove_ || rng() < remove_threshold_) {
        state ^= bit;
        return -1;
      }
      return 0;
    }
    if (state & nbr_mask_[v]) return 0;
    state |= bit;
    return +1;
  }

 private:
  const Grid* grid_;
  double beta_;
  std::uint64_t n_;
  bool always_remove_;
  std::uint64_t remove_threshold_;     // accept a removal iff a u64 draw is below this
  std::vector<std::uint64_t> nbr_mask_;  // used only when N <= 64
};

/// P_beta(sigma, sigma'). Both arguments must be hard-core.
double transition_prob(const Grid& grid, const Configuration& sigma, const Configuration& next,
                       double beta);

// ---------------------------------------------------------------------------
// Hitting times
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000'000ULL;

struct HittingSample {
  std::uint64_t steps = 0;
  /// Position of the entered state in the target list, -1 when truncated.
  int hit_index = -1;
  bool truncated = false;
};

/// Two first-passage times of one trajectory into nested targets: the
/// first entrance into `wide`, and the first entrance into `narrow`, which
/// must be a subset of `wide`.
struct NestedSample {
  HittingSample wide;
  HittingSample narrow;
};

/// Runs the chain from start until it enters targets or the cap is reached.
/// Throws std::invalid_argument when start is a target or targets is empty.
HittingSample sample_hitting_time(const MetropolisKernel& kernel, const Configuration& start,
                                  const std::vector<Configuration>& targets, Rng& rng,
                                  std::uint64_t cap = kDefaultStepCap);

NestedSample sample_nested_hitting(const MetropolisKernel& kernel, const Configuration& start,
                                   const std::vector<Configuration>& wide,
                                   const std::vector<Configuration>& narrow, Rng& rng,
                                   std::uint64_t cap = kDefaultStepCap);

struct BatchOptions {
  std::uint64_t cap = kDefaultStepCap;
  int workers = 1;
};

/// Sample i uses Rng(substream_seed(params.seed, i)), so the result does not
/// depend on the worker count.
std::vector<HittingSample> run_batch(const Grid& grid, const Configuration& start,
                                     const std::vector<Configuration>& targets,
                                     const DynamicsParams& params, int n_samples,
                                     const BatchOptions& options = {});

std::vector<NestedSample> run_nested_batch(const Grid& grid, const Configuration& start,
                                           const std::vector<Configuration>& wide,
                                           const std::vector<Configuration>& narrow,
                                           const DynamicsParams& params, int n_samples,
                                           const BatchOptions& options = {});

}  // namespace hardhex
