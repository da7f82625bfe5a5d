#include "hardhex/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace hardhex {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void check_targets(const Configuration& start, const std::vector<Configuration>& targets) {
  if (targets.empty()) throw std::invalid_argument("target set is empty");
  for (const auto& t : targets) {
    if (t.size() != start.size()) throw std::invalid_argument("target size mismatch");
    if (t == start) throw std::invalid_argument("start state belongs to the target set");
  }
}

int find_code(const std::vector<std::uint64_t>& codes, std::uint64_t s) {
  for (std::size_t k = 0; k < codes.size(); ++k) {
    if (codes[k] == s) return static_cast<int>(k);
  }
  return -1;
}

int find_config(const std::vector<Configuration>& targets, const Configuration& s, int count) {
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k].count() == count && targets[k] == s) return static_cast<int>(k);
  }
  return -1;
}

std::vector<std::uint64_t> codes_of(const std::vector<Configuration>& v) {
  std::vector<std::uint64_t> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(c.code());
  return out;
}

// Runs body(i) for i in [0, n) over `workers` threads; slot i is written by
// exactly one thread.
template <class Body>
void parallel_for(int n, int workers, Body body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  const std::uint64_t base = splitmix64(s);
  std::uint64_t t = base ^ (index * 0xD1B54A32D192ED03ULL);
  splitmix64(t);
  return splitmix64(t);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64(sm);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

MetropolisKernel::MetropolisKernel(const Grid& grid, double beta)
    : grid_(&grid), beta_(beta), n_(static_cast<std::uint64_t>(grid.size())) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
  // e^-beta * 2^64, floored; beta = 0 accepts every removal.
  const double scaled = std::ldexp(std::exp(-beta), 64);
  always_remove_ = scaled >= 0x1.0p64;
  remove_threshold_ = always_remove_ ? 0 : static_cast<std::uint64_t>(scaled);
  if (grid.size() <= 64) {
    nbr_mask_.resize(n_);
    for (SiteIndex v = 0; v < grid.size(); ++v) {
      std::uint64_t m = 0;
      for (SiteIndex w : grid.neighbors(v)) m |= std::uint64_t{1} << w;
      nbr_mask_[static_cast<std::size_t>(v)] = m;
    }
  }
}

int MetropolisKernel::step(Configuration& sigma, Rng& rng) const {
  const auto v = static_cast<SiteIndex>(rng.below(n_));
  if (sigma.test(v)) {
    if (always_remove_ || rng() < remove_threshold_) {
      sigma.reset(v);
      return -1;
    }
    return 0;
  }
  for (SiteIndex w : grid_->neighbors(v)) {
    if (sigma.test(w)) return 0;
  }
  sigma.set(v);
  return +1;
}

double transition_prob(const Grid& grid, const Configuration& sigma, const Configuration& next,
                       double beta) {
  const double n = grid.size();
  const double removal = std::exp(-beta) / n;
  const int d = sigma.hamming(next);
  if (d > 1) return 0.0;
  if (d == 1) {
    if (!is_hardcore(grid, next)) return 0.0;
    return next.count() > sigma.count() ? 1.0 / n : removal;
  }
  double off = 0.0;
  for (SiteIndex v = 0; v < grid.size(); ++v) {
    if (sigma.test(v)) {
      off += removal;
      continue;
    }
    bool free = true;
    for (SiteIndex w : grid.neighbors(v)) free = free && !sigma.test(w);
    if (free) off += 1.0 / n;
  }
  return 1.0 - off;
}

HittingSample sample_hitting_time(const MetropolisKernel& kernel, const Configuration& start,
                                  const std::vector<Configuration>& targets, Rng& rng,
                                  std::uint64_t cap) {
  check_targets(start, targets);
  HittingSample out;
  if (start.size() <= 64) {
    const auto codes = codes_of(targets);
    std::uint64_t s = start.code();
    for (std::uint64_t t = 1; t <= cap; ++t) {
      if (kernel.step(s, rng) == 0) continue;
      const int k = find_code(codes, s);
      if (k >= 0) return {t, k, false};
    }
  } else {
    Configuration s = start;
    int count = s.count();
    for (std::uint64_t t = 1; t <= cap; ++t) {
      const int d = kernel.step(s, rng);
      if (d == 0) continue;
      count += d;
      const int k = find_config(targets, s, count);
      if (k >= 0) return {t, k, false};
    }
  }
  out.steps = cap;
  out.truncated = true;
  return out;
}

NestedSample sample_nested_hitting(const MetropolisKernel& kernel, const Configuration& start,
                                   const std::vector<Configuration>& wide,
                                   const std::vector<Configuration>& narrow, Rng& rng,
                                   std::uint64_t cap) {
  check_targets(start, wide);
  check_targets(start, narrow);
  for (const auto& t : narrow) {
    if (find_config(wide, t, t.count()) < 0) {
      throw std::invalid_argument("narrow target set is not contained in the wide one");
    }
  }
  NestedSample out;
  out.wide.truncated = out.narrow.truncated = true;
  out.wide.steps = out.narrow.steps = cap;
  bool wide_done = false;
  auto record = [&](std::uint64_t t, int kw, int kn) {
    if (!wide_done && kw >= 0) {
      out.wide = {t, kw, false};
      wide_done = true;
    }
    if (kn >= 0) {
      out.narrow = {t, kn, false};
      return true;
    }
    return false;
  };
  if (start.size() <= 64) {
    const auto wc = codes_of(wide);
    const auto nc = codes_of(narrow);
    std::uint64_t s = start.code();
    for (std::uint64_t t = 1; t <= cap; ++t) {
      if (kernel.step(s, rng) == 0) continue;
      const int kw = find_code(wc, s);
      if (kw < 0) continue;
      if (record(t, kw, find_code(nc, s))) break;
    }
  } else {
    Configuration s = start;
    int count = s.count();
    for (std::uint64_t t = 1; t <= cap; ++t) {
      const int d = kernel.step(s, rng);
      if (d == 0) continue;
      count += d;
      const int kw = find_config(wide, s, count);
      if (kw < 0) continue;
      if (record(t, kw, find_config(narrow, s, count))) break;
    }
  }
  return out;
}

std::vector<HittingSample> run_batch(const Grid& grid, const Configuration& start,
                                     const std::vector<Configuration>& targets,
                                     const DynamicsParams& params, int n_samples,
                                     const BatchOptions& options) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  check_targets(start, targets);
  const MetropolisKernel kernel(grid, params.beta);
  std::vector<HittingSample> out(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, options.workers, [&](int i) {
    Rng rng(substream_seed(params.seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = sample_hitting_time(kernel, start, targets, rng, options.cap);
  });
  return out;
}

std::vector<NestedSample> run_nested_batch(const Grid& grid, const Configuration& start,
                                           const std::vector<Configuration>& wide,
                                           const std::vector<Configuration>& narrow,
                                           const DynamicsParams& params, int n_samples,
                                           const BatchOptions& options) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  const MetropolisKernel kernel(grid, params.beta);
  std::vector<NestedSample> out(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, options.workers, [&](int i) {
    Rng rng(substream_seed(params.seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] =
        sample_nested_hitting(kernel, start, wide, narrow, rng, options.cap);
  });
  return out;
}

}  // namespace hardhex
