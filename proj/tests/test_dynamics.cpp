#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hardhex/dynamics.hpp"
#include "hardhex/landscape.hpp"
#include "hardhex/stats.hpp"
#include "oracles.hpp"

using namespace hardhex;

namespace {

std::vector<Configuration> all_states(const Grid& g) {
  const oracle::Torus t(g.K(), g.L());
  std::vector<Configuration> out;
  for (auto code : oracle::naive_states(t)) out.push_back(Configuration::from_code(g.size(), code));
  return out;
}

}  // namespace

TEST_CASE("rng streams") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    (void)c;
  }
  CHECK(Rng(42)() != Rng(43)());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(substream_seed(7, i));
  CHECK(seeds.size() == 1000);
  Rng r(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.below(7);
    REQUIRE(x < 7);
    ++hist[x];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("one-step probabilities match the oracle matrix") {
  const Grid g = build_grid({2, 1});
  const oracle::Torus t(2, 1);
  const oracle::StateSpace space(t, oracle::naive_states(t));
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    CAPTURE(beta);
    const auto p = space.transition(beta);
    double worst = 0.0;
    for (int i = 0; i < space.size(); ++i) {
      const auto si = Configuration::from_code(g.size(), space.code(i));
      double row = 0.0;
      for (int j = 0; j < space.size(); ++j) {
        const auto sj = Configuration::from_code(g.size(), space.code(j));
        const double q = transition_prob(g, si, sj, beta);
        row += q;
        worst = std::max(worst, std::abs(q - p(i, j)));
        // One step reaches exactly the hard-core Hamming neighbours and itself.
        if (si.hamming(sj) == 1) {
          CHECK(q > 0.0);
        } else if (i != j) {
          CHECK(q == 0.0);
        }
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(worst < 1e-15);
  }
}

TEST_CASE("transition probabilities: additions, removals, detailed balance") {
  using big = boost::multiprecision::cpp_bin_float_50;
  const Grid g = build_grid({2, 1});
  const auto states = all_states(g);
  const double n = g.size();
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    for (const auto& s : states) {
      for (SiteIndex v = 0; v < g.size(); ++v) {
        if (s.test(v)) continue;
        auto up = s;
        up.set(v);
        if (!is_hardcore(g, up)) continue;
        const double add = transition_prob(g, s, up, beta);
        const double rem = transition_prob(g, up, s, beta);
        CHECK(add == 1.0 / n);
        CHECK(rem == doctest::Approx(std::exp(-beta) / n).epsilon(1e-15));
        // mu(s) P(s, up) = mu(up) P(up, s) with mu proportional to e^{-beta H}.
        const big lhs = exp(big(-beta * energy(s))) * big(add);
        const big rhs = exp(big(-beta * energy(up))) * big(rem);
        CHECK(static_cast<double>(abs(lhs - rhs) / lhs) < 1e-15);
      }
    }
  }
}

TEST_CASE("kernel step frequencies agree with transition_prob") {
  const Grid g = build_grid({2, 1});
  const auto states = all_states(g);
  const double beta = 0.7;
  const MetropolisKernel kernel(g, beta);
  Rng pick(99);
  for (int trial = 0; trial < 5; ++trial) {
    const auto& s = states[pick.below(states.size())];
    std::map<std::uint64_t, int> counts;
    const int draws = 200000;
    Rng rng(substream_seed(1234, static_cast<std::uint64_t>(trial)));
    for (int i = 0; i < draws; ++i) {
      if (i % 2 == 0) {
        auto x = s;
        kernel.step(x, rng);
        ++counts[x.code()];
      } else {
        std::uint64_t x = s.code();
        kernel.step(x, rng);
        ++counts[x];
      }
    }
    double chi2 = 0.0;
    int cells = 0;
    for (const auto& t : states) {
      const double p = transition_prob(g, s, t, beta);
      if (p == 0.0) {
        CHECK(counts.count(t.code()) == 0);
        continue;
      }
      const double e = p * draws;
      const double o = counts.count(t.code()) ? counts[t.code()] : 0;
      chi2 += (o - e) * (o - e) / e;
      ++cells;
    }
    const boost::math::chi_squared dist(cells - 1);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);
  }
}

TEST_CASE("beta = 0 always removes; large beta freezes a") {
  const Grid g = build_grid({2, 2});
  const MetropolisKernel hot(g, 0.0);
  Rng rng(5);
  auto a = stable_config(g, Component::A);
  int removed = 0, picked = 0;
  for (int i = 0; i < 10000; ++i) {
    auto x = a;
    const int r = hot.step(x, rng);
    if (r == -1) ++removed;
    if (x.count() != a.count()) ++picked;
  }
  // From a every particle pick is accepted and vacancies are blocked.
  CHECK(removed == picked);
  CHECK(std::abs(removed - 10000 / 3) < 200);

  const MetropolisKernel cold(g, 60.0);
  auto x = a.code();
  for (int i = 0; i < 100000; ++i) cold.step(x, rng);
  CHECK(x == a.code());
}

TEST_CASE("irreducible and aperiodic on the enumerated space") {
  const oracle::Torus t(2, 1);
  const oracle::StateSpace space(t, oracle::naive_states(t));
  const auto p = space.transition(1.0);
  std::vector<char> seen(static_cast<std::size_t>(space.size()), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < space.size(); ++j) {
      if (p(i, j) > 0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        stack.push_back(j);
      }
    }
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == space.size());
  bool loop = false;
  for (int i = 0; i < space.size(); ++i) loop = loop || p(i, i) > 0;
  CHECK(loop);
}

TEST_CASE("batches are deterministic and independent of the worker count") {
  const Grid g = build_grid({2, 2});
  const auto s = stable_configs(g);
  const DynamicsParams params{1.5, 777};
  const auto one = run_batch(g, s[0], {s[1], s[2]}, params, 64, {kDefaultStepCap, 1});
  const auto many = run_batch(g, s[0], {s[1], s[2]}, params, 64, {kDefaultStepCap, 8});
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].steps == many[i].steps);
    CHECK(one[i].hit_index == many[i].hit_index);
  }
  const auto nested = run_nested_batch(g, s[0], {s[1], s[2]}, {s[1]}, params, 64, {kDefaultStepCap, 3});
  for (const auto& n : nested) {
    CHECK(n.wide.steps <= n.narrow.steps);
    CHECK(n.narrow.hit_index == 0);
  }
  // The wide part of a nested run is the plain run of the same stream.
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(nested[i].wide.steps == one[i].steps);

  CHECK_THROWS_AS(run_batch(g, s[0], {s[1]}, params, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_batch(g, s[0], {s[0]}, params, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_batch(g, s[0], {}, params, 1), std::invalid_argument);
}

TEST_CASE("step cap truncates and reports") {
  const Grid g = build_grid({2, 2});
  const auto s = stable_configs(g);
  const auto r = run_batch(g, s[0], {s[1], s[2]}, {3.0, 1}, 10, {1000, 1});
  for (const auto& h : r) {
    CHECK(h.truncated);
    CHECK(h.hit_index == -1);
    CHECK(h.steps == 1000);
  }
}

TEST_CASE("one-step hitting at beta = 0") {
  const Grid g = build_grid({2, 1});
  const auto a = stable_config(g, Component::A);
  auto start = a;
  start.reset(g.component_sites(Component::A)[0]);
  const int n = 40000;
  const auto r = run_batch(g, start, {a}, {0.0, 11}, n);
  int ones = 0;
  for (const auto& h : r) ones += h.steps == 1;
  // Exactly one proposal (re-filling the vacancy) enters {a}.
  const double p = transition_prob(g, start, a, 0.0);
  CHECK(p == 1.0 / g.size());
  CHECK(stats::binomial_two_sided_p(static_cast<std::uint64_t>(ones), n, p) > 0.001);
}

TEST_CASE("first removal from a takes about N e^beta steps") {
  const Grid g = build_grid({2, 1});
  const auto index = enumerate(g);
  const auto a = stable_config(g, Component::A);
  auto a1 = a;
  a1.reset(g.component_sites(Component::A)[2]);

  // The mean also carries rare detours through the other basins, which cost
  // a tunneling time each; the typical scale shows in the median.
  const double beta = 5.0;
  const double scale = g.size() * std::exp(beta);
  const auto r = run_batch(g, a, {a1}, {beta, 2024}, 4000);
  std::vector<double> x;
  for (const auto& h : r) x.push_back(static_cast<double>(h.steps));
  std::nth_element(x.begin(), x.begin() + 2000, x.end());
  CHECK(std::abs(x[2000] - std::log(2.0) * scale) / (std::log(2.0) * scale) < 0.1);
  CHECK(exact_mean_hitting(index, beta, index.id_of(a), {index.id_of(a1)}) > scale);

  // At beta = 1 the mean itself is within reach of the sample.
  const double exact = exact_mean_hitting(index, 1.0, index.id_of(a), {index.id_of(a1)});
  const auto r1 = run_batch(g, a, {a1}, {1.0, 2024}, 40000);
  std::vector<double> y;
  for (const auto& h : r1) y.push_back(static_cast<double>(h.steps));
  const auto m = stats::moments(y);
  CHECK(std::abs(m.mean - exact) < 3 * m.standard_error());
}

TEST_CASE("Monte Carlo mean tunneling time matches the linear system on 4x6") {
  const Grid g = build_grid({2, 2});
  const auto index = enumerate(g);
  const double beta = 2.0;
  const auto s = stable_configs(g);
  const double exact = exact_mean_hitting(index, beta, index.stable_id(Component::A),
                                          {index.stable_id(Component::B), index.stable_id(Component::C)});
  CHECK(exact == doctest::Approx(7845.78).epsilon(1e-5));
  const auto r = run_batch(g, s[0], {s[1], s[2]}, {beta, 31337}, 10000);
  std::vector<double> x;
  for (const auto& h : r) {
    REQUIRE_FALSE(h.truncated);
    x.push_back(static_cast<double>(h.steps));
  }
  const auto m = stats::moments(x);
  CHECK(std::abs(m.mean - exact) < 3 * m.standard_error());
}
