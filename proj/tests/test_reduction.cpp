#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <json.hpp>

#include "hardhex/landscape.hpp"
#include "hardhex/reduction.hpp"
#include "path_checks.hpp"

using namespace hardhex;
using namespace pathcheck;

TEST_CASE("rows and columns algorithms on every valid start of 4x3") {
  const Grid g = build_grid({2, 1});
  const oracle::Torus t(2, 1);
  Tally rows, cols, cols_plain;
  int cols_plain_bad = 0;
  for (std::uint64_t code : oracle::naive_states(t)) {
    const auto sigma = Configuration::from_code(g.size(), code);
    for (Component target : kComponents) {
      for (int stripe = 0; stripe < g.K(); ++stripe) {
        bool ok = true;
        for (SiteIndex v : horizontal_stripe(g, stripe)) ok = ok && (!sigma.test(v) || g.component(v) == target);
        if (!ok) {
          CHECK_THROWS_AS(reduce_by_rows(g, sigma, target, stripe), PreconditionError);
          continue;
        }
        check_rows(g, t, reduce_by_rows(g, sigma, target, stripe), sigma, target, rows);
      }
      for (int f = default_first_column(target); f < g.columns(); f += 3) {
        bool empty = true;
        for (int c : {f, f + 1}) {
          for (SiteIndex v : g.column_sites(g.wrap_col(c))) empty = empty && !sigma.test(v);
        }
        if (!empty) {
          CHECK_THROWS_AS(reduce_by_columns(g, sigma, target, f), PreconditionError);
          continue;
        }
        const auto p = reduce_by_columns(g, sigma, target, f);
        check_columns(g, t, p, sigma, target, cols);
        if (!has_full_column(g, sigma, case_a_trigger(target))) {
          ++cols_plain.runs;
          cols_plain_bad += p.height() - energy(sigma) > 1;
        }
      }
    }
  }
  CHECK(rows.runs > 100);
  CHECK(rows.bad == 0);
  CHECK(cols.runs > 50);
  CHECK(cols.bad == 0);
  CHECK(cols_plain.runs > 0);
  CHECK(cols_plain_bad == 0);
}

TEST_CASE("1000 random valid starts on 4x6") {
  const Grid g = build_grid({2, 2});
  const oracle::Torus t(2, 2);
  std::mt19937_64 rng(8128);
  Tally rows, cols;
  for (int trial = 0; trial < 1000; ++trial) {
    const Component target = kComponents[static_cast<std::size_t>(rng() % 3)];
    auto s = random_hardcore(g, rng);
    // Rows: clear off-target particles from S_0.
    auto r = s;
    for (SiteIndex v : horizontal_stripe(g, 0)) {
      if (g.component(v) != target) r.reset(v);
    }
    check_rows(g, t, reduce_by_rows(g, r, target, 0), r, target, rows);
    // Columns: clear the two leading columns.
    const int f = default_first_column(target) + 3 * static_cast<int>(rng() % 4);
    auto c = s;
    for (int col : {f, f + 1}) {
      for (SiteIndex v : g.column_sites(g.wrap_col(col))) c.reset(v);
    }
    check_columns(g, t, reduce_by_columns(g, c, target, f), c, target, cols);
  }
  CHECK(rows.bad == 0);
  CHECK(cols.bad == 0);
}

TEST_CASE("starting at the target gives only void moves") {
  const Grid g = build_grid({2, 2});
  const auto b = stable_config(g, Component::B);
  const auto p = reduce_by_rows(g, b, Component::B);
  CHECK(p.height() == energy(b));
  for (const auto& s : p.states) CHECK(s == b);
  CHECK(p.stages.size() == 4);
}

TEST_CASE("b with one particle removed from row 2") {
  const Grid g = build_grid({2, 2});
  auto s = stable_config(g, Component::B);
  SiteIndex hole = -1;
  for (SiteIndex v : g.row_sites(2)) {
    if (g.component(v) == Component::B) {
      hole = v;
      break;
    }
  }
  REQUIRE(hole >= 0);
  s.reset(hole);
  const auto p = reduce_by_rows(g, s, Component::B);
  CHECK(validate_path(g, p).valid);
  CHECK(p.back() == stable_config(g, Component::B));
  CHECK(p.height() <= energy(s) + 1);
  CHECK(p.height() == energy(s));
}

TEST_CASE("case (a) fires on a full white column") {
  // 6x9 grid, target b, columns 2 and 3 empty, a full C column at c_8 and
  // scattered B particles on c_4.
  const Grid g = build_grid({3, 3});
  Configuration s(g.size());
  for (SiteIndex v : g.column_sites(8)) s.set(v);
  const auto c4 = g.column_sites(4);
  s.set(c4[0]);
  s.set(c4[2]);
  REQUIRE(is_hardcore(g, s));
  const auto p = reduce_by_columns(g, s, Component::B, 2);
  CHECK(validate_path(g, p).valid);
  CHECK(p.back() == stable_config(g, Component::B));
  REQUIRE(p.stages.size() == 6);
  CHECK(p.stages[0].kind == 'b');
  CHECK(p.stages[1].kind == 'a');
  for (std::size_t k = 2; k < p.stages.size(); ++k) CHECK(p.stages[k].kind == 'b');
  CHECK(local_height(p, p.stages[1]) == energy(p.states[p.stages[1].begin]) + 2);
  CHECK(p.height() <= energy(s) + 2);

  // The other targets use their own trigger colours.
  CHECK(case_a_trigger(Component::B) == Component::C);
  CHECK(case_a_trigger(Component::A) == Component::C);
  CHECK(case_a_trigger(Component::C) == Component::B);
}

TEST_CASE("no vertical bridge keeps the columns path within one of H") {
  const Grid g = build_grid({2, 2});
  std::mt19937_64 rng(99);
  int tried = 0;
  for (int trial = 0; trial < 2000 && tried < 300; ++trial) {
    auto s = random_hardcore(g, rng);
    for (int col : {2, 3}) {
      for (SiteIndex v : g.column_sites(col)) s.reset(v);
    }
    if (!detect_bridges(g, s).vertical.empty()) continue;
    ++tried;
    const auto p = reduce_by_columns(g, s, Component::B);
    CHECK(p.height() - energy(s) <= 1);
  }
  CHECK(tried == 300);
}

TEST_CASE("reference paths attain the communication height") {
  for (const GridSpec spec : {GridSpec{2, 1}, GridSpec{2, 2}, GridSpec{3, 1}}) {
    CAPTURE(spec.K);
    CAPTURE(spec.L);
    const Grid g = build_grid(spec);
    const auto index = enumerate(g);
    const int gap = gamma(spec);
    for (Component from : kComponents) {
      for (Component to : kComponents) {
        if (from == to) continue;
        const auto p = reference_path(g, from, to);
        CHECK(validate_path(g, p).valid);
        CHECK(p.front() == stable_config(g, from));
        CHECK(p.back() == stable_config(g, to));
        CHECK(p.height() - energy(p.front()) == gap);
        CHECK(p.height() == comm_height(index, {index.stable_id(from)}, {index.stable_id(to)}));
      }
    }
  }
  // Rows branch when K > 2L, columns branch otherwise.
  const auto rows = reference_path(build_grid({3, 1}), Component::A, Component::B);
  CHECK(std::any_of(rows.stages.begin(), rows.stages.end(), [](const Path::Stage& s) { return s.kind == 'r'; }));
  const auto cols = reference_path(build_grid({2, 2}), Component::A, Component::B);
  CHECK(std::none_of(cols.stages.begin(), cols.stages.end(), [](const Path::Stage& s) { return s.kind == 'r'; }));
  // Larger grids, beyond enumeration.
  for (const GridSpec spec : {GridSpec{3, 3}, GridSpec{5, 1}, GridSpec{4, 3}, GridSpec{6, 2}}) {
    const Grid g = build_grid(spec);
    const auto p = reference_path(g, Component::A, Component::B);
    CHECK(validate_path(g, p).valid);
    CHECK(p.height() - energy(p.front()) == gamma(spec));
  }
  CHECK_THROWS_AS(reference_path(build_grid({2, 2}), Component::A, Component::A), std::invalid_argument);
}

TEST_CASE("descent from every non-stable state of 4x3") {
  const Grid g = build_grid({2, 1});
  const oracle::Torus t(2, 1);
  const int bound = std::min(g.K(), 2 * g.L());
  int bad = 0, runs = 0;
  for (std::uint64_t code : oracle::naive_states(t)) {
    const auto sigma = Configuration::from_code(g.size(), code);
    if (stable_index(g, sigma) >= 0) {
      CHECK_THROWS_AS(descend_to_stable(g, sigma), std::invalid_argument);
      continue;
    }
    ++runs;
    const auto p = descend_to_stable(g, sigma);
    bad += !validate_path(g, p).valid || !oracle_valid(t, p);
    bad += !(p.front() == sigma);
    bad += stable_index(g, p.back()) < 0;
    bad += p.height() - energy(sigma) > bound;
  }
  CHECK(runs == 55);
  CHECK(bad == 0);
}

TEST_CASE("descent on larger grids, both branches") {
  std::mt19937_64 rng(5);
  for (const GridSpec spec : {GridSpec{2, 2}, GridSpec{3, 1}, GridSpec{5, 1}, GridSpec{3, 3}}) {
    const Grid g = build_grid(spec);
    const int bound = std::min(spec.K, 2 * spec.L);
    for (int trial = 0; trial < 200; ++trial) {
      const auto s = random_hardcore(g, rng);
      if (stable_index(g, s) >= 0) continue;
      const auto p = descend_to_stable(g, s);
      CHECK(validate_path(g, p).valid);
      CHECK(stable_index(g, p.back()) >= 0);
      CHECK(p.height() - energy(s) <= bound);
    }
  }
}

TEST_CASE("path validation") {
  const Grid g = build_grid({2, 2});
  auto p = reference_path(g, Component::A, Component::B);
  CHECK(validate_path(g, p).valid);
  CHECK(validate_path(g, p).height == p.height());

  auto jump = p;
  auto two = jump.states[3];
  two.flip(0);
  two.flip(1);
  jump.states.insert(jump.states.begin() + 4, two);
  const auto j = validate_path(g, jump);
  CHECK_FALSE(j.valid);
  CHECK(j.index == 4);

  auto clash = p;
  auto bad = Configuration(g.size());
  bad.set(0);
  bad.set(g.neighbors(0)[0]);
  clash.states = {Configuration(g.size()), Configuration::from_sites(g.size(), {0}), bad};
  const auto h = validate_path(g, clash);
  CHECK_FALSE(h.valid);
  CHECK(h.index == 2);
  CHECK(h.reason == "hard-core");

  CHECK(validate_path(g, Path{}).reason == "empty");

  // Void moves are fine.
  Path still;
  still.states = {p.front(), p.front(), p.front()};
  CHECK(validate_path(g, still).valid);
}

TEST_CASE("precondition errors list the offending sites") {
  const Grid g = build_grid({2, 2});
  const auto a = stable_config(g, Component::A);
  try {
    reduce_by_rows(g, a, Component::B);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.sites().size() == 4);
    for (SiteIndex v : e.sites()) CHECK(g.component(v) == Component::A);
  }
  try {
    reduce_by_columns(g, a, Component::B);  // a fills column 3
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.sites().size() == 2);
  }
  CHECK_THROWS_AS(reduce_by_columns(g, Configuration(g.size()), Component::B, 3), std::invalid_argument);
  auto clash = Configuration(g.size());
  clash.set(0);
  clash.set(g.neighbors(0)[0]);
  CHECK_THROWS_AS(reduce_by_rows(g, clash, Component::B), std::invalid_argument);
}

TEST_CASE("append and JSON") {
  const Grid g = build_grid({2, 1});
  const auto p = reference_path(g, Component::A, Component::B);
  const auto j = nlohmann::json::parse(path_to_json(p));
  CHECK(j["states"].size() == p.states.size());
  CHECK(j["energy"].size() == p.states.size());
  CHECK(j["height"] == p.height());
  Path q = p;
  const auto back = reference_path(g, Component::B, Component::A);
  append_path(q, back);
  CHECK(q.back() == stable_config(g, Component::A));
  CHECK(q.states.size() == p.states.size() + back.states.size() - 1);
  CHECK_THROWS_AS(append_path(q, back), std::invalid_argument);
}
