// Constructive paths: energy reduction by rows and by columns, the reference
// path between stable configurations, the descent from an arbitrary
// configuration to the stable set, and path validation.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardhex/configuration.hpp"
#include "hardhex/lattice.hpp"

namespace hardhex {

struct Path {
  struct Stage {
    std::size_t begin = 0;  // index of the stage's first state
    std::size_t end = 0;    // index of the stage's last state
    /// 'p' particle removals preparing an algorithm, 'r' one row of the
    /// rows algorithm, 'a' / 'b' a column stage of the columns algorithm.
    char kind = 'p';
  };

  std::vector<Configuration> states;
  std::vector<Stage> stages;

  /// max over the path of H.
  int height() const;
  const Configuration& front() const { return states.front(); }
  const Configuration& back() const { return states.back(); }
  std::size_t moves() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Thrown when a starting configuration does not satisfy an algorithm's
/// precondition; `sites` lists the offending occupied sites.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& what, std::vector<SiteIndex> sites);
  const std::vector<SiteIndex>& sites() const { return sites_; }

 private:
  std::vector<SiteIndex> sites_;
};

struct PathCheck {
  bool valid = true;
  std::ptrdiff_t index = -1;  // first offending state, -1 when valid
  std::string reason;         // "empty", "size", "hard-core" or "jump"
  int height = 0;
};

PathCheck validate_path(const Grid& grid, const Path& path);

/// Rows algorithm towards the stable configuration of `target`, starting at
/// horizontal stripe `stripe`. Requires that S_stripe carries only
/// target-coloured particles. Stage i (i = 1..2K) fills row 2*stripe + i.
Path reduce_by_rows(const Grid& grid, const Configuration& sigma, Component target, int stripe = 0);

/// Default first column of the columns algorithm: 1, 2, 0 for a, b, c.
int default_first_column(Component target);

/// Columns algorithm towards `target`. Requires first_column to be congruent
/// to target + 1 mod 3 and columns first_column, first_column + 1 to be empty.
Path reduce_by_columns(const Grid& grid, const Configuration& sigma, Component target,
                       int first_column);
Path reduce_by_columns(const Grid& grid, const Configuration& sigma, Component target);

/// Colour of a full column that makes a column stage run case (a) when
/// reducing towards `target`.
Component case_a_trigger(Component target);

/// Path from the stable configuration of `from` to that of `to` whose height
/// exceeds H(from) by exactly min{K, 2L} + 1.
Path reference_path(const Grid& grid, Component from, Component to);

/// Path from sigma (not stable) into {a, b, c} with height at most
/// H(sigma) + min{K, 2L}: strip a stripe and run the matching algorithm.
Path descend_to_stable(const Grid& grid, const Configuration& sigma);

/// Appends q to p, dropping q's first state (which must equal p's last).
void append_path(Path& p, const Path& q);

/// JSON with the hex code of every state and the energy profile.
std::string path_to_json(const Path& path);

}  // namespace hardhex
