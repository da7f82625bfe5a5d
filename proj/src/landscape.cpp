#include "hardhex/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "hardhex/dynamics.hpp"

namespace hardhex {

namespace {

std::vector<std::uint64_t> neighbor_masks(const Grid& grid) {
  std::vector<std::uint64_t> m(static_cast<std::size_t>(grid.size()), 0);
  for (SiteIndex v = 0; v < grid.size(); ++v) {
    for (SiteIndex w : grid.neighbors(v)) m[static_cast<std::size_t>(v)] |= std::uint64_t{1} << w;
  }
  return m;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  // Returns the surviving root.
  int unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return x;
    if (rank_[static_cast<std::size_t>(x)] < rank_[static_cast<std::size_t>(y)]) std::swap(x, y);
    parent_[static_cast<std::size_t>(y)] = x;
    if (rank_[static_cast<std::size_t>(x)] == rank_[static_cast<std::size_t>(y)]) {
      ++rank_[static_cast<std::size_t>(x)];
    }
    return x;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

void check_ids(const LandscapeIndex& index, const std::vector<int>& ids, const char* what) {
  if (ids.empty()) throw std::invalid_argument(std::string(what) + " set is empty");
  for (int id : ids) {
    if (id < 0 || id >= index.size()) {
      throw std::out_of_range(std::string(what) + " contains an unknown state id");
    }
  }
}

double removal_rate(const LandscapeIndex& index, double beta) {
  return std::exp(-beta) / index.n_sites();
}

// Off-diagonal P(x, y); y must be a move of x.
double move_prob(const LandscapeIndex& index, int x, int y, double add, double remove) {
  return index.energy(y) < index.energy(x) ? add : remove;
}

// Non-target states mapped to 0..m-1; -1 for targets.
std::vector<int> free_positions(const LandscapeIndex& index, const std::vector<int>& target,
                                int& m) {
  std::vector<int> pos(static_cast<std::size_t>(index.size()), 0);
  for (int t : target) pos[static_cast<std::size_t>(t)] = -1;
  m = 0;
  for (auto& p : pos) {
    if (p == 0) p = m++;
  }
  return pos;
}

// I - P restricted to the non-target states; the diagonal is the exit
// probability computed as a sum rather than 1 - P(x,x).
Eigen::SparseMatrix<double> killed_generator(const LandscapeIndex& index, double beta,
                                             const std::vector<int>& pos, int m) {
  const double add = 1.0 / index.n_sites();
  const double remove = removal_rate(index, beta);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(index.move_count() + static_cast<std::size_t>(m));
  for (int x = 0; x < index.size(); ++x) {
    const int px = pos[static_cast<std::size_t>(x)];
    if (px < 0) continue;
    double exit = 0.0;
    for (int y : index.moves(x)) {
      const double p = move_prob(index, x, y, add, remove);
      exit += p;
      const int py = pos[static_cast<std::size_t>(y)];
      if (py >= 0) trip.emplace_back(px, py, -p);
    }
    trip.emplace_back(px, px, exit);
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

using SparseLU = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

void factorize(SparseLU& lu, const Eigen::SparseMatrix<double>& a) {
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("sparse LU factorisation failed: " + lu.lastErrorMessage());
  }
}

double worst_tv(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mu) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double tv = 0.5 * (rows.row(r).transpose() - mu).cwiseAbs().sum();
    worst = std::max(worst, tv);
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Index
// ---------------------------------------------------------------------------

LandscapeIndex::LandscapeIndex(const Grid& grid, std::vector<std::uint64_t> sorted_codes)
    : spec_(grid.spec()), n_sites_(grid.size()), codes_(std::move(sorted_codes)) {
  if (n_sites_ > 64) throw std::length_error("state codes hold at most 64 sites");
  if (!std::is_sorted(codes_.begin(), codes_.end())) {
    throw std::invalid_argument("state codes must be sorted");
  }
  const auto nbr = neighbor_masks(grid);
  energy_.resize(codes_.size());
  offsets_.assign(codes_.size() + 1, 0);
  min_energy_ = 0;
  for (std::size_t id = 0; id < codes_.size(); ++id) {
    const std::uint64_t s = codes_[id];
    energy_[id] = -std::popcount(s);
    min_energy_ = std::min(min_energy_, energy_[id]);
    for (int v = 0; v < n_sites_; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (!(s & bit) && (s & nbr[static_cast<std::size_t>(v)])) continue;
      const int other = id_of(s ^ bit);
      if (other < 0) throw std::invalid_argument("state list is not closed under moves");
      moves_.push_back(other);
    }
    offsets_[id + 1] = moves_.size();
  }
  for (Component x : kComponents) {
    stable_[static_cast<std::size_t>(x)] = id_of(stable_config(grid, x).code());
  }
  empty_ = id_of(0);
}

int LandscapeIndex::id_of(std::uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return -1;
  return static_cast<int>(it - codes_.begin());
}

LandscapeIndex enumerate(const Grid& grid, int site_limit) {
  if (grid.size() > site_limit || grid.size() > 64) {
    throw std::length_error("grid has " + std::to_string(grid.size()) +
                            " sites, above the enumeration limit of " +
                            std::to_string(std::min(site_limit, 64)) +
                            "; use the Monte Carlo commands (simulate, campaign) instead");
  }
  const auto nbr = neighbor_masks(grid);
  const int n = grid.size();
  std::vector<std::uint64_t> codes;
  // Depth-first over sites in index order; `blocked` holds the neighbours of
  // the particles placed so far.
  struct Frame {
    int v;
    std::uint64_t code;
    std::uint64_t blocked;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.v == n) {
      codes.push_back(f.code);
      continue;
    }
    const std::uint64_t bit = std::uint64_t{1} << f.v;
    if (!(f.blocked & bit)) {
      stack.push_back({f.v + 1, f.code | bit, f.blocked | nbr[static_cast<std::size_t>(f.v)]});
    }
    stack.push_back({f.v + 1, f.code, f.blocked});
  }
  std::sort(codes.begin(), codes.end());
  return LandscapeIndex(grid, std::move(codes));
}

std::string state_label(const LandscapeIndex& index, int id) {
  for (Component x : kComponents) {
    if (index.stable_id(x) == id) return std::string(1, stable_label(x));
  }
  if (id == index.empty_id()) return "empty";
  return to_hex(index.config(id));
}

// ---------------------------------------------------------------------------
// Communication heights
// ---------------------------------------------------------------------------

std::vector<int> comm_heights_to(const LandscapeIndex& index, const std::vector<int>& target) {
  check_ids(index, target, "target");
  const int n = index.size();
  const int lo = index.min_energy();
  std::vector<std::vector<int>> levels(static_cast<std::size_t>(-lo + 1));
  for (int id = 0; id < n; ++id) levels[static_cast<std::size_t>(index.energy(id) - lo)].push_back(id);

  UnionFind uf(n);
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  std::vector<char> reaches(static_cast<std::size_t>(n), 0);  // meaningful at roots
  for (int t : target) reaches[static_cast<std::size_t>(t)] = 1;
  std::vector<int> phi(static_cast<std::size_t>(n), std::numeric_limits<int>::max());
  std::vector<int> pending;

  for (int h = lo; h <= 0; ++h) {
    for (int id : levels[static_cast<std::size_t>(h - lo)]) {
      active[static_cast<std::size_t>(id)] = 1;
      pending.push_back(id);
      for (int nb : index.moves(id)) {
        if (!active[static_cast<std::size_t>(nb)]) continue;
        const bool r = reaches[static_cast<std::size_t>(uf.find(id))] ||
                       reaches[static_cast<std::size_t>(uf.find(nb))];
        reaches[static_cast<std::size_t>(uf.unite(id, nb))] = r;
      }
    }
    std::size_t keep = 0;
    for (int id : pending) {
      if (reaches[static_cast<std::size_t>(uf.find(id))]) {
        phi[static_cast<std::size_t>(id)] = h;
      } else {
        pending[keep++] = id;
      }
    }
    pending.resize(keep);
  }
  return phi;
}

int comm_height(const LandscapeIndex& index, const std::vector<int>& source,
                const std::vector<int>& target) {
  check_ids(index, source, "source");
  check_ids(index, target, "target");
  for (int s : source) {
    if (std::find(target.begin(), target.end(), s) != target.end()) {
      throw std::invalid_argument("source and target sets intersect");
    }
  }
  const auto phi = comm_heights_to(index, target);
  int best = std::numeric_limits<int>::max();
  for (int s : source) best = std::min(best, phi[static_cast<std::size_t>(s)]);
  return best;
}

bool condition_pe(const LandscapeIndex& index, int sigma, const std::vector<int>& target) {
  const auto phi = comm_heights_to(index, target);
  std::vector<char> in_target(static_cast<std::size_t>(index.size()), 0);
  for (int t : target) in_target[static_cast<std::size_t>(t)] = 1;
  if (in_target[static_cast<std::size_t>(sigma)]) throw std::invalid_argument("sigma lies in A");
  int worst = std::numeric_limits<int>::min();
  for (int id = 0; id < index.size(); ++id) {
    if (in_target[static_cast<std::size_t>(id)]) continue;
    worst = std::max(worst, phi[static_cast<std::size_t>(id)] - index.energy(id));
  }
  return phi[static_cast<std::size_t>(sigma)] - index.energy(sigma) == worst;
}

bool condition_ae(const LandscapeIndex& index, int sigma, const std::vector<int>& target) {
  std::vector<char> in_target(static_cast<std::size_t>(index.size()), 0);
  for (int t : target) in_target[static_cast<std::size_t>(t)] = 1;
  if (in_target[static_cast<std::size_t>(sigma)]) throw std::invalid_argument("sigma lies in A");
  const auto phi = comm_heights_to(index, target);
  auto widened = target;
  widened.push_back(sigma);
  const auto phi_w = comm_heights_to(index, widened);
  int worst = std::numeric_limits<int>::min();
  for (int id = 0; id < index.size(); ++id) {
    if (in_target[static_cast<std::size_t>(id)] || id == sigma) continue;
    worst = std::max(worst, phi_w[static_cast<std::size_t>(id)] - index.energy(id));
  }
  return phi[static_cast<std::size_t>(sigma)] - index.energy(sigma) > worst;
}

bool StructureReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.passed(); });
}

StructureReport verify_structure(const LandscapeIndex& index) {
  StructureReport rep;
  rep.spec = index.spec();
  rep.state_count = index.size();
  rep.gamma = gamma(index.spec());
  const int bound = rep.gamma - 1;  // min{K, 2L}
  const int a = index.stable_id(Component::A);
  const int b = index.stable_id(Component::B);
  const int c = index.stable_id(Component::C);
  if (a < 0 || b < 0 || c < 0) throw std::logic_error("stable configurations missing from index");

  for (int id = 0; id < index.size(); ++id) {
    if (index.energy(id) == index.min_energy()) rep.stable_set.push_back(id);
  }
  {
    std::vector<int> want{a, b, c};
    std::sort(want.begin(), want.end());
    std::ostringstream d;
    d << rep.stable_set.size() << " ground states at energy " << index.min_energy();
    rep.clauses.push_back({"stable set is {a,b,c}", true, rep.stable_set == want, d.str()});
  }

  const auto to_b = comm_heights_to(index, {b});
  const auto to_c = comm_heights_to(index, {c});
  rep.phi_gaps = {to_b[static_cast<std::size_t>(a)] - index.energy(a),
                  to_c[static_cast<std::size_t>(a)] - index.energy(a),
                  to_c[static_cast<std::size_t>(b)] - index.energy(b)};
  const char* pair_names[3] = {"Phi(a,b)-H(a)", "Phi(a,c)-H(a)", "Phi(b,c)-H(b)"};
  for (int k = 0; k < 3; ++k) {
    rep.clauses.push_back({std::string(pair_names[k]) + " = min{K,2L}+1", true,
                           rep.phi_gaps[static_cast<std::size_t>(k)] == rep.gamma,
                           std::to_string(rep.phi_gaps[static_cast<std::size_t>(k)]) + " vs " +
                               std::to_string(rep.gamma)});
  }

  const auto to_abc = comm_heights_to(index, {a, b, c});
  rep.max_depth_outside = std::numeric_limits<int>::min();
  for (int id = 0; id < index.size(); ++id) {
    if (id == a || id == b || id == c) continue;
    const int depth = to_abc[static_cast<std::size_t>(id)] - index.energy(id);
    if (depth > rep.max_depth_outside) {
      rep.max_depth_outside = depth;
      rep.max_depth_witness = id;
    }
  }
  rep.clauses.push_back({"max Phi(s,{a,b,c})-H(s) over s outside {a,b,c} <= min{K,2L}", true,
                         rep.max_depth_outside <= bound,
                         std::to_string(rep.max_depth_outside) + " vs " + std::to_string(bound)});

  rep.max_depth_to_b = std::numeric_limits<int>::min();
  for (int id = 0; id < index.size(); ++id) {
    if (id == b) continue;
    rep.max_depth_to_b = std::max(rep.max_depth_to_b, to_b[static_cast<std::size_t>(id)] - index.energy(id));
  }
  rep.clauses.push_back({"max Phi(s,b)-H(s) over s != b equals min{K,2L}+1", true,
                         rep.max_depth_to_b == rep.gamma, std::to_string(rep.max_depth_to_b)});
  rep.clauses.push_back(
      {"Phi(a,b)-H(a) = Phi(c,b)-H(c)", true,
       to_b[static_cast<std::size_t>(a)] - index.energy(a) == to_b[static_cast<std::size_t>(c)] - index.energy(c),
       ""});

  rep.clauses.push_back({"absence of deep cycles for (a,{b,c})", true, condition_pe(index, a, {b, c}), ""});
  rep.clauses.push_back({"absence of deep cycles for (a,{b})", true, condition_pe(index, a, {b}), ""});
  rep.clauses.push_back({"faster return to A u {s} for (a,{b,c})", true, condition_ae(index, a, {b, c}), ""});
  rep.clauses.push_back({"faster return to A u {s} for (a,{b}) (deep cycle at c, must fail)", false,
                         condition_ae(index, a, {b}), ""});
  return rep;
}

// ---------------------------------------------------------------------------
// Markov chain
// ---------------------------------------------------------------------------

SparseMatrix transition_matrix(const LandscapeIndex& index, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  const double add = 1.0 / index.n_sites();
  const double remove = removal_rate(index, beta);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(index.move_count() + static_cast<std::size_t>(index.size()));
  for (int x = 0; x < index.size(); ++x) {
    double off = 0.0;
    for (int y : index.moves(x)) {
      const double p = move_prob(index, x, y, add, remove);
      off += p;
      trip.emplace_back(x, y, p);
    }
    trip.emplace_back(x, x, 1.0 - off);
  }
  SparseMatrix p(index.size(), index.size());
  p.setFromTriplets(trip.begin(), trip.end());
  p.makeCompressed();
  return p;
}

Eigen::VectorXd stationary_distribution(const LandscapeIndex& index, double beta) {
  // log weight = beta * particles; shift by the maximum before exponentiating.
  Eigen::VectorXd mu(index.size());
  const double top = -beta * index.min_energy();
  for (int id = 0; id < index.size(); ++id) mu[id] = std::exp(-beta * index.energy(id) - top);
  return mu / mu.sum();
}

Eigen::VectorXd mean_hitting_times(const LandscapeIndex& index, double beta,
                                   const std::vector<int>& target) {
  check_ids(index, target, "target");
  int m = 0;
  const auto pos = free_positions(index, target, m);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(index.size());
  if (m == 0) return out;
  const auto a = killed_generator(index, beta, pos, m);
  SparseLU lu;
  factorize(lu, a);
  const Eigen::VectorXd t = lu.solve(Eigen::VectorXd::Ones(m));
  if (lu.info() != Eigen::Success || !t.allFinite()) {
    throw std::runtime_error("hitting-time solve failed");
  }
  for (int x = 0; x < index.size(); ++x) {
    if (pos[static_cast<std::size_t>(x)] >= 0) out[x] = t[pos[static_cast<std::size_t>(x)]];
  }
  return out;
}

double exact_mean_hitting(const LandscapeIndex& index, double beta, int start,
                          const std::vector<int>& target) {
  if (std::find(target.begin(), target.end(), start) != target.end()) {
    throw std::invalid_argument("start state belongs to the target set");
  }
  return mean_hitting_times(index, beta, target)[start];
}

std::vector<double> absorption_probabilities(const LandscapeIndex& index, double beta, int start,
                                             const std::vector<int>& target) {
  check_ids(index, target, "target");
  int m = 0;
  const auto pos = free_positions(index, target, m);
  if (pos[static_cast<std::size_t>(start)] < 0) {
    throw std::invalid_argument("start state belongs to the target set");
  }
  const auto a = killed_generator(index, beta, pos, m);
  SparseLU lu;
  factorize(lu, a);
  const double add = 1.0 / index.n_sites();
  const double remove = removal_rate(index, beta);
  std::vector<double> out;
  for (int t : target) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int y : index.moves(t)) {
      const int py = pos[static_cast<std::size_t>(y)];
      if (py >= 0) rhs[py] = move_prob(index, y, t, add, remove);
    }
    const Eigen::VectorXd h = lu.solve(rhs);
    out.push_back(h[pos[static_cast<std::size_t>(start)]]);
  }
  return out;
}

std::vector<double> hitting_survival(const LandscapeIndex& index, double beta, int start,
                                     const std::vector<int>& target, std::size_t t_max) {
  check_ids(index, target, "target");
  std::vector<char> in_target(static_cast<std::size_t>(index.size()), 0);
  for (int t : target) in_target[static_cast<std::size_t>(t)] = 1;
  // Forward iteration of the sub-stochastic distribution of the killed chain.
  const SparseMatrix p = transition_matrix(index, beta);
  Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(index.size());
  std::vector<double> out;
  out.reserve(t_max + 1);
  if (in_target[static_cast<std::size_t>(start)]) {
    out.assign(t_max + 1, 0.0);
    return out;
  }
  dist[start] = 1.0;
  out.push_back(1.0);
  for (std::size_t t = 1; t <= t_max; ++t) {
    dist = dist * p;
    for (int x = 0; x < index.size(); ++x) {
      if (in_target[static_cast<std::size_t>(x)]) dist[x] = 0.0;
    }
    out.push_back(dist.sum());
  }
  return out;
}

SpectralGapResult spectral_gap_detail(const LandscapeIndex& index, double beta,
                                      const LanczosOptions& options) {
  const int n = index.size();
  if (n < 2) throw std::invalid_argument("spectral gap needs at least two states");
  const double add = 1.0 / index.n_sites();
  const double remove = removal_rate(index, beta);
  // M = I - D^{1/2} P D^{-1/2}. Every move joins energies e and e - 1 and the
  // symmetrised entry is sqrt(add * remove) in both directions.
  const double off = std::sqrt(add * remove);
  std::vector<Eigen::Triplet<double>> trip;
  for (int x = 0; x < n; ++x) {
    double exit = 0.0;
    for (int y : index.moves(x)) {
      exit += move_prob(index, x, y, add, remove);
      trip.emplace_back(x, y, -off);
    }
    trip.emplace_back(x, x, exit);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();

  const Eigen::VectorXd top = stationary_distribution(index, beta).cwiseSqrt().normalized();
  const int dim = options.max_iterations > 0 ? std::min(options.max_iterations, n - 1) : n - 1;

  std::vector<Eigen::VectorXd> q;
  q.reserve(static_cast<std::size_t>(dim) + 1);
  Eigen::VectorXd v(n);
  Rng rng(0x5eed1a2c05ULL);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform() - 0.5;
  auto orthogonalise = [&](Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass) {
      w -= top.dot(w) * top;
      for (const auto& u : q) w -= u.dot(w) * u;
    }
  };
  orthogonalise(v);
  v.normalize();

  std::vector<double> alpha, betas;
  SpectralGapResult res;
  double theta = 0.0;
  Eigen::VectorXd ritz_coeffs;
  for (int j = 0; j < dim; ++j) {
    q.push_back(v);
    Eigen::VectorXd w = m * v;
    alpha.push_back(v.dot(w));
    orthogonalise(w);
    const double b = w.norm();
    res.iterations = j + 1;

    const int size = j + 1;
    const bool check = size <= 200 || size % 10 == 0 || size == dim || b < 1e-14;
    if (check) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), size);
      Eigen::VectorXd sub = size > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(betas.data(), size - 1))
                                     : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()[0];
      ritz_coeffs = tri.eigenvectors().col(0);
      const double estimate = std::abs(b * ritz_coeffs[size - 1]);
      if (estimate < 0.1 * options.tolerance || b < 1e-14 || size == dim) break;
    }
    betas.push_back(b);
    v = w / b;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < static_cast<std::size_t>(ritz_coeffs.size()); ++k) {
    x += ritz_coeffs[static_cast<Eigen::Index>(k)] * q[k];
  }
  x.normalize();
  theta = x.dot(m * x);
  res.residual = (m * x - theta * x).norm();
  res.rho = theta;
  res.alpha2 = 1.0 - theta;
  res.converged = res.residual <= options.tolerance;
  return res;
}

double spectral_gap(const LandscapeIndex& index, double beta) {
  const auto r = spectral_gap_detail(index, beta);
  if (!r.converged) {
    throw std::runtime_error("Lanczos did not converge after " + std::to_string(r.iterations) +
                             " iterations (residual " + std::to_string(r.residual) + ")");
  }
  return r.rho;
}

MixingResult mixing_time_detail(const LandscapeIndex& index, double beta, double eps,
                                const MixingOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  const int n = index.size();
  const Eigen::VectorXd mu = stationary_distribution(index, beta);
  const SparseMatrix p = transition_matrix(index, beta);
  MixingResult res;

  std::vector<int> starts;
  if (n > options.all_starts_limit) {
    res.lower_bound = true;
    for (int id : index.stable()) starts.push_back(id);
    starts.push_back(index.empty_id());
  } else {
    starts.resize(static_cast<std::size_t>(n));
    std::iota(starts.begin(), starts.end(), 0);
  }
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(starts.size()), n);
  for (std::size_t k = 0; k < starts.size(); ++k) rows(static_cast<Eigen::Index>(k), starts[k]) = 1.0;
  const double d0 = worst_tv(rows, mu);
  if (d0 <= eps) {
    res.mode = "trivial";
    res.tv_at = d0;
    return res;
  }

  if (!res.lower_bound && n <= options.dense_limit) {
    // d(t) is non-increasing, so double t until d(t) <= eps and then fix the
    // bits of the last t with d(t) > eps from the top down.
    res.mode = "dense-squaring";
    std::vector<Eigen::MatrixXd> pow{Eigen::MatrixXd(p)};
    int k = 0;
    while (worst_tv(pow.back(), mu) > eps) {
      if ((std::uint64_t{1} << (k + 1)) > options.cap) {
        res.truncated = true;
        res.t_mix = options.cap;
        res.tv_at = worst_tv(pow.back(), mu);
        return res;
      }
      pow.push_back(pow.back() * pow.back());
      ++k;
    }
    if (k == 0) {
      res.t_mix = 1;
      res.tv_before = d0;
      res.tv_at = worst_tv(pow[0], mu);
      return res;
    }
    Eigen::MatrixXd below = pow[static_cast<std::size_t>(k - 1)];
    std::uint64_t t_below = std::uint64_t{1} << (k - 1);
    for (int j = k - 2; j >= 0; --j) {
      Eigen::MatrixXd trial = below * pow[static_cast<std::size_t>(j)];
      if (worst_tv(trial, mu) > eps) {
        below = std::move(trial);
        t_below += std::uint64_t{1} << j;
      }
    }
    res.t_mix = t_below + 1;
    res.tv_before = worst_tv(below, mu);
    res.tv_at = worst_tv(below * pow[0], mu);
    return res;
  }

  res.mode = "vector-iteration";
  double prev = d0;
  for (std::uint64_t t = 1; t <= options.cap; ++t) {
    rows = rows * p;
    const double d = worst_tv(rows, mu);
    if (d <= eps) {
      res.t_mix = t;
      res.tv_at = d;
      res.tv_before = prev;
      return res;
    }
    prev = d;
  }
  res.truncated = true;
  res.t_mix = options.cap;
  res.tv_at = prev;
  return res;
}

std::uint64_t mixing_time(const LandscapeIndex& index, double beta, double eps) {
  return mixing_time_detail(index, beta, eps).t_mix;
}

std::vector<double> tv_profile(const LandscapeIndex& index, double beta, int start,
                               std::size_t t_max) {
  const Eigen::VectorXd mu = stationary_distribution(index, beta);
  const SparseMatrix p = transition_matrix(index, beta);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(index.size());
  row[start] = 1.0;
  std::vector<double> out;
  out.reserve(t_max + 1);
  for (std::size_t t = 0; t <= t_max; ++t) {
    if (t > 0) row = row * p;
    out.push_back(0.5 * (row.transpose() - mu).cwiseAbs().sum());
  }
  return out;
}

}  // namespace hardhex
