#include "qboost/rgs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "qboost/random.hpp"

namespace qboost {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kNeighbourSlack = 1e-6;

bool linked(const Position& a, const Position& b, double spacing) {
  const double lim = spacing * (1.0 + kNeighbourSlack);
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy <= lim * lim;
}

// Components among `members` (indices into pos), each sorted ascending,
// ordered by first element.
std::vector<std::vector<std::size_t>> components(const std::vector<Position>& pos,
                                                 const std::vector<std::size_t>& members, double spacing) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(members.size(), false);
  for (std::size_t s = 0; s < members.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      comp.push_back(members[a]);
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (!seen[b] && linked(pos[members[a]], pos[members[b]], spacing)) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

Cluster make_cluster(const Register& all, std::vector<std::size_t> idx) {
  Cluster c;
  c.atoms.c6 = all.c6;
  for (auto k : idx) c.atoms.positions.push_back(all.positions[k]);
  c.index_map = std::move(idx);
  return c;
}

}  // namespace

// --- Pattern ----------------------------------------------------------------

std::size_t pattern_size(std::size_t n_target, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("loading probability must lie in (0, 1)");
  if (n_target == 0) throw std::invalid_argument("pattern needs at least one target atom");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n_target) / p - 1e-9));
}

TrapPattern design_pattern(std::size_t n_target, double p, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw std::invalid_argument("spacing must be positive");
  const std::size_t nt = pattern_size(n_target, p);
  // Enough rings: a hexagon of radius R holds 3R(R+1)+1 sites.
  long r = 0;
  while (3 * r * (r + 1) + 1 < static_cast<long>(nt)) ++r;
  ++r;
  struct Cand {
    long ring2;  // squared lattice norm i^2 + i j + j^2, exact
    double angle;
    Position pos;
  };
  std::vector<Cand> cands;
  const double h = std::sqrt(3.0) / 2.0;
  for (long j = -r; j <= r; ++j) {
    for (long i = -r; i <= r; ++i) {
      const double x = spacing * (static_cast<double>(i) + 0.5 * static_cast<double>(j));
      const double y = spacing * h * static_cast<double>(j);
      double ang = std::atan2(static_cast<double>(j) * h, static_cast<double>(i) + 0.5 * static_cast<double>(j));
      if (ang < 0) ang += 2 * kPi;
      cands.push_back({i * i + i * j + j * j, ang, {x, y}});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return std::tie(a.ring2, a.angle) < std::tie(b.ring2, b.angle);
  });
  TrapPattern t;
  t.spacing = spacing;
  for (std::size_t k = 0; k < nt; ++k) t.sites.push_back(cands[k].pos);
  return t;
}

void to_json(Json& j, const TrapPattern& t) {
  Json sites = Json::array();
  for (const auto& s : t.sites) sites.push_back({s.x, s.y});
  j = Json{{"lattice", t.lattice}, {"spacing_um", t.spacing}, {"n_traps", t.n_traps()}, {"sites_um", sites}};
}

void from_json(const Json& j, TrapPattern& t) {
  reject_unknown_keys(j, {"lattice", "spacing_um", "n_traps", "sites_um"}, "trap pattern");
  t = TrapPattern{};
  t.lattice = j.value("lattice", std::string("triangular"));
  if (t.lattice != "triangular") throw std::invalid_argument("trap pattern: only triangular lattices are supported");
  t.spacing = j.at("spacing_um").get<double>();
  for (const auto& s : j.at("sites_um")) t.sites.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  if (j.contains("n_traps") && j["n_traps"].get<std::size_t>() != t.sites.size()) {
    throw std::invalid_argument("trap pattern: n_traps disagrees with the site list");
  }
  if (t.sites.empty()) throw std::invalid_argument("trap pattern: no sites");
}

// --- Loading ----------------------------------------------------------------

namespace {

LoadingOutcome outcome_from_mask(const TrapPattern& pattern, std::vector<bool> mask, double c6) {
  LoadingOutcome o;
  o.filled = std::move(mask);
  o.atoms.c6 = c6;
  for (std::size_t s = 0; s < o.filled.size(); ++s) {
    if (o.filled[s]) {
      o.sites.push_back(s);
      o.atoms.positions.push_back(pattern.sites[s]);
    }
  }
  return o;
}

}  // namespace

LoadingOutcome load(const TrapPattern& pattern, double p, std::uint64_t seed, double c6) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("load: probability outside [0, 1]");
  auto rng = make_rng(seed, "rgs.load");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<bool> mask(pattern.n_traps());
  for (std::size_t s = 0; s < mask.size(); ++s) mask[s] = unif(rng) < p;
  return outcome_from_mask(pattern, std::move(mask), c6);
}

LoadingOutcome load_exact(const TrapPattern& pattern, std::size_t n_atoms, std::uint64_t seed, double c6) {
  if (n_atoms > pattern.n_traps()) throw std::invalid_argument("load_exact: more atoms than traps");
  auto rng = make_rng(seed, "rgs.load_exact");
  std::vector<std::size_t> idx(pattern.n_traps());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t k = 0; k < n_atoms; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::vector<bool> mask(pattern.n_traps(), false);
  for (std::size_t k = 0; k < n_atoms; ++k) mask[idx[k]] = true;
  return outcome_from_mask(pattern, std::move(mask), c6);
}

// --- Clusters ---------------------------------------------------------------

std::vector<Cluster> extract_clusters(const LoadingOutcome& outcome, double spacing) {
  std::vector<std::size_t> all(outcome.atoms.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Cluster> out;
  for (auto& comp : components(outcome.atoms.positions, all, spacing)) {
    out.push_back(make_cluster(outcome.atoms, std::move(comp)));
  }
  return out;
}

std::size_t split_oversized(std::vector<Cluster>& clusters, double spacing, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("cluster cap must be positive");
  std::size_t detached = 0;
  std::vector<Cluster> done;
  std::vector<Cluster> todo = std::move(clusters);
  while (!todo.empty()) {
    Cluster c = std::move(todo.back());
    todo.pop_back();
    if (c.atoms.size() <= cap) {
      done.push_back(std::move(c));
      continue;
    }
    const auto& pos = c.atoms.positions;
    const std::size_t n = pos.size();
    const auto u = interaction_matrix(c.atoms);
    std::size_t victim = 0;
    std::tuple<std::size_t, double> best{~std::size_t{0}, 0.0};
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t deg = 0;
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && linked(pos[a], pos[b], spacing)) ++deg;
      }
      const std::tuple<std::size_t, double> key{deg, u.row(static_cast<Eigen::Index>(a)).sum()};
      if (key < best) {
        best = key;
        victim = a;
      }
    }
    ++detached;
    Register full = c.atoms;
    done.push_back(make_cluster(full, {victim}));
    done.back().index_map = {c.index_map[victim]};
    std::vector<std::size_t> rest;
    for (std::size_t a = 0; a < n; ++a) {
      if (a != victim) rest.push_back(a);
    }
    for (auto& comp : components(pos, rest, spacing)) {
      Cluster sub = make_cluster(full, comp);
      for (auto& k : sub.index_map) k = c.index_map[k];
      todo.push_back(std::move(sub));
    }
  }
  std::sort(done.begin(), done.end(),
            [](const Cluster& a, const Cluster& b) { return a.index_map.front() < b.index_map.front(); });
  clusters = std::move(done);
  return detached;
}

// --- Relabeling -------------------------------------------------------------

namespace {

struct NormalizedPair {
  Eigen::MatrixXd q;
  Eigen::MatrixXd u;
};

NormalizedPair normalize(const QuboMatrix& q, const Eigen::MatrixXd& u) {
  const auto n = static_cast<Eigen::Index>(q.size());
  NormalizedPair p{Eigen::MatrixXd(n, n), u};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p.q(i, j) = q(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  double mq = q.max_abs_off_diagonal();
  double mu = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) mu = std::max(mu, std::abs(u(i, j)));
    }
  }
  if (mq > 0.0) p.q /= mq;
  if (mu > 0.0) p.u /= mu;
  return p;
}

double separation_normalized(const NormalizedPair& m, std::span<const std::size_t> sigma) {
  const auto n = sigma.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto si = static_cast<Eigen::Index>(sigma[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      s += std::abs(m.u(si, static_cast<Eigen::Index>(sigma[j])) -
                    m.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return s;
}

void check_permutation(std::span<const std::size_t> sigma, std::size_t n) {
  if (sigma.size() != n) throw std::invalid_argument("permutation has the wrong length");
  std::vector<bool> seen(n, false);
  for (auto s : sigma) {
    if (s >= n || seen[s]) throw std::invalid_argument("sigma is not a permutation");
    seen[s] = true;
  }
}

}  // namespace

double separation(const QuboMatrix& q, const Eigen::MatrixXd& u, std::span<const std::size_t> sigma) {
  if (static_cast<std::size_t>(u.rows()) != q.size() || u.rows() != u.cols()) {
    throw std::invalid_argument("separation: U and Q sizes differ");
  }
  check_permutation(sigma, q.size());
  return separation_normalized(normalize(q, u), sigma);
}

RelabelResult relabel(const QuboMatrix& q, const Register& atoms, std::size_t n_iter, std::uint64_t seed) {
  if (atoms.size() != q.size()) {
    throw std::invalid_argument("relabel: register has " + std::to_string(atoms.size()) +
                                " atoms but the QUBO has " + std::to_string(q.size()) + " variables");
  }
  const auto m = normalize(q, interaction_matrix(atoms));
  RelabelResult r;
  r.sigma.resize(q.size());
  std::iota(r.sigma.begin(), r.sigma.end(), std::size_t{0});
  r.separation = separation_normalized(m, r.sigma);
  r.n_iter_used = n_iter;
  std::vector<std::size_t> cand = r.sigma;
  // A budget covering all N! permutations buys the exact optimum.
  std::size_t n_perms = 1;
  for (std::size_t k = 2; k <= q.size() && n_perms <= n_iter; ++k) n_perms *= k;
  if (n_perms <= n_iter) {
    r.n_iter_used = n_perms;
    while (std::next_permutation(cand.begin(), cand.end())) {
      const double s = separation_normalized(m, cand);
      if (s < r.separation) {
        r.separation = s;
        r.sigma = cand;
      }
    }
    return r;
  }
  auto rng = make_rng(seed, "rgs.relabel");
  for (std::size_t it = 0; it < n_iter; ++it) {
    std::shuffle(cand.begin(), cand.end(), rng);
    const double s = separation_normalized(m, cand);
    if (s < r.separation) {
      r.separation = s;
      r.sigma = cand;
    }
  }
  return r;
}

Bitstring apply_relabel(const Bitstring& atom_bits, std::span<const std::size_t> sigma) {
  check_permutation(sigma, atom_bits.size());
  Bitstring w(atom_bits.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) w.set(i, atom_bits[sigma[i]]);
  return w;
}

// --- Pulses -----------------------------------------------------------------

PulseSequence PulseShape::build() const {
  if (!(omega_max > 0.0)) throw std::invalid_argument("pulse shape: omega_max must be positive");
  const double period = 2.0 * kPi / omega_max;
  PulseSequence p;
  p.segments = {{t_rise * period, omega_max, delta_rise * omega_max},
                {t_sweep * period, omega_max, delta_sweep * omega_max},
                {t_fall * period, omega_fall * omega_max, delta_fall * omega_max}};
  p.validate();
  return p;
}

void to_json(Json& j, const PulseShape& s) {
  j = Json{{"omega_max_rad_per_s", s.omega_max}, {"delta_rise", s.delta_rise}, {"delta_sweep", s.delta_sweep},
           {"delta_fall", s.delta_fall},         {"t_rise", s.t_rise},         {"t_sweep", s.t_sweep},
           {"t_fall", s.t_fall},         {"omega_fall", s.omega_fall}};
}

void from_json(const Json& j, PulseShape& s) {
  reject_unknown_keys(j, {"omega_max_rad_per_s", "delta_rise", "delta_sweep", "delta_fall", "t_rise", "t_sweep", "t_fall", "omega_fall"},
                      "pulse shape");
  s = PulseShape{};
  s.omega_max = j.value("omega_max_rad_per_s", s.omega_max);
  s.delta_rise = j.value("delta_rise", s.delta_rise);
  s.delta_sweep = j.value("delta_sweep", s.delta_sweep);
  s.delta_fall = j.value("delta_fall", s.delta_fall);
  s.t_rise = j.value("t_rise", s.t_rise);
  s.t_sweep = j.value("t_sweep", s.t_sweep);
  s.t_fall = j.value("t_fall", s.t_fall);
  s.omega_fall = j.value("omega_fall", s.omega_fall);
  s.build();
}

double spacing_for_interaction(double u, double c6) {
  if (!(u > 0.0) || !(c6 > 0.0)) throw std::invalid_argument("spacing_for_interaction: u and C6 must be positive");
  return std::pow(c6 / u, 1.0 / 6.0);
}

// --- Cluster cache ----------------------------------------------------------

ClusterCache::ClusterCache(PulseSequence pulses, double c6, std::size_t max_qubits, std::size_t max_bytes)
    : pulses_(std::move(pulses)), c6_(c6), max_qubits_(max_qubits), max_bytes_(max_bytes) {
  pulses_.validate();
}

bool ClusterCache::compatible(const PulseSequence& pulses, double c6) const {
  if (c6 != c6_ || pulses.segments.size() != pulses_.segments.size()) return false;
  for (std::size_t k = 0; k < pulses.segments.size(); ++k) {
    const auto& a = pulses.segments[k];
    const auto& b = pulses_.segments[k];
    if (a.duration != b.duration || a.omega != b.omega || a.delta != b.delta) return false;
  }
  return true;
}

Bitstring ClusterCache::sample(const Register& cluster, double u) {
  const std::size_t n = cluster.size();
  if (n == 0) return Bitstring();
  // Canonical atom order: by rounded (y, x); key is the translated shape.
  constexpr double kGrid = 1e-4;  // um
  std::vector<std::pair<long long, long long>> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = {std::llround(cluster.positions[k].y / kGrid), std::llround(cluster.positions[k].x / kGrid)};
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
  const auto origin = grid[order.front()];
  std::string key;
  for (auto k : order) {
    key += std::to_string(grid[k].first - origin.first) + ',' + std::to_string(grid[k].second - origin.second) + ';';
  }

  std::shared_ptr<const std::vector<double>> cdf;
  if (auto it = entries_.find(key); it != entries_.end()) {
    ++hits_;
    cdf = it->second;
  } else {
    ++misses_;
    Register canon;
    canon.c6 = cluster.c6;
    for (auto k : order) canon.positions.push_back(cluster.positions[k]);
    const auto psi = evolve(canon, pulses_, StateVector::ground(n));
    auto p = psi.probabilities();
    std::partial_sum(p.begin(), p.end(), p.begin());
    auto stored = std::make_shared<const std::vector<double>>(std::move(p));
    const std::size_t bytes = stored->size() * sizeof(double);
    if (n <= max_qubits_ && bytes_ + bytes <= max_bytes_) {
      entries_.emplace(key, stored);
      bytes_ += bytes;
    }
    cdf = std::move(stored);
  }

  const double target = u * cdf->back();
  auto it = std::upper_bound(cdf->begin(), cdf->end(), target);
  auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf->begin(), static_cast<std::ptrdiff_t>(cdf->size()) - 1));
  Bitstring out(n);
  for (std::size_t c = 0; c < n; ++c) out.set(order[c], (idx >> c) & 1u);
  return out;
}

// --- Solve ------------------------------------------------------------------

std::string to_string(LoadingMode m) { return m == LoadingMode::binomial ? "binomial" : "fixed_count"; }

LoadingMode loading_mode_from_string(const std::string& s) {
  if (s == "binomial") return LoadingMode::binomial;
  if (s == "fixed_count") return LoadingMode::fixed_count;
  throw std::invalid_argument("unknown loading mode '" + s + "' (binomial|fixed_count)");
}

std::size_t RawCycle::atom_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

RgsRun rgs_run(const QuboMatrix& q, const TrapPattern& pattern, const PulseSequence& pulses, std::size_t n_cycles,
               std::uint64_t seed, const RgsOptions& options) {
  if (n_cycles == 0) throw std::invalid_argument("rgs_solve: n_cycles must be at least 1");
  if (q.size() == 0) throw std::invalid_argument("rgs_solve: empty QUBO");
  if (options.cluster_cap == 0 || options.cluster_cap > kMaxStateQubits) {
    throw std::invalid_argument("rgs_solve: cluster_cap must lie in [1, " + std::to_string(kMaxStateQubits) + "]");
  }
  if (options.loading == LoadingMode::fixed_count && q.size() > pattern.n_traps()) {
    throw std::invalid_argument("rgs_solve: pattern has fewer traps than QUBO variables");
  }
  pulses.validate();
  auto cache = options.cache;
  if (cache && !cache->compatible(pulses, options.c6)) {
    throw std::invalid_argument("rgs_solve: cluster cache was built for different pulses or C6");
  }
  if (!cache) cache = std::make_shared<ClusterCache>(pulses, options.c6);
  const std::size_t n_iter = options.relabel_iters ? options.relabel_iters : default_relabel_iters(q.size());

  RgsRun run;
  run.trace = SolveTrace("rgs", seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t cycle = 0; cycle < n_cycles; ++cycle) {
    const auto outcome = options.loading == LoadingMode::binomial
                             ? load(pattern, options.p, derive_seed(seed, "rgs.cycle.load", cycle), options.c6)
                             : load_exact(pattern, q.size(), derive_seed(seed, "rgs.cycle.load", cycle), options.c6);
    auto clusters = extract_clusters(outcome, pattern.spacing);
    run.detached_atoms += split_oversized(clusters, pattern.spacing, options.cluster_cap);

    auto shot_rng = make_rng(seed, "rgs.cycle.shot", cycle);
    Bitstring bits(outcome.atoms.size());
    RawCycle raw;
    for (const auto& c : clusters) {
      const auto cb = cache->sample(c.atoms, unif(shot_rng));
      std::vector<std::size_t> sites;
      for (std::size_t k = 0; k < c.index_map.size(); ++k) {
        bits.set(c.index_map[k], cb[k]);
        sites.push_back(outcome.sites[c.index_map[k]]);
      }
      raw.clusters.push_back(std::move(sites));
      raw.cluster_bits.push_back(cb);
    }
    run.raw.push_back(std::move(raw));

    if (outcome.atoms.size() != q.size()) {
      run.trace.push(outcome.atoms.size(), std::nullopt, std::nullopt);
      continue;
    }
    Bitstring w = bits;
    if (options.relabel) {
      const auto r = relabel(q, outcome.atoms, n_iter, derive_seed(seed, "rgs.cycle.relabel", cycle));
      w = apply_relabel(bits, r.sigma);
    }
    const double c = cost(q, w);
    run.trace.push_scored(w, c);
    if (options.stop_reference && gap_from_costs(c, *options.stop_reference) < options.stop_gap) break;
  }
  return run;
}

SolveTrace rgs_solve(const QuboMatrix& q, const TrapPattern& pattern, const PulseSequence& pulses,
                     std::size_t n_cycles, std::uint64_t seed, const RgsOptions& options) {
  return rgs_run(q, pattern, pulses, n_cycles, seed, options).trace;
}

std::vector<Bitstring> reuse_subsize(std::span<const RawCycle> cycles, std::size_t target_n) {
  std::vector<Bitstring> out;
  for (const auto& c : cycles) {
    for (const auto& b : c.cluster_bits) {
      if (b.size() == target_n) out.push_back(b);
    }
  }
  return out;
}

}  // namespace qboost
