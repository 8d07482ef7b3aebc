#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qboost/ising.hpp"
#include "qboost/qubo.hpp"
#include "qboost/trace.hpp"

namespace qboost {

struct TrapPattern {
  std::vector<Position> sites;
  double spacing = 0.0;  // um
  std::string lattice = "triangular";

  std::size_t n_traps() const { return sites.size(); }
};

// ceil(N / p), guarded against round-off for exact ratios.
std::size_t pattern_size(std::size_t n_target, double p);

// Triangular lattice of pattern_size(n, p) sites taken ring by ring around a
// central site.
TrapPattern design_pattern(std::size_t n_target, double p, double spacing);

void to_json(Json& j, const TrapPattern& t);
void from_json(const Json& j, TrapPattern& t);

struct LoadingOutcome {
  std::vector<bool> filled;          // per site
  std::vector<std::size_t> sites;    // filled site indices, ascending
  Register atoms;                    // atom k sits at sites[k]
};

// Independent Bernoulli(p) filling of every trap.
LoadingOutcome load(const TrapPattern& pattern, double p, std::uint64_t seed, double c6 = kDefaultC6);
// Exactly n_atoms traps, chosen uniformly among all subsets of that size.
LoadingOutcome load_exact(const TrapPattern& pattern, std::size_t n_atoms, std::uint64_t seed,
                          double c6 = kDefaultC6);

struct Cluster {
  Register atoms;
  std::vector<std::size_t> index_map;  // cluster atom k is outcome atom index_map[k]
};

// Connected components of the graph joining atoms closer than spacing (1e-6
// relative slack). Clusters are ordered by their smallest atom index.
std::vector<Cluster> extract_clusters(const LoadingOutcome& outcome, double spacing);

// Breaks clusters larger than `cap`: the atom with the fewest neighbours is
// moved to its own cluster until every component fits. Returns the number of
// atoms detached.
std::size_t split_oversized(std::vector<Cluster>& clusters, double spacing, std::size_t cap);

struct RelabelResult {
  std::vector<std::size_t> sigma;  // QUBO variable i is read from atom sigma[i]
  double separation = 0.0;
  std::size_t n_iter_used = 0;
};

// s_Q(sigma) = sum_{i<j} |U'_{sigma(i) sigma(j)} - Q'_ij| on matrices scaled
// by their largest off-diagonal magnitude.
double separation(const QuboMatrix& q, const Eigen::MatrixXd& u, std::span<const std::size_t> sigma);

inline std::size_t default_relabel_iters(std::size_t n) { return 10 * n; }

// Best of the identity and n_iter uniformly random permutations; when N! <= n_iter
// every permutation is evaluated instead.
RelabelResult relabel(const QuboMatrix& q, const Register& atoms, std::size_t n_iter, std::uint64_t seed);

// Atom-ordered bits read into QUBO order: w_i = bits[sigma[i]].
Bitstring apply_relabel(const Bitstring& atom_bits, std::span<const std::size_t> sigma);

// Three-segment program: drive on with the atoms red detuned, a segment near
// resonance, then the drive off at positive detuning. omega_fall is the drive
// kept during the last segment as a fraction of the peak; at its default of
// zero the segment only adds phases and leaves measurement probabilities
// unchanged. Detunings are in units of omega_max and durations in units of
// 2 pi / omega_max.
struct PulseShape {
  double omega_max = 2.0 * 3.141592653589793 * 1.0e6;  // rad/s
  double delta_rise = -1.0;
  double delta_sweep = 0.5;
  double delta_fall = 2.0;
  double t_rise = 0.25;
  double t_sweep = 1.0;
  double t_fall = 0.25;
  double omega_fall = 0.0;

  PulseSequence build() const;
};

void to_json(Json& j, const PulseShape& s);
void from_json(const Json& j, PulseShape& s);

// Lattice spacing at which the nearest-neighbour interaction equals u.
double spacing_for_interaction(double u, double c6 = kDefaultC6);

// Measurement distributions of already-evolved cluster geometries. Valid for
// a single pulse sequence and C6; the key is the cluster shape up to
// translation.
class ClusterCache {
 public:
  ClusterCache(PulseSequence pulses, double c6, std::size_t max_qubits = 16,
               std::size_t max_bytes = std::size_t{256} << 20);

  // One measurement of the evolved cluster, drawn by inverse CDF at u in
  // [0, 1); bit k belongs to cluster atom k. Evolves and stores on a miss.
  Bitstring sample(const Register& cluster, double u);

  bool compatible(const PulseSequence& pulses, double c6) const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  PulseSequence pulses_;
  double c6_;
  std::size_t max_qubits_;
  std::size_t max_bytes_;
  std::size_t bytes_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::map<std::string, std::shared_ptr<const std::vector<double>>> entries_;
};

enum class LoadingMode { binomial, fixed_count };

std::string to_string(LoadingMode m);
LoadingMode loading_mode_from_string(const std::string& s);

struct RgsOptions {
  LoadingMode loading = LoadingMode::binomial;
  double p = 0.55;
  double c6 = kDefaultC6;
  std::size_t cluster_cap = 14;
  bool relabel = true;
  std::size_t relabel_iters = 0;  // 0 selects 10 N
  std::shared_ptr<ClusterCache> cache;  // optional, shared across runs
  // When set, the run ends after the first scored cycle whose gap to this
  // reference cost is below stop_gap; the trace is then shorter than n_cycles.
  std::optional<double> stop_reference;
  double stop_gap = 0.01;
};

// Per-cycle measurement kept for reuse at other sizes.
struct RawCycle {
  std::vector<std::vector<std::size_t>> clusters;  // pattern site indices
  std::vector<Bitstring> cluster_bits;             // bit k = clusters[c][k]
  std::size_t atom_count() const;
};

struct RgsRun {
  SolveTrace trace;
  std::vector<RawCycle> raw;
  std::size_t detached_atoms = 0;
};

RgsRun rgs_run(const QuboMatrix& q, const TrapPattern& pattern, const PulseSequence& pulses,
               std::size_t n_cycles, std::uint64_t seed, const RgsOptions& options = {});

SolveTrace rgs_solve(const QuboMatrix& q, const TrapPattern& pattern, const PulseSequence& pulses,
                     std::size_t n_cycles, std::uint64_t seed, const RgsOptions& options = {});

// All cluster bitstrings of exactly target_n bits.
std::vector<Bitstring> reuse_subsize(std::span<const RawCycle> cycles, std::size_t target_n);

}  // namespace qboost
