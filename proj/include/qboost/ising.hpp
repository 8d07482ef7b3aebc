#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qboost/io.hpp"
#include "qboost/qubo.hpp"

namespace qboost {

// Units: positions in micrometres, angular frequencies in rad/s, times in
// seconds, hbar = 1.

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// C6 of the 87Rb 70S_1/2 Rydberg level, 2*pi x 862690 MHz um^6, in rad um^6 / s.
inline constexpr double kDefaultC6 = 2.0 * 3.141592653589793 * 862690.0e6;

struct Register {
  std::vector<Position> positions;
  double c6 = kDefaultC6;

  std::size_t size() const { return positions.size(); }
  void validate() const;
  // Atoms reordered so that new atom i is old atom order[i].
  Register permuted(std::span<const std::size_t> order) const;
};

// Piecewise-constant drive: on each segment Omega and delta are constant.
struct PulseSegment {
  double duration = 0.0;
  double omega = 0.0;
  double delta = 0.0;
};

struct PulseSequence {
  std::vector<PulseSegment> segments;

  double total_duration() const;
  void validate() const;
};

void to_json(Json& j, const Register& r);
void from_json(const Json& j, Register& r);
void to_json(Json& j, const PulseSequence& p);
void from_json(const Json& j, PulseSequence& p);

using Amplitude = std::complex<double>;

// Amplitudes a_w over the 2^N basis states; bit i of the basis index is the
// Rydberg occupation of atom i.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<Amplitude> amplitudes);

  // |0...0>
  static StateVector ground(std::size_t n_qubits);
  static StateVector basis(const Bitstring& w);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  std::vector<Amplitude>& amplitudes() { return amps_; }
  double norm() const;
  std::vector<double> probabilities() const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

inline constexpr std::size_t kMaxStateQubits = 22;

// U_ij = C6 / r_ij^6 with zero diagonal.
Eigen::MatrixXd interaction_matrix(const Register& reg);

// H = sum_i (Omega/2 sigma^x_i - delta n_i) + sum_{i<j} U_ij n_i n_j.
// The interaction diagonal is computed once per register and shared by the
// Hamiltonians of every pulse segment.
class IsingHamiltonian {
 public:
  IsingHamiltonian(const Register& reg, double omega, double delta);
  IsingHamiltonian(std::shared_ptr<const std::vector<double>> interaction_energy,
                   std::size_t n_qubits, double omega, double delta);

  std::size_t n_qubits() const { return n_; }
  double diagonal(std::size_t x) const;
  // out = (H - shift) in
  void apply(std::span<const Amplitude> in, std::span<Amplitude> out, double shift = 0.0) const;
  // Interval containing the spectrum.
  std::pair<double, double> spectral_bounds() const;
  double expectation(const StateVector& psi) const;
  Eigen::MatrixXcd dense() const;

  static std::shared_ptr<const std::vector<double>> interaction_energies(const Register& reg);

 private:
  std::size_t n_;
  double omega_;
  double delta_;
  std::shared_ptr<const std::vector<double>> eint_;
};

// exp(-i H t) psi via Lanczos-Krylov steps with a posteriori error control.
void propagate(const IsingHamiltonian& h, double t, StateVector& psi);

StateVector evolve(const Register& reg, const PulseSequence& pulses, const StateVector& initial);

std::vector<Bitstring> sample(const StateVector& state, std::size_t n_shots, std::uint64_t seed);
// Draws one basis index from a probability vector.
std::uint64_t sample_index(std::span<const double> probabilities, double u);

}  // namespace qboost
