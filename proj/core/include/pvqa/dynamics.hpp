#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pvqa/model.hpp"
#include "pvqa/schedule.hpp"

namespace pvqa {

using Amplitude = std::complex<double>;

/// 2^n amplitudes; basis index b is read bitwise as a SpinConfig (bit i = variable i).
class StateVector {
 public:
  StateVector() = default;
  StateVector(std::size_t n, std::vector<Amplitude> amplitudes);

  std::size_t n() const { return n_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  std::span<Amplitude> amplitudes() { return amplitudes_; }
  const Amplitude& operator[](std::size_t b) const { return amplitudes_[b]; }

  double norm_squared() const;

 private:
  std::size_t n_ = 0;
  std::vector<Amplitude> amplitudes_;
};

/// Probability mass keyed by configuration index. `shots` is set for empirical
/// distributions and records the sample count behind the masses.
struct Distribution {
  std::size_t n = 0;
  std::map<std::uint64_t, double> mass;
  std::optional<std::size_t> shots;

  double total() const;
  double at(std::uint64_t index) const;
};

/// min(1e-3, T / 1000).
double default_dt(double horizon);

/// Uniform superposition, the ground state of -sum_i sigma^x_i.
StateVector initial_state(std::size_t n);

/// [s H_Ising + (1 - s) H_q] |psi>, with H_q = -sum_i sigma^x_i.
StateVector apply_hamiltonian(const IsingModel& m, double s, const StateVector& psi);
/// Same with a precomputed diagonal (`energies[b]` = Ising energy of basis state b).
StateVector apply_hamiltonian(std::span<const double> energies, double s, const StateVector& psi);

/// Classical RK4 for d psi / dt = -i H(s(t)) psi from the initial state. Steps land
/// exactly on schedule breakpoints and on the end of the evolved window.
StateVector evolve_rk4(const IsingModel& m, const Schedule& sch, double dt);
StateVector evolve_rk4(std::span<const double> energies, std::size_t n, const Schedule& sch, double dt);

/// RK4 evolution that remembers the state entering every segment of the last
/// schedule it ran. A schedule sharing a prefix of identical segments resumes
/// from the first segment that differs, bit-identical to a full run.
class CachedRk4 {
 public:
  CachedRk4(std::vector<double> energies, std::size_t n, double dt);
  ~CachedRk4();
  CachedRk4(CachedRk4&&) noexcept;
  CachedRk4& operator=(CachedRk4&&) noexcept;

  StateVector evolve(const Schedule& sch);
  std::size_t resumed_runs() const { return resumed_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t resumed_ = 0;
};

/// Alternating exact propagators e^{-i H_Ising d} and e^{-i H_q d} for a bang-bang path.
StateVector evolve_qaoa_exact(const IsingModel& m, const QaoaSchedule& sch);
StateVector evolve_qaoa_exact(std::span<const double> energies, std::size_t n, const QaoaSchedule& sch);

/// |amplitude|^2 normalised by the exact norm, dense over all 2^n configurations.
std::vector<double> probabilities(const StateVector& psi);
Distribution measure_distribution(const StateVector& psi);
Distribution dense_to_distribution(std::size_t n, std::span<const double> probs);

/// Empirical distribution of `shots` independent draws.
Distribution sample_shots(const Distribution& d, std::size_t shots, std::uint64_t seed);

/// CSV with header `config,probability`; configs are bit strings, variable 0 first.
void write_distribution_csv(std::ostream& out, const Distribution& d);

}  // namespace pvqa
