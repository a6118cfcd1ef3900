#include "pvqa/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pvqa/random.hpp"

namespace pvqa {

namespace {

void check_register(std::size_t n) {
  if (n < 1 || n > kMaxDenseVariables) {
    throw std::invalid_argument("spin count must lie in [1, " + std::to_string(kMaxDenseVariables) + "], got " +
                                std::to_string(n));
  }
}

void check_table(std::span<const double> energies, std::size_t n) {
  check_register(n);
  if (energies.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("energy table size does not match 2^n");
  }
}

// Kernels take restrict-qualified parameters so the loops vectorise without alias checks.

// k = -i H(s) in;  acc (=|+=) weight * k;  out = psi + a * k.
void stage_kernel(std::size_t dim, double s, double a, double weight, bool first, const double* __restrict e,
                  const double* __restrict ir, const double* __restrict ii, const double* __restrict xr,
                  const double* __restrict xi, const double* __restrict pr, const double* __restrict pi,
                  double* __restrict ar, double* __restrict ai, double* __restrict outr, double* __restrict outi) {
  const double drive = 1.0 - s;
  if (first) {
    for (std::size_t b = 0; b < dim; ++b) {
      const double kr = s * e[b] * ii[b] - drive * xi[b];
      const double ki = drive * xr[b] - s * e[b] * ir[b];
      ar[b] = weight * kr;
      ai[b] = weight * ki;
      outr[b] = pr[b] + a * kr;
      outi[b] = pi[b] + a * ki;
    }
  } else {
    for (std::size_t b = 0; b < dim; ++b) {
      const double kr = s * e[b] * ii[b] - drive * xi[b];
      const double ki = drive * xr[b] - s * e[b] * ir[b];
      ar[b] += weight * kr;
      ai[b] += weight * ki;
      outr[b] = pr[b] + a * kr;
      outi[b] = pi[b] + a * ki;
    }
  }
}

// psi += w (acc + k4)
void final_kernel(std::size_t dim, double s, double w, const double* __restrict e, const double* __restrict ir,
                  const double* __restrict ii, const double* __restrict xr, const double* __restrict xi,
                  const double* __restrict ar, const double* __restrict ai, double* __restrict pr,
                  double* __restrict pi) {
  const double drive = 1.0 - s;
  for (std::size_t b = 0; b < dim; ++b) {
    const double kr = s * e[b] * ii[b] - drive * xi[b];
    const double ki = drive * xr[b] - s * e[b] * ir[b];
    pr[b] += w * (ar[b] + kr);
    pi[b] += w * (ai[b] + ki);
  }
}

// Bits 0 and 1 act within aligned blocks of 4.
void low_bits_kernel(std::size_t dim, const double* __restrict in, double* __restrict out) {
  for (std::size_t base = 0; base < dim; base += 4) {
    out[base + 0] = in[base + 1] + in[base + 2];
    out[base + 1] = in[base + 0] + in[base + 3];
    out[base + 2] = in[base + 3] + in[base + 0];
    out[base + 3] = in[base + 2] + in[base + 1];
  }
}

void pair_kernel(std::size_t stride, const double* __restrict src_lo, const double* __restrict src_hi,
                 double* __restrict lo, double* __restrict hi) {
  for (std::size_t j = 0; j < stride; ++j) {
    lo[j] += src_hi[j];
    hi[j] += src_lo[j];
  }
}

// Split real/imaginary storage.
struct SplitState {
  std::vector<double> re;
  std::vector<double> im;

  explicit SplitState(std::size_t dim = 0) : re(dim, 0.0), im(dim, 0.0) {}
};

class Rk4Integrator {
 public:
  Rk4Integrator(std::span<const double> energies, std::size_t n)
      : energies_(energies), n_(n), dim_(std::size_t{1} << n), tmp_(dim_), tmp2_(dim_), x_(dim_), acc_(dim_) {}

  void step(SplitState& psi, const ScheduleSegment& seg, double t, double h) {
    const double s0 = seg.value_at(t);
    const double s_half = seg.value_at(t + 0.5 * h);
    const double s1 = seg.value_at(t + h);

    stage(s0, psi, psi, 0.5 * h, 1.0, true, tmp_);
    stage(s_half, tmp_, psi, 0.5 * h, 2.0, false, tmp2_);
    stage(s_half, tmp2_, psi, h, 2.0, false, tmp_);
    transverse(tmp_);
    final_kernel(dim_, s1, h / 6.0, energies_.data(), tmp_.re.data(), tmp_.im.data(), x_.re.data(), x_.im.data(),
                 acc_.re.data(), acc_.im.data(), psi.re.data(), psi.im.data());
  }

 private:
  void stage(double s, const SplitState& in, const SplitState& psi, double a, double weight, bool first,
             SplitState& out) {
    transverse(in);
    stage_kernel(dim_, s, a, weight, first, energies_.data(), in.re.data(), in.im.data(), x_.re.data(),
                 x_.im.data(), psi.re.data(), psi.im.data(), acc_.re.data(), acc_.im.data(), out.re.data(),
                 out.im.data());
  }

  // x_ = sum_i sigma^x_i in
  void transverse(const SplitState& in) {
    std::size_t first_bit = 0;
    if (n_ >= 2) {
      low_bits_kernel(dim_, in.re.data(), x_.re.data());
      low_bits_kernel(dim_, in.im.data(), x_.im.data());
      first_bit = 2;
    } else {
      std::fill(x_.re.begin(), x_.re.end(), 0.0);
      std::fill(x_.im.begin(), x_.im.end(), 0.0);
    }
    for (std::size_t bit = first_bit; bit < n_; ++bit) {
      const std::size_t stride = std::size_t{1} << bit;
      for (std::size_t base = 0; base < dim_; base += 2 * stride) {
        pair_kernel(stride, in.re.data() + base, in.re.data() + base + stride, x_.re.data() + base,
                    x_.re.data() + base + stride);
        pair_kernel(stride, in.im.data() + base, in.im.data() + base + stride, x_.im.data() + base,
                    x_.im.data() + base + stride);
      }
    }
  }

  std::span<const double> energies_;
  std::size_t n_;
  std::size_t dim_;
  SplitState tmp_;
  SplitState tmp2_;
  SplitState x_;
  SplitState acc_;
};

StateVector join(std::size_t n, const SplitState& s) {
  std::vector<Amplitude> amps(s.re.size());
  for (std::size_t b = 0; b < amps.size(); ++b) {
    amps[b] = {s.re[b], s.im[b]};
  }
  return StateVector(n, std::move(amps));
}

void check_schedule(const Schedule& sch) {
  const auto problems = validate(sch);
  if (!problems.empty()) {
    std::string msg = "invalid schedule:";
    for (const auto& p : problems) {
      msg += " " + p + ";";
    }
    throw std::invalid_argument(msg);
  }
}

}  // namespace

StateVector::StateVector(std::size_t n, std::vector<Amplitude> amplitudes) : n_(n), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("state vector length must be 2^n");
  }
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) {
    total += std::norm(a);
  }
  return total;
}

double Distribution::total() const {
  double t = 0.0;
  for (const auto& [b, p] : mass) {
    t += p;
  }
  return t;
}

double Distribution::at(std::uint64_t index) const {
  auto it = mass.find(index);
  return it == mass.end() ? 0.0 : it->second;
}

double default_dt(double horizon) { return std::min(1e-3, horizon / 1000.0); }

StateVector initial_state(std::size_t n) {
  check_register(n);
  const std::size_t dim = std::size_t{1} << n;
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  return StateVector(n, std::vector<Amplitude>(dim, Amplitude{a, 0.0}));
}

StateVector apply_hamiltonian(const IsingModel& m, double s, const StateVector& psi) {
  if (m.n() != psi.n()) {
    throw std::invalid_argument("dimension mismatch between model and state");
  }
  const auto energies = ising_energy_table(m);
  return apply_hamiltonian(energies, s, psi);
}

StateVector apply_hamiltonian(std::span<const double> energies, double s, const StateVector& psi) {
  if (energies.size() != psi.dimension()) {
    throw std::invalid_argument("dimension mismatch between energy table and state");
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("s must lie in [0, 1]");
  }
  const std::size_t dim = psi.dimension();
  std::vector<Amplitude> out(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    Amplitude flipped{0.0, 0.0};
    for (std::size_t i = 0; i < psi.n(); ++i) {
      flipped += psi[b ^ (std::size_t{1} << i)];
    }
    out[b] = s * energies[b] * psi[b] - (1.0 - s) * flipped;
  }
  return StateVector(psi.n(), std::move(out));
}

StateVector evolve_rk4(const IsingModel& m, const Schedule& sch, double dt) {
  const auto energies = ising_energy_table(m);
  return evolve_rk4(energies, m.n(), sch, dt);
}

StateVector evolve_rk4(std::span<const double> energies, std::size_t n, const Schedule& sch, double dt) {
  return CachedRk4(std::vector<double>(energies.begin(), energies.end()), n, dt).evolve(sch);
}

struct CachedRk4::Impl {
  std::vector<double> energies;
  std::size_t n;
  double dt;
  Rk4Integrator rk4;
  std::vector<ScheduleSegment> last;
  std::vector<SplitState> starts;  // starts[k]: state entering last[k]
  SplitState final_state;

  Impl(std::vector<double> e, std::size_t n_spins, double step)
      : energies(std::move(e)), n(n_spins), dt(step), rk4(energies, n_spins) {}
};

CachedRk4::CachedRk4(std::vector<double> energies, std::size_t n, double dt) {
  check_table(energies, n);
  if (!(dt > 0.0)) {
    throw std::invalid_argument("time step must be positive");
  }
  impl_ = std::make_unique<Impl>(std::move(energies), n, dt);
}

CachedRk4::~CachedRk4() = default;
CachedRk4::CachedRk4(CachedRk4&&) noexcept = default;
CachedRk4& CachedRk4::operator=(CachedRk4&&) noexcept = default;

StateVector CachedRk4::evolve(const Schedule& sch) {
  check_schedule(sch);
  auto& d = *impl_;
  const std::size_t dim = std::size_t{1} << d.n;
  auto segs = segments(sch);

  // Caching every segment start must stay within 2^24 stored doubles.
  const bool cache = segs.size() * dim <= (std::size_t{1} << 23);
  std::size_t first = 0;
  if (cache) {
    while (first < segs.size() && first < d.last.size() && segs[first].begin == d.last[first].begin &&
           segs[first].end == d.last[first].end && segs[first].s_begin == d.last[first].s_begin &&
           segs[first].s_end == d.last[first].s_end) {
      ++first;
    }
    if (first == segs.size() && segs.size() == d.last.size() && !segs.empty()) {
      ++resumed_;
      return join(d.n, d.final_state);
    }
    if (first > 0) {
      ++resumed_;
    }
  }

  SplitState psi(dim);
  if (first == 0) {
    std::fill(psi.re.begin(), psi.re.end(), 1.0 / std::sqrt(static_cast<double>(dim)));
  } else {
    psi = d.starts[first];
  }
  if (cache) {
    d.starts.resize(segs.size() + 1);
  } else {
    d.starts.clear();
  }

  for (std::size_t i = first; i < segs.size(); ++i) {
    const auto& seg = segs[i];
    if (cache) {
      d.starts[i] = psi;
    }
    const double length = seg.end - seg.begin;
    // Shrink the last step so the segment end is hit exactly.
    const double slack = 1e-9 * std::min(d.dt, length);
    for (std::size_t k = 0;; ++k) {
      const double t = seg.begin + static_cast<double>(k) * d.dt;
      if (t >= seg.end - slack) {
        break;
      }
      d.rk4.step(psi, seg, t, std::min(d.dt, seg.end - t));
    }
  }

  StateVector out = join(d.n, psi);
  if (std::abs(out.norm_squared() - 1.0) > 1e-4) {
    d.last.clear();
    throw std::runtime_error("integrator unstable, reduce dt");
  }
  if (cache) {
    d.last = std::move(segs);
    d.final_state = std::move(psi);
  } else {
    d.last.clear();
  }
  return out;
}

StateVector evolve_qaoa_exact(const IsingModel& m, const QaoaSchedule& sch) {
  const auto energies = ising_energy_table(m);
  return evolve_qaoa_exact(energies, m.n(), sch);
}

StateVector evolve_qaoa_exact(std::span<const double> energies, std::size_t n, const QaoaSchedule& sch) {
  check_table(energies, n);
  check_schedule(sch);
  StateVector psi = initial_state(n);
  auto amps = psi.amplitudes();
  const std::size_t dim = amps.size();
  double begin = 0.0;
  for (std::size_t i = 0; i < sch.breakpoints.size(); ++i) {
    const double d = sch.breakpoints[i] - begin;
    begin = sch.breakpoints[i];
    if (d == 0.0) {
      continue;
    }
    if (i % 2 == 0) {
      for (std::size_t b = 0; b < dim; ++b) {
        amps[b] *= std::polar(1.0, -energies[b] * d);
      }
    } else {
      // e^{-i H_q d} = prod_j (cos d + i sin d sigma^x_j)
      const double c = std::cos(d);
      const Amplitude is{0.0, std::sin(d)};
      for (std::size_t bit = 0; bit < n; ++bit) {
        const std::size_t stride = std::size_t{1} << bit;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
          for (std::size_t j = base; j < base + stride; ++j) {
            const Amplitude a0 = amps[j];
            const Amplitude a1 = amps[j + stride];
            amps[j] = c * a0 + is * a1;
            amps[j + stride] = is * a0 + c * a1;
          }
        }
      }
    }
  }
  return psi;
}

std::vector<double> probabilities(const StateVector& psi) {
  std::vector<double> p(psi.dimension());
  double total = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    p[b] = std::norm(psi[b]);
    total += p[b];
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot measure a zero state");
  }
  for (auto& v : p) {
    v /= total;
  }
  return p;
}

Distribution dense_to_distribution(std::size_t n, std::span<const double> probs) {
  Distribution d{n, {}, std::nullopt};
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b] != 0.0) {
      d.mass.emplace_hint(d.mass.end(), b, probs[b]);
    }
  }
  return d;
}

Distribution measure_distribution(const StateVector& psi) {
  const auto p = probabilities(psi);
  return dense_to_distribution(psi.n(), p);
}

Distribution sample_shots(const Distribution& d, std::size_t shots, std::uint64_t seed) {
  if (shots < 1) {
    throw std::invalid_argument("shots must be at least 1");
  }
  if (d.mass.empty()) {
    throw std::invalid_argument("cannot sample an empty distribution");
  }
  std::vector<std::uint64_t> support;
  std::vector<double> cdf;
  double running = 0.0;
  for (const auto& [b, p] : d.mass) {
    if (p > 0.0) {
      running += p;
      support.push_back(b);
      cdf.push_back(running);
    }
  }
  std::vector<std::size_t> counts(support.size(), 0);
  Rng rng(seed);
  for (std::size_t k = 0; k < shots; ++k) {
    const double u = uniform01(rng) * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    ++counts[idx];
  }
  Distribution out{d.n, {}, shots};
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (counts[i] != 0) {
      out.mass.emplace(support[i], static_cast<double>(counts[i]) / static_cast<double>(shots));
    }
  }
  return out;
}

void write_distribution_csv(std::ostream& out, const Distribution& d) {
  out << "config,probability\n";
  const auto precision = out.precision(17);
  for (const auto& [b, p] : d.mass) {
    out << SpinConfig::from_index(b, d.n).to_string() << ',' << p << '\n';
  }
  out.precision(precision);
}

}  // namespace pvqa
