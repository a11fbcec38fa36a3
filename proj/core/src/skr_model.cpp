#include "qroute/skr_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace qroute {

namespace {

void check_fidelity(double f) {
  if (!(f > 0.25) || !(f <= 1.0)) {
    throw std::invalid_argument("fidelity must be in (0.25, 1], got " + std::to_string(f));
  }
}

}  // namespace

void PhysicalParams::validate() const {
  check_fidelity(fidelity);
  if (!(coherence_time_s > 0)) {  // +inf passes: no memory noise
    throw std::invalid_argument("coherence_time_s must be > 0 (or +inf)");
  }
  if (!(attenuation_db_per_km >= 0) || !std::isfinite(attenuation_db_per_km)) {
    throw std::invalid_argument("attenuation_db_per_km must be finite and >= 0");
  }
  if (!(signal_speed_km_s > 0) || !std::isfinite(signal_speed_km_s)) {
    throw std::invalid_argument("signal_speed_km_s must be positive and finite");
  }
}

double attenuation_success_prob(double length_km, double db_per_km) {
  if (!(length_km >= 0)) throw std::invalid_argument("length must be >= 0");
  return std::pow(10.0, -db_per_km * length_km / 10.0);
}

double attempt_duration_s(double max_length_km, double speed_km_s) {
  if (!(max_length_km > 0) || !(speed_km_s > 0)) {
    throw std::invalid_argument("lengths and speed must be positive");
  }
  return max_length_km / speed_km_s;
}

double initial_werner(double fidelity) {
  check_fidelity(fidelity);
  return (4.0 * fidelity - 1.0) / 3.0;
}

double binary_entropy(double q) {
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw std::invalid_argument("binary_entropy argument must be in [0, 1]");
  }
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double qber_threshold() {
  // h is strictly increasing on (0, 1/2) with h(0) = 0 and h(1/2) = 1, so the
  // level-1/2 crossing is unique; bisect well past the needed precision.
  static const double cached = [] {
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-13) {
      const double mid = (lo + hi) / 2;
      if (binary_entropy(mid) < 0.5) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return (lo + hi) / 2;
  }();
  return cached;
}

double werner_threshold() {
  static const double cached = 1.0 - 2.0 * qber_threshold();
  return cached;
}

double skf_from_werner(double w) {
  if (!(w >= 0.0) || !(w <= 1.0)) {
    throw std::invalid_argument("werner parameter must be in [0, 1]");
  }
  // At or below the distillability threshold the fraction is identically
  // zero; comparing against the cached threshold keeps it exactly 0 there
  // instead of within rounding of 0.
  if (w <= werner_threshold()) return 0.0;
  const double q = 0.5 * (1.0 - w);
  const double skf = 1.0 - 2.0 * binary_entropy(q);
  return skf > 0.0 ? skf : 0.0;
}

double max_links(double fidelity) {
  check_fidelity(fidelity);
  if (fidelity == 1.0) {
    throw std::domain_error("no finite link cutoff at fidelity 1");
  }
  return std::log(werner_threshold()) / std::log(initial_werner(fidelity));
}

std::int64_t sample_geometric(double p, SplitMix64& rng) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("geometric probability must be in (0, 1]");
  }
  if (p == 1.0) return 1;
  const double u = rng.uniform01();
  // Inversion: ceil(ln(1-U) / ln(1-p)); U = 0 maps to the minimum of 1.
  const double x = std::ceil(std::log1p(-u) / std::log1p(-p));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(x));
}

std::uint64_t chain_content_seed(std::uint64_t run_seed, const ChainSpec& chain) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double len : chain.lengths_km) {
    std::uint64_t bits;
    std::memcpy(&bits, &len, sizeof(bits));
    h = hash_bytes(&bits, sizeof(bits), h);
  }
  for (bool flag : chain.perfect_memory) {
    const unsigned char b = flag ? 1 : 0;
    h = hash_bytes(&b, 1, h);
  }
  return mix_seed(run_seed, h);
}

SkrEstimate simulate_skr(const ChainSpec& chain, const PhysicalParams& params,
                         std::uint64_t n_samples, std::uint64_t seed) {
  params.validate();
  if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
  const std::size_t n_links = chain.lengths_km.size();
  if (n_links == 0) throw std::invalid_argument("chain must have at least one link");
  if (!chain.perfect_memory.empty() && chain.perfect_memory.size() != n_links - 1) {
    throw std::invalid_argument("perfect_memory must have one flag per intermediate node");
  }

  double max_len = 0.0;
  for (double len : chain.lengths_km) {
    if (!(len > 0) || !std::isfinite(len)) {
      throw std::invalid_argument("link lengths must be positive and finite");
    }
    max_len = std::max(max_len, len);
  }

  const double t_att = attempt_duration_s(max_len, params.signal_speed_km_s);
  const double w0_pow = std::pow(initial_werner(params.fidelity),
                                 static_cast<double>(n_links));
  const double inv_T = std::isinf(params.coherence_time_s)
                           ? 0.0
                           : 1.0 / params.coherence_time_s;

  // Per-link inversion constants: X = ceil(log1p(-U) * inv_log_q); a link
  // with success probability 1 is marked by 0 and always takes one attempt.
  std::vector<double> inv_log_q(n_links);
  for (std::size_t i = 0; i < n_links; ++i) {
    const double p = attenuation_success_prob(chain.lengths_km[i],
                                              params.attenuation_db_per_km);
    inv_log_q[i] = (p >= 1.0) ? 0.0 : 1.0 / std::log1p(-p);
  }

  std::vector<char> noisy(n_links > 0 ? n_links - 1 : 0, 1);
  if (!chain.perfect_memory.empty()) {
    for (std::size_t k = 0; k + 1 < n_links; ++k) {
      noisy[k] = chain.perfect_memory[k] ? 0 : 1;
    }
  }

  std::vector<double> attempts(n_links);
  double sum_skf = 0.0, sum_dur = 0.0;
  double sum_skf2 = 0.0, sum_dur2 = 0.0, sum_cross = 0.0;
  for (std::uint64_t j = 0; j < n_samples; ++j) {
    SplitMix64 rng(mix_seed(seed, j));
    double x_max = 1.0;
    for (std::size_t i = 0; i < n_links; ++i) {
      double x = 1.0;
      if (inv_log_q[i] != 0.0) {
        const double u = rng.uniform01();
        x = std::ceil(std::log1p(-u) * inv_log_q[i]);
        if (x < 1.0) x = 1.0;
      }
      attempts[i] = x;
      if (x > x_max) x_max = x;
    }
    // Memory noise: each noisy intermediate node holds its first-completed
    // pair while the adjacent link finishes; gaps add up in the exponent.
    double gap_attempts = 0.0;
    for (std::size_t k = 0; k + 1 < n_links; ++k) {
      if (noisy[k]) gap_attempts += std::abs(attempts[k + 1] - attempts[k]);
    }
    double w = w0_pow;
    if (inv_T != 0.0 && gap_attempts != 0.0) {
      w *= std::exp(-gap_attempts * t_att * inv_T);
    }
    const double skf = skf_from_werner(w);
    const double dur = t_att * x_max;
    sum_skf += skf;
    sum_dur += dur;
    sum_skf2 += skf * skf;
    sum_dur2 += dur * dur;
    sum_cross += skf * dur;
  }

  SkrEstimate est;
  est.n_samples = n_samples;
  est.total_sim_time_s = sum_dur;
  est.skr_hz = sum_skf / sum_dur;
  // Delta-method error of the ratio estimator: var(sum(S - R D)) / (sum D)^2.
  const double r = est.skr_hz;
  const double resid2 = sum_skf2 - 2.0 * r * sum_cross + r * r * sum_dur2;
  est.stderr_hz = std::sqrt(std::max(0.0, resid2)) / sum_dur;
  return est;
}

SkrEstimate SkrEstimator::evaluate(const ChainSpec& chain) const {
  const auto est = simulate_skr(chain, params_, n_samples_,
                                chain_content_seed(run_seed_, chain));
  if (counter_ != nullptr) counter_->add(1);
  return est;
}

SkrEstimate SkrEstimator::evaluate_route(const PathRoute& route) const {
  if (route.lengths.empty()) {
    throw std::invalid_argument("route must span at least one edge");
  }
  return evaluate(ChainSpec{route.lengths, {}});
}

}  // namespace qroute
