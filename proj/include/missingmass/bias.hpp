/**
 * Estimator-specific ingredients of the missing-mass bounds: the bias
 * vector over unseen events and the auxiliary cross-moment matrix S.
 *
 *   b_m = E[(theta_hat_m - theta_m) 1{m unseen}]
 *   S_{m,j} = E[theta_hat_m v_j 1{m unseen}]
 *             - N/(1-theta_m) E[theta_hat_m 1{m unseen}]   for j != m,
 *   S_{m,m} = 0,
 *
 * with v_j = C_j/theta_j. Row m of S equals
 * E[(theta_hat_m - E[theta_hat_m | m unseen]) 1{m unseen} Delta_{:,m}^T],
 * the cross-moment between centred estimation errors and conditional
 * scores; the test suite checks that identity by exhaustive enumeration.
 *
 * Everything is exact (histogram enumeration) or Monte Carlo with
 * per-entry standard errors; both modes share the same accumulation code.
 */

#ifndef MISSINGMASS_BIAS_HPP
#define MISSINGMASS_BIAS_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "missingmass/enumeration.hpp"
#include "missingmass/estimators.hpp"
#include "missingmass/linalg.hpp"
#include "missingmass/model.hpp"
#include "missingmass/rng.hpp"

namespace missingmass {

enum class ProfileMode { closed_form, enumeration, monte_carlo };

inline const char* profile_mode_name(ProfileMode m) {
  switch (m) {
    case ProfileMode::closed_form: return "closed_form";
    case ProfileMode::enumeration: return "enumeration";
    case ProfileMode::monte_carlo: return "monte_carlo";
  }
  return "?";
}

struct BiasProfile {
  vec b;  // length M
  mat S;  // M x M, row m <-> symbol m
  ProfileMode mode = ProfileMode::closed_form;
  std::size_t mc_samples = 0;
  std::uint64_t mc_seed = 0;
  vec b_stderr;  // per-entry, Monte Carlo mode only
  mat S_stderr;
};

/// Closed form for the empirical-frequency estimator: b_m = -theta_m (1-theta_m)^N,
/// S identically zero (unseen entries are constant zero, so the centred
/// errors vanish on the conditioning event).
inline BiasProfile bias_cml(const Pmf& pmf, int n_samples) {
  BiasProfile p;
  const std::size_t m_count = pmf.size();
  p.b.resize(m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    p.b[m] = -pmf[m] * pr_unobserved(pmf, static_cast<std::size_t>(n_samples), m);
  p.S = mat(m_count, m_count);
  p.mode = ProfileMode::closed_form;
  return p;
}

namespace detail {

/// One outcome's contribution to (b, S); weight-aware so the same code
/// serves exact enumeration (multinomial weights) and Monte Carlo (1/T).
struct profile_accumulator {
  const Pmf& pmf;
  int n_samples;
  bool track_variance;
  vec b_sum, b_sumsq;
  mat s_sum, s_sumsq;
  double weight_total = 0.0;

  profile_accumulator(const Pmf& p, int n, bool variance)
      : pmf(p),
        n_samples(n),
        track_variance(variance),
        b_sum(p.size(), 0.0),
        b_sumsq(p.size(), 0.0),
        s_sum(p.size(), p.size()),
        s_sumsq(p.size(), p.size()) {}

  void add(const std::vector<int>& counts, const std::vector<double>& theta_hat,
           double weight) {
    const std::size_t m_count = pmf.size();
    weight_total += weight;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (counts[m] != 0) continue;
      const double err = theta_hat[m] - pmf[m];
      b_sum[m] += weight * err;
      if (track_variance) b_sumsq[m] += weight * err * err;
      const double q = static_cast<double>(n_samples) / (1.0 - pmf[m]) * theta_hat[m];
      for (std::size_t j = 0; j < m_count; ++j) {
        if (j == m) continue;  // v_m = 0 on the conditioning event
        const double z = theta_hat[m] * static_cast<double>(counts[j]) / pmf[j] - q;
        s_sum(m, j) += weight * z;
        if (track_variance) s_sumsq(m, j) += weight * z * z;
      }
    }
  }
};

}  // namespace detail

/**
 * Bias profile of a closed-form estimator, by exact histogram enumeration.
 * Errors out when M^N exceeds the shared state cap.
 */
inline BiasProfile bias_enumerate(const EstimatorSpec& spec, const Pmf& pmf, int n_samples) {
  if (spec.kind == EstimatorKind::fisher_scoring)
    throw std::invalid_argument(
        "bias profile of the scoring estimator is not supported; profile its initializer");
  require_enumeration_feasible(pmf.size(), static_cast<std::size_t>(n_samples));
  detail::profile_accumulator acc(pmf, n_samples, false);
  std::vector<double> theta_hat(pmf.size());
  for_each_histogram(pmf.size(), n_samples, [&](const std::vector<int>& counts) {
    const double w = histogram_probability(pmf, counts, n_samples);
    estimate_theta_on_counts(spec, counts, n_samples, theta_hat);
    acc.add(counts, theta_hat, w);
  });
  BiasProfile p;
  p.b = acc.b_sum;
  p.S = acc.s_sum;
  p.mode = ProfileMode::enumeration;
  return p;
}

/**
 * Monte Carlo bias profile with `samples` fresh draws on the given stream.
 * The same draws feed every expectation (common random numbers), which is
 * what keeps the S estimate usable at moderate sample counts.
 */
inline BiasProfile bias_monte_carlo(const EstimatorSpec& spec, const Pmf& pmf, int n_samples,
                                    std::size_t samples, rng stream, bool with_stderr = true) {
  if (spec.kind == EstimatorKind::fisher_scoring)
    throw std::invalid_argument(
        "bias profile of the scoring estimator is not supported; profile its initializer");
  if (samples == 0) throw std::invalid_argument("bias profile: need at least one sample");
  detail::profile_accumulator acc(pmf, n_samples, with_stderr);
  alias_table table(pmf.values());
  std::vector<int> counts;
  std::vector<double> theta_hat(pmf.size());
  const double w = 1.0 / static_cast<double>(samples);
  for (std::size_t t = 0; t < samples; ++t) {
    rng trial = stream.derive(t);
    draw_counts(table, static_cast<std::size_t>(n_samples), trial, counts);
    estimate_theta_on_counts(spec, counts, n_samples, theta_hat);
    acc.add(counts, theta_hat, w);
  }
  BiasProfile p;
  p.b = acc.b_sum;
  p.S = acc.s_sum;
  p.mode = ProfileMode::monte_carlo;
  p.mc_samples = samples;
  if (with_stderr) {
    const double t = static_cast<double>(samples);
    p.b_stderr.resize(pmf.size());
    p.S_stderr = mat(pmf.size(), pmf.size());
    for (std::size_t m = 0; m < pmf.size(); ++m) {
      const double var_b = std::max(0.0, acc.b_sumsq[m] - acc.b_sum[m] * acc.b_sum[m]);
      p.b_stderr[m] = std::sqrt(var_b / t);
      for (std::size_t j = 0; j < pmf.size(); ++j) {
        const double var_s =
            std::max(0.0, acc.s_sumsq(m, j) - acc.s_sum(m, j) * acc.s_sum(m, j));
        p.S_stderr(m, j) = std::sqrt(var_s / t);
      }
    }
  }
  return p;
}

/// Mode-dispatching wrapper mirroring the two entry points above.
struct ProfileRequest {
  ProfileMode mode = ProfileMode::enumeration;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};

inline BiasProfile bias_empirical(const EstimatorSpec& spec, const Pmf& pmf, int n_samples,
                                  const ProfileRequest& req) {
  if (spec.kind == EstimatorKind::cml && req.mode == ProfileMode::closed_form)
    return bias_cml(pmf, n_samples);
  if (req.mode == ProfileMode::enumeration) return bias_enumerate(spec, pmf, n_samples);
  BiasProfile p = bias_monte_carlo(spec, pmf, n_samples, req.samples, rng(req.seed));
  p.mc_seed = req.seed;
  return p;
}

/// Flat CSV export: one row per entry of b and S, provenance alongside.
inline void write_profile_csv(std::ostream& out, const BiasProfile& p) {
  out << "quantity,row,col,value,stderr,provenance,samples,seed\n";
  out.precision(17);
  const std::string prov = profile_mode_name(p.mode);
  auto tail = [&](double se, bool has_se) {
    out << ',';
    if (has_se) out << se;
    out << ',' << prov << ',';
    if (p.mode == ProfileMode::monte_carlo) out << p.mc_samples;
    out << ',';
    if (p.mode == ProfileMode::monte_carlo) out << p.mc_seed;
    out << '\n';
  };
  const bool has_se = !p.b_stderr.empty();
  for (std::size_t m = 0; m < p.b.size(); ++m) {
    out << "b," << m + 1 << ",," << p.b[m];
    tail(has_se ? p.b_stderr[m] : 0.0, has_se);
  }
  for (std::size_t m = 0; m < p.S.rows; ++m)
    for (std::size_t j = 0; j < p.S.cols; ++j) {
      out << "S," << m + 1 << ',' << j + 1 << ',' << p.S(m, j);
      tail(has_se ? p.S_stderr(m, j) : 0.0, has_se);
    }
}

/**
 * Distance of a bias vector from the Lehmann-unbiased set {beta * ones}:
 * the norm of its projection onto the constraint null space. Zero exactly
 * when every symbol carries the same missing-mass bias.
 */
struct UnbiasednessDefect {
  double defect = 0.0;
  double beta = 0.0;  // mean bias, the constant the vector is closest to
};

inline UnbiasednessDefect unbiasedness_defect(const vec& b, const mat& u) {
  if (b.size() != u.rows) throw std::invalid_argument("unbiasedness_defect: dimension mismatch");
  UnbiasednessDefect out;
  vec proj(u.cols, 0.0);
  for (std::size_t j = 0; j < u.cols; ++j)
    for (std::size_t i = 0; i < u.rows; ++i) proj[j] += u(i, j) * b[i];
  out.defect = norm2(proj);
  double mean = 0.0;
  for (double x : b) mean += x;
  out.beta = mean / static_cast<double>(b.size());
  return out;
}

}  // namespace missingmass

#endif  // MISSINGMASS_BIAS_HPP
