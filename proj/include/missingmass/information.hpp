/**
 * Score vectors and information matrices for the multinomial model.
 *
 * Two flavours of the conditional ("missing-mass") information matrix are
 * provided:
 *
 *  - nominal: the N-free diagonal D with
 *        D_mm = sum_{l != m} 1/(theta_l (1-theta_m)) - 1/(1-theta_m)^2.
 *    The unbiased-case bound built on it has a closed form in (M, N) for
 *    the uniform pmf, which the bounds module and its tests pin down.
 *
 *  - exact: the covariance of the conditional score columns. Its closed
 *    form is verified entry-by-entry against exhaustive enumeration in the
 *    test suite, and it is the right metric for estimator-specific bounds
 *    and the scoring iteration.
 *
 * The two do not coincide (the tests log the gap); both satisfy
 * U^T J U = N U^T D U for their own D because the difference terms lie in
 * the span of the all-ones vector.
 */

#ifndef MISSINGMASS_INFORMATION_HPP
#define MISSINGMASS_INFORMATION_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "missingmass/linalg.hpp"
#include "missingmass/model.hpp"

namespace missingmass {

/// Fisher information of the unconditional model: N(N-1) 11^T + N diag(1/theta).
inline mat fim(const Pmf& pmf, int n_samples) {
  const std::size_t m_count = pmf.size();
  const double n = static_cast<double>(n_samples);
  mat j(m_count, m_count, n * (n - 1.0));
  for (std::size_t m = 0; m < m_count; ++m) j(m, m) += n / pmf[m];
  return j;
}

/**
 * Conditional score matrix: column m is the gradient of
 * log p(x | symbol m unseen; theta), i.e. v + N/(1-theta_m) e_m with
 * v_l = C_l/theta_l, zeroed whenever m was observed.
 */
inline mat score_matrix(const Pmf& pmf, const SampleSet& s) {
  const std::size_t m_count = pmf.size();
  const double n = static_cast<double>(s.sample_size());
  mat delta(m_count, m_count);
  std::vector<double> v(m_count);
  for (std::size_t l = 0; l < m_count; ++l) v[l] = static_cast<double>(s.count(l)) / pmf[l];
  for (int m : s.unseen()) {
    const std::size_t mu = static_cast<std::size_t>(m);
    for (std::size_t l = 0; l < m_count; ++l) delta(l, mu) = v[l];
    delta(mu, mu) += n / (1.0 - pmf[mu]);
  }
  return delta;
}

enum class MmfimRoute { nominal, exact };

inline const char* route_name(MmfimRoute route) {
  return route == MmfimRoute::nominal ? "nominal" : "exact";
}

/// N-free diagonal of the nominal conditional information matrix.
inline vec mmfim_diag_nominal(const Pmf& pmf) {
  const std::size_t m_count = pmf.size();
  vec d(m_count, 0.0);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double om = 1.0 - pmf[m];
    double acc = 0.0;
    for (std::size_t l = 0; l < m_count; ++l)
      if (l != m) acc += 1.0 / (pmf[l] * om);
    d[m] = acc - 1.0 / (om * om);
  }
  return d;
}

/// Diagonal whose projection matches the exact conditional score covariance:
/// D_mm = (1/theta_m) sum_{l != m} (1-theta_l)^{N-1} - (1-theta_m)^{N-2}.
inline vec mmfim_diag_exact(const Pmf& pmf, int n_samples) {
  const std::size_t m_count = pmf.size();
  const double n = static_cast<double>(n_samples);
  vec pow_nm1(m_count), pow_nm2(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    pow_nm1[m] = std::pow(1.0 - pmf[m], n - 1.0);
    pow_nm2[m] = std::pow(1.0 - pmf[m], n - 2.0);
  }
  double sum_nm1 = 0.0;
  for (double p : pow_nm1) sum_nm1 += p;
  vec d(m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    d[m] = (sum_nm1 - pow_nm1[m]) / pmf[m] - pow_nm2[m];
  return d;
}

inline vec mmfim_diag(const Pmf& pmf, int n_samples, MmfimRoute route) {
  return route == MmfimRoute::nominal ? mmfim_diag_nominal(pmf)
                                      : mmfim_diag_exact(pmf, n_samples);
}

/// Full nominal conditional information matrix.
inline mat mmfim_closed_form(const Pmf& pmf, int n_samples) {
  const std::size_t m_count = pmf.size();
  const double n = static_cast<double>(n_samples);
  double ones_coeff = 0.0;
  for (std::size_t m = 0; m < m_count; ++m)
    ones_coeff += n * (n - 1.0) / std::pow(1.0 - pmf[m], 2.0) *
                  std::pow(1.0 - pmf[m], n);
  mat j(m_count, m_count, ones_coeff);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double rim = n / std::pow(1.0 - pmf[m], 2.0);
    for (std::size_t l = 0; l < m_count; ++l) {
      j(m, l) += rim;
      j(l, m) += rim;
    }
  }
  const vec d = mmfim_diag_nominal(pmf);
  for (std::size_t m = 0; m < m_count; ++m) j(m, m) += n * d[m];
  return j;
}

/// Full exact conditional score covariance, E[Delta Delta^T], in closed form.
inline mat mmfim_score_cov(const Pmf& pmf, int n_samples) {
  const std::size_t m_count = pmf.size();
  const double n = static_cast<double>(n_samples);
  vec w(m_count);  // (1-theta_m)^{N-2}
  double ones_coeff = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    w[m] = std::pow(1.0 - pmf[m], n - 2.0);
    ones_coeff += n * (n - 1.0) * w[m];
  }
  mat j(m_count, m_count, ones_coeff);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double hm = n * w[m];
    for (std::size_t l = 0; l < m_count; ++l) {
      j(m, l) += hm;
      j(l, m) += hm;
    }
  }
  const vec d = mmfim_diag_exact(pmf, n_samples);
  for (std::size_t m = 0; m < m_count; ++m) j(m, m) += n * d[m];
  return j;
}

/**
 * U^T J U computed as N U^T D U; when verify is set, the result is checked
 * against projecting the corresponding full matrix (the rank-one and
 * symmetrised-ones terms must vanish under U).
 */
inline mat projected_mmfim(const Pmf& pmf, int n_samples, const mat& u,
                           MmfimRoute route = MmfimRoute::nominal, bool verify = true) {
  const vec d = mmfim_diag(pmf, n_samples, route);
  const mat ut = transpose(u);
  mat du = u;  // D * U
  for (std::size_t i = 0; i < u.rows; ++i)
    for (std::size_t j = 0; j < u.cols; ++j) du(i, j) = d[i] * u(i, j);
  mat k = ut * du;
  for (double& x : k.a) x *= static_cast<double>(n_samples);
  if (verify) {
    const mat full = route == MmfimRoute::nominal ? mmfim_closed_form(pmf, n_samples)
                                                  : mmfim_score_cov(pmf, n_samples);
    const mat k_full = ut * (full * u);
    const double tol = 1e-10 * std::max(1.0, max_abs(k_full));
    if (max_abs(k - k_full) > tol)
      throw std::logic_error("projected information identity violated beyond tolerance");
  }
  return k;
}

}  // namespace missingmass

#endif  // MISSINGMASS_INFORMATION_HPP
