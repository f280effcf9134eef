/**
 * Generative model: a pmf over M symbols, i.i.d. samples of length N,
 * histograms, occupancy sets, and the missing-mass quantities built on them.
 *
 * Symbols are 0-based indices internally; text I/O is 1-based.
 */

#ifndef MISSINGMASS_MODEL_HPP
#define MISSINGMASS_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "missingmass/rng.hpp"

namespace missingmass {

/**
 * Probability vector over M symbols. Entries are strictly positive (the
 * information matrices divide by them) and sum to one within 1e-12.
 */
class Pmf {
 public:
  static constexpr double kDefaultFloor = 1e-12;
  static constexpr double kSumTol = 1e-12;

  explicit Pmf(std::vector<double> theta, double floor = kDefaultFloor)
      : theta_(std::move(theta)) {
    validate(theta_, floor);
  }

  std::size_t size() const { return theta_.size(); }
  double operator[](std::size_t m) const { return theta_[m]; }
  const std::vector<double>& values() const { return theta_; }

  static void validate(const std::vector<double>& theta, double floor = kDefaultFloor) {
    if (theta.size() < 2) throw std::invalid_argument("pmf: need at least 2 symbols");
    std::string bad;
    double sum = 0.0;
    for (std::size_t m = 0; m < theta.size(); ++m) {
      if (!(theta[m] >= floor)) {
        bad += (bad.empty() ? "" : ", ") + std::string("theta[") + std::to_string(m + 1) +
               "]=" + std::to_string(theta[m]);
      }
      sum += theta[m];
    }
    if (!bad.empty())
      throw std::invalid_argument("pmf: entries below positivity floor: " + bad);
    if (std::abs(sum - 1.0) > kSumTol)
      throw std::invalid_argument("pmf: entries sum to " + std::to_string(sum) +
                                  ", expected 1 within 1e-12");
  }

 private:
  std::vector<double> theta_;
};

inline Pmf uniform_pmf(std::size_t m_symbols) {
  if (m_symbols < 2) throw std::invalid_argument("uniform pmf: need M >= 2");
  return Pmf(std::vector<double>(m_symbols, 1.0 / static_cast<double>(m_symbols)));
}

/// theta_m proportional to (m+1)^{-s}; s = 0 degenerates to the uniform pmf.
inline Pmf zipf_pmf(std::size_t m_symbols, double skew) {
  if (m_symbols < 2) throw std::invalid_argument("zipf pmf: need M >= 2");
  if (!(skew >= 0.0)) throw std::invalid_argument("zipf pmf: need s >= 0");
  std::vector<double> theta(m_symbols);
  double z = 0.0;
  for (std::size_t m = 0; m < m_symbols; ++m) {
    theta[m] = std::pow(static_cast<double>(m + 1), -skew);
    z += theta[m];
  }
  for (double& t : theta) t /= z;
  // renormalise exactly so the sum invariant is met bit-for-bit
  double s = 0.0;
  for (double t : theta) s += t;
  for (double& t : theta) t /= s;
  return Pmf(theta);
}

/// One probability per line; '#' starts a comment.
inline Pmf read_pmf(std::istream& in) {
  std::vector<double> theta;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    while (ls >> v) theta.push_back(v);
  }
  return Pmf(theta);
}

inline void write_pmf(std::ostream& out, const Pmf& pmf) {
  out.precision(17);
  for (std::size_t m = 0; m < pmf.size(); ++m) out << pmf[m] << "\n";
}

/**
 * An observation vector with its histogram and occupancy sets.
 * occupancy(r) is the set of symbols seen exactly r times; the sets for the
 * r values that occur partition {0..M-1}, and sum_m counts[m] == N.
 */
class SampleSet {
 public:
  SampleSet(std::size_t m_symbols, std::vector<int> x) : m_(m_symbols), x_(std::move(x)) {
    if (x_.empty()) throw std::invalid_argument("sample set: need N >= 1");
    counts_.assign(m_, 0);
    for (int s : x_) {
      if (s < 0 || static_cast<std::size_t>(s) >= m_)
        throw std::invalid_argument("sample set: symbol index out of range");
      ++counts_[static_cast<std::size_t>(s)];
    }
    index_occupancy();
  }

  static SampleSet from_counts(std::size_t m_symbols, const std::vector<int>& counts) {
    std::vector<int> x;
    for (std::size_t m = 0; m < counts.size(); ++m)
      x.insert(x.end(), static_cast<std::size_t>(counts[m]), static_cast<int>(m));
    return SampleSet(m_symbols, std::move(x));
  }

  std::size_t num_symbols() const { return m_; }
  std::size_t sample_size() const { return x_.size(); }
  const std::vector<int>& sequence() const { return x_; }
  const std::vector<int>& counts() const { return counts_; }
  int count(std::size_t m) const { return counts_[m]; }

  /// Symbols observed exactly r times (empty set when no symbol has count r).
  const std::vector<int>& occupancy(int r) const {
    static const std::vector<int> empty;
    auto it = occupancy_.find(r);
    return it == occupancy_.end() ? empty : it->second;
  }

  const std::vector<int>& unseen() const { return occupancy(0); }
  bool is_unseen(std::size_t m) const { return counts_[m] == 0; }

  /// r -> G_{N,r}, sparse over the r values that actually occur.
  const std::map<int, std::vector<int>>& occupancy_sets() const { return occupancy_; }

 private:
  std::size_t m_;
  std::vector<int> x_;
  std::vector<int> counts_;
  std::map<int, std::vector<int>> occupancy_;

  void index_occupancy() {
    occupancy_.clear();
    for (std::size_t m = 0; m < m_; ++m) occupancy_[counts_[m]].push_back(static_cast<int>(m));
  }
};

/// N i.i.d. draws from the pmf; deterministic for a fixed stream.
inline SampleSet draw_samples(const Pmf& pmf, std::size_t n_samples, rng& stream) {
  if (n_samples < 1) throw std::invalid_argument("draw_samples: need N >= 1");
  alias_table table(pmf.values());
  std::vector<int> x(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) x[i] = table.draw(stream);
  return SampleSet(pmf.size(), std::move(x));
}

/// Seed-based convenience overload.
inline SampleSet draw_samples(const Pmf& pmf, std::size_t n_samples, std::uint64_t seed) {
  rng stream(seed);
  return draw_samples(pmf, n_samples, stream);
}

/// Histogram-only draw for hot Monte Carlo loops; same stream discipline.
inline void draw_counts(const alias_table& table, std::size_t n_samples, rng& stream,
                        std::vector<int>& counts_out) {
  counts_out.assign(table.size(), 0);
  for (std::size_t i = 0; i < n_samples; ++i) ++counts_out[static_cast<std::size_t>(table.draw(stream))];
}

/// Probability that symbol m never shows up in N draws: (1 - theta_m)^N.
inline double pr_unobserved(const Pmf& pmf, std::size_t n_samples, std::size_t m) {
  return std::pow(1.0 - pmf[m], static_cast<double>(n_samples));
}

/// Total true probability of the symbols unseen in the sample.
inline double missing_mass(const Pmf& pmf, const SampleSet& s) {
  double total = 0.0;
  for (int m : s.unseen()) total += pmf[static_cast<std::size_t>(m)];
  return total;
}

/// Squared error accumulated only over the unseen symbols.
inline double mm_cost(const std::vector<double>& estimate, const Pmf& pmf, const SampleSet& s) {
  if (estimate.size() != pmf.size()) throw std::invalid_argument("mm_cost: dimension mismatch");
  double cost = 0.0;
  for (int m : s.unseen()) {
    const double d = estimate[static_cast<std::size_t>(m)] - pmf[static_cast<std::size_t>(m)];
    cost += d * d;
  }
  return cost;
}

/**
 * p(x | symbol m unseen; theta): prod_l theta_l^{C_l} / (1 - theta_m)^N when
 * m is unseen in x, zero otherwise.
 */
inline double conditional_pmf_value(const Pmf& pmf, const SampleSet& s, std::size_t m) {
  if (!s.is_unseen(m)) return 0.0;
  double logp = 0.0;
  for (std::size_t l = 0; l < pmf.size(); ++l)
    if (s.count(l) > 0) logp += s.count(l) * std::log(pmf[l]);
  logp -= static_cast<double>(s.sample_size()) * std::log(1.0 - pmf[m]);
  return std::exp(logp);
}

}  // namespace missingmass

#endif  // MISSINGMASS_MODEL_HPP
