/**
 * Seedable, splittable pseudo-random streams for Monte Carlo runs.
 *
 * Streams are derived from (master seed, stream index) so that results do
 * not depend on how trials are batched or scheduled: trial t always reads
 * stream derive(t) regardless of trial count or worker layout. The core
 * generator is splitmix64, hand-rolled so sequences are identical across
 * standard libraries and platforms.
 */

#ifndef MISSINGMASS_RNG_HPP
#define MISSINGMASS_RNG_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace missingmass {

class rng {
 public:
  explicit rng(std::uint64_t seed) : state_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Independent child stream; derivation is pure, the parent is untouched.
  rng derive(std::uint64_t stream_index) const {
    return rng(mix(state_ + 0x9e3779b97f4a7c15ULL * (stream_index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // 64-bit multiply-shift; bias is ~n/2^64, negligible for n <= 2^32.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/**
 * Walker/Vose alias table for O(1) categorical draws.
 * Construction is index-ordered and deterministic for a given weight vector.
 */
class alias_table {
 public:
  explicit alias_table(const std::vector<double>& weights) { build(weights); }

  int draw(rng& r) const {
    const std::size_t k = static_cast<std::size_t>(r.below(prob_.size()));
    return r.uniform01() < prob_[k] ? static_cast<int>(k) : alias_[k];
  }

  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;

  void build(const std::vector<double>& w) {
    const std::size_t n = w.size();
    if (n == 0) throw std::invalid_argument("alias_table: empty weight vector");
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument("alias_table: negative weight");
      total += x;
    }
    if (!(total > 0.0)) throw std::invalid_argument("alias_table: zero total weight");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = w[i] * n / total;
    std::vector<int> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = n; i-- > 0;)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
    while (!small.empty() && !large.empty()) {
      const int s = small.back();
      const int l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (int l : large) prob_[l] = 1.0;
    for (int s : small) prob_[s] = 1.0;  // numerical leftovers
  }
};

}  // namespace missingmass

#endif  // MISSINGMASS_RNG_HPP
