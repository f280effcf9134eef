/**
 * Small dense linear algebra for simplex-constrained estimation.
 *
 * Everything here works on M x M matrices with M in the tens, so the
 * implementation favours determinism and clarity over asymptotics:
 * row-major storage, Jacobi eigendecomposition, no pivot heuristics that
 * could change results between runs.
 */

#ifndef MISSINGMASS_LINALG_HPP
#define MISSINGMASS_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace missingmass {

using vec = std::vector<double>;

struct mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major

  mat() = default;
  mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static mat identity(std::size_t n) {
    mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline mat transpose(const mat& m) {
  mat t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

inline mat operator*(const mat& x, const mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
  mat z(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

inline mat operator-(const mat& x, const mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matsub: shape mismatch");
  mat z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
  return z;
}

inline mat operator*(double s, const mat& x) {
  mat z = x;
  for (double& v : z.a) v *= s;
  return z;
}

inline vec operator*(const mat& x, const vec& y) {
  if (x.cols != y.size()) throw std::invalid_argument("matvec: shape mismatch");
  vec z(x.rows, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) z[i] += x(i, j) * y[j];
  return z;
}

inline double max_abs(const mat& m) {
  double v = 0.0;
  for (double x : m.a) v = std::max(v, std::abs(x));
  return v;
}

inline double frobenius_norm(const mat& m) {
  double s = 0.0;
  for (double x : m.a) s += x * x;
  return std::sqrt(s);
}

inline double norm2(const vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double trace(const mat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows, m.cols); ++i) s += m(i, i);
  return s;
}

/// Thrown when a projected information matrix is singular or too ill
/// conditioned for the bounds to be defined.
struct singular_projection_error : std::runtime_error {
  double condition;
  explicit singular_projection_error(double cond, const std::string& what)
      : std::runtime_error(what), condition(cond) {}
};

/**
 * Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
 * Returns eigenvalues in `values` and the orthonormal eigenvectors as the
 * columns of `vectors`. Deterministic sweep order; converges to machine
 * precision for the small matrices used here.
 */
struct sym_eig {
  vec values;
  mat vectors;
};

inline sym_eig eig_sym(mat s) {
  if (s.rows != s.cols) throw std::invalid_argument("eig_sym: not square");
  const std::size_t n = s.rows;
  mat v = mat::identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    if (off < 1e-30 * (1.0 + frobenius_norm(s))) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = s(p, p), aqq = s(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  sym_eig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = s(i, i);
  out.vectors = v;
  return out;
}

/// Spectral condition number (|lambda|_max / |lambda|_min) of a symmetric matrix.
inline double condition_sym(const mat& s) {
  sym_eig e = eig_sym(s);
  double lo = std::abs(e.values[0]), hi = lo;
  for (double l : e.values) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/**
 * Inverse of a symmetric matrix through its eigendecomposition.
 * Throws singular_projection_error when the condition number exceeds
 * `cond_cap` (default 1e12): downstream the failure means the constrained
 * information matrix is singular and the bound is undefined.
 */
inline mat inverse_sym(const mat& s, double cond_cap = 1e12) {
  sym_eig e = eig_sym(s);
  double lo = std::abs(e.values[0]), hi = lo;
  for (double l : e.values) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  const double cond = (lo == 0.0) ? std::numeric_limits<double>::infinity() : hi / lo;
  if (!(cond <= cond_cap)) {
    throw singular_projection_error(
        cond, "projected matrix is singular or ill-conditioned (condition estimate " +
                  std::to_string(cond) + "); constrained information is degenerate");
  }
  const std::size_t n = s.rows;
  mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += e.vectors(i, k) * e.vectors(j, k) / e.values[k];
      out(i, j) = acc;
    }
  // enforce exact symmetry of the result
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = m;
      out(j, i) = m;
    }
  return out;
}

/**
 * Orthonormal basis of the null space of the all-ones row vector:
 * an M x (M-1) matrix U with 1^T U = 0 and U^T U = I.
 *
 * Helmert construction, closed form and deterministic: column k has
 * 1/sqrt(k(k+1)) in its first k entries and -k/sqrt(k(k+1)) in entry k+1.
 */
inline mat nullspace_basis(std::size_t m_symbols) {
  if (m_symbols < 2)
    throw std::invalid_argument("nullspace_basis: constraint leaves no free directions (need M >= 2)");
  mat u(m_symbols, m_symbols - 1);
  for (std::size_t k = 1; k < m_symbols; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (std::size_t i = 0; i < k; ++i) u(i, k - 1) = scale;
    u(k, k - 1) = -static_cast<double>(k) * scale;
  }
  return u;
}

/**
 * U (U^T A U)^{-1} U^T for symmetric A and a null-space basis U.
 * This is the kernel shared by all the constrained bounds; the thrown
 * error carries the condition estimate of U^T A U.
 */
inline mat projected_inverse_quadratic(const mat& a, const mat& u, double cond_cap = 1e12) {
  const mat ut = transpose(u);
  const mat b = ut * (a * u);
  const mat binv = inverse_sym(b, cond_cap);
  return u * (binv * ut);
}

}  // namespace missingmass

#endif  // MISSINGMASS_LINALG_HPP
