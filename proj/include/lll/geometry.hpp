#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lll/errors.hpp"

namespace lll {

// Scaled convention throughout: skeleton weights live in [0,1] with
// a_ij + a_ji <= 1, generated tuples in [0,1]^r. The engine's edge values
// (which sum to at most 2 per edge) are exactly twice these weights.

/// A point in the nonnegative orthant. Coordinates above 1 are allowed
/// (requirement tuples can exceed the cube) but are never representable.
struct Tuple {
  std::vector<double> coords;

  Tuple() = default;
  explicit Tuple(std::vector<double> c) : coords(std::move(c)) {}

  std::size_t rank() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }
};

inline void validate_tuple(const Tuple& t) {
  if (t.rank() < 1) throw ValidationError("tuple must have rank >= 1");
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (!(t[i] >= 0.0)) {
      throw ValidationError("tuple coordinate " + std::to_string(i) +
                            " is negative or NaN");
    }
  }
}

/// Skeleton edge weights a_ij for ordered pairs i != j, stored as a dense
/// r x r matrix with an unused diagonal.
struct Generator {
  std::size_t r = 0;
  std::vector<double> w;  // w[i*r + j] = a_ij

  Generator() = default;
  explicit Generator(std::size_t rank) : r(rank), w(rank * rank, 0.0) {}

  double a(std::size_t i, std::size_t j) const { return w[i * r + j]; }
  double& a(std::size_t i, std::size_t j) { return w[i * r + j]; }
};

inline void validate_generator(const Generator& g) {
  if (g.r < 1) throw ValidationError("generator must have rank >= 1");
  if (g.w.size() != g.r * g.r) {
    throw ValidationError("generator weight storage has wrong size");
  }
  for (std::size_t i = 0; i < g.r; ++i) {
    for (std::size_t j = 0; j < g.r; ++j) {
      if (i == j) continue;
      const double v = g.a(i, j);
      if (!(v >= 0.0) || v > 1.0) {
        throw ValidationError("generator weight a[" + std::to_string(i) + "][" +
                              std::to_string(j) + "] = " + std::to_string(v) +
                              " outside [0,1]");
      }
      if (i < j && g.a(i, j) + g.a(j, i) > 1.0) {
        throw ValidationError(
            "generator pair {" + std::to_string(i) + "," + std::to_string(j) +
            "} sums to " + std::to_string(g.a(i, j) + g.a(j, i)) + " > 1");
      }
    }
  }
}

inline bool is_nonzero_generator(const Generator& g) {
  for (std::size_t i = 0; i < g.r; ++i) {
    for (std::size_t j = 0; j < g.r; ++j) {
      if (i != j && g.a(i, j) == 0.0) return false;
    }
  }
  return true;
}

/// Row products: coordinate i of the generated tuple is the product of the
/// r-1 weights a_ij over j != i. The empty product at rank 1 is 1.
inline Tuple generate(const Generator& g) {
  validate_generator(g);
  Tuple t;
  t.coords.resize(g.r);
  for (std::size_t i = 0; i < g.r; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < g.r; ++j) {
      if (j != i) p *= g.a(i, j);
    }
    t.coords[i] = p;
  }
  return t;
}

/// First-order direction in which the generated tuple moves when weight mass
/// shifts from a_ji to a_ij: positive a_i/a_ij in slot i, negative a_j/a_ji
/// in slot j, zero elsewhere.
struct MovementVector {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> vec;
};

/// (h, b) with h >= 0, h != 0, normalized so that max component of h is 1.
struct Hyperplane {
  std::vector<double> h;
  double b = 0.0;

  double dot(const Tuple& t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * t[i];
    return s;
  }
};

/// Outcome of a representability query. `margin` is the best found value of
/// min_i(generated_i - query_i), a signed max-norm distance estimate; on the
/// quick-decision paths it is a bound of the same sign rather than the
/// optimum. `witness` is present exactly when member.
struct OracleResult {
  bool member = false;
  std::optional<Generator> witness;
  double margin = 0.0;
  long long iterations = 0;
};

namespace detail {

inline void require_generates(const Tuple& t, const Generator& g,
                              const char* where) {
  if (g.r != t.rank()) {
    throw ValidationError(std::string(where) +
                          ": generator rank does not match tuple");
  }
  const Tuple gen = generate(g);
  for (std::size_t i = 0; i < g.r; ++i) {
    if (std::abs(gen[i] - t[i]) > 1e-9) {
      throw ValidationError(std::string(where) +
                            ": generator does not generate the tuple "
                            "(coordinate " +
                            std::to_string(i) + ")");
    }
  }
}

inline void require_nonzero(const Generator& g, const char* where) {
  if (!is_nonzero_generator(g)) {
    throw DegeneracyError(std::string(where) +
                          ": generator has a zero weight");
  }
}

}  // namespace detail

/// Closed-form boundary height for rank 3. For (a, b) in the feasible strip
/// a + b <= 1 this is the largest c making (a, b, c) representable; outside
/// the strip no extension exists at all and the height is 0 (the closed form
/// itself turns spurious there, e.g. it is positive again at (0.6, 0.6)).
inline double boundary_height_r3(double a, double b) {
  if (!(a >= 0.0) || a > 1.0 || !(b >= 0.0) || b > 1.0) {
    throw RangeError("boundary_height_r3: inputs must lie in [0,1]");
  }
  if (a + b > 1.0) return 0.0;
  const double x = 4.0 * a;
  const double y = 4.0 * b;
  const double radicand = std::max(0.0, x * y * (4.0 - x) * (4.0 - y));
  const double f3 =
      4.0 + 0.5 * (x * y - 2.0 * x - 2.0 * y - std::sqrt(radicand));
  return std::max(0.0, f3 / 4.0);
}

/// The perturbed-generator trade: decrease every weight on row k by delta and
/// increase every weight pointing back at k by the same amount. Pair sums are
/// unchanged, so the result stays a valid generator; its k-th coordinate
/// drops while every other coordinate grows.
inline Tuple trade_epsilon(const Tuple& t, const Generator& g, std::size_t k,
                           double delta) {
  validate_tuple(t);
  validate_generator(g);
  detail::require_nonzero(g, "trade_epsilon");
  detail::require_generates(t, g, "trade_epsilon");
  if (k >= g.r) throw RangeError("trade_epsilon: index out of range");
  double limit = 1.0;
  for (std::size_t i = 0; i < g.r; ++i) {
    for (std::size_t j = 0; j < g.r; ++j) {
      if (i == j) continue;
      limit = std::min(limit, std::min(g.a(i, j), 1.0 - g.a(i, j)));
    }
  }
  if (!(delta >= 0.0) || delta >= limit) {
    throw RangeError("trade_epsilon: delta must lie in [0, " +
                     std::to_string(limit) + ")");
  }
  Generator b = g;
  for (std::size_t j = 0; j < g.r; ++j) {
    if (j == k) continue;
    b.a(k, j) = g.a(k, j) - delta;
    // Cap against the partner weight so the pair sum cannot creep past 1 by a
    // rounding ulp.
    b.a(j, k) = std::min(g.a(j, k) + delta, 1.0 - b.a(k, j));
  }
  return generate(b);
}

/// All r(r-1) movement vectors of t under g, ordered lexicographically by
/// (i, j).
inline std::vector<MovementVector> movement_vectors(const Tuple& t,
                                                    const Generator& g) {
  validate_tuple(t);
  validate_generator(g);
  detail::require_nonzero(g, "movement_vectors");
  detail::require_generates(t, g, "movement_vectors");
  std::vector<MovementVector> out;
  out.reserve(g.r * (g.r - 1));
  for (std::size_t i = 0; i < g.r; ++i) {
    for (std::size_t j = 0; j < g.r; ++j) {
      if (i == j) continue;
      MovementVector m;
      m.i = i;
      m.j = j;
      m.vec.assign(g.r, 0.0);
      m.vec[i] = t[i] / g.a(i, j);
      m.vec[j] = -t[j] / g.a(j, i);
      out.push_back(std::move(m));
    }
  }
  return out;
}

/// Supporting hyperplane at a maximal tuple. The normal is the closed-form
/// null vector of the stacked movement vectors w_01, ..., w_0(r-1):
/// h_0 = 1, h_j = (t_0 * a_j0) / (a_0j * t_j). At a maximal tuple the
/// remaining movement vectors lie in the same hyperplane; if they do not
/// (within tol), the input was not maximal or the generator inconsistent.
inline Hyperplane supporting_hyperplane(const Tuple& t, const Generator& g,
                                        double tol = 1e-10) {
  validate_tuple(t);
  validate_generator(g);
  detail::require_nonzero(g, "supporting_hyperplane");
  detail::require_generates(t, g, "supporting_hyperplane");
  const std::size_t r = g.r;
  if (r < 2) throw DegeneracyError("supporting_hyperplane: rank must be >= 2");
  for (std::size_t i = 0; i < r; ++i) {
    if (t[i] <= 0.0) {
      throw DegeneracyError(
          "supporting_hyperplane: tuple has a zero coordinate; use the "
          "axis-aligned hyperplane instead");
    }
  }
  std::vector<double> h(r);
  h[0] = 1.0;
  for (std::size_t j = 1; j < r; ++j) {
    h[j] = t[0] * g.a(j, 0) / (g.a(0, j) * t[j]);
  }
  const double hmax = *std::max_element(h.begin(), h.end());
  for (double& v : h) v /= hmax;

  Hyperplane plane;
  plane.h = std::move(h);
  plane.b = plane.dot(t);

  // Orthogonality against every movement vector is exactly the cycle
  // condition that characterizes maximal tuples.
  for (const MovementVector& m : movement_vectors(t, g)) {
    const double dot = plane.h[m.i] * m.vec[m.i] + plane.h[m.j] * m.vec[m.j];
    if (std::abs(dot) > tol) {
      throw DegeneracyError(
          "supporting_hyperplane: movement vector w_" + std::to_string(m.i) +
          std::to_string(m.j) + " leaves the plane by " + std::to_string(dot) +
          "; tuple not maximal or generator inconsistent");
    }
  }
  return plane;
}

/// Coefficients alpha_ij (sparse: at most r-1 nonzero) expressing
/// target - t as a combination of movement vectors.
struct Decomposition {
  std::vector<MovementVector> basis;   // all r(r-1) vectors, (i,j) order
  std::vector<double> alpha;           // aligned with basis
  int repair_iterations = 0;

  double alpha_of(std::size_t i, std::size_t j) const {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (basis[k].i == i && basis[k].j == j) return alpha[k];
    }
    throw RangeError("alpha_of: no such ordered pair");
  }
};

/// Sign-coherent decomposition of a point of H_a. Iterative repair: keep a
/// current point b (starting at t); while some coordinate is short and some
/// is long, shift mass along the movement vector joining one short and one
/// long coordinate with the step size that lands at least one of them exactly
/// on target. Each pass pins one coordinate for good, so r passes suffice.
inline Decomposition decompose_in_hyperplane(const Tuple& t,
                                             const Generator& g,
                                             const Tuple& target,
                                             double tol = 1e-9) {
  validate_tuple(t);
  validate_generator(g);
  detail::require_nonzero(g, "decompose_in_hyperplane");
  detail::require_generates(t, g, "decompose_in_hyperplane");
  const std::size_t r = g.r;
  if (target.rank() != r) {
    throw ValidationError("decompose_in_hyperplane: target rank mismatch");
  }
  const Hyperplane plane = supporting_hyperplane(t, g, std::max(tol, 1e-10));
  if (std::abs(plane.dot(target) - plane.b) > tol) {
    throw ValidationError(
        "decompose_in_hyperplane: target is not on the hyperplane (offset " +
        std::to_string(plane.dot(target) - plane.b) + ")");
  }

  Decomposition dec;
  dec.basis = movement_vectors(t, g);
  dec.alpha.assign(dec.basis.size(), 0.0);

  std::vector<double> cur = t.coords;
  // Coordinates within this much of target count as matched; movement-vector
  // entries are bounded below by min t_i, so step sizes stay well scaled.
  const double eps = 1e-13;
  std::vector<char> pinned(r, 0);

  for (std::size_t iter = 0; iter <= r; ++iter) {
    std::size_t short_k = r, long_l = r;
    double worst_short = eps, worst_long = eps;
    for (std::size_t i = 0; i < r; ++i) {
      const double gap = target[i] - cur[i];
      if (!pinned[i] && gap > worst_short) {
        worst_short = gap;
        short_k = i;
      }
      if (!pinned[i] && -gap > worst_long) {
        worst_long = -gap;
        long_l = i;
      }
    }
    if (short_k == r && long_l == r) break;
    if (short_k == r || long_l == r) {
      // Residual is one-sided; on the hyperplane this can only be roundoff.
      break;
    }
    if (iter == r) {
      throw InvariantCorruption(
          "decompose_in_hyperplane: repair loop exceeded rank iterations");
    }
    const std::size_t k = short_k, l = long_l;
    const double wk = t[k] / g.a(k, l);   // (w_kl)_k > 0
    const double wl = t[l] / g.a(l, k);   // -(w_kl)_l > 0
    const double step = std::min((target[k] - cur[k]) / wk,
                                 (cur[l] - target[l]) / wl);
    for (std::size_t idx = 0; idx < dec.basis.size(); ++idx) {
      if (dec.basis[idx].i == k && dec.basis[idx].j == l) {
        dec.alpha[idx] += step;
        break;
      }
    }
    cur[k] += step * wk;
    cur[l] -= step * wl;
    // Land the finished coordinate exactly to stop drift.
    if (std::abs(cur[k] - target[k]) <= std::abs(cur[l] - target[l])) {
      cur[k] = target[k];
      pinned[k] = 1;
    } else {
      cur[l] = target[l];
      pinned[l] = 1;
    }
    ++dec.repair_iterations;
  }

  for (std::size_t i = 0; i < r; ++i) {
    double rec = t[i];
    for (std::size_t idx = 0; idx < dec.basis.size(); ++idx) {
      rec += dec.alpha[idx] * dec.basis[idx].vec[i];
    }
    if (std::abs(rec - target[i]) > tol) {
      throw InvariantCorruption(
          "decompose_in_hyperplane: reconstruction misses target by " +
          std::to_string(rec - target[i]) + " in coordinate " +
          std::to_string(i));
    }
  }
  return dec;
}

/// Radius around a maximal tuple within which every point of its hyperplane
/// is representable: the minimum of the generator-validity radius
/// min(a_ij, 1-a_ij)/(2c) and the curvature radius min_k t_k / (2^r (2c)^r),
/// with c = max_i 1/t_i.
inline double local_representability_radius(const Tuple& t,
                                            const Generator& g) {
  validate_tuple(t);
  validate_generator(g);
  detail::require_nonzero(g, "local_representability_radius");
  detail::require_generates(t, g, "local_representability_radius");
  const std::size_t r = g.r;
  double tmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) tmin = std::min(tmin, t[i]);
  if (!(tmin > 0.0)) {
    throw DegeneracyError(
        "local_representability_radius: tuple has a zero coordinate");
  }
  const double c = 1.0 / tmin;
  double wmin = 1.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (i == j) continue;
      wmin = std::min(wmin, std::min(g.a(i, j), 1.0 - g.a(i, j)));
    }
  }
  const double validity = wmin / (2.0 * c);
  const double curvature =
      tmin / (std::pow(2.0, double(r)) * std::pow(2.0 * c, double(r)));
  return std::min(validity, curvature);
}

}  // namespace lll
