#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "lll/geometry.hpp"
#include "lll/rng.hpp"

namespace lll {

/// Decisions at rank <= 3 are backed by closed forms; the search regime at
/// higher ranks carries a looser documented tolerance.
inline double default_oracle_tol(std::size_t r) {
  return r <= 3 ? 1e-9 : 1e-6;
}

namespace detail {

// Membership search over tight generators. Raising any weight never lowers a
// generated coordinate, so for domination queries it suffices to search
// generators with a_ij + a_ji = 1: one free parameter per unordered pair,
// a_ij = s_p for i < j and a_ji = 1 - s_p. The objective
// min_i(generated_i - t_i) is, in each single parameter, a minimum of affine
// functions, hence concave and unimodal: coordinate-wise golden-section
// ascent with multiple deterministic starts.
class TightSearch {
 public:
  explicit TightSearch(const std::vector<double>& target)
      : t_(target), r_(target.size()) {
    pidx_.assign(r_ * r_, -1);
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t j = i + 1; j < r_; ++j) {
        pidx_[i * r_ + j] = static_cast<int>(pairs_.size());
        pairs_.emplace_back(i, j);
      }
    }
  }

  std::size_t num_params() const { return pairs_.size(); }

  double target(std::size_t i) const { return t_[i]; }

  double factor(const std::vector<double>& s, std::size_t i,
                std::size_t j) const {
    return i < j ? s[pidx_[i * r_ + j]] : 1.0 - s[pidx_[j * r_ + i]];
  }

  double coord(const std::vector<double>& s, std::size_t i) const {
    double p = 1.0;
    for (std::size_t j = 0; j < r_; ++j) {
      if (j != i) p *= factor(s, i, j);
    }
    return p;
  }

  double margin(const std::vector<double>& s) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r_; ++i) m = std::min(m, coord(s, i) - t_[i]);
    return m;
  }

  /// Coordinate ascent until a full sweep stops improving. Returns the final
  /// margin; bails out early once `good_enough` is reached.
  double ascend(std::vector<double>& s, long long& evals,
                double good_enough) const {
    double cur = margin(s);
    ++evals;
    int stale = 0;
    for (int sweep = 0; sweep < 200 && stale < 2; ++sweep) {
      const double before = cur;
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        const auto [i, j] = pairs_[p];
        double A = 1.0, B = 1.0;
        for (std::size_t l = 0; l < r_; ++l) {
          if (l != i && l != j) A *= factor(s, i, l);
          if (l != j && l != i) B *= factor(s, j, l);
        }
        double C = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < r_; ++m) {
          if (m != i && m != j) C = std::min(C, coord(s, m) - t_[m]);
        }
        const double ti = t_[i], tj = t_[j];
        const auto f = [&](double x) {
          return std::min({A * x - ti, B * (1.0 - x) - tj, C});
        };
        double best_x = s[p];
        double best_v = f(best_x);
        const auto consider = [&](double x) {
          if (x < 0.0) x = 0.0;
          if (x > 1.0) x = 1.0;
          const double v = f(x);
          ++evals;
          if (v > best_v) {
            best_v = v;
            best_x = x;
          }
        };
        // Golden-section pass.
        {
          constexpr double kGr = 0.6180339887498949;
          double a = 0.0, b = 1.0;
          double x1 = b - kGr * (b - a), x2 = a + kGr * (b - a);
          double f1 = f(x1), f2 = f(x2);
          evals += 2;
          for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
              a = x1;
              x1 = x2;
              f1 = f2;
              x2 = a + kGr * (b - a);
              f2 = f(x2);
            } else {
              b = x2;
              x2 = x1;
              f2 = f1;
              x1 = b - kGr * (b - a);
              f1 = f(x1);
            }
            ++evals;
          }
          consider(0.5 * (a + b));
        }
        // The slice is a min of affine pieces, so its maximum sits on a kink
        // or an endpoint; checking them removes the golden-section residual.
        consider(0.0);
        consider(1.0);
        if (A + B > 0.0) consider((B + ti - tj) / (A + B));
        if (std::isfinite(C)) {
          if (A > 0.0) consider((ti + C) / A);
          if (B > 0.0) consider(1.0 - (tj + C) / B);
        }
        if (best_v > f(s[p])) {
          s[p] = best_x;
          cur = margin(s);
          ++evals;
          if (cur >= good_enough) return cur;
        }
      }
      stale = (cur - before < 1e-15) ? stale + 1 : 0;
    }
    return cur;
  }

  std::vector<double> heuristic_seed() const {
    std::vector<double> s(pairs_.size(), 0.5);
    std::vector<double> x(r_);
    const double inv = 1.0 / static_cast<double>(r_ - 1);
    for (std::size_t i = 0; i < r_; ++i) {
      x[i] = t_[i] > 0.0 ? std::pow(t_[i], inv) : 0.0;
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [i, j] = pairs_[p];
      s[p] = (x[i] + x[j] > 0.0) ? x[i] / (x[i] + x[j]) : 0.5;
    }
    return s;
  }

  /// Deterministic Kronecker-sequence start snapped onto the coarse grid
  /// (1/16 at rank <= 4, 1/8 above).
  std::vector<double> lattice_seed(int m) const {
    static constexpr std::array<double, 15> kPrimes = {
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    const double grid = r_ <= 4 ? 16.0 : 8.0;
    std::vector<double> s(pairs_.size());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const double alpha = std::sqrt(kPrimes[p % kPrimes.size()]);
      const double u = std::fmod((m + 1) * alpha, 1.0);
      s[p] = std::round(u * grid) / grid;
    }
    return s;
  }

  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const {
    return pairs_;
  }

  Generator materialize(const std::vector<double>& s) const {
    Generator g(r_);
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [i, j] = pairs_[p];
      g.a(i, j) = s[p];
      g.a(j, i) = 1.0 - s[p];
    }
    return g;
  }

 private:
  std::vector<double> t_;
  std::size_t r_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<int> pidx_;
};

inline int lattice_start_count(std::size_t r) {
  switch (r) {
    case 3: return 8;
    case 4: return 12;
    case 5: return 16;
    default: return 20;
  }
}

// Dense Gaussian elimination with partial pivoting; returns false on a
// numerically singular system. Sizes here are at most 16x16.
inline bool solve_dense(std::vector<std::vector<double>>& a,
                        std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    }
    if (std::abs(a[piv][col]) < 1e-14) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[row][c] -= f * a[col][c];
      b[row] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * b[j];
    b[i] = s / a[i][i];
  }
  return true;
}

/// Damped Newton with central-difference Jacobian on a square system given by
/// `residual`, with per-variable clamping bounds. True on convergence to
/// ||F||_inf <= 1e-13.
template <typename ResidualFn>
bool newton_solve(const ResidualFn& residual, std::vector<double>& x,
                  const std::vector<double>& lo, const std::vector<double>& hi,
                  int max_iters = 40) {
  const std::size_t n = x.size();
  auto norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double y : v) m = std::max(m, std::abs(y));
    return m;
  };
  std::vector<double> f = residual(x);
  if (f.size() != n) throw InvariantCorruption("newton_solve: not square");
  double fn = norm(f);
  for (int iter = 0; iter < max_iters && fn > 1e-13; ++iter) {
    std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
    for (std::size_t p = 0; p < n; ++p) {
      const double h = 1e-7;
      std::vector<double> xp = x, xm = x;
      xp[p] = std::min(hi[p], x[p] + h);
      xm[p] = std::max(lo[p], x[p] - h);
      const std::vector<double> fp = residual(xp);
      const std::vector<double> fm = residual(xm);
      const double dh = xp[p] - xm[p];
      if (dh == 0.0) return false;
      for (std::size_t row = 0; row < n; ++row) {
        jac[row][p] = (fp[row] - fm[row]) / dh;
      }
    }
    std::vector<double> step(n);
    for (std::size_t row = 0; row < n; ++row) step[row] = -f[row];
    if (!solve_dense(jac, step)) return false;
    bool accepted = false;
    for (double damp : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
      std::vector<double> cand(n);
      for (std::size_t p = 0; p < n; ++p) {
        cand[p] = std::min(hi[p], std::max(lo[p], x[p] + damp * step[p]));
      }
      const std::vector<double> fc = residual(cand);
      const double fcn = norm(fc);
      if (fcn < fn) {
        x = std::move(cand);
        f = fc;
        fn = fcn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return fn <= 1e-13;
}

struct SearchOutcome {
  double margin = -std::numeric_limits<double>::infinity();
  std::vector<double> s;
  long long evals = 0;
};

// Coordinate-wise ascent stalls on ridges where several slacks are tied (no
// single-parameter move helps although a joint move would). At an interior
// optimum all slacks are equal and the KKT multipliers force the weight
// cycles through a reference node to balance, which is a square smooth
// system in (s, m); a Newton polish from the stall point recovers the
// machine-precision optimum. Any polished point is adopted only if its
// directly evaluated margin improves, so results remain certificates.
inline void polish_margin(const TightSearch& ts, std::size_t r,
                          SearchOutcome& out) {
  const std::size_t P = ts.num_params();
  const auto residual = [&](const std::vector<double>& x) {
    std::vector<double> f;
    f.reserve(P + 1);
    const std::vector<double> s(x.begin(), x.begin() + P);
    const double m = x[P];
    for (std::size_t i = 0; i < r; ++i) {
      f.push_back(ts.coord(s, i) - ts.target(i) - m);
    }
    for (std::size_t i = 1; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) {
        const double lhs =
            ts.factor(s, i, 0) * ts.factor(s, 0, j) * ts.factor(s, j, i);
        const double rhs =
            ts.factor(s, j, 0) * ts.factor(s, 0, i) * ts.factor(s, i, j);
        f.push_back(lhs - rhs);
      }
    }
    return f;
  };
  std::vector<double> x = out.s;
  x.push_back(out.margin);
  std::vector<double> lo(P, 0.0), hi(P, 1.0);
  lo.push_back(-1e30);
  hi.push_back(1e30);
  if (!newton_solve(residual, x, lo, hi)) return;
  const std::vector<double> s(x.begin(), x.begin() + P);
  const double polished = ts.margin(s);
  ++out.evals;
  if (polished > out.margin) {
    out.margin = polished;
    out.s = s;
  }
}

inline SearchOutcome search_tight_margin(const std::vector<double>& target,
                                         double good_enough) {
  const TightSearch ts(target);
  const std::size_t r = target.size();
  SearchOutcome out;
  std::vector<std::vector<double>> seeds;
  seeds.push_back(ts.heuristic_seed());
  seeds.emplace_back(ts.num_params(), 0.5);
  for (int m = 0; m < lattice_start_count(r); ++m) {
    seeds.push_back(ts.lattice_seed(m));
  }
  for (auto& s : seeds) {
    const double m = ts.ascend(s, out.evals, good_enough);
    if (m > out.margin) {
      out.margin = m;
      out.s = s;
    }
    if (out.margin >= good_enough) break;
  }
  if (r >= 3 && out.margin < good_enough) polish_margin(ts, r, out);
  return out;
}

/// Core membership query: member iff the best margin found is >= `threshold`.
inline OracleResult oracle_query(const Tuple& t, double threshold) {
  validate_tuple(t);
  const std::size_t r = t.rank();
  OracleResult res;

  if (r == 1) {
    res.margin = 1.0 - t[0];
    res.member = res.margin >= threshold;
    if (res.member) res.witness = Generator(1);
    return res;
  }

  double above = 0.0;
  for (std::size_t i = 0; i < r; ++i) above = std::max(above, t[i] - 1.0);
  if (above > 0.0) {
    res.member = false;
    res.margin = -above;
    return res;
  }

  if (r == 2) {
    const double m = 0.5 * (1.0 - t[0] - t[1]);
    res.margin = m;
    res.member = m >= threshold;
    if (res.member) {
      Generator g(2);
      g.a(0, 1) = std::min(1.0, std::max(0.0, t[0] + m));
      g.a(1, 0) = 1.0 - g.a(0, 1);
      res.witness = std::move(g);
    }
    return res;
  }

  // Any representable tuple satisfies t_i + t_j <= a_ij + a_ji <= 1, and a
  // margin of m forces (t_i + m) + (t_j + m) <= 1.
  double pair_bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      pair_bound = std::min(pair_bound, 0.5 * (1.0 - t[i] - t[j]));
    }
  }
  if (pair_bound < threshold) {
    res.member = false;
    res.margin = pair_bound;
    return res;
  }

  // The symmetric all-1/2 generator dominates everything below 2^(1-r);
  // its products are exact powers of two.
  {
    const double sym = std::pow(0.5, double(r - 1));
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r; ++i) m = std::min(m, sym - t[i]);
    if (m >= std::max(0.0, threshold)) {
      Generator g(r);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          if (i != j) g.a(i, j) = 0.5;
        }
      }
      res.member = true;
      res.margin = m;
      res.witness = std::move(g);
      return res;
    }
  }

  const detail::SearchOutcome so =
      search_tight_margin(t.coords, std::max(threshold, 0.0) + 1e-12);
  res.iterations = so.evals;
  const TightSearch ts(t.coords);
  Generator g = ts.materialize(so.s);
  const Tuple gen = generate(g);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) m = std::min(m, gen[i] - t[i]);
  res.margin = m;
  res.member = m >= threshold;
  if (res.member) res.witness = std::move(g);
  return res;
}

}  // namespace detail

/// Membership in the representable set, within tol: member iff a generator
/// was found whose tuple falls short of dominating the query by at most tol.
inline OracleResult is_representable(const Tuple& t, double tol) {
  if (!(tol > 0.0)) throw RangeError("is_representable: tol must be > 0");
  return detail::oracle_query(t, -tol);
}

inline OracleResult is_representable(const Tuple& t) {
  return is_representable(t, default_oracle_tol(t.rank()));
}

/// Strict variant: member only if the found generator clears the query by at
/// least `min_margin` everywhere. Used when the caller needs domination to
/// hold in plain double comparisons rather than within tolerance.
inline OracleResult is_representable_with_margin(const Tuple& t,
                                                 double min_margin) {
  return detail::oracle_query(t, min_margin);
}

/// Largest k-th coordinate of a representable tuple agreeing with `prefix`
/// elsewhere (0-based k), located by bisection against the membership search,
/// then sharpened by a Newton polish of the boundary system when the point is
/// interior. Returns 0 when no representable extension exists.
inline double maximize_coordinate(const std::vector<double>& prefix,
                                  std::size_t k, double tol);

/// True iff no coordinate of t can be raised (beyond tol) while keeping the
/// others; equivalent to weak-domination maximality by downward closure.
inline bool is_maximal(const Tuple& t, double tol) {
  const OracleResult base = is_representable(t);
  if (!base.member) {
    throw ValidationError("is_maximal: tuple is not representable");
  }
  for (std::size_t k = 0; k < t.rank(); ++k) {
    std::vector<double> prefix;
    prefix.reserve(t.rank() - 1);
    for (std::size_t i = 0; i < t.rank(); ++i) {
      if (i != k) prefix.push_back(t[i]);
    }
    if (maximize_coordinate(prefix, k, tol) > t[k] + tol) return false;
  }
  return true;
}

namespace detail {

// Square residual system characterizing a maximal boundary point in the
// tight parameterization: the generated tuple must match the prefix off
// coordinate k, and the weight cycles through a reference node must balance
// (which is exactly what makes all movement vectors coplanar).
class BoundarySystem {
 public:
  BoundarySystem(const std::vector<double>& prefix, std::size_t k,
                 std::size_t r)
      : prefix_(prefix), k_(k), ts_(std::vector<double>(r, 0.0)), r_(r) {}

  std::size_t size() const { return r_ * (r_ - 1) / 2; }

  std::vector<double> residual(const std::vector<double>& s) const {
    std::vector<double> f;
    f.reserve(size());
    std::size_t pi = 0;
    for (std::size_t i = 0; i < r_; ++i) {
      if (i == k_) continue;
      f.push_back(ts_.coord(s, i) - prefix_[pi]);
      ++pi;
    }
    for (std::size_t i = 1; i < r_; ++i) {
      for (std::size_t j = i + 1; j < r_; ++j) {
        const double lhs =
            ts_.factor(s, i, 0) * ts_.factor(s, 0, j) * ts_.factor(s, j, i);
        const double rhs =
            ts_.factor(s, j, 0) * ts_.factor(s, 0, i) * ts_.factor(s, i, j);
        f.push_back(lhs - rhs);
      }
    }
    return f;
  }

  double coord_k(const std::vector<double>& s) const {
    return ts_.coord(s, k_);
  }

  /// Damped Newton from `s`; true on convergence with all parameters
  /// strictly interior.
  bool polish(std::vector<double>& s) const {
    const std::size_t n = size();
    const auto fn = [this](const std::vector<double>& x) {
      return residual(x);
    };
    const std::vector<double> lo(n, 1e-12), hi(n, 1.0 - 1e-12);
    if (!newton_solve(fn, s, lo, hi)) return false;
    for (double x : s) {
      if (x <= 1e-9 || x >= 1.0 - 1e-9) return false;
    }
    return true;
  }

 private:
  std::vector<double> prefix_;
  std::size_t k_;
  TightSearch ts_;
  std::size_t r_;
};

struct Bisection {
  double value = 0.0;
  std::vector<double> witness_s;  // tight parameters at the last member point
  bool at_boundary_zero = false;
};

inline Bisection bisect_boundary(const std::vector<double>& prefix,
                                 std::size_t k) {
  const std::size_t r = prefix.size() + 1;
  const double kThresh = -1e-12;
  auto with = [&](double c) {
    Tuple t;
    t.coords.reserve(r);
    std::size_t pi = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == k) {
        t.coords.push_back(c);
      } else {
        t.coords.push_back(prefix[pi++]);
      }
    }
    return t;
  };
  Bisection out;
  OracleResult at0 = oracle_query(with(0.0), kThresh);
  if (!at0.member) {
    out.at_boundary_zero = true;
    return out;
  }
  double pmax = 0.0;
  for (double v : prefix) pmax = std::max(pmax, v);
  double hi = std::min(1.0, 1.0 - pmax + 1e-9);
  double lo = 0.0;
  const TightSearch ts_probe(with(0.0).coords);
  std::vector<double> lo_witness;
  if (at0.witness) {
    lo_witness.resize(ts_probe.num_params());
    for (std::size_t p = 0; p < ts_probe.num_params(); ++p) {
      const auto [i, j] = ts_probe.pairs()[p];
      lo_witness[p] = at0.witness->a(i, j);
    }
  }
  {
    const OracleResult athi = oracle_query(with(hi), kThresh);
    if (athi.member) {
      out.value = hi;
      if (athi.witness) {
        for (std::size_t p = 0; p < ts_probe.num_params(); ++p) {
          const auto [i, j] = ts_probe.pairs()[p];
          lo_witness[p] = athi.witness->a(i, j);
        }
      }
      out.witness_s = lo_witness;
      return out;
    }
  }
  for (int it = 0; it < 50 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const OracleResult rm = oracle_query(with(mid), kThresh);
    if (rm.member) {
      lo = mid;
      if (rm.witness) {
        for (std::size_t p = 0; p < ts_probe.num_params(); ++p) {
          const auto [i, j] = ts_probe.pairs()[p];
          lo_witness[p] = rm.witness->a(i, j);
        }
      }
    } else {
      hi = mid;
    }
  }
  out.value = lo;
  out.witness_s = lo_witness;
  return out;
}

}  // namespace detail

inline double maximize_coordinate(const std::vector<double>& prefix,
                                  std::size_t k, double tol) {
  const std::size_t r = prefix.size() + 1;
  if (k >= r) throw RangeError("maximize_coordinate: index out of range");
  for (double v : prefix) {
    if (!(v >= 0.0) || v > 1.0) {
      throw ValidationError("maximize_coordinate: prefix outside [0,1]");
    }
  }
  if (!(tol > 0.0)) throw RangeError("maximize_coordinate: tol must be > 0");
  if (r == 1) return 1.0;  // the empty product is 1

  const detail::Bisection bis = detail::bisect_boundary(prefix, k);
  if (bis.at_boundary_zero) return 0.0;
  double best = bis.value;

  // Interior boundary points satisfy a square smooth system; a Newton polish
  // from the bisection witness removes the search tolerance when it applies.
  bool interior = best > 1e-6 && best < 1.0 - 1e-9;
  for (double v : prefix) interior = interior && v > 1e-9;
  if (interior && !bis.witness_s.empty() && r >= 3) {
    detail::BoundarySystem sys(prefix, k, r);
    std::vector<double> s = bis.witness_s;
    if (sys.polish(s)) {
      const double polished = sys.coord_k(s);
      if (std::abs(polished - best) <= 1e-5 && polished > 0.0 &&
          polished <= 1.0) {
        best = polished;
      }
    }
  }
  return best;
}

/// A maximal boundary point together with the generator that pins it; the
/// pair satisfies the hyperplane identities to machine precision.
struct MaximalPoint {
  Tuple t;
  Generator g;
};

inline MaximalPoint find_maximal_tuple(const std::vector<double>& prefix,
                                       std::size_t k) {
  const std::size_t r = prefix.size() + 1;
  if (r < 3) throw RangeError("find_maximal_tuple: rank must be >= 3");
  for (double v : prefix) {
    if (!(v > 0.0) || v >= 1.0) {
      throw ValidationError(
          "find_maximal_tuple: prefix must be strictly interior");
    }
  }
  const detail::Bisection bis = detail::bisect_boundary(prefix, k);
  if (bis.at_boundary_zero || bis.witness_s.empty()) {
    throw DegeneracyError("find_maximal_tuple: no representable extension");
  }
  detail::BoundarySystem sys(prefix, k, r);
  std::vector<double> s = bis.witness_s;
  if (!sys.polish(s)) {
    throw DegeneracyError("find_maximal_tuple: boundary polish diverged");
  }
  const double c = sys.coord_k(s);
  if (std::abs(c - bis.value) > 1e-5 || !(c > 0.0)) {
    throw DegeneracyError(
        "find_maximal_tuple: polish landed on a different branch");
  }
  MaximalPoint mp;
  const detail::TightSearch ts(std::vector<double>(r, 0.0));
  mp.g = ts.materialize(s);
  mp.t = generate(mp.g);
  return mp;
}

/// Corollary construction turning a weak dominator into a strict one: trade
/// at a coordinate where the dominator has slack, shrinking the trade until
/// every coordinate clears t.
inline Tuple strictly_dominating_tuple(const Tuple& t, const Tuple& weak,
                                       const Generator& weak_gen) {
  validate_tuple(t);
  validate_tuple(weak);
  if (weak.rank() != t.rank()) {
    throw ValidationError("strictly_dominating_tuple: rank mismatch");
  }
  std::size_t k = t.rank();
  double gap = 0.0;
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (weak[i] < t[i]) {
      throw ValidationError(
          "strictly_dominating_tuple: second tuple does not dominate");
    }
    if (weak[i] - t[i] > gap) {
      gap = weak[i] - t[i];
      k = i;
    }
  }
  if (k == t.rank()) {
    throw ValidationError(
        "strictly_dominating_tuple: tuples are equal, no slack to trade");
  }
  double limit = 1.0;
  for (std::size_t i = 0; i < weak_gen.r; ++i) {
    for (std::size_t j = 0; j < weak_gen.r; ++j) {
      if (i != j) {
        limit = std::min(limit,
                         std::min(weak_gen.a(i, j), 1.0 - weak_gen.a(i, j)));
      }
    }
  }
  double delta = 0.5 * limit;
  for (int it = 0; it < 80; ++it) {
    const Tuple cand = trade_epsilon(weak, weak_gen, k, delta);
    bool strict = true;
    for (std::size_t i = 0; i < t.rank(); ++i) {
      strict = strict && cand[i] > t[i];
    }
    if (strict) return cand;
    delta *= 0.5;
  }
  throw InvariantCorruption(
      "strictly_dominating_tuple: no trade size produced a strict dominator");
}

/// Sampled check that the non-representable region is closed under convex
/// combination. Samples land in the region by rejection against the
/// membership search; at rank 3 each would-be violation is cross-checked
/// against the closed-form boundary.
struct ConvexitySample {
  double lambda = 0.0;
  double margin = 0.0;
  bool violation = false;
};

struct ConvexityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t closed_form_violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  long long oracle_calls = 0;
  std::vector<ConvexitySample> rows;
};

namespace detail {

inline bool closed_form_inside_r3(const Tuple& z, double tol) {
  if (z[0] > 1.0 || z[1] > 1.0 || z[2] > 1.0) return false;
  if (1.0 - z[0] - z[1] <= tol) return false;
  return boundary_height_r3(z[0], z[1]) - z[2] > tol;
}

}  // namespace detail

inline ConvexityReport convexity_probe(std::size_t r, std::size_t n_samples,
                                       std::uint64_t seed, double tol) {
  if (r < 2 || r > 6) {
    throw RangeError("convexity_probe: rank must be in [2, 6]");
  }
  if (n_samples < 1) throw RangeError("convexity_probe: need >= 1 sample");
  if (!(tol > 0.0)) throw RangeError("convexity_probe: tol must be > 0");
  Rng rng(seed);
  ConvexityReport rep;
  rep.rows.reserve(n_samples);

  const auto sample_non = [&]() {
    for (;;) {
      Tuple t;
      t.coords.resize(r);
      for (std::size_t i = 0; i < r; ++i) t.coords[i] = rng.unit();
      ++rep.oracle_calls;
      if (!is_representable(t, tol).member) return t;
    }
  };

  for (std::size_t n = 0; n < n_samples; ++n) {
    const Tuple x = sample_non();
    const Tuple y = sample_non();
    double lambda;
    do {
      lambda = rng.unit();
    } while (lambda == 0.0);
    Tuple z;
    z.coords.resize(r);
    for (std::size_t i = 0; i < r; ++i) {
      z.coords[i] = lambda * x[i] + (1.0 - lambda) * y[i];
    }
    ++rep.oracle_calls;
    // Violation means strictly inside the representable set by more than
    // tol, so the query demands that much margin up front; the plain
    // membership call could stop early at a barely positive margin.
    const OracleResult res = is_representable_with_margin(z, tol);
    ConvexitySample row;
    row.lambda = lambda;
    row.margin = res.margin;
    row.violation = res.member;
    // Independent second route at rank 3: the closed-form boundary decides
    // interiority on every sample, not only on oracle-flagged ones.
    if (r == 3 && detail::closed_form_inside_r3(z, tol)) {
      ++rep.closed_form_violations;
    }
    rep.worst_margin = std::max(rep.worst_margin, res.margin);
    if (row.violation) ++rep.violations;
    ++rep.samples;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace lll
