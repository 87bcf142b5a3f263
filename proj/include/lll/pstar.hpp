#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lll/instance.hpp"
#include "lll/oracle.hpp"

namespace lll {

/// Additive slack on the floating-point side of the invariant checks; the
/// probability side is exact rational.
inline constexpr double kPStarSlack = 1e-7;

/// The invariant carrier: one value per (dependency edge, endpoint), plus
/// the partial assignment. All values start at 1, which satisfies both
/// conditions by the definition of p.
struct PStarState {
  std::vector<std::array<double, 2>> phi;  // [edge][0] at u, [1] at v
  Assignment fixed;
  std::size_t num_fixed = 0;

  double phi_at(const LLLInstance& inst, int edge, int event_idx) const {
    return inst.edges[edge].u == event_idx ? phi[edge][0] : phi[edge][1];
  }
  void set_phi(const LLLInstance& inst, int edge, int event_idx, double val) {
    (inst.edges[edge].u == event_idx ? phi[edge][0] : phi[edge][1]) = val;
  }
};

inline PStarState initial_state(const LLLInstance& inst) {
  PStarState st;
  st.phi.assign(inst.edges.size(), {1.0, 1.0});
  st.fixed.assign(inst.num_variables(), -1);
  return st;
}

struct PStarReport {
  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string worst;
};

/// Checks both conditions for every edge and node and reports the minimum
/// slack (bound minus left-hand side).
inline PStarReport check_pstar(const LLLInstance& inst, const PStarState& st) {
  PStarReport rep;
  const auto note = [&](double slack, const std::string& what) {
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.worst = what;
    }
    if (slack < -kPStarSlack) rep.ok = false;
  };
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const double slack = 2.0 - st.phi[e][0] - st.phi[e][1];
    note(slack, "condition 1 at edge {" + std::to_string(inst.events[inst.edges[e].u].id) +
                    "," + std::to_string(inst.events[inst.edges[e].v].id) + "}");
  }
  const double pd = inst.p.to_double();
  for (std::size_t v = 0; v < inst.num_events(); ++v) {
    double bound = pd;
    for (int u : inst.adj[static_cast<int>(v)]) {
      bound *= st.phi_at(inst, inst.edge_index(static_cast<int>(v), u),
                         static_cast<int>(v));
    }
    const double cond =
        inst.conditional_probability(static_cast<int>(v), st.fixed).to_double();
    note(bound - cond,
         "condition 2 at event " + std::to_string(inst.events[v].id));
  }
  return rep;
}

/// Requirement tuple for fixing variable X to symbol x: one coordinate per
/// hyperedge endpoint (sorted by event id), each the endpoint's conditional
/// probability under the candidate fixing divided by p, by the product of
/// its non-skeleton edge values, and by 2^(rank-1). Coordinates can exceed
/// 1; such tuples are simply never representable.
struct Requirement {
  Tuple t;
  std::vector<int> endpoints;  // event indices, ascending
};

inline Requirement requirement_tuple(const LLLInstance& inst,
                                     const PStarState& st, int var_idx,
                                     int sym_idx) {
  const std::vector<int>& endpoints = inst.hyperedges[var_idx];
  Requirement req;
  req.endpoints = endpoints;
  req.t.coords.resize(endpoints.size());

  Assignment overlay = st.fixed;
  overlay[var_idx] = sym_idx;

  std::vector<char> in_hyper(inst.num_events(), 0);
  for (int e : endpoints) in_hyper[e] = 1;

  const double scale = std::pow(2.0, double(endpoints.size()) - 1.0);
  for (std::size_t pos = 0; pos < endpoints.size(); ++pos) {
    const int v = endpoints[pos];
    const Rational cond = inst.conditional_probability(v, overlay);
    if (cond.is_zero()) {
      req.t.coords[pos] = 0.0;
      continue;
    }
    double non_skel = 1.0;
    for (int u : inst.adj[v]) {
      if (!in_hyper[u]) {
        non_skel *= st.phi_at(inst, inst.edge_index(v, u), v);
      }
    }
    const double denom = inst.p.to_double() * non_skel;
    if (denom <= 0.0) {
      throw InvariantCorruption(
          "requirement_tuple: event " + std::to_string(inst.events[v].id) +
          " has positive conditional probability " + cond.str() +
          " under a zero edge-value budget");
    }
    req.t.coords[pos] = cond.to_double() / denom / scale;
  }
  return req;
}

struct OracleStats {
  long long calls = 0;
  long long iterations = 0;
  long long quick_decisions = 0;

  void absorb(const OracleResult& res) {
    ++calls;
    iterations += res.iterations;
    if (res.iterations == 0) ++quick_decisions;
  }
  void absorb(const OracleStats& o) {
    calls += o.calls;
    iterations += o.iterations;
    quick_decisions += o.quick_decisions;
  }
};

struct FixResult {
  int symbol = -1;
  OracleStats stats;
};

namespace detail {

/// Exact domination in plain double comparisons; tolerance does not leak
/// into the invariant.
inline bool dominates_exactly(const Generator& g, const Tuple& t) {
  const Tuple gen = generate(g);
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (gen[i] < t[i]) return false;
  }
  return true;
}

}  // namespace detail

/// Fixes one variable while preserving the invariant: take the first domain
/// symbol whose requirement tuple has a witness dominating it outright, fix
/// to it, and rewrite the skeleton edge values to twice the witness weights.
/// Throws TheoremViolation when no symbol qualifies; on criterion-passing
/// instances that must never happen. tol <= 0 selects the per-rank default.
inline FixResult fix_variable(const LLLInstance& inst, PStarState& st,
                              int var_idx, double tol = 0.0) {
  if (st.fixed[var_idx] >= 0) {
    throw ValidationError("fix_variable: variable " +
                          std::to_string(inst.variables[var_idx].id) +
                          " is already fixed");
  }
  FixResult out;
  const std::vector<int>& endpoints = inst.hyperedges[var_idx];
  if (endpoints.empty()) {
    st.fixed[var_idx] = 0;
    ++st.num_fixed;
    out.symbol = 0;
    return out;
  }

  const double tol_eff =
      tol > 0.0 ? tol : default_oracle_tol(endpoints.size());
  std::ostringstream diag;
  for (int x = 0; x < static_cast<int>(inst.variables[var_idx].domain.size());
       ++x) {
    const Requirement req = requirement_tuple(inst, st, var_idx, x);
    OracleResult res = is_representable(req.t, tol_eff);
    out.stats.absorb(res);
    if (res.member && !detail::dominates_exactly(*res.witness, req.t)) {
      // Tolerance-slack witness: retry demanding real margin.
      res = is_representable_with_margin(req.t, 1e-9);
      out.stats.absorb(res);
      if (res.member && !detail::dominates_exactly(*res.witness, req.t)) {
        res.member = false;
      }
    }
    if (!res.member) {
      diag << " symbol '" << inst.variables[var_idx].domain[x]
           << "' margin " << res.margin << ";";
      continue;
    }

    st.fixed[var_idx] = x;
    ++st.num_fixed;
    out.symbol = x;
    const Generator& w = *res.witness;
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
      for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
        const int e = inst.edge_index(endpoints[i], endpoints[j]);
        st.set_phi(inst, e, endpoints[i], 2.0 * w.a(i, j));
        st.set_phi(inst, e, endpoints[j], 2.0 * w.a(j, i));
      }
    }
    return out;
  }
  throw TheoremViolation(
      "no representable requirement tuple for variable " +
          std::to_string(inst.variables[var_idx].id) + ":" + diag.str(),
      inst.variables[var_idx].id);
}

struct RunOptions {
  double tol = 0.0;  // 0 = per-rank oracle default
  bool check_each_step = false;
  /// Called with the state before each fix; used for invariant logging.
  std::function<void(const PStarState&, int var_idx)> before_fix;
};

struct RunResult {
  Assignment assignment;
  OracleStats stats;
  std::size_t steps = 0;
};

/// Fixes all variables in the given order (variable indices). The order may
/// be adversarial; the invariant guarantees the final assignment avoids all
/// events.
inline RunResult run_sequential(const LLLInstance& inst,
                                const std::vector<int>& order,
                                const RunOptions& opts = {}) {
  if (order.size() != inst.num_variables()) {
    throw ValidationError("run_sequential: order must list every variable");
  }
  std::vector<char> seen(inst.num_variables(), 0);
  for (int v : order) {
    if (v < 0 || v >= static_cast<int>(inst.num_variables()) || seen[v]) {
      throw ValidationError("run_sequential: order is not a permutation");
    }
    seen[v] = 1;
  }
  PStarState st = initial_state(inst);
  RunResult out;
  for (int v : order) {
    if (opts.before_fix) opts.before_fix(st, v);
    const FixResult fr = fix_variable(inst, st, v, opts.tol);
    out.stats.absorb(fr.stats);
    ++out.steps;
    if (opts.check_each_step) {
      const PStarReport rep = check_pstar(inst, st);
      if (!rep.ok) {
        throw InvariantCorruption("invariant broken after fixing variable " +
                                  std::to_string(inst.variables[v].id) + ": " +
                                  rep.worst + " (slack " +
                                  std::to_string(rep.min_slack) + ")");
      }
    }
  }
  out.assignment = st.fixed;
  return out;
}

}  // namespace lll
