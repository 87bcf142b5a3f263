#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "lll/instance.hpp"
#include "lll/pstar.hpp"

namespace lll {

/// Round-count observables of one simulated run. Rounds are synchronous
/// communication steps on the dependency graph; a scheduled step in which no
/// node happens to act still counts (uniform schedules are how nodes agree
/// on timing without global knowledge).
struct RoundLog {
  long long coloring_rounds = 0;
  long long fixing_rounds = 0;
  long long colors_used = 0;
  long long linial_iterations = 0;
  std::vector<std::uint64_t> messages_per_round;

  json to_json() const {
    json j;
    j["coloring_rounds"] = coloring_rounds;
    j["fixing_rounds"] = fixing_rounds;
    j["colors_used"] = colors_used;
    j["linial_iterations"] = linial_iterations;
    j["messages_per_round"] = messages_per_round;
    return j;
  }
};

namespace detail {

inline bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t f = 2; f * f <= x; ++f) {
    if (x % f == 0) return false;
  }
  return true;
}

inline std::uint64_t next_prime(std::uint64_t x) {
  while (!is_prime(x)) ++x;
  return x;
}

/// Does q^(t+1) reach m (capped exponentiation)?
inline bool pow_reaches(std::uint64_t q, int e, std::uint64_t m) {
  unsigned __int128 acc = 1;
  for (int i = 0; i < e; ++i) {
    acc *= q;
    if (acc >= m) return true;
  }
  return acc >= m;
}

/// Smallest q with q^e >= m.
inline std::uint64_t integer_root_ceil(std::uint64_t m, int e) {
  std::uint64_t q = static_cast<std::uint64_t>(
      std::pow(static_cast<double>(m), 1.0 / e));
  while (q > 2 && pow_reaches(q - 1, e, m)) --q;
  while (!pow_reaches(q, e, m)) ++q;
  return q;
}

struct LinialStep {
  std::uint64_t q;
  int t;
};

/// Color-reduction schedule from palette `universe` at square degree `d2`:
/// repeatedly pick the (q, t) with q prime, q > t*d2 and q^(t+1) >= palette
/// minimizing the new palette q^2, while that shrinks. Every node can derive
/// the identical schedule from (universe, d2).
inline std::vector<LinialStep> linial_plan(std::uint64_t universe, int d2) {
  std::vector<LinialStep> plan;
  std::uint64_t m = universe;
  for (;;) {
    std::uint64_t best_palette = m;
    LinialStep best{0, 0};
    for (int t = 1; t <= 64; ++t) {
      const std::uint64_t floor_q =
          std::max<std::uint64_t>(static_cast<std::uint64_t>(t) * d2 + 1, 2);
      const std::uint64_t q =
          next_prime(std::max(floor_q, integer_root_ceil(m, t + 1)));
      if (q * q < best_palette) {
        best_palette = q * q;
        best = {q, t};
      }
      if (floor_q > best_palette) break;
    }
    if (best.q == 0) break;
    plan.push_back(best);
    m = best_palette;
  }
  return plan;
}

/// Stall bound: any palette above nextprime(2*d2+1)^2 still shrinks (the
/// t = 2 step applies), so a tail schedule of that fixed length covers every
/// run regardless of the id space.
inline std::uint64_t stall_palette(int d2) {
  const std::uint64_t q = next_prime(2 * static_cast<std::uint64_t>(d2) + 1);
  return q * q;
}

inline std::vector<std::vector<int>> square_adjacency(const LLLInstance& inst) {
  const int n = static_cast<int>(inst.num_events());
  std::vector<std::vector<int>> g2(n);
  for (int v = 0; v < n; ++v) {
    std::set<int> reach;
    for (int u : inst.adj[v]) {
      reach.insert(u);
      for (int w : inst.adj[u]) {
        if (w != v) reach.insert(w);
      }
    }
    g2[v].assign(reach.begin(), reach.end());
  }
  return g2;
}

}  // namespace detail

/// Proper coloring of the square of the dependency graph with Delta(G^2)+1
/// colors: Linial-style iterated reduction from the id space, then one
/// scheduled recoloring step per palette index down to the final palette.
/// Rounds: two to gather the 2-hop view, two per reduction or recoloring
/// step (a G^2 exchange takes two hops).
inline std::vector<int> two_hop_coloring(const LLLInstance& inst,
                                         const std::vector<std::uint64_t>& ids,
                                         RoundLog* log = nullptr) {
  const int n = static_cast<int>(inst.num_events());
  if (static_cast<int>(ids.size()) != n) {
    throw ValidationError("two_hop_coloring: need one id per event");
  }
  {
    std::set<std::uint64_t> distinct(ids.begin(), ids.end());
    if (static_cast<int>(distinct.size()) != n) {
      throw ValidationError("two_hop_coloring: ids must be distinct");
    }
  }
  const auto g2 = detail::square_adjacency(inst);
  int d2 = 0;
  for (const auto& a : g2) d2 = std::max(d2, static_cast<int>(a.size()));

  std::uint64_t edge_count2 = 0;
  for (const auto& a : inst.adj) edge_count2 += a.size();
  const auto log_round = [&](std::uint64_t messages) {
    if (!log) return;
    ++log->coloring_rounds;
    log->messages_per_round.push_back(messages);
  };

  // Two rounds to learn ids and adjacency up to distance 2.
  log_round(edge_count2);
  log_round(edge_count2);

  std::vector<std::uint64_t> color(ids.begin(), ids.end());
  std::uint64_t palette =
      n == 0 ? 1 : *std::max_element(ids.begin(), ids.end()) + 1;

  const auto plan = detail::linial_plan(palette, d2);
  for (const auto& step : plan) {
    if (log) ++log->linial_iterations;
    log_round(edge_count2);
    log_round(edge_count2);
    std::vector<std::uint64_t> next(color.size());
    for (int v = 0; v < n; ++v) {
      // Color as base-q polynomial of degree t; pick the first evaluation
      // point where it differs from every G^2-neighbor's polynomial.
      const auto digits = [&](std::uint64_t c) {
        std::vector<std::uint64_t> out(step.t + 1);
        for (int i = 0; i <= step.t; ++i) {
          out[i] = c % step.q;
          c /= step.q;
        }
        return out;
      };
      const auto eval = [&](const std::vector<std::uint64_t>& poly,
                            std::uint64_t x) {
        std::uint64_t acc = 0;
        for (int i = step.t; i >= 0; --i) acc = (acc * x + poly[i]) % step.q;
        return acc;
      };
      const auto mine = digits(color[v]);
      std::uint64_t chosen_x = step.q;
      for (std::uint64_t x = 0; x < step.q && chosen_x == step.q; ++x) {
        bool clash = false;
        for (int u : g2[v]) {
          if (eval(digits(color[u]), x) == eval(mine, x)) {
            clash = true;
            break;
          }
        }
        if (!clash) chosen_x = x;
      }
      if (chosen_x == step.q) {
        throw InvariantCorruption("linial step found no safe evaluation point");
      }
      next[v] = chosen_x * step.q + eval(mine, chosen_x);
    }
    color = std::move(next);
    palette = step.q * step.q;
  }

  const std::uint64_t stall = detail::stall_palette(d2);
  if (palette > stall) {
    throw InvariantCorruption("linial plan stalled above its palette bound");
  }
  // Scheduled recoloring tail: palette indices stall-1 .. d2+1 each get one
  // step whether or not any node holds that color.
  const std::uint64_t target = static_cast<std::uint64_t>(d2) + 1;
  for (std::uint64_t c = stall; c-- > target;) {
    std::uint64_t movers = 0;
    for (int v = 0; v < n; ++v) {
      if (color[v] != c) continue;
      std::vector<char> used(d2 + 1, 0);
      for (int u : g2[v]) {
        if (color[u] <= static_cast<std::uint64_t>(d2)) used[color[u]] = 1;
      }
      std::uint64_t pick = 0;
      while (used[pick]) ++pick;
      color[v] = pick;
      movers += inst.adj[v].size();
    }
    log_round(movers);
    log_round(movers);
  }

  if (log) {
    log->colors_used = static_cast<long long>(target);
  }
  std::vector<int> out(n);
  for (int v = 0; v < n; ++v) {
    if (color[v] > static_cast<std::uint64_t>(d2)) {
      throw InvariantCorruption("palette reduction left an oversized color");
    }
    out[v] = static_cast<int>(color[v]);
  }
  // Propriety on the square.
  for (int v = 0; v < n; ++v) {
    for (int u : g2[v]) {
      if (out[u] == out[v]) {
        throw InvariantCorruption("two_hop_coloring produced a clash");
      }
    }
  }
  return out;
}

/// True iff, within every color class, the skeleton edge sets reachable by
/// distinct nodes are disjoint (the distance-3 guarantee behind parallel
/// fixing).
inline bool isolation_check(const LLLInstance& inst,
                            const std::vector<int>& colors) {
  std::map<std::pair<int, int>, int> owner;  // (color, edge) -> node
  for (int v = 0; v < static_cast<int>(inst.num_events()); ++v) {
    std::set<int> reachable;
    for (std::size_t x = 0; x < inst.num_variables(); ++x) {
      const auto& h = inst.hyperedges[x];
      if (!std::binary_search(h.begin(), h.end(), v)) continue;
      for (std::size_t i = 0; i < h.size(); ++i) {
        for (std::size_t j = i + 1; j < h.size(); ++j) {
          reachable.insert(inst.edge_index(h[i], h[j]));
        }
      }
    }
    for (int e : reachable) {
      const auto [it, fresh] = owner.insert({{colors[v], e}, v});
      if (!fresh && it->second != v) return false;
    }
  }
  return true;
}

struct LocalRunResult {
  Assignment assignment;
  RoundLog log;
  OracleStats stats;
};

struct LocalRunOptions {
  double tol = 0.0;  // 0 = per-rank oracle default
  bool check_each_class = true;
};

/// Synchronous color-class-parallel fixing: three scheduled rounds per
/// palette color (collect edge values, fix internally, write back). Same-
/// color nodes are processed in id order; their effects are provably
/// disjoint and any overlapping write aborts the run.
inline LocalRunResult run_local(const LLLInstance& inst,
                                const std::vector<std::uint64_t>& ids,
                                const LocalRunOptions& opts = {}) {
  LocalRunResult out;
  const std::vector<int> colors = two_hop_coloring(inst, ids, &out.log);
  if (!isolation_check(inst, colors)) {
    throw IsolationViolation("same-color nodes share a skeleton edge");
  }

  std::uint64_t edge_count2 = 0;
  for (const auto& a : inst.adj) edge_count2 += a.size();

  PStarState st = initial_state(inst);
  // Variables incident to a node, by ascending variable id.
  std::vector<std::vector<int>> incident(inst.num_events());
  for (std::size_t x = 0; x < inst.num_variables(); ++x) {
    for (int e : inst.hyperedges[x]) {
      incident[e].push_back(static_cast<int>(x));
    }
  }

  const long long palette = out.log.colors_used;
  for (long long c = 0; c < palette; ++c) {
    // Round 1: everyone broadcasts incident edge values.
    out.log.messages_per_round.push_back(edge_count2);
    // Round 2: internal fixing, no messages.
    out.log.messages_per_round.push_back(0);
    std::uint64_t writeback = 0;

    std::vector<int> members;
    for (int v = 0; v < static_cast<int>(inst.num_events()); ++v) {
      if (colors[v] == static_cast<int>(c)) members.push_back(v);
    }
    std::sort(members.begin(), members.end(),
              [&](int a, int b) { return ids[a] < ids[b]; });

    std::map<int, int> phi_writer;  // edge -> node
    std::map<int, int> var_writer;
    for (int v : members) {
      for (int x : incident[v]) {
        if (st.fixed[x] >= 0) continue;
        const auto claim = [&](std::map<int, int>& m, int key,
                               const char* what) {
          const auto [it, fresh] = m.insert({key, v});
          if (!fresh && it->second != v) {
            throw IsolationViolation(
                std::string("concurrent write to ") + what + " by nodes " +
                std::to_string(inst.events[it->second].id) + " and " +
                std::to_string(inst.events[v].id));
          }
        };
        claim(var_writer, x, "variable");
        const auto& h = inst.hyperedges[x];
        for (std::size_t i = 0; i < h.size(); ++i) {
          for (std::size_t j = i + 1; j < h.size(); ++j) {
            claim(phi_writer, inst.edge_index(h[i], h[j]), "edge value");
          }
        }
        const FixResult fr = fix_variable(inst, st, x, opts.tol);
        out.stats.absorb(fr.stats);
      }
      writeback += inst.adj[v].size();
    }
    // Round 3: rewritten edge values and fixed values go back out.
    out.log.messages_per_round.push_back(writeback);
    out.log.fixing_rounds += 3;

    if (opts.check_each_class) {
      const PStarReport rep = check_pstar(inst, st);
      if (!rep.ok) {
        throw InvariantCorruption("invariant broken after color class " +
                                  std::to_string(c) + ": " + rep.worst);
      }
    }
  }
  // Event-free variables have no owning node; fix them to first symbols.
  for (std::size_t x = 0; x < inst.num_variables(); ++x) {
    if (st.fixed[x] < 0 && inst.hyperedges[x].empty()) {
      st.fixed[x] = 0;
      ++st.num_fixed;
    }
  }
  for (std::size_t x = 0; x < inst.num_variables(); ++x) {
    if (st.fixed[x] < 0) {
      throw InvariantCorruption("variable " +
                                std::to_string(inst.variables[x].id) +
                                " was never fixed");
    }
  }
  out.assignment = st.fixed;
  return out;
}

/// Default ids 0..n-1 in event order, or the instance's meta ids.
inline std::vector<std::uint64_t> default_ids(const LLLInstance& inst) {
  std::vector<std::uint64_t> ids(inst.num_events());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

inline std::vector<std::uint64_t> ids_from_meta(const LLLInstance& inst) {
  if (!inst.meta.contains("ids")) return default_ids(inst);
  std::vector<std::uint64_t> ids;
  for (const auto& x : inst.meta["ids"]) ids.push_back(x.get<std::uint64_t>());
  return ids;
}

}  // namespace lll
