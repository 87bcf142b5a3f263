#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "lll/instance.hpp"
#include "lll/rng.hpp"

namespace lll {

/// Instance-generation request. Generated instances always satisfy the
/// criterion; generation retries with derived sub-seeds and fails loudly if
/// the parameters leave no room.
struct GenSpec {
  std::string family = "shared-variable-random";
  int n_events = 10;
  int max_rank = 3;
  int max_domain = 3;
  int target_d = 4;
  std::uint64_t seed = 0;
};

namespace detail {

inline json make_variable(long long id, const std::vector<std::string>& domain,
                          const std::vector<Rational>& dist) {
  json v;
  v["id"] = id;
  v["domain"] = domain;
  json d = json::array();
  for (const auto& q : dist) d.push_back(q.str());
  v["dist"] = std::move(d);
  return v;
}

inline std::vector<Rational> random_dist(Rng& rng, int size) {
  std::vector<std::int64_t> weights(size);
  std::int64_t total = 0;
  for (auto& w : weights) {
    w = 1 + static_cast<std::int64_t>(rng.below(5));
    total += w;
  }
  std::vector<Rational> dist;
  dist.reserve(size);
  for (auto w : weights) dist.emplace_back(w, total);
  return dist;
}

inline std::vector<Rational> uniform_dist(int size) {
  return std::vector<Rational>(static_cast<std::size_t>(size),
                               Rational(1, size));
}

struct RawVariable {
  long long id;
  std::vector<std::string> domain;
  std::vector<Rational> dist;
};

struct RawEvent {
  long long id;
  std::vector<long long> vbl;
  std::vector<std::vector<int>> rows;  // symbol indices aligned with vbl
};

inline json emit(const std::vector<RawVariable>& vars,
                 const std::vector<RawEvent>& events, const GenSpec& spec) {
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : vars) doc["variables"].push_back(make_variable(v.id, v.domain, v.dist));
  doc["events"] = json::array();
  for (const auto& e : events) {
    json je;
    je["id"] = e.id;
    je["vbl"] = e.vbl;
    json occ = json::array();
    for (const auto& row : e.rows) {
      json jrow = json::array();
      for (std::size_t i = 0; i < row.size(); ++i) {
        jrow.push_back(vars[e.vbl[i]].domain[row[i]]);
      }
      occ.push_back(std::move(jrow));
    }
    je["occurring"] = std::move(occ);
    doc["events"].push_back(std::move(je));
  }
  json meta;
  meta["family"] = spec.family;
  meta["seed"] = spec.seed;
  doc["meta"] = std::move(meta);
  return doc;
}

/// Fills occurrence sets so that every event's probability stays below
/// `budget`, enumerating each event's assignment space in seeded order.
inline void fill_occurrences(Rng& rng, const std::vector<RawVariable>& vars,
                             std::vector<RawEvent>& events,
                             const Rational& budget) {
  for (auto& e : events) {
    if (e.vbl.empty()) continue;
    std::size_t space = 1;
    for (long long vid : e.vbl) space *= vars[vid].domain.size();
    std::vector<std::size_t> perm(space);
    for (std::size_t i = 0; i < space; ++i) perm[i] = i;
    for (std::size_t i = space; i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.below(i)]);
    }
    const Rational cap = budget * Rational(1 + static_cast<std::int64_t>(
                                               rng.below(70)),
                                           100);  // fill 1%..70% of budget
    Rational cum(0);
    for (std::size_t pi = 0; pi < space; ++pi) {
      std::size_t code = perm[pi];
      std::vector<int> row(e.vbl.size());
      Rational prob(1);
      for (std::size_t i = 0; i < e.vbl.size(); ++i) {
        const auto& v = vars[e.vbl[i]];
        row[i] = static_cast<int>(code % v.domain.size());
        code /= v.domain.size();
        prob *= v.dist[row[i]];
      }
      if (cum + prob <= cap) {
        cum += prob;
        e.rows.push_back(std::move(row));
      }
    }
  }
}

inline json gen_shared_variable(const GenSpec& spec, Rng& rng) {
  const int n = spec.n_events;
  std::vector<std::set<int>> nb(n);
  std::vector<int> var_count(n, 0);
  constexpr int kVblCap = 5;

  std::vector<RawVariable> vars;
  std::vector<RawEvent> events(n);
  for (int e = 0; e < n; ++e) events[e].id = e;

  const auto add_variable = [&](const std::vector<int>& endpoints) {
    RawVariable v;
    v.id = static_cast<long long>(vars.size());
    const int dom = 2 + static_cast<int>(rng.below(std::max(1, spec.max_domain - 1)));
    for (int s = 0; s < dom; ++s) v.domain.push_back(std::to_string(s));
    v.dist = random_dist(rng, dom);
    for (int e : endpoints) {
      events[e].vbl.push_back(v.id);
      ++var_count[e];
      for (int f : endpoints) {
        if (f != e) nb[e].insert(f);
      }
    }
    vars.push_back(std::move(v));
  };

  const int attempts = 4 * n;
  for (int a = 0; a < attempts; ++a) {
    const int want = 1 + static_cast<int>(rng.below(spec.max_rank));
    std::vector<int> chosen = {static_cast<int>(rng.below(n))};
    if (var_count[chosen[0]] >= kVblCap) continue;
    while (static_cast<int>(chosen.size()) < want) {
      std::vector<int> candidates;
      for (int c = 0; c < n; ++c) {
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        if (var_count[c] >= kVblCap) continue;
        std::set<int> after_c = nb[c];
        after_c.insert(chosen.begin(), chosen.end());
        if (static_cast<int>(after_c.size()) > spec.target_d) continue;
        bool ok = true;
        for (int e : chosen) {
          std::set<int> after_e = nb[e];
          for (int f : chosen) {
            if (f != e) after_e.insert(f);
          }
          after_e.insert(c);
          after_e.erase(e);
          if (static_cast<int>(after_e.size()) > spec.target_d) {
            ok = false;
            break;
          }
        }
        if (ok) candidates.push_back(c);
      }
      if (candidates.empty()) break;
      chosen.push_back(candidates[rng.below(candidates.size())]);
    }
    if (static_cast<int>(chosen.size()) == want) {
      std::sort(chosen.begin(), chosen.end());
      add_variable(chosen);
    }
  }
  // Every event needs at least one variable.
  for (int e = 0; e < n; ++e) {
    if (events[e].vbl.empty()) add_variable({e});
  }

  int d = 0;
  for (const auto& s : nb) d = std::max(d, static_cast<int>(s.size()));
  const Rational budget = Rational(95, 100) / Rational(1).times_pow2(d);
  fill_occurrences(rng, vars, events, budget);
  return emit(vars, events, spec);
}

inline json gen_ksat(const GenSpec& spec, Rng& rng) {
  const int n = spec.n_events;
  const int k = std::clamp(spec.max_rank + 1, 3, 5);  // literals per clause
  const int link_cap = std::min(k - 1, spec.target_d);

  std::vector<RawVariable> vars;
  std::vector<RawEvent> events(n);
  std::vector<std::set<int>> links(n);
  // Variables used once and still open for a second clause: (var, owner).
  std::vector<std::pair<long long, int>> pool;

  const auto fresh_var = [&]() {
    RawVariable v;
    v.id = static_cast<long long>(vars.size());
    v.domain = {"0", "1"};
    v.dist = uniform_dist(2);
    vars.push_back(std::move(v));
    return vars.back().id;
  };

  for (int i = 0; i < n; ++i) {
    events[i].id = i;
    while (static_cast<int>(events[i].vbl.size()) < k) {
      const bool reuse = !pool.empty() && rng.below(2) == 0 &&
                         static_cast<int>(events[i].vbl.size()) < k;
      bool reused = false;
      if (reuse) {
        const std::size_t pick = rng.below(pool.size());
        const auto [vid, owner] = pool[pick];
        const bool new_link = !links[i].count(owner);
        if (owner != i &&
            (!new_link || (static_cast<int>(links[i].size()) < link_cap &&
                           static_cast<int>(links[owner].size()) < link_cap))) {
          events[i].vbl.push_back(vid);
          links[i].insert(owner);
          links[owner].insert(i);
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
          reused = true;
        }
      }
      if (!reused) {
        const long long vid = fresh_var();
        events[i].vbl.push_back(vid);
        pool.emplace_back(vid, i);
      }
    }
    // The single violating assignment, with random polarity.
    std::vector<int> row(k);
    for (auto& s : row) s = static_cast<int>(rng.below(2));
    events[i].rows.push_back(std::move(row));
  }
  return emit(vars, events, spec);
}

inline json gen_star(const GenSpec& spec, Rng& rng) {
  const int n = spec.n_events;
  const int dom = std::clamp(spec.max_domain, 3, 6);
  // Criterion within a star of rank r: 2^(r-1) / dom^2 < 0.95.
  int r_cap = 1;
  while (r_cap + 1 <= spec.max_rank && r_cap + 1 <= spec.target_d + 1 &&
         std::pow(2.0, r_cap) < 0.95 * dom * dom) {
    ++r_cap;
  }
  std::vector<RawVariable> vars;
  std::vector<RawEvent> events;

  const auto new_var = [&](int size) {
    RawVariable v;
    v.id = static_cast<long long>(vars.size());
    for (int s = 0; s < size; ++s) v.domain.push_back(std::to_string(s));
    v.dist = uniform_dist(size);
    vars.push_back(std::move(v));
    return vars.back().id;
  };

  int eid = 0;
  while (eid < n) {
    const int r = std::min<int>(1 + static_cast<int>(rng.below(r_cap)), n - eid);
    // Each event sees the hub plus a private variable; for r = 1 the "hub"
    // is private too. Two variables per event keep every probability at
    // 1/dom^2, so singleton stars cannot push the global p*2^d past 1.
    const long long hub = new_var(dom);
    for (int s = 0; s < r; ++s) {
      RawEvent e;
      e.id = eid++;
      const long long priv = new_var(dom);
      e.vbl = {hub, priv};
      e.rows.push_back({static_cast<int>(rng.below(dom)),
                        static_cast<int>(rng.below(dom))});
      events.push_back(std::move(e));
    }
  }
  return emit(vars, events, spec);
}

}  // namespace detail

/// Generates a criterion-passing instance. Deterministic in the spec
/// (identical specs give byte-identical files).
inline LLLInstance generate_instance(const GenSpec& spec) {
  if (spec.n_events < 1) throw ValidationError("gen: need at least one event");
  if (spec.max_rank < 1 || spec.max_rank > static_cast<int>(kMaxRank)) {
    throw ValidationError("gen: max rank must be in [1, " +
                          std::to_string(kMaxRank) + "]");
  }
  if (spec.max_domain < 2) throw ValidationError("gen: max domain must be >= 2");
  if (spec.target_d < 0 || spec.target_d > 10) {
    throw ValidationError("gen: target d must be in [0, 10]");
  }
  for (int attempt = 0; attempt < 20; ++attempt) {
    Rng rng(spec.seed * 1000003 + static_cast<std::uint64_t>(attempt));
    json doc;
    if (spec.family == "shared-variable-random") {
      doc = detail::gen_shared_variable(spec, rng);
    } else if (spec.family == "k-sat-like") {
      doc = detail::gen_ksat(spec, rng);
    } else if (spec.family == "star-hyperedge") {
      doc = detail::gen_star(spec, rng);
    } else {
      throw ValidationError("gen: unknown family '" + spec.family + "'");
    }
    LLLInstance inst = instance_from_json(doc, /*force=*/true);
    const CriterionReport crit = inst.criterion();
    if (!crit.pass || crit.d > spec.target_d) continue;
    inst.meta["p"] = crit.p.str();
    inst.meta["d"] = crit.d;
    // Canonicalize through the parser so emitted files are load-stable.
    return instance_from_json(instance_to_json(inst));
  }
  throw ValidationError(
      "gen: could not satisfy the criterion for these parameters; lower "
      "target_d, shrink occurrence budgets, or raise domain sizes");
}

}  // namespace lll
