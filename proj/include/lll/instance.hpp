#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lll/errors.hpp"
#include "lll/rational.hpp"

namespace lll {

using json = nlohmann::json;

/// Finite-domain random variable with an exact rational distribution.
/// Zero-probability symbols are stripped at load.
struct Variable {
  long long id = 0;
  std::vector<std::string> domain;
  std::vector<Rational> dist;
};

/// Event with an explicit occurrence set: rows of symbol indices aligned
/// with `vbl`, kept sorted and deduplicated.
struct Event {
  long long id = 0;
  std::vector<long long> vbl;  // variable ids, declared order
  std::vector<std::vector<int>> occurring;
};

struct DepEdge {
  int u = 0;  // event indices, u < v
  int v = 0;
};

struct CriterionReport {
  Rational p;
  int d = 0;
  Rational p_times_2d;
  bool pass = false;
};

/// Partial assignment: symbol index per variable index, -1 when unfixed.
using Assignment = std::vector<int>;

class LLLInstance {
 public:
  std::vector<Variable> variables;  // sorted by id
  std::vector<Event> events;        // sorted by id
  json meta;                        // empty when absent

  // Derived structure.
  std::vector<DepEdge> edges;
  std::vector<std::vector<int>> adj;         // event index -> neighbor indices
  std::vector<std::vector<int>> hyperedges;  // variable index -> event indices
  int d = 0;
  Rational p;

  std::size_t num_events() const { return events.size(); }
  std::size_t num_variables() const { return variables.size(); }

  int variable_index(long long id) const {
    const auto it = var_index_.find(id);
    if (it == var_index_.end()) {
      throw ValidationError("unknown variable id " + std::to_string(id));
    }
    return it->second;
  }

  int event_index(long long id) const {
    const auto it = event_index_.find(id);
    if (it == event_index_.end()) {
      throw ValidationError("unknown event id " + std::to_string(id));
    }
    return it->second;
  }

  int edge_index(int eu, int ev) const {
    if (eu > ev) std::swap(eu, ev);
    const auto it = edge_index_.find({eu, ev});
    if (it == edge_index_.end()) {
      throw InvariantCorruption("no dependency edge between events " +
                                std::to_string(events[eu].id) + " and " +
                                std::to_string(events[ev].id));
    }
    return it->second;
  }

  int symbol_index(int var_idx, const std::string& symbol) const {
    const auto& dom = variables[var_idx].domain;
    const auto it = std::find(dom.begin(), dom.end(), symbol);
    if (it == dom.end()) {
      throw ValidationError("symbol '" + symbol + "' not in domain of variable " +
                            std::to_string(variables[var_idx].id));
    }
    return static_cast<int>(it - dom.begin());
  }

  /// Exact probability that `event` occurs conditioned on the fixed part of
  /// `fixed`: the sum over consistent occurring rows of the product of the
  /// unfixed variables' symbol probabilities.
  Rational conditional_probability(int event_idx,
                                   const Assignment& fixed) const {
    const Event& e = events[event_idx];
    std::vector<int> vidx(e.vbl.size());
    for (std::size_t i = 0; i < e.vbl.size(); ++i) {
      vidx[i] = variable_index(e.vbl[i]);
    }
    Rational total(0);
    for (const auto& row : e.occurring) {
      Rational prob(1);
      bool consistent = true;
      for (std::size_t i = 0; i < row.size() && consistent; ++i) {
        const int f = fixed[vidx[i]];
        if (f >= 0) {
          consistent = (f == row[i]);
        } else {
          prob *= variables[vidx[i]].dist[row[i]];
        }
      }
      if (consistent) total += prob;
    }
    return total;
  }

  /// Evaluates every event on a total assignment; returns ids of occurring
  /// events (empty means the assignment avoids everything).
  std::vector<long long> verify_assignment(const Assignment& fixed) const {
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      if (fixed[i] < 0) {
        throw ValidationError("verify_assignment: variable " +
                              std::to_string(variables[i].id) + " is unfixed");
      }
    }
    if (fixed.size() != variables.size()) {
      throw ValidationError("verify_assignment: assignment size mismatch");
    }
    std::vector<long long> occurring;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Event& ev = events[e];
      std::vector<int> row(ev.vbl.size());
      for (std::size_t i = 0; i < ev.vbl.size(); ++i) {
        row[i] = fixed[variable_index(ev.vbl[i])];
      }
      if (std::binary_search(ev.occurring.begin(), ev.occurring.end(), row)) {
        occurring.push_back(ev.id);
      }
    }
    return occurring;
  }

  CriterionReport criterion() const {
    CriterionReport rep;
    rep.p = p;
    rep.d = d;
    if (d > 60) {
      throw ValidationError("dependency degree " + std::to_string(d) +
                            " is beyond desk scale");
    }
    rep.p_times_2d = p.times_pow2(d);
    rep.pass = rep.p_times_2d < Rational(1);
    return rep;
  }

  /// Rebuilds edges, hyperedges, d and p from variables/events.
  void build_derived() {
    var_index_.clear();
    event_index_.clear();
    for (std::size_t i = 0; i < variables.size(); ++i) {
      var_index_[variables[i].id] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
      event_index_[events[i].id] = static_cast<int>(i);
    }
    hyperedges.assign(variables.size(), {});
    for (std::size_t e = 0; e < events.size(); ++e) {
      for (long long vid : events[e].vbl) {
        hyperedges[variable_index(vid)].push_back(static_cast<int>(e));
      }
    }
    for (auto& h : hyperedges) std::sort(h.begin(), h.end());

    edges.clear();
    edge_index_.clear();
    std::set<std::pair<int, int>> seen;
    for (const auto& h : hyperedges) {
      for (std::size_t a = 0; a < h.size(); ++a) {
        for (std::size_t b = a + 1; b < h.size(); ++b) {
          seen.insert({h[a], h[b]});
        }
      }
    }
    adj.assign(events.size(), {});
    for (const auto& [u, v] : seen) {
      edge_index_[{u, v}] = static_cast<int>(edges.size());
      edges.push_back({u, v});
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    d = 0;
    for (const auto& a : adj) d = std::max(d, static_cast<int>(a.size()));

    p = Rational(0);
    const Assignment nothing(variables.size(), -1);
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Rational pe = conditional_probability(static_cast<int>(e), nothing);
      if (pe > p) p = pe;
    }
  }

 private:
  std::map<long long, int> var_index_;
  std::map<long long, int> event_index_;
  std::map<std::pair<int, int>, int> edge_index_;
};

namespace detail {

inline void validate_instance(LLLInstance& inst) {
  std::set<long long> var_ids;
  for (auto& v : inst.variables) {
    if (!var_ids.insert(v.id).second) {
      throw ValidationError("duplicate variable id " + std::to_string(v.id));
    }
    if (v.domain.empty()) {
      throw ValidationError("variable " + std::to_string(v.id) +
                            " has an empty domain");
    }
    if (v.domain.size() != v.dist.size()) {
      throw ValidationError("variable " + std::to_string(v.id) +
                            " has mismatched domain/dist sizes");
    }
    std::set<std::string> syms(v.domain.begin(), v.domain.end());
    if (syms.size() != v.domain.size()) {
      throw ValidationError("variable " + std::to_string(v.id) +
                            " has duplicate symbols");
    }
    Rational sum(0);
    for (const Rational& q : v.dist) {
      if (q < Rational(0)) {
        throw ValidationError("variable " + std::to_string(v.id) +
                              " has a negative probability");
      }
      sum += q;
    }
    if (sum != Rational(1)) {
      throw ValidationError("variable " + std::to_string(v.id) +
                            " probabilities sum to " + sum.str() + ", not 1");
    }
  }

  std::set<long long> event_ids;
  for (auto& e : inst.events) {
    if (!event_ids.insert(e.id).second) {
      throw ValidationError("duplicate event id " + std::to_string(e.id));
    }
    std::set<long long> seen(e.vbl.begin(), e.vbl.end());
    if (seen.size() != e.vbl.size()) {
      throw ValidationError("event " + std::to_string(e.id) +
                            " lists a variable twice");
    }
    for (long long vid : e.vbl) {
      if (!var_ids.count(vid)) {
        throw ValidationError("event " + std::to_string(e.id) +
                              " references unknown variable " +
                              std::to_string(vid));
      }
    }
    if (e.vbl.empty() && !e.occurring.empty()) {
      throw ValidationError("event " + std::to_string(e.id) +
                            " has empty vbl but occurs with probability 1");
    }
    std::sort(e.occurring.begin(), e.occurring.end());
    e.occurring.erase(std::unique(e.occurring.begin(), e.occurring.end()),
                      e.occurring.end());
  }
}

/// Removes zero-probability symbols; occurrence rows mentioning them carry
/// probability 0 and are dropped with them.
inline void strip_zero_probability_symbols(LLLInstance& inst) {
  for (auto& v : inst.variables) {
    std::vector<int> remap(v.domain.size(), -1);
    std::vector<std::string> domain;
    std::vector<Rational> dist;
    for (std::size_t i = 0; i < v.domain.size(); ++i) {
      if (!v.dist[i].is_zero()) {
        remap[i] = static_cast<int>(domain.size());
        domain.push_back(v.domain[i]);
        dist.push_back(v.dist[i]);
      }
    }
    if (domain.size() == v.domain.size()) continue;
    if (domain.empty()) {
      throw ValidationError("variable " + std::to_string(v.id) +
                            " has no positive-probability symbol");
    }
    for (auto& e : inst.events) {
      for (std::size_t pos = 0; pos < e.vbl.size(); ++pos) {
        if (e.vbl[pos] != v.id) continue;
        std::vector<std::vector<int>> kept;
        for (auto& row : e.occurring) {
          if (remap[row[pos]] >= 0) {
            row[pos] = remap[row[pos]];
            kept.push_back(row);
          }
        }
        e.occurring = std::move(kept);
      }
    }
    v.domain = std::move(domain);
    v.dist = std::move(dist);
  }
}

}  // namespace detail

inline constexpr std::size_t kMaxRank = 6;

/// Parses, validates, and derives an instance from its JSON document.
/// Criterion violations reject the instance unless `force`.
inline LLLInstance instance_from_json(const json& doc, bool force = false) {
  if (!doc.is_object() || !doc.contains("variables") ||
      !doc.contains("events")) {
    throw ValidationError("instance file must have 'variables' and 'events'");
  }
  LLLInstance inst;
  try {
    for (const auto& jv : doc.at("variables")) {
      Variable v;
      v.id = jv.at("id").get<long long>();
      for (const auto& s : jv.at("domain")) {
        v.domain.push_back(s.get<std::string>());
      }
      for (const auto& s : jv.at("dist")) {
        v.dist.push_back(Rational::parse(s.get<std::string>()));
      }
      inst.variables.push_back(std::move(v));
    }
    std::sort(inst.variables.begin(), inst.variables.end(),
              [](const Variable& a, const Variable& b) { return a.id < b.id; });

    // Symbol lookup needs validated variables first; occurrence rows are
    // parsed as symbols and stored as indices.
    std::map<long long, const Variable*> vars;
    for (const auto& v : inst.variables) vars[v.id] = &v;

    for (const auto& je : doc.at("events")) {
      Event e;
      e.id = je.at("id").get<long long>();
      for (const auto& s : je.at("vbl")) e.vbl.push_back(s.get<long long>());
      for (const auto& row : je.at("occurring")) {
        std::vector<int> idx_row;
        if (row.size() != e.vbl.size()) {
          throw ValidationError("event " + std::to_string(e.id) +
                                " has an occurrence row of wrong length");
        }
        for (std::size_t i = 0; i < e.vbl.size(); ++i) {
          const auto it = vars.find(e.vbl[i]);
          if (it == vars.end()) {
            throw ValidationError("event " + std::to_string(e.id) +
                                  " references unknown variable " +
                                  std::to_string(e.vbl[i]));
          }
          const std::string sym = row[i].get<std::string>();
          const auto& dom = it->second->domain;
          const auto pos = std::find(dom.begin(), dom.end(), sym);
          if (pos == dom.end()) {
            throw ValidationError("event " + std::to_string(e.id) +
                                  ": symbol '" + sym +
                                  "' not in domain of variable " +
                                  std::to_string(e.vbl[i]));
          }
          idx_row.push_back(static_cast<int>(pos - dom.begin()));
        }
        e.occurring.push_back(std::move(idx_row));
      }
      inst.events.push_back(std::move(e));
    }
    std::sort(inst.events.begin(), inst.events.end(),
              [](const Event& a, const Event& b) { return a.id < b.id; });
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed instance file: ") + ex.what());
  }

  detail::validate_instance(inst);
  detail::strip_zero_probability_symbols(inst);
  detail::validate_instance(inst);
  inst.build_derived();

  for (std::size_t v = 0; v < inst.hyperedges.size(); ++v) {
    if (inst.hyperedges[v].size() > kMaxRank) {
      throw ValidationError("variable " + std::to_string(inst.variables[v].id) +
                            " has rank " +
                            std::to_string(inst.hyperedges[v].size()) +
                            " > " + std::to_string(kMaxRank));
    }
  }

  if (doc.contains("meta")) {
    inst.meta = doc.at("meta");
    if (inst.meta.contains("p")) {
      const Rational declared = Rational::parse(inst.meta["p"].get<std::string>());
      if (declared != inst.p) {
        throw ValidationError("meta declares p = " + declared.str() +
                              " but recomputation gives " + inst.p.str());
      }
    }
    if (inst.meta.contains("d")) {
      const int declared = inst.meta["d"].get<int>();
      if (declared != inst.d) {
        throw ValidationError("meta declares d = " + std::to_string(declared) +
                              " but recomputation gives " +
                              std::to_string(inst.d));
      }
    }
    if (inst.meta.contains("ids")) {
      if (inst.meta["ids"].size() != inst.events.size()) {
        throw ValidationError("meta ids list does not match event count");
      }
      std::set<std::uint64_t> distinct;
      for (const auto& x : inst.meta["ids"]) {
        distinct.insert(x.get<std::uint64_t>());
      }
      if (distinct.size() != inst.events.size()) {
        throw ValidationError("meta ids must be distinct");
      }
    }
  }

  const CriterionReport crit = inst.criterion();
  if (!crit.pass && !force) {
    throw ValidationError("criterion fails: p*2^d = " + crit.p_times_2d.str() +
                          " >= 1 (use force to load anyway)");
  }
  return inst;
}

/// Canonical document: keys sorted, rationals reduced, occurrence rows
/// sorted and deduplicated. Serializing a loaded canonical file reproduces
/// it byte for byte.
inline json instance_to_json(const LLLInstance& inst) {
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : inst.variables) {
    json jv;
    jv["id"] = v.id;
    jv["domain"] = v.domain;
    json dist = json::array();
    for (const auto& q : v.dist) dist.push_back(q.str());
    jv["dist"] = std::move(dist);
    doc["variables"].push_back(std::move(jv));
  }
  doc["events"] = json::array();
  for (const auto& e : inst.events) {
    json je;
    je["id"] = e.id;
    je["vbl"] = e.vbl;
    json occ = json::array();
    for (const auto& row : e.occurring) {
      json jrow = json::array();
      for (std::size_t i = 0; i < row.size(); ++i) {
        const int vidx = inst.variable_index(e.vbl[i]);
        jrow.push_back(inst.variables[vidx].domain[row[i]]);
      }
      occ.push_back(std::move(jrow));
    }
    je["occurring"] = std::move(occ);
    doc["events"].push_back(std::move(je));
  }
  if (!inst.meta.is_null() && !inst.meta.empty()) doc["meta"] = inst.meta;
  return doc;
}

inline std::string instance_to_string(const LLLInstance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline LLLInstance load_instance_file(const std::string& path,
                                      bool force = false) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("instance file is not valid JSON: ") +
                          ex.what());
  }
  return instance_from_json(doc, force);
}

inline void save_instance_file(const LLLInstance& inst,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write instance file: " + path);
  out << instance_to_string(inst);
}

/// id -> symbol map form used in files and reports.
inline json assignment_to_json(const LLLInstance& inst,
                               const Assignment& fixed) {
  json out = json::object();
  for (std::size_t i = 0; i < inst.variables.size(); ++i) {
    if (fixed[i] >= 0) {
      out[std::to_string(inst.variables[i].id)] =
          inst.variables[i].domain[fixed[i]];
    }
  }
  return out;
}

inline Assignment assignment_from_json(const LLLInstance& inst,
                                       const json& doc) {
  Assignment fixed(inst.num_variables(), -1);
  for (const auto& [key, value] : doc.items()) {
    long long id = 0;
    try {
      id = std::stoll(key);
    } catch (...) {
      throw ValidationError("assignment key '" + key +
                            "' is not a variable id");
    }
    const int idx = inst.variable_index(id);
    fixed[idx] = inst.symbol_index(idx, value.get<std::string>());
  }
  return fixed;
}

}  // namespace lll
