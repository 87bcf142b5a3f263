#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "lll/instance.hpp"
#include "lll/local_sim.hpp"
#include "lll/oracle.hpp"
#include "lll/pstar.hpp"

namespace lll {

inline std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

/// 17 significant digits: enough to reproduce any double exactly in diffs.
inline std::string float17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json tuple_to_json(const Tuple& t) {
  json coords = json::array();
  for (double c : t.coords) coords.push_back(float17(c));
  return json{{"coords", coords}, {"rank", t.rank()}};
}

inline json generator_to_json(const Generator& g) {
  json weights = json::array();
  for (std::size_t i = 0; i < g.r; ++i) {
    for (std::size_t j = 0; j < g.r; ++j) {
      if (i != j) {
        weights.push_back(
            json{{"i", i}, {"j", j}, {"a", float17(g.a(i, j))}});
      }
    }
  }
  return json{{"rank", g.r}, {"weights", weights}};
}

/// Machine-parseable run record. Everything except wall_time_ms is
/// deterministic given (instance bytes, seed, mode).
struct Report {
  std::string command;
  std::string instance_digest;
  std::string mode;
  std::string outcome;  // "verified" | "failed"
  json assignment;
  json round_log;  // present for local runs
  std::vector<long long> occurring;
  OracleStats stats;
  double wall_time_ms = 0.0;

  json to_json() const {
    json j;
    j["command"] = command;
    j["instance_digest"] = instance_digest;
    j["mode"] = mode;
    j["outcome"] = outcome;
    j["assignment"] = assignment;
    if (!round_log.is_null()) j["round_log"] = round_log;
    j["occurring_events"] = occurring;
    j["oracle"] = {{"calls", stats.calls},
                   {"iterations", stats.iterations},
                   {"quick_decisions", stats.quick_decisions}};
    j["wall_time_ms"] = wall_time_ms;
    return j;
  }
};

inline std::string probe_csv(const ConvexityReport& rep) {
  std::string out = "sample,lambda,margin,violation\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    out += std::to_string(i) + "," + float17(rep.rows[i].lambda) + "," +
           float17(rep.rows[i].margin) + "," +
           (rep.rows[i].violation ? "1" : "0") + "\n";
  }
  return out;
}

/// Oracle-vs-closed-form table over [0, max]^2 at rank 3.
inline std::string boundary_table_csv(int grid, double max_coord,
                                      double tol = 1e-9) {
  if (grid < 2) throw RangeError("boundary-table: grid must be >= 2");
  if (!(max_coord > 0.0) || max_coord > 1.0) {
    throw RangeError("boundary-table: max must lie in (0, 1]");
  }
  std::string out = "a,b,oracle_height,f3_height,abs_error\n";
  for (int ia = 0; ia < grid; ++ia) {
    for (int ib = 0; ib < grid; ++ib) {
      const double a = max_coord * ia / (grid - 1);
      const double b = max_coord * ib / (grid - 1);
      const double oracle = maximize_coordinate({a, b}, 2, tol);
      const double formula = boundary_height_r3(a, b);
      out += float17(a) + "," + float17(b) + "," + float17(oracle) + "," +
             float17(formula) + "," + float17(std::abs(oracle - formula)) +
             "\n";
    }
  }
  return out;
}

}  // namespace lll
