#include "lll/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "brute_force.hpp"
#include "lll/rng.hpp"

using lll::Generator;
using lll::OracleResult;
using lll::Tuple;

namespace {

Tuple make(std::initializer_list<double> c) { return Tuple{std::vector<double>(c)}; }

Generator random_nonzero(lll::Rng& rng, std::size_t r, double lo = 0.05) {
  Generator g(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      const double total = rng.range(2.0 * lo, 1.0);
      const double frac = rng.range(lo / total, 1.0 - lo / total);
      g.a(i, j) = total * frac;
      g.a(j, i) = total - g.a(i, j);
    }
  }
  return g;
}

void check_witness_dominates(const Tuple& t, const OracleResult& res,
                             double tol) {
  REQUIRE(res.member);
  REQUIRE(res.witness.has_value());
  const Tuple gen = lll::generate(*res.witness);
  for (std::size_t i = 0; i < t.rank(); ++i) {
    CHECK(gen[i] >= t[i] - tol - 1e-15);
  }
}

}  // namespace

TEST_CASE("spec spot values for membership") {
  const auto yes = lll::is_representable(make({0.25, 0.25, 0.25}), 1e-9);
  check_witness_dominates(make({0.25, 0.25, 0.25}), yes, 1e-9);

  const auto no = lll::is_representable(make({0.26, 0.26, 0.26}), 1e-9);
  CHECK_FALSE(no.member);
  CHECK_FALSE(no.witness.has_value());
  // Independent routes: closed form says the cap over (0.26, 0.26) is 0.2304,
  // and the brute-force search agrees the margin is negative.
  CHECK(lll::boundary_height_r3(0.26, 0.26) < 0.26);
  CHECK(bf::margin({0.26, 0.26, 0.26}) < -1e-4);

  CHECK_FALSE(lll::is_representable(make({0.5, 0.6}), 1e-9).member);
}

TEST_CASE("rank 1 and out-of-cube coordinates") {
  CHECK(lll::is_representable(make({1.0}), 1e-9).member);
  CHECK(lll::is_representable(make({0.0}), 1e-9).member);
  CHECK_FALSE(lll::is_representable(make({1.0000001}), 1e-9).member);
  CHECK_FALSE(lll::is_representable(make({0.2, 1.4, 0.1}), 1e-9).member);
  CHECK_THROWS_AS(lll::is_representable(make({-0.1, 0.3}), 1e-9),
                  lll::ValidationError);
  CHECK_THROWS_AS(lll::is_representable(make({0.1, 0.3}), 0.0),
                  lll::RangeError);
}

TEST_CASE("rank 2 membership is the half-plane, exactly") {
  lll::Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = rng.unit();
    const double b = rng.unit();
    const bool member = lll::is_representable(make({a, b}), 1e-9).member;
    CHECK(member == (a + b <= 1.0 + 1e-9));
  }
  CHECK(lll::is_representable(make({0.4, 0.6}), 1e-9).member);
}

TEST_CASE("downward closure: anything under a generated tuple is a member") {
  lll::Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 2 + trial % 4;
    Generator g(r);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) {
        const double sum = rng.unit();
        const double split = rng.unit();
        g.a(i, j) = sum * split;
        g.a(j, i) = sum * (1.0 - split);
      }
    }
    const Tuple top = lll::generate(g);
    Tuple t = top;
    for (std::size_t i = 0; i < r; ++i) t[i] *= rng.unit();
    const auto res = lll::is_representable(t, 1e-9);
    CHECK(res.member);
    if (res.member) check_witness_dominates(t, res, 1e-9);
  }
}

TEST_CASE("oracle soundness on generated tuples themselves") {
  lll::Rng rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t r = 2 + trial % 5;
    const Generator g = random_nonzero(rng, r);
    const Tuple t = lll::generate(g);
    const auto res = lll::is_representable(t, 1e-9);
    CHECK(res.member);
    if (res.member) check_witness_dominates(t, res, 1e-9);
  }
}

TEST_CASE("membership decisions agree with brute force at rank 3") {
  lll::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> t = {rng.unit(), rng.unit(), rng.unit()};
    const auto res = lll::is_representable(Tuple{t}, 1e-9);
    const double reference = bf::margin(t);
    if (res.member) {
      // A found generator certifies membership, so brute force cannot sit
      // clearly on the other side.
      CHECK(reference > -1e-7);
    } else {
      CHECK(reference < 1e-7);
    }
  }
}

TEST_CASE("maximize_coordinate spot values") {
  CHECK(lll::maximize_coordinate({0.25, 0.25}, 2, 1e-9) ==
        Catch::Approx(0.25).margin(1e-9));
  CHECK(lll::maximize_coordinate({0.5, 0.5}, 2, 1e-9) ==
        Catch::Approx(0.0).margin(1e-9));
  CHECK(lll::maximize_coordinate({0.4}, 1, 1e-9) ==
        Catch::Approx(0.6).margin(1e-9));
  CHECK(lll::maximize_coordinate({0.26, 0.26}, 2, 1e-9) ==
        Catch::Approx(0.2304).margin(1e-9));
  // No representable extension at all once a pair is infeasible.
  CHECK(lll::maximize_coordinate({0.7, 0.6}, 2, 1e-9) == 0.0);
  CHECK_THROWS_AS(lll::maximize_coordinate({1.2, 0.1}, 2, 1e-9),
                  lll::ValidationError);
}

TEST_CASE("maximize_coordinate tracks the closed form across [0,1]^2") {
  // Includes the infeasible strip a + b > 1, where both routes report 0.
  for (int ia = 0; ia <= 8; ++ia) {
    for (int ib = 0; ib <= 8; ++ib) {
      const double a = ia / 8.0;
      const double b = ib / 8.0;
      const double via_search = lll::maximize_coordinate({a, b}, 2, 1e-9);
      const double via_formula = lll::boundary_height_r3(a, b);
      CHECK(via_search == Catch::Approx(via_formula).margin(1e-7));
    }
  }
}

TEST_CASE("is_maximal") {
  CHECK(lll::is_maximal(make({0.25, 0.25, 0.25}), 1e-6));
  CHECK_FALSE(lll::is_maximal(make({0.2, 0.2, 0.2}), 1e-6));
  CHECK(lll::is_maximal(make({0.5, 0.5, 0.0}), 1e-6));
  CHECK_THROWS_AS(lll::is_maximal(make({0.4, 0.4, 0.4}), 1e-6),
                  lll::ValidationError);
}

namespace {

// Sample prefixes until one admits a comfortable boundary extension; at
// higher ranks representable tuples shrink toward 2^(1-r), so ranges scale
// with rank.
std::vector<double> sample_prefix(lll::Rng& rng, std::size_t r) {
  for (;;) {
    std::vector<double> prefix;
    const double hi = r == 3 ? 0.3 : 0.18;
    for (std::size_t i = 0; i + 1 < r; ++i) prefix.push_back(rng.range(0.08, hi));
    try {
      const lll::MaximalPoint mp = lll::find_maximal_tuple(prefix, r - 1);
      if (mp.t[r - 1] >= 0.02) return prefix;
    } catch (const lll::DegeneracyError&) {
    }
  }
}

}  // namespace

TEST_CASE("find_maximal_tuple pins the boundary to machine precision") {
  lll::Rng rng(37);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t r = 3 + trial % 2;
    const std::vector<double> prefix = sample_prefix(rng, r);
    const lll::MaximalPoint mp = lll::find_maximal_tuple(prefix, r - 1);
    // The generator reproduces the prefix and the hyperplane identities hold
    // to far better than the certification tolerance.
    for (std::size_t i = 0; i + 1 < r; ++i) {
      CHECK(mp.t[i] == Catch::Approx(prefix[i]).margin(1e-11));
    }
    const lll::Hyperplane plane = lll::supporting_hyperplane(mp.t, mp.g, 1e-10);
    for (double h : plane.h) CHECK(h >= 0.0);
    for (const auto& m : lll::movement_vectors(mp.t, mp.g)) {
      double dot = 0.0;
      for (std::size_t i = 0; i < r; ++i) dot += plane.h[i] * m.vec[i];
      CHECK(std::abs(dot) <= 1e-10);
    }
  }
}

TEST_CASE("points of the hyperplane near a maximal tuple are representable") {
  lll::Rng rng(41);
  const lll::MaximalPoint mp = lll::find_maximal_tuple({0.25, 0.25}, 2);
  const lll::Hyperplane plane = lll::supporting_hyperplane(mp.t, mp.g, 1e-10);
  const double radius = lll::local_representability_radius(mp.t, mp.g);
  REQUIRE(radius > 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(3);
    double vh = 0.0, hh = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      v[i] = rng.gaussian();
      vh += v[i] * plane.h[i];
      hh += plane.h[i] * plane.h[i];
    }
    for (std::size_t i = 0; i < 3; ++i) {
      v[i] -= plane.h[i] * vh / hh;
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    Tuple pt = mp.t;
    const double rho = radius * rng.unit();
    for (std::size_t i = 0; i < 3; ++i) pt[i] += rho * v[i] / norm;
    CHECK(lll::is_representable(pt, 1e-9).member);
  }
}

TEST_CASE("strict domination from a weak dominator") {
  lll::Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 3 + trial % 3;
    const Generator g = random_nonzero(rng, r);
    const Tuple weak = lll::generate(g);
    Tuple t = weak;
    // Weak domination with equality off coordinate 0.
    t[0] *= rng.range(0.3, 0.9);
    const Tuple strict = lll::strictly_dominating_tuple(t, weak, g);
    for (std::size_t i = 0; i < r; ++i) CHECK(strict[i] > t[i]);
    CHECK(lll::is_representable(strict, 1e-9).member);
  }
}

TEST_CASE("trade_epsilon output stays representable") {
  lll::Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 2 + trial % 4;
    const Generator g = random_nonzero(rng, r);
    const Tuple t = lll::generate(g);
    double limit = 1.0;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        if (i != j) limit = std::min(limit, std::min(g.a(i, j), 1 - g.a(i, j)));
      }
    }
    const Tuple out = lll::trade_epsilon(t, g, trial % r, rng.unit() * limit);
    CHECK(lll::is_representable(out, 1e-9).member);
  }
}

TEST_CASE("convexity probe finds no violations at small scale") {
  const auto r2 = lll::convexity_probe(2, 500, 99, 1e-9);
  CHECK(r2.violations == 0);
  CHECK(r2.samples == 500);

  const auto r3 = lll::convexity_probe(3, 400, 7, 1e-9);
  CHECK(r3.violations == 0);
  CHECK(r3.closed_form_violations == 0);

  const auto r4 = lll::convexity_probe(4, 150, 13, 1e-6);
  CHECK(r4.violations == 0);
}

TEST_CASE("convexity probe is deterministic given the seed") {
  const auto a = lll::convexity_probe(3, 50, 1234, 1e-9);
  const auto b = lll::convexity_probe(3, 50, 1234, 1e-9);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].lambda == b.rows[i].lambda);
    CHECK(a.rows[i].margin == b.rows[i].margin);
  }
}

TEST_CASE("membership is closed under limits, sampled") {
  // Approach a boundary point from inside along scaled copies; every step
  // and the limit itself stay members (the representable set is closed).
  const lll::MaximalPoint mp = lll::find_maximal_tuple({0.22, 0.28}, 2);
  for (int k = 1; k <= 6; ++k) {
    Tuple inner = mp.t;
    const double shrink = 1.0 - std::pow(10.0, -k);
    for (auto& c : inner.coords) c *= shrink;
    CHECK(lll::is_representable(inner, 1e-9).member);
  }
  CHECK(lll::is_representable(mp.t, 1e-9).member);
}

TEST_CASE("path between two non-members through the coordinate max") {
  // The segment union u -> max(u,u') -> u' stays outside the representable
  // set; sampled consequence of path-connectedness.
  lll::Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t r = 3;
    Tuple u, v;
    u.coords.resize(r);
    v.coords.resize(r);
    auto sample_non = [&](Tuple& out) {
      do {
        for (std::size_t i = 0; i < r; ++i) out[i] = rng.range(0.01, 0.99);
      } while (lll::is_representable(out, 1e-9).member);
    };
    sample_non(u);
    sample_non(v);
    Tuple peak;
    peak.coords.resize(r);
    for (std::size_t i = 0; i < r; ++i) peak[i] = std::max(u[i], v[i]);
    for (int step = 0; step <= 10; ++step) {
      const double lam = step / 10.0;
      Tuple p1, p2;
      p1.coords.resize(r);
      p2.coords.resize(r);
      for (std::size_t i = 0; i < r; ++i) {
        p1[i] = u[i] + lam * (peak[i] - u[i]);
        p2[i] = peak[i] + lam * (v[i] - peak[i]);
      }
      CHECK_FALSE(lll::is_representable(p1, 1e-9).member);
      CHECK_FALSE(lll::is_representable(p2, 1e-9).member);
    }
  }
}
