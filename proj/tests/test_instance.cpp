#include "lll/instance.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "lll/report.hpp"

using lll::Assignment;
using lll::json;
using lll::LLLInstance;
using lll::Rational;

namespace {

json uniform_variable(long long id, int domain_size) {
  json v;
  v["id"] = id;
  for (int i = 0; i < domain_size; ++i) {
    v["domain"].push_back(std::to_string(i));
    v["dist"].push_back("1/" + std::to_string(domain_size));
  }
  return v;
}

json event(long long id, std::vector<long long> vbl,
           std::vector<std::vector<std::string>> occ) {
  json e;
  e["id"] = id;
  e["vbl"] = vbl;
  e["occurring"] = occ;
  return e;
}

/// Two events sharing one ternary variable: E0 occurs iff X=1, E1 iff X=2.
json two_event_doc() {
  json doc;
  doc["variables"] = json::array({uniform_variable(0, 3)});
  doc["events"] = json::array(
      {event(0, {0}, {{"1"}}), event(1, {0}, {{"2"}})});
  return doc;
}

}  // namespace

TEST_CASE("dependency graph from shared variables") {
  const LLLInstance inst = lll::instance_from_json(two_event_doc());
  CHECK(inst.edges.size() == 1);
  CHECK(inst.d == 1);
  CHECK(inst.p == Rational(1, 3));
  REQUIRE(inst.hyperedges.size() == 1);
  CHECK(inst.hyperedges[0] == std::vector<int>{0, 1});
}

TEST_CASE("three events on one rank-3 variable form a triangle") {
  // p = 1/5, d = 2: p*2^d = 4/5 < 1 (a 4-symbol domain would sit exactly
  // at the strict boundary).
  json doc;
  doc["variables"] = json::array({uniform_variable(0, 5)});
  doc["events"] = json::array({event(0, {0}, {{"1"}}), event(1, {0}, {{"2"}}),
                               event(2, {0}, {{"3"}})});
  const LLLInstance inst = lll::instance_from_json(doc);
  CHECK(inst.edges.size() == 3);
  CHECK(inst.d == 2);
  CHECK(inst.hyperedges[0].size() == 3);
}

TEST_CASE("disjoint events have no edges") {
  json doc;
  doc["variables"] =
      json::array({uniform_variable(0, 2), uniform_variable(1, 2)});
  doc["events"] = json::array({event(0, {0}, {{"1"}}), event(1, {1}, {{"1"}})});
  const LLLInstance inst = lll::instance_from_json(doc, /*force=*/true);
  CHECK(inst.edges.empty());
  CHECK(inst.d == 0);
}

TEST_CASE("criterion arithmetic is exact") {
  // p = 1/3, d = 1 -> 2/3 passes.
  const LLLInstance pass = lll::instance_from_json(two_event_doc());
  CHECK(pass.criterion().p_times_2d == Rational(2, 3));
  CHECK(pass.criterion().pass);

  // p = 1/2, d = 1 -> exactly 1: the criterion is strict.
  json doc;
  doc["variables"] = json::array({uniform_variable(0, 2)});
  doc["events"] = json::array({event(0, {0}, {{"0"}}), event(1, {0}, {{"1"}})});
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);
  const LLLInstance fail = lll::instance_from_json(doc, /*force=*/true);
  CHECK(fail.criterion().p_times_2d == Rational(1));
  CHECK_FALSE(fail.criterion().pass);

  // p = 1/10, d = 3 -> 4/5.
  CHECK(Rational(1, 10).times_pow2(3) == Rational(4, 5));
}

TEST_CASE("conditional probabilities are exact rationals") {
  const LLLInstance inst = lll::instance_from_json(two_event_doc());
  Assignment none(1, -1);
  CHECK(inst.conditional_probability(0, none) == Rational(1, 3));

  Assignment x1(1, 1);
  CHECK(inst.conditional_probability(0, x1) == Rational(1));
  CHECK(inst.conditional_probability(1, x1) == Rational(0));

  // E occurs iff X = Y, both uniform binary, X fixed to 0 -> 1/2.
  json doc;
  doc["variables"] =
      json::array({uniform_variable(0, 2), uniform_variable(1, 2)});
  doc["events"] =
      json::array({event(0, {0, 1}, {{"0", "0"}, {"1", "1"}})});
  const LLLInstance eq = lll::instance_from_json(doc);
  Assignment fixed(2, -1);
  fixed[0] = 0;
  CHECK(eq.conditional_probability(0, fixed) == Rational(1, 2));
}

TEST_CASE("verify_assignment reports occurrences") {
  const LLLInstance inst = lll::instance_from_json(two_event_doc());
  Assignment avoid(1, 0);
  CHECK(inst.verify_assignment(avoid).empty());
  Assignment hit(1, 1);
  CHECK(inst.verify_assignment(hit) == std::vector<long long>{0});
  Assignment partial(1, -1);
  CHECK_THROWS_AS(inst.verify_assignment(partial), lll::ValidationError);
}

TEST_CASE("zero-probability symbols are stripped at load") {
  json doc;
  json v;
  v["id"] = 0;
  v["domain"] = {"a", "b", "c"};
  v["dist"] = {"1/2", "0/1", "1/2"};
  doc["variables"] = json::array({v});
  doc["events"] = json::array({event(0, {0}, {{"b"}, {"c"}})});
  const LLLInstance inst = lll::instance_from_json(doc);
  CHECK(inst.variables[0].domain == std::vector<std::string>{"a", "c"});
  // The row on the stripped symbol carried probability 0 and is gone.
  CHECK(inst.events[0].occurring.size() == 1);
  CHECK(inst.p == Rational(1, 2));
}

TEST_CASE("validation rejects malformed documents") {
  json doc = two_event_doc();
  doc["variables"][0]["dist"][0] = "1/2";  // sums to 7/6
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);

  doc = two_event_doc();
  doc["events"][0]["occurring"] = json::array({json::array({"7"})});
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);

  doc = two_event_doc();
  doc["events"][0]["vbl"] = {0, 0};
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);

  // Empty vbl with a nonempty occurrence set means probability 1.
  doc = two_event_doc();
  doc["events"][0]["vbl"] = json::array();
  doc["events"][0]["occurring"] = json::array({json::array()});
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);

  // Declared meta must match recomputation.
  doc = two_event_doc();
  doc["meta"]["p"] = "1/4";
  CHECK_THROWS_AS(lll::instance_from_json(doc), lll::ValidationError);
  doc["meta"]["p"] = "1/3";
  doc["meta"]["d"] = 1;
  CHECK(lll::instance_from_json(doc).d == 1);
}

TEST_CASE("canonical serialization round-trips byte for byte") {
  json doc = two_event_doc();
  doc["meta"]["seed"] = 7;
  doc["meta"]["p"] = "1/3";
  const LLLInstance inst = lll::instance_from_json(doc);
  const std::string first = lll::instance_to_string(inst);
  const LLLInstance again = lll::instance_from_json(json::parse(first));
  CHECK(lll::instance_to_string(again) == first);
}

TEST_CASE("tuples and generators serialize to the report format") {
  lll::Generator g(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) g.a(i, j) = 0.5;
    }
  }
  const json jg = lll::generator_to_json(g);
  CHECK(jg.at("rank") == 3);
  CHECK(jg.at("weights").size() == 6);
  const json jt = lll::tuple_to_json(lll::generate(g));
  CHECK(jt.at("rank") == 3);
  CHECK(jt.at("coords")[0].get<std::string>() == "0.25");

  const std::string digest = lll::fnv1a_digest("abc");
  CHECK(digest.rfind("fnv1a:", 0) == 0);
  CHECK(digest == lll::fnv1a_digest("abc"));
  CHECK(digest != lll::fnv1a_digest("abd"));
}

TEST_CASE("assignment json round-trip") {
  const LLLInstance inst = lll::instance_from_json(two_event_doc());
  Assignment fixed(1, 2);
  const json j = lll::assignment_to_json(inst, fixed);
  CHECK(j.at("0") == "2");
  const Assignment back = lll::assignment_from_json(inst, j);
  CHECK(back == fixed);
}
