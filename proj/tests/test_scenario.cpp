#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "negprob/scenario.hpp"
#include "support/generators.hpp"

using namespace negprob;

TEST_CASE("builtin tables match the reference blocks") {
  auto bell = builtin_bell();
  REQUIRE(bell.variables.size() == 4);
  REQUIRE(bell.contexts.size() == 4);
  auto block = [](const EmpiricalModel& m, const std::string& id) {
    for (const auto& c : m.contexts)
      if (c.id == id) return c.table;
    FAIL("missing context ", id);
    return std::vector<double>{};
  };
  CHECK(block(bell, "a;a'") == std::vector<double>{0.5, 0, 0, 0.5});
  CHECK(block(bell, "a;b'") == std::vector<double>{0.375, 0.125, 0.125, 0.375});
  CHECK(block(bell, "b;a'") == std::vector<double>{0.375, 0.125, 0.125, 0.375});
  CHECK(block(bell, "b;b'") == std::vector<double>{0.125, 0.375, 0.375, 0.125});

  auto pr = builtin_pr_box();
  CHECK(block(pr, "a;a'") == std::vector<double>{0.5, 0, 0, 0.5});
  CHECK(block(pr, "b;b'") == std::vector<double>{0, 0.5, 0.5, 0});

  auto mermin = builtin_mermin();
  REQUIRE(mermin.variables.size() == 6);
  REQUIRE(mermin.contexts.size() == 9);
  CHECK(block(mermin, "a;a'") == std::vector<double>{0, 0.5, 0.5, 0});
  CHECK(block(mermin, "c;c'") == std::vector<double>{0, 0.5, 0.5, 0});
  CHECK(block(mermin, "a;b'") == std::vector<double>{0.375, 0.125, 0.125, 0.375});
  CHECK(block(mermin, "c;a'") == std::vector<double>{0.375, 0.125, 0.125, 0.375});

  CHECK_THROWS_AS(builtin("nope"), input_error);
}

TEST_CASE("three_dichotomic reproduces its moments") {
  ThreeDichotomicMoments mom{0.2, -0.1, 0.3, 0.15, -0.25, 0.05};
  auto m = three_dichotomic(mom);
  REQUIRE(m.contexts.size() == 3);
  auto check_pair = [&](const std::string& id, double mx, double my, double mxy) {
    for (const auto& c : m.contexts) {
      if (c.id != id) continue;
      const auto& t = c.table;
      CHECK(t[0] + t[1] + t[2] + t[3] == doctest::Approx(1.0));
      CHECK(t[0] + t[1] - t[2] - t[3] == doctest::Approx(mx));
      CHECK(t[0] - t[1] + t[2] - t[3] == doctest::Approx(my));
      CHECK(t[0] - t[1] - t[2] + t[3] == doctest::Approx(mxy));
      return;
    }
    FAIL("missing context ", id);
  };
  check_pair("X;Y", mom.x, mom.y, mom.xy);
  check_pair("X;Z", mom.x, mom.z, mom.xz);
  check_pair("Y;Z", mom.y, mom.z, mom.yz);

  // A moment outside [-1,1] produces a negative cell and is rejected.
  CHECK_THROWS_AS(three_dichotomic({0, 0, 0, 1.5, 0, 0}), input_error);
}

TEST_CASE("validate rejects malformed models") {
  auto m = builtin_bell();
  SUBCASE("unnormalized table") {
    m.contexts[0].table[0] += 0.01;
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("negative entry") {
    m.contexts[0].table[0] = -0.1;
    m.contexts[0].table[3] = 1.1;
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("wrong table size") {
    m.contexts[0].table.push_back(0.0);
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("orphan variable") {
    m.variables.push_back(dichotomic_variable("z"));
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("undeclared member") {
    m.contexts[0].members[0] = "ghost";
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("duplicate variable") {
    m.variables.push_back(dichotomic_variable("a"));
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("hidden constraint on undeclared variable") {
    m.hidden_constraints.push_back({{"X"}, 0.0});
    CHECK_THROWS_AS(validate(m), input_error);
  }
  SUBCASE("the builtins themselves validate") {
    CHECK_NOTHROW(validate(builtin_bell()));
    CHECK_NOTHROW(validate(builtin_pr_box()));
    CHECK_NOTHROW(validate(builtin_mermin()));
    CHECK_NOTHROW(validate(three_dichotomic({})));
  }
}

TEST_CASE("no-signal check accepts the builtins and random no-signal boxes") {
  CHECK(check_no_signal(builtin_bell()).consistent);
  CHECK(check_no_signal(builtin_pr_box()).consistent);
  CHECK(check_no_signal(builtin_mermin()).consistent);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    auto m = testgen::random_no_signal_chsh(rng);
    CHECK_NOTHROW(validate(m));
    CAPTURE(i);
    CHECK(check_no_signal(m, 1e-9).consistent);
  }
}

TEST_CASE("no-signal check flags a shifted marginal and names the contexts") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto m = testgen::signaling_bell_perturbation(rng);
    CHECK_NOTHROW(validate(m));
    auto rep = check_no_signal(m, 1e-6);
    CAPTURE(i);
    REQUIRE_FALSE(rep.consistent);
    REQUIRE_FALSE(rep.violations.empty());
    CHECK(rep.violations[0].gap > 1e-6);
    CHECK_FALSE(rep.violations[0].context_a.empty());
    CHECK_FALSE(rep.violations[0].context_b.empty());
    CHECK_FALSE(rep.violations[0].event.empty());
  }
}

TEST_CASE("JSON round-trip preserves the model") {
  auto orig = builtin_bell();
  orig.hidden_constraints.push_back({{"a", "b'"}, 0.25});
  auto doc = emit(orig);
  auto back = load(doc);
  REQUIRE(back.variables.size() == orig.variables.size());
  REQUIRE(back.contexts.size() == orig.contexts.size());
  for (std::size_t i = 0; i < orig.contexts.size(); ++i) {
    CHECK(back.contexts[i].id == orig.contexts[i].id);
    CHECK(back.contexts[i].members == orig.contexts[i].members);
    REQUIRE(back.contexts[i].table.size() == orig.contexts[i].table.size());
    for (std::size_t k = 0; k < orig.contexts[i].table.size(); ++k)
      CHECK(back.contexts[i].table[k] == doctest::Approx(orig.contexts[i].table[k]));
  }
  REQUIRE(back.hidden_constraints.size() == 1);
  CHECK(back.hidden_constraints[0].members == std::vector<std::string>{"a", "b'"});
  CHECK(back.hidden_constraints[0].expectation == doctest::Approx(0.25));
}

TEST_CASE("load re-indexes a table given in permuted member order") {
  auto doc = emit(builtin_bell());
  // Swap the order of the first context's table to (a', a) and permute probs
  // accordingly: row-major with a' slow means index (j,i) <- old (i,j).
  auto& jc = doc["contexts"][0];
  std::vector<double> t = jc["table"]["probs"].get<std::vector<double>>();
  jc["table"]["order"] = {jc["members"][1], jc["members"][0]};
  jc["table"]["probs"] = {t[0], t[2], t[1], t[3]};
  auto back = load(doc);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(back.contexts[0].table[k] == doctest::Approx(builtin_bell().contexts[0].table[k]));
}

TEST_CASE("load reports the offending JSON path") {
  auto doc = emit(builtin_bell());
  SUBCASE("missing contexts") {
    doc.erase("contexts");
    CHECK_THROWS_WITH_AS(load(doc), "$.contexts: missing or not an array", input_error);
  }
  SUBCASE("table probs with the wrong length") {
    doc["contexts"][2]["table"]["probs"] = {0.5, 0.5};
    try {
      load(doc);
      FAIL("expected input_error");
    } catch (const input_error& e) {
      CHECK(std::string(e.what()).find("$.contexts[2]") != std::string::npos);
    }
  }
  SUBCASE("order not a permutation of members") {
    doc["contexts"][0]["table"]["order"] = {"a", "a"};
    try {
      load(doc);
      FAIL("expected input_error");
    } catch (const input_error& e) {
      CHECK(std::string(e.what()).find("order") != std::string::npos);
    }
  }
  SUBCASE("variable without outcomes key") {
    doc["variables"][1].erase("outcomes");
    try {
      load(doc);
      FAIL("expected input_error");
    } catch (const input_error& e) {
      CHECK(std::string(e.what()).find("$.variables[1]") != std::string::npos);
    }
  }
}
