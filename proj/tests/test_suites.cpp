#include <doctest.h>

#include <ffc/suites.hpp>

using namespace ffc;

TEST_CASE("built-in suites pass at unit scale") {
  suites::SuiteParams sp;
  sp.n = 5000;
  sp.M = 128;
  for (const char* name : {"examples", "paper-identities", "mc-battery"}) {
    auto result = suites::run_suite(name, sp);
    for (const auto& c : result.checks) {
      INFO(name << " / " << c.name << " " << c.detail.dump());
      CHECK(c.pass);
    }
  }
  CHECK_THROWS(suites::run_suite("no-such-suite", sp));
}

TEST_CASE("suite reports are byte-identical across runs with fixed seeds") {
  suites::SuiteParams sp;
  sp.n = 2000;
  sp.M = 128;
  for (const char* name : {"examples", "paper-identities", "mc-battery"}) {
    auto a = suites::run_suite(name, sp).to_json("MASKED").dump(2);
    auto b = suites::run_suite(name, sp).to_json("MASKED").dump(2);
    CHECK(a == b);
  }
}

TEST_CASE("the timestamp is isolated in a single top-level field") {
  suites::SuiteParams sp;
  sp.n = 2000;
  sp.M = 128;
  auto result = suites::run_suite("examples", sp);
  json a = result.to_json("2000-01-01T00:00:00Z");
  json b = result.to_json("2038-01-19T03:14:07Z");
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a == b);
}
