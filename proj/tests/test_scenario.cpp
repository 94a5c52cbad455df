/* Scenario layer: parsing, serialization round trips, the on-disk theory
   cache, and end-to-end scenario runs with deterministic reports. */
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsd/scenario.hpp"

using namespace qsd;

namespace {

// fresh directory under the system temp root, removed on destruction
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("qsd-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

Json parse_text(const std::string& text) { return Json::parse(text); }

}  // namespace

TEST_CASE("scenario parsing fills defaults and expands the suite list") {
  Scenario s = parse_scenario(parse_text(
      R"({"space":"P2","bundle":[3]})"));
  CHECK(s.space == "P2");
  CHECK(s.bundle == std::vector<int>{3});
  CHECK(s.truncation == 3);
  CHECK(s.suites == all_suites());
  CHECK_FALSE(s.cache);

  Scenario t = parse_scenario(parse_text(
      R"({"space":"P1","bundle":[1,2],"truncation":4,
          "suites":["gamma","narrow","narrow"],"cache":true})"));
  CHECK(t.truncation == 4);
  CHECK(t.suites == std::vector<std::string>{"narrow", "gamma"});
  CHECK(t.cache);

  Scenario u = parse_scenario(parse_text(
      R"({"space":"P3","bundle":[1],"suites":["all"]})"));
  CHECK(u.suites == all_suites());
}

TEST_CASE("scenario parsing rejects malformed input but not negative bundles") {
  CHECK_THROWS_AS(parse_scenario(parse_text(R"({"bundle":[1]})")), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(R"({"space":"P9","bundle":[1]})")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(R"({"space":"X","bundle":[1]})")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(R"({"space":"P1"})")), ParseError);
  CHECK_THROWS_AS(
      parse_scenario(parse_text(R"({"space":"P1","bundle":[1.5]})")),
      ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(
                      R"({"space":"P1","bundle":[1],"truncation":7})")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(
                      R"({"space":"P1","bundle":[1],"truncation":0})")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(
                      R"({"space":"P1","bundle":[1],"suites":["spectra"]})")),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_text(
                      R"({"space":"P1","bundle":[1],"extra":0})")),
                  ParseError);

  // convexity is a runtime scope question, not a parse error
  Scenario neg = parse_scenario(parse_text(R"({"space":"P2","bundle":[-1]})"));
  CHECK(neg.bundle == std::vector<int>{-1});
}

TEST_CASE("series and matrix serialization round trips bit exactly") {
  GeometryTriple g(SpaceModel{1}, BundleModel{{1}});
  // the euler twist keeps lambda, so the payload exercises every key slot
  Theory th = build_theory(g, Twist::Euler, 3);

  ClassSeries ir = class_series_from_json(class_series_to_json(th.i_raw),
                                          g.len());
  CHECK(ir == th.i_raw);

  ScalarSeries t0 = series_from_json(series_to_json(th.tau0));
  CHECK(t0 == th.tau0);

  SeriesMatrix sol = matrix_from_json(matrix_to_json(th.solution));
  CHECK(sol.n == th.solution.n);
  CHECK(sol.order == th.solution.order);
  for (std::size_t i = 0; i < sol.n; ++i)
    for (std::size_t j = 0; j < sol.n; ++j)
      CHECK(sol.at(i, j) == th.solution.at(i, j));

  // a re-dump of the parsed form reproduces the original bytes
  std::string once = matrix_to_json(th.solution).dump();
  std::string twice = matrix_to_json(sol).dump();
  CHECK(once == twice);
}

TEST_CASE("theory cache stores, restores, and heals corrupted entries") {
  TempDir tmp;
  SeriesCache cache(tmp.str());
  GeometryTriple g(SpaceModel{2}, BundleModel{{3}});

  CHECK_FALSE(cache.get(g, Twist::InverseEuler, 2).has_value());

  Theory th = build_theory(g, Twist::InverseEuler, 2);
  cache.put(th);

  std::optional<Theory> hit = cache.get(g, Twist::InverseEuler, 2);
  REQUIRE(hit.has_value());
  CHECK(hit->order == th.order);
  CHECK(hit->i_raw == th.i_raw);
  CHECK(hit->tau2 == th.tau2);
  for (std::size_t i = 0; i < th.solution.n; ++i)
    for (std::size_t j = 0; j < th.solution.n; ++j)
      CHECK(hit->solution.at(i, j) == th.solution.at(i, j));

  // entries are keyed per twist and truncation
  CHECK_FALSE(cache.get(g, Twist::Euler, 2).has_value());
  CHECK_FALSE(cache.get(g, Twist::InverseEuler, 3).has_value());

  // tamper with the payload without refreshing the checksum
  std::filesystem::path entry = cache.entry_path(g, Twist::InverseEuler, 2);
  Json doc;
  {
    std::ifstream in(entry);
    in >> doc;
  }
  doc["payload"]["i0"][0] = Json::array();
  {
    std::ofstream out(entry);
    out << doc.dump();
  }
  CHECK_THROWS_AS(cache.get(g, Twist::InverseEuler, 2), CacheCorrupt);

  // a rebuild replaces the damaged entry and later reads succeed
  Theory again = cache.get_or_build(g, Twist::InverseEuler, 2);
  CHECK(again.i_raw == th.i_raw);
  CHECK(cache.get(g, Twist::InverseEuler, 2).has_value());

  // unreadable bytes also surface as corruption, never as a crash
  {
    std::ofstream out(entry);
    out << "not json";
  }
  CHECK_THROWS_AS(cache.get(g, Twist::InverseEuler, 2), CacheCorrupt);
  CHECK(cache.get_or_build(g, Twist::InverseEuler, 2).tau2 == th.tau2);
}

TEST_CASE("run_scenario passes every suite on the convex line bundle") {
  Scenario s = parse_scenario(parse_text(
      R"({"space":"P1","bundle":[1],"truncation":3,"suites":["all"]})"));
  Report rep = run_scenario(s);
  REQUIRE(rep.suites.size() == all_suites().size());
  for (const SuiteResult& sr : rep.suites) {
    INFO(sr.name);
    for (const std::string& f : sr.failures) INFO(f);
    CHECK(sr.status == "pass");
  }
  CHECK(report_exit_code(rep) == 0);

  // the rendered text form mentions every suite
  std::string text = report_to_text(rep);
  for (const std::string& name : all_suites())
    CHECK(text.find(name + ": pass") != std::string::npos);
}

TEST_CASE("run_scenario reports the local invariants of the cubic") {
  Scenario s = parse_scenario(parse_text(
      R"({"space":"P2","bundle":[3],"truncation":2,"suites":["invariants"]})"));
  Report rep = run_scenario(s);
  REQUIRE(rep.suites.size() == 1);
  CHECK(rep.suites[0].status == "pass");
  const Json& inv = rep.suites[0].derived.at("local_invariants");
  CHECK(inv.at("1").get<std::string>() == "3");
  CHECK(inv.at("2").get<std::string>() == "-45/8");
  CHECK(report_exit_code(rep) == 0);
}

TEST_CASE("a nonconvex bundle becomes a scope report, not a crash") {
  Scenario s = parse_scenario(parse_text(R"({"space":"P2","bundle":[-1]})"));
  Report rep = run_scenario(s);
  REQUIRE(rep.suites.size() == all_suites().size());
  for (const SuiteResult& sr : rep.suites) {
    CHECK(sr.status == "scope");
    REQUIRE(sr.scopes.size() == 1);
    CHECK(sr.scopes[0].find("scope:") == 0);
  }
  CHECK(report_exit_code(rep) == 2);
}

TEST_CASE("cold and warm cache runs produce byte identical reports") {
  TempDir tmp;
  Scenario s = parse_scenario(parse_text(
      R"({"space":"P1","bundle":[1],"truncation":3,
          "suites":["all"],"cache":true})"));
  std::string cold = report_to_json(run_scenario(s, tmp.str())).dump();
  CHECK(std::filesystem::exists(
      SeriesCache(tmp.str())
          .entry_path(GeometryTriple(SpaceModel{1}, BundleModel{{1}}),
                      Twist::InverseEuler, 3)));
  std::string warm = report_to_json(run_scenario(s, tmp.str())).dump();
  CHECK(cold == warm);
}

TEST_CASE("a batch runs scenarios in parallel against one cache") {
  TempDir tmp;
  std::vector<Scenario> list = {
      parse_scenario(parse_text(
          R"({"space":"P1","bundle":[1],"truncation":2,
              "suites":["narrow","invariants"],"cache":true})")),
      parse_scenario(parse_text(
          R"({"space":"P2","bundle":[2],"truncation":2,
              "suites":["narrow","cone"],"cache":true})")),
      parse_scenario(parse_text(R"({"space":"P2","bundle":[-1],
              "suites":["narrow"]})"))};
  std::vector<Report> reps = run_batch(list, tmp.str());
  REQUIRE(reps.size() == 3);
  CHECK(report_exit_code(reps[0]) == 0);
  CHECK(report_exit_code(reps[1]) == 0);
  CHECK(report_exit_code(reps[2]) == 2);
  for (const Report& rep : reps) {
    std::string again = report_to_json(run_scenario(rep.scenario, tmp.str()))
                            .dump();
    CHECK(report_to_json(rep).dump() == again);
  }
}
