#include <doctest.h>

#include "conslaw/corpus.hpp"

using namespace conslaw;

TEST_CASE("every corpus claim holds") {
  auto rep = run_corpus("");
  CHECK(rep.results.size() > 100);
  for (const auto& r : rep.results) {
    INFO(r.id << " [" << r.instance << "] " << r.detail);
    CHECK(r.pass);
  }
  CHECK(rep.ok());
}

TEST_CASE("claim filters and failing claims") {
  auto rep = run_corpus("heat3d/reduces");
  CHECK(rep.results.size() == 3);
  CorpusFile bad{"bad", "indep t x\ndep u\neq u_t = u_xx\ncv F = u ; u_x\nclaim conserved F\nclaim weight u = 0\n"};
  auto res = run_file(bad, "");
  REQUIRE(res.size() == 2);
  CHECK(res[0].id == "bad/conserved:F");
  CHECK_FALSE(res[0].pass);
  CHECK(res[1].pass);
  CorpusFile broken{"broken", "indep t x\ndep u\neq u_t = \n"};
  auto b = run_file(broken, "");
  REQUIRE(b.size() == 1);
  CHECK_FALSE(b[0].pass);
}
