#include "arakel/json_io.hpp"

#include <random>

#include "doctest.h"
#include "gen.hpp"

using namespace arakel;

TEST_CASE("profile json round trip preserves evaluation") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    ConvexProfile p = testgen::rand_profile(rng, Rational(3));
    ConvexProfile q = profile_from_json(profile_to_json(p), "roundtrip");
    for (int i = -20; i <= 20; ++i) CHECK(p.eval(Rational(i, 3)) == q.eval(Rational(i, 3)));
  }
}

TEST_CASE("measure json round trip preserves mass and integrals") {
  LineMeasure m;
  m.atoms = {{Rational(-1), Rational(2)}, {Rational(1, 3), Rational(1, 2)}};
  m.density_breaks = {Rational(0), Rational(2)};
  m.density_values = {Rational(3, 4)};
  LineMeasure r = measure_from_json(measure_to_json(m), "roundtrip");
  CHECK(r.total_mass() == m.total_mass());
  ConvexProfile id({}, {Rational(1)}, Rational(0));
  ConvexProfile zero({}, {Rational(0)}, Rational(0));
  CHECK(integrate_against(id, zero, m) == integrate_against(id, zero, r));
}

TEST_CASE("schema errors carry the offending path") {
  nlohmann::json bad = {{"kind", "pl"}, {"slopes", {"0"}}, {"anchor_value", "0"}};
  try {
    profile_from_json(bad, "input.profile");
    CHECK(false);
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("input.profile") != std::string::npos);
  }
  nlohmann::json nonconvex = {{"kind", "pl"},
                              {"breakpoints", {"0"}},
                              {"slopes", {"1", "0"}},
                              {"anchor_value", "0"}};
  CHECK_THROWS_AS(profile_from_json(nonconvex, "x"), SchemaError);
}

TEST_CASE("divisor json round trip preserves heights") {
  ModelArithDivisor d;
  d.points = {{ProjPoint::at(Rational(0)), Rational(1)}, {ProjPoint::infinity(), Rational(2)}};
  d.vertical = {{3, Rational(1, 2)}};
  d.potential = ConvexProfile({Rational(0)}, {Rational(-1), Rational(2)}, Rational(1));
  d.deviations[2] = {{ProjPoint::at(Rational(0)), Rational(1), Rational(1, 4)}};
  ModelArithDivisor r = divisor_from_json(divisor_to_json(d), "roundtrip");
  for (std::int64_t y : {2, 3, 7, -5})
    CHECK(height(d, ProjPoint::at(Rational(y))) == height(r, ProjPoint::at(Rational(y))));
}
