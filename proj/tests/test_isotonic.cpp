#include <doctest.h>

#include <vector>

#include "hysim/isotonic.hpp"

using hysim::isotonic_fit;

TEST_SUITE("isotonic") {

TEST_CASE("already monotone data is unchanged") {
  const std::vector<double> v{1, 2, 2, 5};
  CHECK(isotonic_fit(v, {}) == v);
  const std::vector<double> d{5, 3, 3, 1};
  CHECK(isotonic_fit(d, {}, false) == d);
}

TEST_CASE("violators are pooled with weights") {
  const auto out = isotonic_fit({1, 3, 2, 4}, {1, 1, 1, 1});
  CHECK(out[1] == doctest::Approx(2.5));
  CHECK(out[2] == doctest::Approx(2.5));
  const auto w = isotonic_fit({1, 3, 2, 4}, {1, 3, 1, 1});
  CHECK(w[1] == doctest::Approx(2.75));
  CHECK(w[2] == doctest::Approx(2.75));
  const auto all = isotonic_fit({3, 2, 1}, {});
  for (double x : all) CHECK(x == doctest::Approx(2.0));
}

TEST_CASE("decreasing fits") {
  const auto out = isotonic_fit({4, 5, 1}, {}, false);
  CHECK(out[0] == doctest::Approx(4.5));
  CHECK(out[1] == doctest::Approx(4.5));
  CHECK(out[2] == doctest::Approx(1.0));
}

TEST_CASE("bad weights") {
  CHECK_THROWS(isotonic_fit({1, 2}, {1}));
  CHECK_THROWS(isotonic_fit({1, 2}, {1, 0}));
}

}
