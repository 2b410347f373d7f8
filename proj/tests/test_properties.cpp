#include <doctest.h>

#include "property_checks.hpp"

TEST_SUITE("properties") {

TEST_CASE("bandwidth limit") {
  const auto r = props::bandwidth_limit(1);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("no leakage") {
  const auto r = props::no_leakage(1);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("seed determinism") {
  const auto r = props::seed_determinism(1);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("count conservation") {
  const auto r = props::count_conservation(2);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("hamming bound") {
  const auto r = props::hamming_bound(1);
  INFO(r.detail);
  CHECK(r.ok);
}

}  // TEST_SUITE
