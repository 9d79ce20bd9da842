#include "doctest.h"
#include "property_checks.hpp"

using namespace singlab;

TEST_SUITE("properties") {

TEST_CASE("discrete maximum principle over random nonnegative data") {
  const auto r = props::maximum_principle();
  CHECK_MESSAGE(r.ok, r.detail);
  CHECK(r.cases == 1000);
}

TEST_CASE("T_k + G_k reproduces the identity") {
  const auto r = props::truncation_identity();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("envelopes sandwich random admissible nonlinearities") {
  const auto r = props::envelope_sandwich();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("truncation solutions increase with n") {
  const auto r = props::monotone_in_n();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("eigenpair residuals on random coefficients") {
  const auto r = props::eigen_residual();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("Hopf constants are stable under refinement") {
  const auto r = props::hopf_stability();
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("a violated property is reported with its first cause") {
  props::Outcome o;
  o.fail("first");
  o.fail("second");
  CHECK_FALSE(o.ok);
  CHECK(o.detail == "first");
}

}
