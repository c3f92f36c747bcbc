#include <cmath>
#include <random>

#include "doctest.h"
#include "hetbounds/bounds.hpp"
#include "hetbounds/error.hpp"
#include "hetbounds/rho_matrix.hpp"
#include "oracles.hpp"

using namespace hetbounds;

TEST_CASE("individual set is theta_s minus the bias interval") {
  CHECK(individual_set({"j", 1.0, {}}, {-1.0, 1.0}) == Interval{0.0, 2.0});
  const Interval y = individual_set({"2003", 0.403, {}}, {-0.068, 0.068});
  CHECK(y.lower == doctest::Approx(0.335).epsilon(1e-12));
  CHECK(y.upper == doctest::Approx(0.471).epsilon(1e-12));
  CHECK(individual_set({"p", 5.0, {}}, {0.0, 0.0}) == Interval{5.0, 5.0});

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const BiasBound nu{std::min(a, b), std::max(a, b)};
    CHECK(individual_set({"x", u(rng), {}}, nu).width() ==
          doctest::Approx(nu.nu_u - nu.nu_l).epsilon(1e-12));
  }
}

TEST_CASE("bias bounds reject reversed or non-finite input") {
  CHECK_THROWS_AS(BiasBound::checked(1.0, -1.0), InvalidInput);
  CHECK_THROWS_AS(BiasBound::checked(0.0, INFINITY), InvalidInput);
  CHECK_THROWS_AS(RhoBound::restricted(0.0, 2.0), InvalidInput);
  CHECK_THROWS_AS(RhoBound::restricted(2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(RhoBound::bracketing(1.1, 1.2), InvalidInput);
  CHECK_THROWS(RhoBound::unrestricted().lower());
}

TEST_CASE("difference bounds enumerate four candidates") {
  const auto c = bias_difference_bounds({-1.0, 1.0}, RhoBound::restricted(0.5, 2.0), false);
  REQUIRE(c);
  CHECK(c->candidates == std::array<double, 4>{0.5, -1.0, -0.5, 1.0});
  CHECK(c->c_l == -1.0);
  CHECK(c->c_u == 1.0);

  const auto z = bias_difference_bounds({0.0, 0.0}, RhoBound::restricted(0.3, 4.0), false);
  REQUIRE(z);
  CHECK(z->c_l == 0.0);
  CHECK(z->c_u == 0.0);

  CHECK_FALSE(bias_difference_bounds({-1.0, 1.0}, RhoBound::unrestricted(), false));
}

TEST_CASE("difference bounds agree with a grid extremization") {
  const auto c = bias_difference_bounds({0.2, 0.4}, RhoBound::restricted(0.8, 1.25), false);
  REQUIRE(c);
  const auto [lo, hi] = oracle::grid_difference_hull(0.2, 0.4, 0.8, 1.25, 1000);
  CHECK(c->c_l == doctest::Approx(lo).epsilon(1e-12));
  CHECK(c->c_u == doctest::Approx(hi).epsilon(1e-12));
  CHECK(c->c_l == doctest::Approx(-0.08).epsilon(1e-12));
  CHECK(c->c_u == doctest::Approx(0.10).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> nu(-2.0, 2.0), lo_r(0.2, 1.0), hi_r(1.0, 4.0);
  for (int t = 0; t < 60; ++t) {
    const double a = nu(rng), b = nu(rng);
    const BiasBound k{std::min(a, b), std::max(a, b)};
    const double rl = lo_r(rng), ru = hi_r(rng);
    const auto d = bias_difference_bounds(k, RhoBound::restricted(rl, ru), false);
    REQUIRE(d);
    // Bilinear in (rho, b): extremes sit on grid corners, so the grid hull is exact.
    const auto [gl, gu] = oracle::grid_difference_hull(k.nu_l, k.nu_u, rl, ru, 1000);
    CHECK(d->c_l == doctest::Approx(gl).epsilon(1e-12));
    CHECK(d->c_u == doctest::Approx(gu).epsilon(1e-12));
    CHECK(d->c_l <= 0.0);
    CHECK(d->c_u >= 0.0);
  }
}

TEST_CASE("symmetric flag replaces the lower ratio by the reciprocal upper") {
  const auto s = bias_difference_bounds({-1.0, 2.0}, RhoBound::restricted(0.9, 2.0), true);
  const auto g = bias_difference_bounds({-1.0, 2.0}, RhoBound::restricted(0.5, 2.0), false);
  REQUIRE(s);
  REQUIRE(g);
  CHECK(s->c_l == g->c_l);
  CHECK(s->c_u == g->c_u);
}

TEST_CASE("difference interval shifts by the estimate gap") {
  const DifferenceBound c{-1.0, 1.0, {}};
  CHECK(difference_interval({"j", 1.0, {}}, {"k", 1.0, {}}, c) == Interval{-1.0, 1.0});
  const DifferenceBound z{0.0, 0.0, {}};
  CHECK(difference_interval({"j", 0.7, {}}, {"k", 0.2, {}}, z).width() == 0.0);

  // 2013 against 2003 with the yearly rho bound; brute force over (B^k, rho).
  const BiasBound nu_k{-0.068, 0.068};
  const auto rho = RhoBound::restricted(0.992, 1.008);
  const auto d = bias_difference_bounds(nu_k, rho, false);
  REQUIRE(d);
  const Interval iv = difference_interval({"2013", 0.445, {}}, {"2003", 0.403, {}}, *d);
  const auto [gl, gu] = oracle::grid_difference_hull(nu_k.nu_l, nu_k.nu_u, 0.992, 1.008, 1000);
  CHECK(iv.lower == doctest::Approx(0.042 - gu).epsilon(1e-12));
  CHECK(iv.upper == doctest::Approx(0.042 - gl).epsilon(1e-12));
  CHECK(iv.width() == doctest::Approx(d->c_u - d->c_l).epsilon(1e-12));
}

TEST_CASE("supershort ratio bound") {
  const auto r = supershort_rho(0.1, 0.2);
  REQUIRE(r.is_restricted());
  CHECK(r.lower() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.upper() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(supershort_rho(0.1, -0.2).is_restricted());
  CHECK_FALSE(supershort_rho(0.1, 1e-9, 1e-6).is_restricted());
  CHECK_FALSE(supershort_rho(0.0, 0.3).is_restricted());
  CHECK(supershort_rho(1e-4, 2e-4, 1e-3, EpsilonMode::Absolute) == RhoBound::unrestricted());
  CHECK(supershort_rho(1e-4, 2e-4, 1e-6, EpsilonMode::Relative).is_restricted());

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(1e-3, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = (i % 2) ? 1.0 : -1.0;
    const auto b = supershort_rho(s * mag(rng), s * mag(rng));
    REQUIRE(b.is_restricted());
    CHECK(std::fabs(b.lower() * b.upper() - 1.0) <= 1e-12);
    CHECK(b.brackets_one(0.0));
  }
}

TEST_CASE("decay and adjacency generators") {
  const auto d1 = rho_from_decay(0.95, 1);
  CHECK(d1.lower() == 0.95);
  CHECK(d1.upper() == doctest::Approx(1.0 / 0.95).epsilon(1e-15));
  const auto d2 = rho_from_decay(0.95, 2);
  CHECK(d2.lower() == doctest::Approx(0.9025).epsilon(1e-15));
  CHECK(d2.upper() == doctest::Approx(1.1080332409972).epsilon(1e-12));
  CHECK(rho_from_decay(0.95, 0) == RhoBound::restricted(1.0, 1.0));
  CHECK_THROWS_AS(rho_from_decay(1.5, 1), InvalidInput);
  CHECK_THROWS_AS(rho_from_decay(0.9, -1), InvalidInput);

  const auto a = rho_from_adjacency(true, 1.1);
  CHECK(a.lower() == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  CHECK(a.upper() == 1.1);
  CHECK_FALSE(rho_from_adjacency(false, 1.1).is_restricted());
  CHECK(rho_from_adjacency(true, 1.0) == RhoBound::restricted(1.0, 1.0));
  CHECK_THROWS_AS(rho_from_adjacency(true, 0.9), InvalidInput);
}

TEST_CASE("rho matrix stays reciprocally coherent") {
  const std::vector<std::string> s{"a", "b", "c", "d"};
  const auto ss = supershort_matrix(s, {0.1, 0.2, -0.3, 0.05});
  CHECK(ss.is_coherent());
  CHECK(ss.at("a", "b").upper() == doctest::Approx(2.0));
  CHECK(ss.at("b", "a").lower() == doctest::Approx(0.5));
  CHECK_FALSE(ss.at("a", "c").is_restricted());
  CHECK_FALSE(ss.at("c", "a").is_restricted());
  CHECK(ss.restricted_pairs() == 3);

  const auto dm = decay_matrix(s, {0, 1, 2, 3}, 0.95);
  CHECK(dm.is_coherent());
  CHECK(dm.at(0, 2).upper() == doctest::Approx(1.0 / (0.95 * 0.95)).epsilon(1e-12));
  CHECK(dm.at(2, 0).lower() == doctest::Approx(0.9025).epsilon(1e-12));
  CHECK(dm.at(1, 1) == RhoBound::restricted(1.0, 1.0));

  const auto am = adjacency_matrix(s, {{"a", "b"}}, 1.1);
  CHECK(am.is_coherent());
  CHECK(am.restricted_pairs() == 1);
  CHECK_FALSE(am.at("a", "c").is_restricted());

  const auto pt = adjacency_matrix(s, {{"a", "b"}}, 1.1, true);
  CHECK(pt.at("a", "b") == RhoBound::exact(1.1));
  CHECK(pt.at("b", "a").lower() == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
}

TEST_CASE("transitivity audit uses interval products") {
  RhoMatrix ok({"j", "k", "m"});
  ok.set("j", "k", RhoBound::restricted(1.0, 2.0));
  ok.set("k", "m", RhoBound::restricted(1.0, 2.0));
  ok.set("j", "m", RhoBound::restricted(1.0, 4.0));
  CHECK(transitivity_audit(ok).empty());

  RhoMatrix bad({"j", "k", "m"});
  bad.set("j", "k", RhoBound::restricted(1.0, 1.1));
  bad.set("k", "m", RhoBound::restricted(1.0, 1.1));
  bad.set("j", "m", RhoBound::restricted(2.0, 3.0));
  const auto v = transitivity_audit(bad);
  REQUIRE_FALSE(v.empty());
  bool found = false;
  for (const auto& x : v) {
    if (x.j == "j" && x.k == "k" && x.m == "m") {
      found = true;
      CHECK(x.direct == Interval{2.0, 3.0});
      CHECK(x.product.lower == doctest::Approx(1.0));
      CHECK(x.product.upper == doctest::Approx(1.21));
    }
  }
  CHECK(found);

  RhoMatrix vac({"j", "k", "m"});
  vac.set("j", "k", RhoBound::restricted(1.0, 1.1));
  vac.set("j", "m", RhoBound::restricted(2.0, 3.0));
  CHECK(transitivity_audit(vac).empty());
}
