#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "stratlearn/common.hpp"
#include "stratlearn/seminorm.hpp"

using namespace stratlearn;

namespace {

Seminorm diamond2d() {
  return Seminorm::polytope({{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}});
}

Seminorm square2d() {
  return Seminorm::polytope({{1.0, 1.0}, {-1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}});
}

std::vector<Seminorm> sample_norms(int d, Rng& rng) {
  std::vector<Seminorm> out;
  Vec w(static_cast<size_t>(d));
  for (auto& a : w) a = rng.uniform(0.5, 2.0);
  out.push_back(Seminorm::lp(1.0, w));
  out.push_back(Seminorm::lp(2.0, w));
  out.push_back(Seminorm::lp(kInf, w));
  if (d >= 2) {
    std::vector<Vec> verts;
    Vec axes(static_cast<size_t>(d));
    for (auto& a : axes) a = rng.uniform(0.7, 1.5);
    for (int k = 0; k < 2 * d + 3; ++k) {
      Vec u = rng.unit_direction(d);
      for (int i = 0; i < d; ++i) u[static_cast<size_t>(i)] *= axes[static_cast<size_t>(i)];
      verts.push_back(u);
      verts.push_back(scaled(u, -1.0));
    }
    out.push_back(Seminorm::polytope(verts));
  }
  if (d >= 2) {
    out.push_back(Seminorm::degenerate(Seminorm::l2(d), {unit(d, d - 1)}));
  }
  return out;
}

}  // namespace

TEST_CASE("eval_seminorm basics") {
  CHECK(eval_seminorm(Seminorm::l2(2), {3.0, 4.0}) == Catch::Approx(5.0));
  CHECK(eval_seminorm(diamond2d(), {1.0, 0.0}) == Catch::Approx(1.0));
  Seminorm deg = Seminorm::degenerate(Seminorm::l2(2), {unit(2, 1)});
  CHECK(eval_seminorm(deg, {0.0, 7.0}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(eval_seminorm(deg, {3.0, 7.0}) == Catch::Approx(3.0));
  CHECK_THROWS_AS(eval_seminorm(Seminorm::l2(2), {1.0}), InvalidInput);
}

TEST_CASE("dual_norm basics") {
  CHECK(dual_norm(Seminorm::l1(2), {3.0, -4.0}) == Catch::Approx(4.0));
  CHECK(dual_norm(diamond2d(), {3.0, -4.0}) == Catch::Approx(4.0));
  Seminorm deg = Seminorm::degenerate(Seminorm::l2(2), {unit(2, 1)});
  CHECK(std::isinf(dual_norm(deg, {0.0, 1.0})));
  CHECK(dual_norm(deg, {2.0, 0.0}) == Catch::Approx(2.0));
}

TEST_CASE("min_cost_to_hyperplane") {
  Hyperplane h{{3.0, 4.0}, 5.0};
  CHECK(min_cost_to_hyperplane(Seminorm::l2(2), {0.0, 0.0}, h) == Catch::Approx(1.0));
  // l-inf cost: the dual is l1, so the cost is |5| / (3+4)
  CHECK(min_cost_to_hyperplane(Seminorm::linf(2), {0.0, 0.0}, h) == Catch::Approx(5.0 / 7.0));
  Vec on_plane = {-5.0 / 3.0, 0.0};
  CHECK(min_cost_to_hyperplane(Seminorm::l2(2), on_plane, h) ==
        Catch::Approx(0.0).margin(1e-12));
  // infinite dual: crossing is free
  Seminorm deg = Seminorm::degenerate(Seminorm::l2(2), {unit(2, 1)});
  CHECK(min_cost_to_hyperplane(deg, {0.0, 0.0}, Hyperplane{{0.0, 1.0}, 3.0}) == 0.0);
  // flat ball orthogonal to w
  Seminorm seg = Seminorm::polytope({{0.0, 1.0}, {0.0, -1.0}});
  CHECK_THROWS_AS(min_cost_to_hyperplane(seg, Vec{1.0, 1.0}, Hyperplane{{1.0, 0.0}, 0.0}),
                  DegenerateDirection);
}

TEST_CASE("polygon_gauge examples") {
  auto sq = square2d();
  CHECK(eval_seminorm(sq, {1.0, 0.0}) == Catch::Approx(1.0));  // edge midpoint
  CHECK(eval_seminorm(sq, {0.0, 0.0}) == Catch::Approx(0.0).margin(1e-15));
  // frozen from the bisection oracle: gauge of (0.5, 0.5) in the diamond is 1
  auto dia = diamond2d();
  double oracle = oracles::grid_polygon_gauge_2d(dia.vertices, {0.5, 0.5});
  CHECK(oracle == Catch::Approx(1.0).margin(1e-9));
  CHECK(eval_seminorm(dia, {0.5, 0.5}) == Catch::Approx(1.0).margin(1e-9));
  // off-span direction has infinite gauge
  std::vector<Vec> seg = {{0.0, 1.0}, {0.0, -1.0}};
  CHECK(std::isinf(polygon_gauge(seg, {1.0, 0.0})));
  CHECK(polygon_gauge(seg, {0.0, -0.25}) == Catch::Approx(0.25));
}

TEST_CASE("listed polytope vertices have gauge exactly 1") {
  Rng rng(7);
  for (int d : {2, 3}) {
    auto norms = sample_norms(d, rng);
    for (const auto& l : norms) {
      if (l.kind != SeminormKind::Polytope) continue;
      for (const auto& v : l.vertices)
        CHECK(polygon_gauge(l.vertices, v) == Catch::Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("homogeneity and triangle inequality on random samples") {
  Rng rng(11);
  for (int d : {1, 2, 3}) {
    auto norms = sample_norms(d, rng);
    for (const auto& l : norms) {
      int fast = l.kind == SeminormKind::Polytope && !l.has_hrep() && d >= 3 ? 2000 : 10000;
      for (int it = 0; it < fast; ++it) {
        Vec u(static_cast<size_t>(d)), v(static_cast<size_t>(d));
        for (auto& x : u) x = rng.uniform(-3.0, 3.0);
        for (auto& x : v) x = rng.uniform(-3.0, 3.0);
        double lam = rng.uniform(-2.0, 2.0);
        double lu = eval_seminorm(l, u);
        REQUIRE(eval_seminorm(l, scaled(u, lam)) ==
                Catch::Approx(std::fabs(lam) * lu).margin(1e-9));
        REQUIRE(eval_seminorm(l, add(u, v)) <= lu + eval_seminorm(l, v) + 1e-9);
      }
    }
  }
}

TEST_CASE("dual norm consistency and attainment") {
  Rng rng(13);
  for (int d : {2, 3}) {
    auto norms = sample_norms(d, rng);
    for (const auto& l : norms) {
      for (int it = 0; it < 200; ++it) {
        Vec w = rng.unit_direction(d);
        DualResult dr = dual_norm_witness(l, w);
        if (std::isinf(dr.value)) continue;
        // random unit-ball elements never beat the dual value
        for (int k = 0; k < 40; ++k) {
          Vec z = rng.unit_direction(d);
          double lz = eval_seminorm(l, z);
          if (lz <= 1e-12 || std::isinf(lz)) continue;
          Vec zb = scaled(z, rng.uniform(0.0, 1.0) / lz);
          REQUIRE(dot(w, zb) <= dr.value + 1e-9);
        }
        if (l.kind != SeminormKind::Degenerate) {
          REQUIRE(dr.has_maximizer);
          REQUIRE(eval_seminorm(l, dr.maximizer) <= 1.0 + 1e-9);
          REQUIRE(dot(w, dr.maximizer) == Catch::Approx(dr.value).margin(1e-6));
        }
      }
    }
  }
}

TEST_CASE("min cost agrees with the projected grid oracle") {
  Rng rng(17);
  for (int d : {2, 3}) {
    auto norms = sample_norms(d, rng);
    for (const auto& l : norms) {
      for (int it = 0; it < 6; ++it) {
        Vec x(static_cast<size_t>(d));
        for (auto& t : x) t = rng.uniform(-2.0, 2.0);
        Vec w = rng.unit_direction(d);
        double b = rng.uniform(-2.0, 2.0);
        Hyperplane h{w, b};
        double dn = dual_norm(l, w);
        if (dn == 0.0 || std::isinf(dn)) continue;
        double got = min_cost_to_hyperplane(l, x, h);
        double want = oracles::grid_min_cost_to_plane(l, x, h);
        REQUIRE(got == Catch::Approx(want).margin(1e-6 + 1e-4 * want));
      }
    }
  }
}

TEST_CASE("polytope construction rejects asymmetric vertex lists") {
  CHECK_THROWS_AS(Seminorm::polytope({{1.0, 0.0}, {0.0, 1.0}}), InvalidInput);
}

TEST_CASE("l2 polytope approximations are inscribed") {
  Rng rng(19);
  for (int d : {1, 2, 3}) {
    Vec w(static_cast<size_t>(d));
    for (auto& a : w) a = rng.uniform(0.5, 2.0);
    Seminorm approx = Seminorm::l2_polytope(w, 64, 2);
    Seminorm exact = Seminorm::lp(2.0, w);
    for (const auto& v : approx.vertices)
      CHECK(eval_seminorm(exact, v) == Catch::Approx(1.0).margin(1e-9));
    for (int it = 0; it < 200; ++it) {
      Vec u = rng.unit_direction(d);
      // inscribed ball: the gauge is never smaller than the exact norm
      CHECK(eval_seminorm(approx, u) >= eval_seminorm(exact, u) - 1e-9);
    }
  }
}
