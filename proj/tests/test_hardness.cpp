#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stratlearn/hardness.hpp"
#include "stratlearn/serm.hpp"

using namespace stratlearn;

TEST_CASE("reduction instance shape") {
  PartitionInput pin{{1, 1, 2}, 0.25};
  auto inst = generate_partition_instance(pin, 1);
  CHECK(inst.points.size() == 9);  // 2d + 3
  // the c-point triple: labels (+1, -1, +1), preferences (2, 2-eps, 2)
  const auto& a = inst.points[6];
  const auto& b = inst.points[7];
  const auto& c = inst.points[8];
  CHECK(a.y == 1);
  CHECK(b.y == -1);
  CHECK(c.y == 1);
  CHECK(a.r == 2.0);
  CHECK(b.r == Catch::Approx(1.75));
  CHECK(c.r == 2.0);
  CHECK(a.x == Vec{1.0, 1.0, 2.0});
  CHECK(b.x == Vec{2.0, 2.0, 4.0});
  CHECK(c.x == Vec{3.0, 3.0, 6.0});

  auto s2 = generate_partition_instance(pin, 2);
  CHECK(s2.points.size() == 9);
  for (int i = 0; i < 3; ++i) CHECK(s2.points[static_cast<size_t>(2 * i)].r == 0.5);
  CHECK(classify_regime(s2).regime != Regime::General);  // essentially adversarial
}

TEST_CASE("yes certificate") {
  PartitionInput pin{{1, 1, 2}, 0.25};
  auto inst = generate_partition_instance(pin, 1);
  CHECK(verify_yes_certificate(inst, {3}));
  CHECK(verify_yes_certificate(inst, {1, 2}));  // complement gives the same verdict
  CHECK_FALSE(verify_yes_certificate(inst, {1}));

  PartitionInput odd{{1, 1, 3}, 0.25};
  auto inst_odd = generate_partition_instance(odd, 1);
  CHECK_FALSE(verify_yes_certificate(inst_odd, {1}));
  CHECK_FALSE(verify_yes_certificate(inst_odd, {3}));
  CHECK_FALSE(verify_yes_certificate(inst_odd, {1, 2}));
}

TEST_CASE("exact partition oracle") {
  auto s = solve_partition_exact(PartitionInput{{1, 1, 2}, 0.25});
  REQUIRE(s.has_value());
  long long sum = 0;
  for (int i : *s) sum += PartitionInput{{1, 1, 2}, 0.25}.c[static_cast<size_t>(i - 1)];
  CHECK(sum == 2);
  CHECK_FALSE(solve_partition_exact(PartitionInput{{1, 2, 4}, 0.25}).has_value());
  auto t = solve_partition_exact(PartitionInput{{5, 5}, 0.25});
  REQUIRE(t.has_value());
  CHECK(t->size() == 1);
}

TEST_CASE("norm-maximization optimum encodes the partition answer") {
  CHECK(op9_exact_small(generate_partition_instance({{1, 1, 2}, 0.25}, 1)) == 1.0);
  CHECK(op9_exact_small(generate_partition_instance({{1, 1}, 0.25}, 1)) == 1.0);
  double v = op9_exact_small(generate_partition_instance({{1, 2, 4}, 0.25}, 1));
  CHECK(v < 1.0 - 1e-9);
}

TEST_CASE("equivalence of the three routes on random inputs") {
  Rng rng(211);
  for (int trial = 0; trial < 40; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform_int(9));  // up to 10
    PartitionInput pin;
    pin.eps = 0.25;
    for (int i = 0; i < d; ++i)
      pin.c.push_back(1 + static_cast<long long>(rng.uniform_int(12)));
    auto inst = generate_partition_instance(pin, 1);
    auto subset = solve_partition_exact(pin);
    bool op9_yes = op9_exact_small(inst) == 1.0;
    CHECK(op9_yes == subset.has_value());
    if (subset) CHECK(verify_yes_certificate(inst, *subset));
  }
}

TEST_CASE("reduction instances satisfy the relaxed program's constraints") {
  // (w, b) = (0, -2) with ||w|| <= 1 satisfies every relaxed row with slack
  // eps; the gap between this relaxed feasibility and a genuine dual-sphere
  // solution is exactly what the reduction exploits
  Rng rng(223);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform_int(5));
    PartitionInput pin;
    pin.eps = 0.25;
    for (int i = 0; i < d; ++i) pin.c.push_back(1 + static_cast<long long>(rng.uniform_int(9)));
    auto inst = generate_partition_instance(pin, 1);
    Vec w = zeros(d);
    double b = -2.0;
    for (const auto& p : inst.points) {
      double v = dot(w, p.x) + b;
      if (p.y == 1)
        CHECK(v >= -p.r);
      else
        CHECK(v <= -p.r - pin.eps + 1e-12);
    }
  }
}

TEST_CASE("situation 2 reproduces situation 1 constraint sets") {
  PartitionInput pin{{2, 3, 5, 7}, 0.25};
  auto s1 = generate_partition_instance(pin, 1);
  auto s2 = generate_partition_instance(pin, 2);
  REQUIRE(s1.points.size() == s2.points.size());
  Rng rng(227);
  for (int trial = 0; trial < 400; ++trial) {
    Hyperplane h{rng.unit_direction(4), rng.uniform(-4.0, 0.0)};
    for (size_t i = 0; i < s1.points.size(); ++i) {
      const auto& p1 = s1.points[i];
      const auto& p2 = s2.points[i];
      double d1 = dual_norm(s1.cost.seminorm_for(i), h.w);
      double d2 = dual_norm(s2.cost.seminorm_for(i), h.w);
      // rescaling the cost scales the constraint margin s + r by the same
      // factor, so the two builds accept exactly the same hyperplanes
      double m1 = (dot(h.w, p1.x) + h.b) / d1 + p1.r;
      double m2 = (dot(h.w, p2.x) + h.b) / d2 + p2.r;
      REQUIRE(m1 == Catch::Approx(m2 * (d2 / d1)).margin(1e-9));
      REQUIRE(best_response_label_dual(h, p1.x, p1.r, d1) ==
              best_response_label_dual(h, p2.x, p2.r, d2));
    }
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(generate_partition_instance({{0, 1}, 0.25}, 1), InvalidInput);
  CHECK_THROWS_AS(generate_partition_instance({{1, 1}, 1.5}, 1), InvalidInput);
  CHECK_THROWS_AS(generate_partition_instance({{1, 1}, 0.25}, 3), InvalidInput);
  PartitionInput big;
  big.c.assign(30, 1);
  CHECK_THROWS_AS(solve_partition_exact(big), ResourceLimit);
}
