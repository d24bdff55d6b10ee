#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stratlearn/serm.hpp"

using namespace stratlearn;

namespace {

StrategicInstance two_point_1d() {
  StrategicInstance inst;
  inst.dim = 1;
  inst.cost = CostModel::invariant(Seminorm::l2(1));
  inst.points = {DataPoint{{0.0}, 1, 0.0}, DataPoint{{5.0}, -1, 1.0}};
  return inst;
}

GeneratorConfig suite_config(int d, GeneratorConfig::Cost cost, Regime regime, bool iw,
                             uint64_t seed) {
  GeneratorConfig cfg;
  cfg.dim = d;
  cfg.n_pos = 5 + static_cast<int>(seed % 5);
  cfg.n_neg = 5 + static_cast<int>((seed / 2) % 5);
  cfg.cost = cost;
  cfg.regime = regime;
  cfg.instance_wise = iw;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("1D two-point instance solves to the known optimum") {
  auto sol = serm_invariant_essentially_adversarial(two_point_1d());
  REQUIRE(sol.status == SermStatus::Separated);
  CHECK(sol.h.w[0] == Catch::Approx(-1.0).margin(1e-9));
  CHECK(sol.h.b == Catch::Approx(0.0).margin(1e-9));
  CHECK(sol.epsilon == Catch::Approx(4.0).margin(1e-8));
  CHECK(sol.loss == 0.0);
}

TEST_CASE("rescaling formula, direct substitution") {
  Vec w = {-0.5};
  double b = 0.0, eps = 2.0;
  rescale_invariant_solution(w, b, eps, 0.5, 1.0, 0.0);
  CHECK(w[0] == Catch::Approx(-1.0));
  CHECK(b == Catch::Approx(0.5));
  CHECK(eps == Catch::Approx(4.0));
}

TEST_CASE("invariant solver separates generated essentially-adversarial suites") {
  for (int d : {1, 2, 3}) {
    int k = 0;
    for (auto cost : {GeneratorConfig::Cost::L1, GeneratorConfig::Cost::L2Approx,
                      GeneratorConfig::Cost::Linf, GeneratorConfig::Cost::RandomPolytope}) {
      auto cfg = suite_config(d, cost, Regime::EssentiallyAdversarial, false,
                              100 + static_cast<uint64_t>(10 * d + k++));
      auto inst = generate_instance(cfg);
      auto sol = serm_invariant_essentially_adversarial(inst);
      REQUIRE(sol.status == SermStatus::Separated);
      CHECK(sol.loss == 0.0);
      CHECK(sol.epsilon > 0.0);
      // tightness after rescaling: l*(wbar) = 1 on the instance's own ball
      CHECK(std::fabs(dual_norm(inst.cost.seminorms[0], sol.h.w) - 1.0) <= 1e-7);
      CHECK(sol.alpha <= 1.0 + 1e-9);
      for (const auto& e : sol.certificate) CHECK(e.pass);
    }
  }
}

TEST_CASE("invariant solver refuses general regimes and instance-wise costs") {
  auto gen = generate_instance(suite_config(2, GeneratorConfig::Cost::L1, Regime::General, false, 7));
  // make sure it is genuinely general: some positive point outprefers a negative one
  if (classify_regime(gen).regime == Regime::General)
    CHECK_THROWS_AS(serm_invariant_essentially_adversarial(gen), RegimeViolation);
  auto iw =
      generate_instance(suite_config(2, GeneratorConfig::Cost::L1, Regime::Adversarial, true, 8));
  CHECK_THROWS_AS(serm_invariant_essentially_adversarial(iw), InvalidInput);
}

TEST_CASE("invariant solver reports infeasibility") {
  StrategicInstance inst;
  inst.dim = 1;
  inst.cost = CostModel::invariant(Seminorm::l2(1));
  // same feature, opposite labels, r = 0 on both: no hyperplane separates
  inst.points = {DataPoint{{1.0}, 1, 0.0}, DataPoint{{1.0}, -1, 0.0}};
  auto sol = serm_invariant_essentially_adversarial(inst);
  CHECK(sol.status == SermStatus::Infeasible);
}

TEST_CASE("exact l2 is rejected by the LP path in dimension >= 2") {
  StrategicInstance inst;
  inst.dim = 2;
  inst.cost = CostModel::invariant(Seminorm::l2(2));
  inst.points = {DataPoint{{0.0, 0.0}, 1, 0.0}, DataPoint{{5.0, 0.0}, -1, 1.0}};
  CHECK_THROWS_AS(serm_invariant_essentially_adversarial(inst), InvalidInput);
}

TEST_CASE("instance-wise solver separates generated adversarial suites") {
  for (int d : {1, 2, 3}) {
    int k = 0;
    for (auto cost : {GeneratorConfig::Cost::L1, GeneratorConfig::Cost::L2Approx,
                      GeneratorConfig::Cost::Linf, GeneratorConfig::Cost::RandomPolytope}) {
      auto cfg = suite_config(d, cost, Regime::Adversarial, true,
                              200 + static_cast<uint64_t>(10 * d + k++));
      auto inst = generate_instance(cfg);
      auto sol = serm_instancewise_adversarial(inst);
      REQUIRE(sol.status == SermStatus::Separated);
      CHECK(sol.loss == 0.0);
      CHECK(sol.epsilon >= 1e-6);
      for (const auto& e : sol.certificate) CHECK(e.pass);
    }
  }
}

TEST_CASE("instance-wise solver: r = 0 degenerates to plain margin separation") {
  // all preferences zero: the positive side loses its dual terms and the
  // solver just needs a separating hyperplane with slack on the negatives
  StrategicInstance inst;
  inst.dim = 2;
  std::vector<Seminorm> ls;
  for (int i = 0; i < 8; ++i) ls.push_back(Seminorm::l1(2));
  Rng rng(51);
  for (int i = 0; i < 8; ++i) {
    double y = i < 4 ? 1.0 : -1.0;
    inst.points.push_back(
        DataPoint{{rng.uniform(-1.0, 1.0), y * (1.5 + rng.uniform(0.0, 1.0))}, i < 4 ? 1 : -1, 0.0});
  }
  inst.cost = CostModel::instance_wise(std::move(ls));
  auto sol = serm_instancewise_adversarial(inst);
  REQUIRE(sol.status == SermStatus::Separated);
  CHECK(sol.loss == 0.0);
  for (const auto& p : inst.points)
    CHECK(predict_raw(sol.h, p.x) == p.y);  // with r = 0 the raw labels already separate
}

TEST_CASE("bisection monotonicity of the feasibility system") {
  auto cfg = suite_config(2, GeneratorConfig::Cost::L1, Regime::Adversarial, true, 321);
  auto inst = generate_instance(cfg);
  std::vector<std::vector<Vec>> verts(inst.points.size());
  for (size_t i = 0; i < inst.points.size(); ++i)
    verts[i] = ball_vertices(inst.cost.seminorm_for(i));
  int hint = 0;
  auto sol = serm_instancewise_adversarial(inst);
  REQUIRE(sol.status == SermStatus::Separated);
  double eps0 = sol.epsilon;
  for (double f : {1.0, 0.5, 0.25, 0.125, 1e-3}) {
    auto res = detail::instancewise_feasible(inst, verts, f * eps0, &hint);
    CHECK(res.has_value());
  }
}

TEST_CASE("instance-wise solver refuses non-adversarial regimes") {
  auto ess = generate_instance(
      suite_config(2, GeneratorConfig::Cost::L1, Regime::EssentiallyAdversarial, true, 60));
  if (classify_regime(ess).regime != Regime::Adversarial)
    CHECK_THROWS_AS(serm_instancewise_adversarial(ess), RegimeViolation);
}

TEST_CASE("check_solution on ground truth and its flip") {
  auto inst =
      generate_instance(suite_config(2, GeneratorConfig::Cost::L2Approx, Regime::General, false, 77));
  REQUIRE(inst.meta.has_ground_truth);
  auto cert = check_solution(inst, inst.meta.ground_truth);
  for (const auto& e : cert) {
    CHECK(e.pass);
    CHECK(e.margin >= 0.0);
  }
  Hyperplane flipped{scaled(inst.meta.ground_truth.w, -1.0), -inst.meta.ground_truth.b};
  auto cert2 = check_solution(inst, flipped);
  bool any_fail = false;
  for (const auto& e : cert2) any_fail |= !e.pass;
  CHECK(any_fail);
}

TEST_CASE("brute force oracle") {
  StrategicInstance single;
  single.dim = 2;
  single.cost = CostModel::invariant(Seminorm::l2(2));
  single.points = {DataPoint{{1.0, 1.0}, 1, 0.5}};
  auto s = serm_bruteforce(single, 64);
  CHECK(s.loss == 0.0);

  // cross-validation with the LP solver on separable instances
  for (uint64_t seed : {400u, 401u, 402u, 403u}) {
    auto inst = generate_instance(
        suite_config(2, GeneratorConfig::Cost::L1, Regime::EssentiallyAdversarial, false, seed));
    auto lp_sol = serm_invariant_essentially_adversarial(inst);
    REQUIRE(lp_sol.status == SermStatus::Separated);
    auto bf = serm_bruteforce(inst, 1000);
    CHECK(bf.loss == 0.0);
  }
}

TEST_CASE("solver determinism") {
  auto inst = generate_instance(
      suite_config(3, GeneratorConfig::Cost::Linf, Regime::EssentiallyAdversarial, false, 500));
  auto a = serm_invariant_essentially_adversarial(inst);
  auto b = serm_invariant_essentially_adversarial(inst);
  CHECK(a.h.w == b.h.w);
  CHECK(a.h.b == b.h.b);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.alpha == b.alpha);

  auto iw = generate_instance(
      suite_config(2, GeneratorConfig::Cost::RandomPolytope, Regime::Adversarial, true, 501));
  auto c = serm_instancewise_adversarial(iw);
  auto d = serm_instancewise_adversarial(iw);
  CHECK(c.h.w == d.h.w);
  CHECK(c.h.b == d.h.b);
  CHECK(c.epsilon == d.epsilon);
}
