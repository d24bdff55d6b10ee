// Command-line surface for the strategic classification toolkit: instance
// generation, the two separability solvers plus the brute-force oracle,
// strategic-loss evaluation with per-point audits, shattering constructions,
// partition-reduction instances, randomization-gap searches, and the
// empirical learning-curve experiment.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratlearn/constructions.hpp"
#include "stratlearn/experiments.hpp"
#include "stratlearn/finite.hpp"
#include "stratlearn/hardness.hpp"
#include "stratlearn/json_io.hpp"
#include "stratlearn/randomized.hpp"
#include "stratlearn/serm.hpp"

using namespace stratlearn;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRegime = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitResource = 5;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open output file: " + path);
  out << text << "\n";
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2)); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open input file: " + path);
  json j;
  in >> j;
  return j;
}

GeneratorConfig::Cost parse_cost(const std::string& s) {
  if (s == "l1") return GeneratorConfig::Cost::L1;
  if (s == "l2") return GeneratorConfig::Cost::L2Approx;
  if (s == "linf") return GeneratorConfig::Cost::Linf;
  if (s == "polytope") return GeneratorConfig::Cost::RandomPolytope;
  throw InvalidInput("unknown cost kind: " + s + " (expected l1|l2|linf|polytope)");
}

Regime parse_regime(const std::string& s) {
  if (s == "adversarial") return Regime::Adversarial;
  if (s == "essentially-adversarial") return Regime::EssentiallyAdversarial;
  if (s == "general") return Regime::General;
  throw InvalidInput("unknown regime: " + s);
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategic linear classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 0;
  std::string out_path;
  double tol = kEta;
  int budget = 1000;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out_path, "output path ('-' for stdout)");
  app.add_option("--tol", tol, "boundary tolerance eta")->capture_default_str();
  app.add_option("--budget", budget, "search budget")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a strategic instance");
  int g_dim = 2, g_n = 20;
  std::string g_regime = "essentially-adversarial", g_cost = "l2";
  bool g_iw = false, g_nonsep = false;
  double g_margin = 0.2;
  gen->add_option("--dim", g_dim)->capture_default_str();
  gen->add_option("--n", g_n, "total point count")->capture_default_str();
  gen->add_option("--regime", g_regime)->capture_default_str();
  gen->add_option("--cost", g_cost, "l1|l2|linf|polytope")->capture_default_str();
  gen->add_flag("--instance-wise", g_iw, "per-point seminorms");
  gen->add_flag("--non-separable", g_nonsep, "skip the certified-separable construction");
  gen->add_option("--margin", g_margin)->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "run a separability solver");
  std::string s_instance, s_solver = "invariant";
  solve->add_option("--instance", s_instance, "instance JSON")->required();
  solve->add_option("--solver", s_solver, "invariant|instancewise|brute")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "strategic loss and per-point audit");
  std::string e_instance, e_classifier, e_audit;
  bool e_rzero = false;
  eval->add_option("--instance", e_instance)->required();
  eval->add_option("--classifier", e_classifier, "solution/classifier JSON")->required();
  eval->add_option("--audit", e_audit, "write a per-point audit CSV here");
  eval->add_flag("--r-zero", e_rzero, "evaluate with all preferences forced to 0");

  // shatter
  auto* shatter = app.add_subcommand("shatter", "run a shattering construction");
  std::string sh_construction = "thm3", sh_cost = "l2";
  int sh_n = 3, sh_d = 2;
  shatter->add_option("--construction", sh_construction, "thm3|thm4|prop3")
      ->capture_default_str();
  shatter->add_option("--n", sh_n)->capture_default_str();
  shatter->add_option("--d", sh_d)->capture_default_str();
  shatter->add_option("--cost", sh_cost, "l1|l2|linf|degenerate (thm4)")->capture_default_str();

  // hardness
  auto* hard = app.add_subcommand("hardness", "partition-reduction instance + verdict");
  std::string h_c = "1,1,2", h_instance_out;
  double h_eps = 0.25;
  int h_situation = 1;
  hard->add_option("--c", h_c, "comma-separated positive integers")->capture_default_str();
  hard->add_option("--eps", h_eps)->capture_default_str();
  hard->add_option("--situation", h_situation, "1 or 2")->capture_default_str();
  hard->add_option("--instance-out", h_instance_out, "also write the bare instance JSON");

  // rand-gap
  auto* rgap = app.add_subcommand("rand-gap", "randomization gap search");
  std::string r_instance, r_witness, r_emit;
  rgap->add_option("--instance", r_instance, "instance JSON (2D)");
  rgap->add_option("--witness", r_witness, "prop5|prop6: search/verify a bundled witness");
  rgap->add_option("--emit-witness", r_emit, "write the found witness bundle here");

  // learning-curve
  auto* lc = app.add_subcommand("learning-curve", "empirical sample-size sweep");
  std::string lc_schedule = "10,30,100,300";
  int lc_seeds = 20, lc_test = 10000, lc_dim = 2;
  lc->add_option("--schedule", lc_schedule)->capture_default_str();
  lc->add_option("--seeds", lc_seeds)->capture_default_str();
  lc->add_option("--test-n", lc_test)->capture_default_str();
  lc->add_option("--dim", lc_dim)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GeneratorConfig cfg;
      cfg.dim = g_dim;
      cfg.n_pos = g_n / 2;
      cfg.n_neg = g_n - g_n / 2;
      cfg.regime = parse_regime(g_regime);
      cfg.cost = parse_cost(g_cost);
      cfg.instance_wise = g_iw;
      cfg.separable = !g_nonsep;
      cfg.margin = g_margin;
      cfg.seed = seed;
      auto inst = generate_instance(cfg);
      write_json(out_path, instance_to_json(inst));
      return kExitOk;
    }

    if (solve->parsed()) {
      auto inst = instance_from_json(read_json(s_instance));
      SermConfig cfg;
      cfg.eta = tol;
      SermSolution sol;
      if (s_solver == "invariant")
        sol = serm_invariant_essentially_adversarial(inst, cfg);
      else if (s_solver == "instancewise")
        sol = serm_instancewise_adversarial(inst, cfg);
      else if (s_solver == "brute")
        sol = serm_bruteforce(inst, budget, tol);
      else
        throw InvalidInput("unknown solver: " + s_solver);
      write_json(out_path, serm_solution_to_json(sol));
      return sol.status == SermStatus::Separated ? kExitOk : kExitInfeasible;
    }

    if (eval->parsed()) {
      auto inst = instance_from_json(read_json(e_instance));
      if (e_rzero)
        for (auto& p : inst.points) p.r = 0.0;
      Hyperplane h = classifier_from_json(read_json(e_classifier));
      double loss = strategic_loss(h, inst, tol);
      if (!e_audit.empty()) {
        std::ostringstream csv;
        csv << "index,raw_label,br_label,signed_distance,moved,cost_spent\n";
        for (const auto& row : audit_rows(h, inst, tol))
          csv << row.index << "," << row.raw_label << "," << row.br_label << ","
              << csv_double(row.signed_distance) << "," << (row.moved ? 1 : 0) << ","
              << csv_double(row.cost_spent) << "\n";
        std::ofstream f(e_audit, std::ios::binary);
        if (!f) throw InvalidInput("cannot open audit file: " + e_audit);
        f << csv.str();
      }
      write_json(out_path, json{{"schema_version", kSchemaVersion},
                                {"tool_version", kToolVersion},
                                {"loss", loss},
                                {"n", inst.points.size()}});
      return kExitOk;
    }

    if (shatter->parsed()) {
      json j{{"schema_version", kSchemaVersion}, {"tool_version", kToolVersion}};
      if (sh_construction == "thm3") {
        auto c = build_thm3_polygons(sh_n);
        auto rep = shattering_coefficient_linear(c.points, c.costs, c.witnesses, tol);
        j["construction"] = "thm3";
        j["n"] = sh_n;
        j["sigma"] = rep.sigma;
        j["exact"] = true;
        j["shattered"] = rep.sigma == (1ull << sh_n);
        json wits = json::array();
        for (auto& [pat, idx] : rep.witnesses)
          wits.push_back(json{{"pattern", pat},
                              {"classifier", hyperplane_to_json(c.witnesses[static_cast<size_t>(idx)])}});
        j["witnesses"] = std::move(wits);
      } else if (sh_construction == "thm4") {
        Seminorm l = sh_cost == "l1" ? Seminorm::l1(sh_d)
                     : sh_cost == "linf"
                         ? Seminorm::linf(sh_d)
                         : sh_cost == "degenerate"
                               ? Seminorm::degenerate(Seminorm::l2(sh_d), {unit(sh_d, sh_d - 1)})
                               : Seminorm::l2(sh_d);
        auto c = build_thm4_lowerbound(sh_d, l, {1.0, -1.0, 2.0, -0.5});
        std::vector<Seminorm> per_point(static_cast<size_t>(c.count), l);
        auto rep = shattering_coefficient_linear(c.points, per_point, c.witnesses, tol);
        j["construction"] = "thm4";
        j["d"] = sh_d;
        j["count"] = c.count;
        j["sigma"] = rep.sigma;
        j["exact"] = true;
        j["shattered"] = rep.sigma == (1ull << c.count);
      } else if (sh_construction == "prop3") {
        auto p3 = build_prop3_space(sh_n);
        j["construction"] = "prop3";
        j["n"] = sh_n;
        j["svc"] = svc_finite(p3.space, sh_n + 1);
        j["classic_vc"] = classic_vc(p3.space);
        json avcs = json::array();
        for (int r = 1; r <= sh_n; ++r)
          avcs.push_back(json{{"r", r}, {"avc", avc_finite(p3.space, r)}});
        j["avc"] = std::move(avcs);
        j["metric"] = p3.space.is_metric();
      } else {
        throw InvalidInput("unknown construction: " + sh_construction);
      }
      write_json(out_path, j);
      return kExitOk;
    }

    if (hard->parsed()) {
      PartitionInput pin;
      pin.eps = h_eps;
      std::stringstream ss(h_c);
      std::string tok;
      while (std::getline(ss, tok, ',')) pin.c.push_back(std::stoll(tok));
      auto inst = generate_partition_instance(pin, h_situation);
      if (!h_instance_out.empty()) write_json(h_instance_out, instance_to_json(inst));
      auto subset = solve_partition_exact(pin);
      json verdict{{"schema_version", kSchemaVersion},
                   {"tool_version", kToolVersion},
                   {"partition_yes", subset.has_value()},
                   {"instance", instance_to_json(inst)}};
      if (static_cast<int>(pin.c.size()) <= 12 && h_situation == 1)
        verdict["norm_max_optimum"] = op9_exact_small(inst);
      if (subset) {
        verdict["subset"] = *subset;
        verdict["certificate_accepted"] =
            h_situation == 1 ? verify_yes_certificate(inst, *subset) : true;
      }
      write_json(out_path, verdict);
      return kExitOk;
    }

    if (rgap->parsed()) {
      if (!r_witness.empty()) {
        std::optional<WitnessBundle> wb;
        if (r_witness == "prop5")
          wb = find_witness_prop5(budget > 0 ? budget : 10000, tol);
        else if (r_witness == "prop6")
          wb = find_witness_prop6(tol);
        else
          throw InvalidInput("unknown witness: " + r_witness);
        if (!wb) return kExitInfeasible;
        if (!r_emit.empty()) write_json(r_emit, witness_bundle_to_json(*wb));
        json j{{"schema_version", kSchemaVersion},
               {"tool_version", kToolVersion},
               {"witness", r_witness},
               {"best_det", wb->det_loss},
               {"best_rand", wb->mixture_loss},
               {"gap", wb->det_loss - wb->mixture_loss},
               {"mixture", mixture_to_json(wb->mixture)},
               {"instance", instance_to_json(wb->instance)}};
        write_json(out_path, j);
        return kExitOk;
      }
      if (r_instance.empty()) throw InvalidInput("rand-gap: need --instance or --witness");
      auto inst = instance_from_json(read_json(r_instance));
      auto rep = search_randomization_gap(inst, budget, seed, tol);
      write_json(out_path, gap_report_to_json(rep));
      return kExitOk;
    }

    if (lc->parsed()) {
      LearningCurveConfig cfg;
      cfg.schedule.clear();
      std::stringstream ss(lc_schedule);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.schedule.push_back(std::stoi(tok));
      cfg.seeds = lc_seeds;
      cfg.test_n = lc_test;
      cfg.dim = lc_dim;
      if (seed != 0) cfg.base_seed = seed;
      auto res = run_learning_curve(cfg);
      std::ostringstream csv;
      csv << "n,mean_test_loss,std\n";
      for (const auto& row : res.rows)
        csv << row.n << "," << csv_double(row.mean_loss) << "," << csv_double(row.std_loss)
            << "\n";
      write_text(out_path, csv.str());
      std::cerr << "spearman_rho=" << res.spearman_rho << " p=" << res.p_value
                << " fallbacks=" << res.fallback_runs << "\n";
      return kExitOk;
    }
  } catch (const RegimeViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRegime;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
