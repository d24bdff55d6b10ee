#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stratlearn/common.hpp"
#include "stratlearn/randomized.hpp"
#include "stratlearn/seminorm.hpp"
#include "stratlearn/serm.hpp"
#include "stratlearn/strategic.hpp"

namespace stratlearn {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "stratlearn-0.1.0";

// --- Seminorm ---------------------------------------------------------------

inline json seminorm_to_json(const Seminorm& l) {
  json j;
  switch (l.kind) {
    case SeminormKind::WeightedLp:
      j["kind"] = "lp";
      if (l.p == kInf)
        j["p"] = "inf";
      else
        j["p"] = static_cast<int>(l.p);
      j["weights"] = l.weights;
      break;
    case SeminormKind::Polytope:
      j["kind"] = "polytope";
      j["vertices"] = l.vertices;
      break;
    case SeminormKind::Degenerate:
      j["kind"] = "degenerate";
      j["base"] = seminorm_to_json(*l.base);
      j["kernel_basis"] = l.kernel;
      break;
  }
  return j;
}

inline Seminorm seminorm_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lp") {
    double p;
    if (j.at("p").is_string()) {
      if (j.at("p").get<std::string>() != "inf")
        throw InvalidInput("seminorm_from_json: bad p");
      p = kInf;
    } else {
      p = j.at("p").get<double>();
    }
    return Seminorm::lp(p, j.at("weights").get<Vec>());
  }
  if (kind == "polytope")
    return Seminorm::polytope(j.at("vertices").get<std::vector<Vec>>());
  if (kind == "degenerate")
    return Seminorm::degenerate(seminorm_from_json(j.at("base")),
                                j.at("kernel_basis").get<std::vector<Vec>>());
  throw InvalidInput("seminorm_from_json: unknown kind '" + kind + "'");
}

// --- Hyperplane ---------------------------------------------------------------

inline json hyperplane_to_json(const Hyperplane& h) { return json{{"w", h.w}, {"b", h.b}}; }

inline Hyperplane hyperplane_from_json(const json& j) {
  return Hyperplane{j.at("w").get<Vec>(), j.at("b").get<double>()};
}

// --- CostModel / StrategicInstance -------------------------------------------

inline json cost_model_to_json(const CostModel& cm) {
  json j;
  switch (cm.kind) {
    case CostKind::Invariant:
      j["kind"] = "invariant";
      j["seminorm"] = seminorm_to_json(cm.seminorms[0]);
      break;
    case CostKind::InstanceWise: {
      j["kind"] = "instance_wise";
      json arr = json::array();
      for (const auto& l : cm.seminorms) arr.push_back(seminorm_to_json(l));
      j["seminorms"] = std::move(arr);
      break;
    }
    case CostKind::Separable:
      j["kind"] = "separable";
      j["samples"] = cm.samples;
      j["c1"] = cm.c1;
      j["c2"] = cm.c2;
      break;
    case CostKind::ZeroCostRegion:
      j["kind"] = "zero_cost_region";
      j["samples"] = cm.samples;
      j["regions"] = cm.regions;
      break;
  }
  return j;
}

inline CostModel cost_model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "invariant") return CostModel::invariant(seminorm_from_json(j.at("seminorm")));
  if (kind == "instance_wise") {
    std::vector<Seminorm> ls;
    for (const auto& sj : j.at("seminorms")) ls.push_back(seminorm_from_json(sj));
    return CostModel::instance_wise(std::move(ls));
  }
  if (kind == "separable")
    return CostModel::separable(j.at("samples").get<std::vector<Vec>>(), j.at("c1").get<Vec>(),
                                j.at("c2").get<Vec>());
  if (kind == "zero_cost_region")
    return CostModel::zero_cost(j.at("samples").get<std::vector<Vec>>(),
                                j.at("regions").get<std::vector<std::vector<int>>>());
  throw InvalidInput("cost_model_from_json: unknown kind '" + kind + "'");
}

inline json instance_to_json(const StrategicInstance& inst) {
  json pts = json::array();
  for (const auto& p : inst.points) pts.push_back(json{{"x", p.x}, {"y", p.y}, {"r", p.r}});
  json meta{{"name", inst.meta.name},
            {"seed", inst.meta.seed},
            {"preference_set", inst.meta.preference_set}};
  if (inst.meta.has_ground_truth)
    meta["ground_truth"] = hyperplane_to_json(inst.meta.ground_truth);
  return json{{"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"dim", inst.dim},
              {"cost", cost_model_to_json(inst.cost)},
              {"points", std::move(pts)},
              {"meta", std::move(meta)}};
}

inline StrategicInstance instance_from_json(const json& j) {
  StrategicInstance inst;
  inst.dim = j.at("dim").get<int>();
  inst.cost = cost_model_from_json(j.at("cost"));
  for (const auto& pj : j.at("points"))
    inst.points.push_back(
        DataPoint{pj.at("x").get<Vec>(), pj.at("y").get<int>(), pj.at("r").get<double>()});
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    inst.meta.name = m.value("name", std::string{});
    inst.meta.seed = m.value("seed", static_cast<uint64_t>(0));
    inst.meta.preference_set = m.value("preference_set", std::string{});
    if (m.contains("ground_truth")) {
      inst.meta.has_ground_truth = true;
      inst.meta.ground_truth = hyperplane_from_json(m.at("ground_truth"));
    }
  }
  inst.validate();
  return inst;
}

// --- SermSolution -------------------------------------------------------------

inline json serm_solution_to_json(const SermSolution& s) {
  json cert = json::array();
  for (const auto& e : s.certificate)
    cert.push_back(json{
        {"index", e.index}, {"case", e.case_id}, {"pass", e.pass}, {"margin", e.margin}});
  const char* status = s.status == SermStatus::Separated
                           ? "Separated"
                           : (s.status == SermStatus::Infeasible ? "Infeasible"
                                                                 : "NumericalFailure");
  return json{{"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"status", status},
              {"w", s.h.w},
              {"b", s.h.b},
              {"epsilon", s.epsilon},
              {"alpha", s.alpha},
              {"loss", s.loss},
              {"certificate", std::move(cert)}};
}

inline Hyperplane classifier_from_json(const json& j) {
  return Hyperplane{j.at("w").get<Vec>(), j.at("b").get<double>()};
}

// --- RandomizedClassifier / gap reports ---------------------------------------

inline json mixture_to_json(const RandomizedClassifier& H) {
  json comps = json::array();
  if (H.finite()) {
    for (size_t i = 0; i < H.tables.size(); ++i) {
      json tj = json::array();
      for (int8_t v : H.tables[i]) tj.push_back(static_cast<int>(v));
      json cj{{"table", std::move(tj)}};
      if (i < H.hyperplanes.size()) cj["line"] = hyperplane_to_json(H.hyperplanes[i]);
      comps.push_back(std::move(cj));
    }
  } else {
    for (const auto& h : H.hyperplanes) comps.push_back(hyperplane_to_json(h));
  }
  return json{{"components", std::move(comps)}, {"probs", H.probs}};
}

inline RandomizedClassifier mixture_from_json(const json& j) {
  RandomizedClassifier H;
  H.probs = j.at("probs").get<Vec>();
  for (const auto& cj : j.at("components")) {
    if (cj.contains("table")) {
      std::vector<int8_t> t;
      for (const auto& v : cj.at("table")) t.push_back(static_cast<int8_t>(v.get<int>()));
      H.tables.push_back(std::move(t));
      if (cj.contains("line")) H.hyperplanes.push_back(hyperplane_from_json(cj.at("line")));
    } else {
      H.hyperplanes.push_back(hyperplane_from_json(cj));
    }
  }
  H.validate();
  return H;
}

inline json witness_bundle_to_json(const WitnessBundle& wb) {
  return json{{"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"instance", instance_to_json(wb.instance)},
              {"mixture", mixture_to_json(wb.mixture)},
              {"mixture_loss", wb.mixture_loss},
              {"det_loss", wb.det_loss}};
}

inline WitnessBundle witness_bundle_from_json(const json& j) {
  WitnessBundle wb;
  wb.instance = instance_from_json(j.at("instance"));
  wb.mixture = mixture_from_json(j.at("mixture"));
  wb.mixture_loss = j.at("mixture_loss").get<double>();
  wb.det_loss = j.at("det_loss").get<double>();
  return wb;
}

inline json gap_report_to_json(const GapReport& rep) {
  json responses = json::array();
  for (const auto& r : rep.agent_responses)
    responses.push_back(json{{"z", r.z}, {"sample", r.sample}, {"prob", r.prob},
                             {"utility", r.utility}});
  json j{{"schema_version", kSchemaVersion},
         {"tool_version", kToolVersion},
         {"best_det", rep.best_det},
         {"best_rand", rep.best_rand},
         {"det_classifier", hyperplane_to_json(rep.det_h)},
         {"agent_responses", std::move(responses)}};
  if (rep.mixture.k() > 0) j["mixture"] = mixture_to_json(rep.mixture);
  return j;
}

}  // namespace stratlearn
