#pragma once

// JSON reports shared by the command line subcommands.

#include <string>

#include "json.hpp"

#include "circenv/envelope.hpp"
#include "circenv/fixtures.hpp"
#include "circenv/mohr.hpp"
#include "circenv/verify.hpp"

namespace circenv {

using Json = nlohmann::ordered_json;

inline Json to_json(const VerificationReport& r) {
  return Json{{"relation", r.relation}, {"pass", r.pass},           {"max_residual", r.max_residual},
              {"tolerance", r.tolerance}, {"worst_t", r.worst_t}, {"detail", r.detail}};
}

inline Json to_json(const EnvelopeClassification& c) {
  Json j{{"variant", to_string(c.variant)},
         {"creative", c.creative},
         {"density_beta_nonzero", c.density_beta_nonzero},
         {"density_cos_unit", c.density_cos_unit}};
  j["witness_t0"] = c.witness_t0 ? Json(*c.witness_t0) : Json(nullptr);
  return j;
}

inline Json to_json(const FailureLine& line, std::size_t n_circles) {
  Json j{{"phi_deg", line.phi_deg}, {"c_kpa", line.c_kpa}, {"rms_residual", line.rms_residual},
         {"n_circles", n_circles}};
  j["warnings"] = line.warnings;
  return j;
}

inline Json to_json(const SuiteReport& s) {
  Json entries = Json::array();
  for (const auto& e : s.entries) entries.push_back(Json{{"index", e.index}, {"kind", e.kind}, {"report", to_json(e.report)}});
  return Json{{"seed", s.seed}, {"count", s.count}, {"pass", s.pass}, {"failures", s.failures()}, {"entries", entries}};
}

}  // namespace circenv
