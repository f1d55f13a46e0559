#pragma once

// Command line driver: envelope, classify, assoc, verify, mohr and render.
// Exit status 0 on success, 1 on domain or verification failures, 2 on usage
// errors.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "circenv/assoc.hpp"
#include "circenv/envelope.hpp"
#include "circenv/fixtures.hpp"
#include "circenv/mohr.hpp"
#include "circenv/parser.hpp"
#include "circenv/report.hpp"
#include "circenv/svg.hpp"
#include "circenv/verify.hpp"

namespace circenv {

/// Bad flag combinations found after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliConfig {
  std::string family;
  std::optional<int> grid;
  std::optional<double> tol;
  std::string branch;  // plus, minus or both; empty picks a default per subcommand
  std::optional<double> phi;
  std::optional<std::string> point;
  std::optional<double> t0;
  std::string out;
  std::string format;
  std::string kind;
  std::string of = "center";
  std::string relation = "all";
  bool suite = false;
  std::uint64_t seed = 1;
  int count = 50;
  std::string stress;
  int circles = 60;
  bool center = false;
};

namespace cli {

inline Vec2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--point expects x,y");
  try {
    return {parse_double(detail::trim(text.substr(0, comma)), 1, 1),
            parse_double(detail::trim(text.substr(comma + 1)), 1, static_cast<int>(comma) + 2)};
  } catch (const ParseError&) {
    throw UsageError("--point expects x,y with numbers, got '" + text + "'");
  }
}

inline void emit(const CliConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out.empty()) {
    out << content;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error("cannot write '" + cfg.out + "'");
  f << content;
}

inline std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

inline FamilySpec load_spec(const CliConfig& cfg) {
  if (cfg.family.empty()) throw UsageError("--family is required");
  FamilySpec spec = parse_family(read_file(cfg.family));
  if (cfg.grid) {
    if (*cfg.grid < 3) throw UsageError("--grid must be at least 3");
    spec.samples = *cfg.grid;
  }
  return spec;
}

inline CircleFamily load_family(const CliConfig& cfg) {
  const FamilySpec spec = load_spec(cfg);
  if (!spec.radius) throw DomainError("family file has no radius");
  return build_family(spec);
}

inline std::string curve_csv(const SampledCurve& c) {
  std::ostringstream os;
  write_curve_csv(os, c);
  return os.str();
}

inline Json curve_json(const SampledCurve& c) {
  Json x = Json::array(), y = Json::array();
  for (const Vec2& p : c.points) {
    x.push_back(p.x);
    y.push_back(p.y);
  }
  return Json{{"t", c.t}, {"x", x}, {"y", y}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline int envelope(const CliConfig& cfg, std::ostream& out) {
  const CircleFamily fam = load_family(cfg);
  const CreativeWitness w = creative_check(fam);
  if (!w.creative) throw DomainError("circle family is not creative: " + w.reason);
  const auto [plus, minus] = build_envelopes(fam, w);
  std::vector<std::pair<std::string, SampledCurve>> curves;
  if (cfg.branch != "minus") curves.emplace_back("plus", curve_of(plus));
  if (cfg.branch == "minus" || cfg.branch == "both") curves.emplace_back("minus", curve_of(minus));
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format == "csv") {
    if (curves.size() == 1) {
      emit(cfg, curve_csv(curves.front().second), out);
    } else {
      if (cfg.out.empty()) throw UsageError("--branch both with csv output needs --out");
      for (const auto& [name, c] : curves) {
        CliConfig one = cfg;
        one.out = with_suffix(cfg.out, "_" + name);
        emit(one, curve_csv(c), out);
      }
    }
  } else if (format == "json") {
    Json j{{"classification", to_json(classify_count(fam, w))}};
    for (const auto& [name, c] : curves) j[name] = curve_json(c);
    emit(cfg, dump(j), out);
  } else {
    std::vector<SampledCurve> cs;
    for (const auto& [name, c] : curves) cs.push_back(c);
    emit(cfg, render_svg(family_scene(fam, cs, cfg.circles, "envelope")), out);
  }
  return 0;
}

inline int classify(const CliConfig& cfg, std::ostream& out) {
  const CircleFamily fam = load_family(cfg);
  const CreativeWitness w = creative_check(fam);
  Json j = to_json(classify_count(fam, w));
  if (!w.creative) j["reason"] = w.reason;
  emit(cfg, dump(j), out);
  return 0;
}

inline int assoc(const CliConfig& cfg, std::ostream& out) {
  const FamilySpec spec = load_spec(cfg);
  FrontalData fd = cfg.of == "envelope" ? unique_envelope(build_family(spec)) : build_frontal(spec);
  auto need_phi = [&] {
    if (!cfg.phi) throw UsageError("--kind " + cfg.kind + " needs --phi");
    return *cfg.phi;
  };
  auto need_point = [&] {
    if (!cfg.point) throw UsageError("--kind " + cfg.kind + " needs --point");
    return parse_point(*cfg.point);
  };
  SampledCurve c;
  Json extra = Json::object();
  if (cfg.kind == "evolute") {
    c = evolute(fd);
  } else if (cfg.kind == "evolutoid") {
    c = evolutoid(fd, need_phi());
  } else if (cfg.kind == "pedal") {
    c = pedal(fd, need_point());
  } else if (cfg.kind == "contrapedal") {
    c = contrapedal(fd, need_point());
  } else if (cfg.kind == "pedaloid") {
    const Vec2 p = need_point();
    c = pedaloid(fd, p, need_phi());
  } else {
    const InvoluteResult r = involute(fd, cfg.t0.value_or(fd.grid.a()));
    c = r.curve;
    extra["error_estimate"] = r.error_estimate;
  }
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format == "csv") {
    emit(cfg, curve_csv(c), out);
  } else if (format == "json") {
    Json j{{"kind", cfg.kind}, {"of", cfg.of}, {"curve", curve_json(c)}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    emit(cfg, dump(j), out);
  } else {
    Scene scene;
    scene.title = cfg.kind;
    scene.polyline(fd.gamma, Style::Dashed);
    scene.polyline(c.points, Style::Thick);
    if (cfg.point) scene.marker(parse_point(*cfg.point));
    emit(cfg, render_svg(scene), out);
  }
  return 0;
}

inline int verify(const CliConfig& cfg, std::ostream& out) {
  if (cfg.suite) {
    SuiteOptions opt;
    opt.count = opt.unit_count = cfg.count;
    opt.pedaloid_count = std::min(20, cfg.count);
    if (cfg.grid) opt.samples = *cfg.grid;
    const SuiteReport s = run_random_suite(cfg.seed, opt);
    emit(cfg, dump(to_json(s)), out);
    return s.pass ? 0 : 1;
  }
  const CircleFamily fam = load_family(cfg);
  using Check = std::function<VerificationReport()>;
  std::vector<std::pair<std::string, Check>> checks;
  const std::optional<double> tol = cfg.tol;
  std::optional<Vec2> p;
  if (cfg.point) p = parse_point(*cfg.point);
  auto missing = [](const char* flag) -> VerificationReport { throw UsageError(std::string("needs ") + flag); };
  checks.emplace_back(relation::kEnvelopeDef, [&] {
    const auto [a, b] = build_envelopes(fam, creative_check(fam));
    const VerificationReport ra = verify_envelope_def(fam, curve_of(a), tol);
    const VerificationReport rb = verify_envelope_def(fam, curve_of(b), tol);
    return ra.max_residual >= rb.max_residual ? ra : rb;
  });
  checks.emplace_back(relation::kFrontal, [&] {
    const auto [a, b] = build_envelopes(fam, creative_check(fam));
    const VerificationReport ra = verify_frontal_structure(fam, a, tol);
    const VerificationReport rb = verify_frontal_structure(fam, b, tol);
    return ra.max_residual >= rb.max_residual ? ra : rb;
  });
  checks.emplace_back(relation::kEvolute, [&] { return verify_2i(fam, tol); });
  checks.emplace_back(relation::kEvolutoid,
                      [&] { return cfg.phi ? verify_2ii(fam, *cfg.phi, tol) : missing("--phi"); });
  checks.emplace_back(relation::kContrapedal, [&] { return p ? verify_2iii(fam, *p, tol) : missing("--point"); });
  checks.emplace_back(relation::kPedaloid, [&] {
    if (!p) return missing("--point");
    return cfg.phi ? verify_2iv(fam, *p, *cfg.phi, tol) : missing("--phi");
  });
  checks.emplace_back(relation::kPedalOfDouble, [&] { return verify_3(fam, tol); });
  checks.emplace_back(relation::kSingular, [&] { return verify_prop41(fam, tol); });
  checks.emplace_back(relation::kOsculating,
                      [&] { return cfg.t0 ? verify_prop42(fam, *cfg.t0, tol) : missing("--t0"); });
  checks.emplace_back("constant-envelope", [&] { return verify_prop43(fam, tol); });
  checks.emplace_back(relation::kPedaloidEvolutoid, [&] {
    if (!p) return missing("--point");
    return cfg.phi ? verify_prop44(unique_envelope(fam), *p, *cfg.phi, tol) : missing("--phi");
  });

  const bool all = cfg.relation == "all";
  bool found = all, pass = true;
  Json reports = Json::array(), skipped = Json::array();
  for (const auto& [name, check] : checks) {
    if (!all && name != cfg.relation) continue;
    found = true;
    try {
      const VerificationReport r = check();
      pass = pass && r.pass;
      reports.push_back(to_json(r));
    } catch (const UsageError& e) {
      if (!all) throw UsageError(name + " " + e.what());
      skipped.push_back(Json{{"relation", name}, {"reason", e.what()}});
    } catch (const PreconditionError& e) {
      if (!all) throw;
      skipped.push_back(Json{{"relation", name}, {"reason", e.what()}});
    }
  }
  if (!found) throw UsageError("unknown relation '" + cfg.relation + "'");
  emit(cfg, dump(Json{{"family", cfg.family}, {"pass", pass}, {"reports", reports}, {"skipped", skipped}}), out);
  return pass ? 0 : 1;
}

inline Scene mohr_scene(const std::vector<MohrCircle>& circles, const FailureLine& line,
                        const std::optional<MohrEnvelope>& env) {
  Scene scene;
  scene.title = "Mohr circles";
  double smax = 0.0;
  for (const auto& c : circles) {
    scene.circle({c.center, 0.0}, c.radius, Style::Thin);
    smax = std::max(smax, c.center + c.radius);
  }
  scene.polyline({{0.0, line.tau(0.0)}, {smax, line.tau(smax)}}, Style::Dashed);
  if (env) scene.polyline(env->curve.points, Style::Thick);
  return scene;
}

inline int mohr(const CliConfig& cfg, std::ostream& out) {
  if (cfg.stress.empty()) throw UsageError("--stress is required");
  const std::vector<MohrCircle> circles = sorted_by_center(mohr_circles(load_stress_csv(cfg.stress)));
  const FailureLine line = fit_failure_line(circles);
  std::optional<MohrEnvelope> env;
  if (circles.size() >= 4) env = mohr_envelope_curve(circles, cfg.grid.value_or(2001));
  const std::string format = cfg.format.empty() ? "json" : cfg.format;
  if (format == "json") {
    Json j = to_json(line, circles.size());
    Json cs = Json::array();
    for (const auto& c : circles) cs.push_back(Json{{"center", c.center}, {"radius", c.radius}, {"label", c.label}});
    j["circles"] = cs;
    if (env) j["curved"] = Json{{"max_deviation", env->max_deviation}, {"scale", env->scale}};
    emit(cfg, dump(j), out);
  } else if (format == "csv") {
    if (!env) throw DomainError("need >= 4 circles for the curved envelope");
    emit(cfg, curve_csv(env->curve), out);
  } else {
    emit(cfg, render_svg(mohr_scene(circles, line, env)), out);
  }
  return 0;
}

inline int render(const CliConfig& cfg, std::ostream& out) {
  const CircleFamily fam = load_family(cfg);
  const CreativeWitness w = creative_check(fam);
  std::vector<SampledCurve> curves;
  if (w.creative) {
    // By default a unique envelope is drawn once and two envelopes both.
    std::string branch = cfg.branch;
    if (branch.empty()) branch = classify_count(fam, w).variant == EnvelopeCount::Unique ? "plus" : "both";
    const auto [plus, minus] = build_envelopes(fam, w);
    if (branch != "minus") curves.push_back(curve_of(plus));
    if (branch != "plus") curves.push_back(curve_of(minus));
  }
  Scene scene = family_scene(fam, curves, cfg.circles, cfg.family);
  if (cfg.center) scene.polyline(fam.frontal.gamma, Style::Dashed);
  emit(cfg, render_svg(scene), out);
  return 0;
}

}  // namespace cli

/// Runs the command line; args[0] is the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CliConfig cfg;
  CLI::App app{"Envelopes of circle families", "circenv"};
  app.require_subcommand(1);
  const std::vector<std::string> formats = {"csv", "svg", "json"};

  auto family_opts = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "family description file")->required()->check(CLI::ExistingFile);
    sub->add_option("--grid", cfg.grid, "number of samples");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
  };
  auto* env = app.add_subcommand("envelope", "sample the envelopes");
  family_opts(env);
  env->add_option("--branch", cfg.branch)->check(CLI::IsMember({"plus", "minus", "both"}));
  env->add_option("--format", cfg.format)->check(CLI::IsMember(formats));
  env->add_option("--circles", cfg.circles, "circles drawn in svg output")->check(CLI::PositiveNumber);

  auto* cls = app.add_subcommand("classify", "count the envelopes");
  family_opts(cls);

  auto* asc = app.add_subcommand("assoc", "curves associated with the center curve or the envelope");
  family_opts(asc);
  asc->add_option("--kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"evolute", "involute", "evolutoid", "pedal", "contrapedal", "pedaloid"}));
  asc->add_option("--of", cfg.of)->check(CLI::IsMember({"center", "envelope"}));
  asc->add_option("--phi", cfg.phi, "angle in radians");
  asc->add_option("--point", cfg.point, "base point x,y");
  asc->add_option("--t0", cfg.t0, "start parameter of the involute");
  asc->add_option("--format", cfg.format)->check(CLI::IsMember(formats));

  auto* ver = app.add_subcommand("verify", "check the envelope relations");
  ver->add_option("--family", cfg.family, "family description file")->check(CLI::ExistingFile);
  ver->add_option("--grid", cfg.grid, "number of samples");
  ver->add_option("--out", cfg.out, "output path (default stdout)");
  ver->add_option("--relation", cfg.relation, "relation name or all");
  ver->add_option("--tol", cfg.tol, "tolerance override")->check(CLI::PositiveNumber);
  ver->add_option("--phi", cfg.phi, "angle in radians");
  ver->add_option("--point", cfg.point, "base point x,y");
  ver->add_option("--t0", cfg.t0, "parameter for the osculating circle check");
  ver->add_flag("--suite", cfg.suite, "run the seeded random suite instead");
  ver->add_option("--seed", cfg.seed, "suite seed");
  ver->add_option("--count", cfg.count, "suite fixtures per profile")->check(CLI::PositiveNumber);
  ver->add_option("--format", cfg.format)->check(CLI::IsMember({"json"}));

  auto* mhr = app.add_subcommand("mohr", "fit the failure envelope of Mohr circles");
  mhr->add_option("--stress", cfg.stress, "CSV with sigma1,sigma3[,label]")->required()->check(CLI::ExistingFile);
  mhr->add_option("--grid", cfg.grid, "samples of the curved envelope");
  mhr->add_option("--out", cfg.out, "output path (default stdout)");
  mhr->add_option("--format", cfg.format)->check(CLI::IsMember(formats));

  auto* rnd = app.add_subcommand("render", "draw the family and its envelopes");
  family_opts(rnd);
  rnd->add_option("--circles", cfg.circles, "number of circles drawn")->check(CLI::PositiveNumber);
  rnd->add_option("--branch", cfg.branch)->check(CLI::IsMember({"plus", "minus", "both"}));
  rnd->add_flag("--center", cfg.center, "draw the center curve dashed");
  rnd->add_option("--format", cfg.format)->check(CLI::IsMember({"svg"}));

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    if (env->parsed()) return cli::envelope(cfg, out);
    if (cls->parsed()) return cli::classify(cfg, out);
    if (asc->parsed()) return cli::assoc(cfg, out);
    if (ver->parsed()) {
      if (!cfg.suite && cfg.family.empty()) throw UsageError("--family or --suite is required");
      return cli::verify(cfg, out);
    }
    if (mhr->parsed()) return cli::mohr(cfg, out);
    return cli::render(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace circenv
