// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "circenv/cli.hpp"

using namespace circenv;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTimeLimit = 2.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a named check; the first failing check is listed in the detail.
  void check(bool ok, const std::string& what, double value) {
    if (!ok && pass) detail << "failed: ";
    if (!ok || pass) detail << what << "=" << std::setprecision(3) << value << " ";
    pass = pass && ok;
  }
};

std::string family_path(const std::string& name) { return std::string(CIRCENV_DATA_DIR) + "/families/" + name; }
CircleFamily load(const std::string& name) { return build_family(parse_family(read_file(family_path(name)))); }

double max_gap(const std::vector<Vec2>& pts, const std::vector<double>& t, const std::function<Vec2(double)>& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) m = std::max(m, distance(pts[i], g(t[i])));
  return m;
}

// Smallest error of the two branches against the two expected curves in either order.
double pair_gap(const EnvelopeBranch& a, const EnvelopeBranch& b, const std::function<Vec2(double)>& g1,
                const std::function<Vec2(double)>& g2) {
  const double straight = std::max(max_gap(a.f, a.t, g1), max_gap(b.f, b.t, g2));
  const double swapped = std::max(max_gap(a.f, a.t, g2), max_gap(b.f, b.t, g1));
  return std::min(straight, swapped);
}

double branch_gap(const CircleFamily& fam, const std::function<Vec2(double)>& g) {
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  return std::min(max_gap(plus.f, plus.t, g), max_gap(minus.f, minus.t, g));
}

int count_tag(const boost::property_tree::ptree& tree, const std::string& tag) {
  int n = 0;
  for (const auto& [key, child] : tree) n += (key == tag) + count_tag(child, tag);
  return n;
}

void check_parabola(Outcome& o) {
  const CircleFamily fam = load("parabola.dsl");
  const CreativeWitness w = creative_check(fam);
  o.check(classify_count(fam, w).variant == EnvelopeCount::Unique, "unique", 1.0);
  const auto [plus, minus] = build_envelopes(fam, w);
  double curv = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = plus.t[i];
    curv = std::max({curv, std::abs(plus.l_f[i] - 2.0 / (1.0 + 4.0 * t * t)),
                     std::abs(plus.beta_f[i] - std::sqrt(1.0 + 4.0 * t * t))});
  }
  // Curvature pair from finite differences of the sampled envelope and its creator.
  const double h = fam.grid().h();
  const auto df = detail::grid_derivative(plus.f, h);
  const auto dnu = detail::grid_derivative(plus.nu_tilde, h);
  double fd = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = plus.t[i];
    const Vec2 mu = rotate90(plus.nu_tilde[i]);
    fd = std::max({fd, std::abs(dot(dnu[i], mu) - 2.0 / (1.0 + 4.0 * t * t)),
                   std::abs(dot(df[i], mu) - std::sqrt(1.0 + 4.0 * t * t))});
  }
  o.check(max_gap(plus.f, plus.t, [](double t) { return Vec2{t, t * t}; }) < 1e-9, "f_err",
          max_gap(plus.f, plus.t, [](double t) { return Vec2{t, t * t}; }));
  o.check(curv < 1e-9, "curv_err", curv);
  o.check(fd < 1e-4, "curv_fd_err", fd);
}

void check_line(Outcome& o) {
  const CircleFamily fam = load("line.dsl");
  const CreativeWitness w = creative_check(fam);
  o.check(classify_count(fam, w).variant == EnvelopeCount::Unique, "unique", 1.0);
  const auto [plus, minus] = build_envelopes(fam, w);
  const double e = max_gap(plus.f, plus.t, [](double) { return Vec2{0.0, 0.0}; });
  o.check(e < 1e-12, "f_err", e);
  const VerificationReport r = verify_2i(fam);
  o.check(r.pass, "evolute_res", r.max_residual);
}

void check_unit_circle(Outcome& o) {
  const CircleFamily fam = load("unit_circle.dsl");
  const CreativeWitness w = creative_check(fam);
  o.check(classify_count(fam, w).variant == EnvelopeCount::ExactlyTwo, "exactly_two", 1.0);
  const auto [plus, minus] = build_envelopes(fam, w);
  const double e = pair_gap(
      plus, minus, [](double) { return Vec2{0.0, 0.0}; },
      [](double t) { return Vec2{2.0 * std::cos(t), 2.0 * std::sin(t)}; });
  o.check(e < 1e-10, "branch_err", e);
  const VerificationReport r = verify_3(fam);
  o.check(r.pass, "pedal_res", r.max_residual);
}

void check_evolutoid(Outcome& o) {
  const CircleFamily fam = build_family(parse_family(
      "curve x=-4*t^3; y=3*t^2+1/2\n"
      "nu x=1/sqrt(1+4*t^2); y=2*t/sqrt(1+4*t^2)\n"
      "radius cos(pi/4)*(1+4*t^2)^(3/2)/2\n"
      "domain (-1,1)\n"));
  const CreativeWitness w = creative_check(fam);
  o.check(classify_count(fam, w).variant == EnvelopeCount::ExactlyTwo, "exactly_two", 1.0);
  const auto [plus, minus] = build_envelopes(fam, w);
  const double e = pair_gap(
      plus, minus,
      [](double t) { return Vec2{-2 * t * t * t - t * t + t / 2 - 0.25, -2 * t * t * t + 2 * t * t - t / 2 + 0.25}; },
      [](double t) { return Vec2{-2 * t * t * t + t * t + t / 2 + 0.25, 2 * t * t * t + 2 * t * t + t / 2 + 0.25}; });
  o.check(e < 1e-9, "branch_err", e);
  const VerificationReport r = verify_2ii(load("parabola.dsl"), kPi / 4.0);
  o.check(r.pass && r.max_residual < 1e-8, "evolutoid_res", r.max_residual);
}

void check_contrapedal(Outcome& o) {
  const CircleFamily fam = load("cusp.dsl");
  const VerificationReport r = verify_2iii(fam, {0.0, 0.0});
  o.check(r.pass && r.max_residual < 1e-8, "contrapedal_res", r.max_residual);
  const double e = branch_gap(auxiliary_family_2iii(fam, {0.0, 0.0}), [](double t) {
    const double d = 1.0 + 4.0 * t * t;
    return Vec2{2.0 * t * t * t / d, 4.0 * t * t * t * t / d};
  });
  o.check(e < 1e-8, "closed_form_err", e);
}

Vec2 f4(double t) {
  const double t2 = t * t, d = 4.0 + 16.0 * t2;
  return {(1.0 + 2.0 * t + 2.0 * t2 + 8.0 * t2 * t + 8.0 * t2 * t2) / d, (-1.0 + 2.0 * t - 2.0 * t2 + 8.0 * t2 * t2) / d};
}

void check_pedaloid(Outcome& o) {
  const CircleFamily fam = load("cusp.dsl");
  const VerificationReport r = verify_2iv(fam, {0.0, 0.0}, kPi / 4.0);
  o.check(r.pass && r.max_residual < 1e-8, "pedaloid_res", r.max_residual);
  const double e = branch_gap(auxiliary_family_2iv(fam, {0.0, 0.0}, kPi / 4.0), f4);
  o.check(e < 1e-8, "closed_form_err", e);
  // Spot value on a grid through t = 1.
  FamilySpec spec = parse_family(read_file(family_path("cusp.dsl")));
  spec.a = 0.5;
  spec.b = 1.5;
  const CircleFamily spot = build_family(spec);
  const SampledCurve p = pedaloid(unique_envelope(spot), {0.0, 0.0}, kPi / 4.0);
  const auto one = static_cast<std::size_t>(spot.grid().nearest(1.0));
  const double s = distance(p.points[one], {1.05, 0.35});
  o.check(spot.frontal.t[one] == 1.0 && s < 1e-12, "spot_err", s);
}

void check_pedal_double(Outcome& o) {
  const CircleFamily fam = load("pedal_double.dsl");
  const CreativeWitness w = creative_check(fam);
  double c = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t6 = std::pow(fam.frontal.t[i], 6);
    c = std::max(c, std::abs(w.cos_theta[i] + (2.0 + t6) / (std::sqrt(1.0 + t6) * std::sqrt(4.0 + t6))));
  }
  o.check(c < 1e-10, "cos_err", c);
  const auto [plus, minus] = build_envelopes(fam, w);
  const double e = max_gap(minus.f, minus.t, [](double t) {
    const double t6 = std::pow(t, 6);
    return Vec2{t * t * t * t6 / (6.0 * (1.0 + t6)), -t6 / (6.0 * (1.0 + t6))};
  });
  o.check(e < 1e-9, "f2_err", e);
  const VerificationReport r = verify_3(fam);
  o.check(r.pass, "pedal_res", r.max_residual);
}

void check_suite(Outcome& o) {
  const std::uint64_t seed = 20261016;
  const SuiteReport s = run_random_suite(seed, SuiteOptions{});
  o.detail << "seed=" << s.seed << " fixtures=" << s.entries.size() << " ";
  o.check(s.pass && s.failures() == 0, "failures", static_cast<double>(s.failures()));
  double worst = 0.0;
  for (const auto& e : s.entries) {
    worst = std::max(worst, e.report.max_residual / e.report.tolerance);
    if (!e.report.pass)
      o.detail << "[" << e.index << " " << e.kind << " " << e.report.relation << " " << e.report.max_residual << "] ";
  }
  o.check(worst <= 1.0, "worst_res/tol", worst);
}

std::vector<MohrCircle> scaled(std::vector<MohrCircle> circles, double k) {
  for (auto& c : circles) {
    c.center *= k;
    c.radius *= k;
  }
  return circles;
}

void check_mohr(Outcome& o) {
  const auto circles = mohr_circles(load_stress_csv(std::string(CIRCENV_DATA_DIR) + "/mohr/linear.csv"));
  o.check(circles.size() == 8, "circles", static_cast<double>(circles.size()));
  const MohrEnvelope env = mohr_envelope_curve(circles);
  o.check(std::abs(env.line.phi_deg - 30.0) <= 0.1, "phi_deg", env.line.phi_deg);
  o.check(std::abs(env.line.c_kpa - 10.0) <= 0.05, "c_kpa", env.line.c_kpa);
  o.check(env.max_deviation < 1e-6 * env.scale, "deviation/scale", env.max_deviation / env.scale);
  const FailureLine big = fit_failure_line(scaled(circles, 1000.0));
  const double dphi = std::abs(big.phi_deg - env.line.phi_deg);
  const double dc = std::abs(big.c_kpa - 1000.0 * env.line.c_kpa) / (1000.0 * std::abs(env.line.c_kpa));
  o.check(dphi < 1e-9 && dc < 1e-9, "rescale_rel_err", std::max(dphi, dc));
}

void check_rendering(Outcome& o) {
  const CircleFamily fam = load("parabola.dsl");
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  auto draw = [&] {
    Scene scene = family_scene(fam, {curve_of(plus)}, 25, "parabola");
    scene.polyline(fam.frontal.gamma, Style::Dashed);
    return render_svg(scene);
  };
  const std::string a = draw(), b = draw();
  boost::property_tree::ptree tree;
  std::istringstream is(a);
  bool parsed = true;
  try {
    boost::property_tree::read_xml(is, tree);
  } catch (const boost::property_tree::xml_parser_error&) {
    parsed = false;
  }
  o.check(parsed, "xml", parsed);
  o.check(count_tag(tree, "circle") == 25, "circles", count_tag(tree, "circle"));
  o.check(count_tag(tree, "polyline") == 2, "polylines", count_tag(tree, "polyline"));
  o.check(a == b, "identical", a == b);
  std::ostringstream x, y, err;
  const std::vector<std::string> args = {"circenv", "render", "--family", family_path("parabola.dsl"), "--circles", "25"};
  const bool cli_same = run_cli(args, x, err) == 0 && run_cli(args, y, err) == 0 && x.str() == y.str();
  o.check(cli_same, "cli_identical", cli_same);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"parabola family", check_parabola},         {"line family", check_line},
      {"unit circle family", check_unit_circle},   {"evolutoid", check_evolutoid},
      {"contrapedal", check_contrapedal},          {"pedaloid", check_pedaloid},
      {"pedal of twice the curve", check_pedal_double}, {"random property suite", check_suite},
      {"Mohr failure envelope", check_mohr},       {"rendering", check_rendering}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what() << " ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(secs < kTimeLimit, "seconds", secs);
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first << " ("
              << o.detail.str() << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
