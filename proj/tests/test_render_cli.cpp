#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "circenv/cli.hpp"

using namespace circenv;
namespace pt = boost::property_tree;

namespace {

std::string family_path(const std::string& name) {
  return std::string(CIRCENV_DATA_DIR) + "/families/" + name;
}

// Counts elements with the given tag anywhere below the tree node.
int count_tag(const pt::ptree& tree, const std::string& tag) {
  int n = 0;
  for (const auto& [key, child] : tree) {
    if (key == tag) ++n;
    n += count_tag(child, tag);
  }
  return n;
}

pt::ptree parse_xml(const std::string& text) {
  std::istringstream is(text);
  pt::ptree tree;
  pt::read_xml(is, tree);
  return tree;
}

struct CliResult {
  int code = 0;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "circenv");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(RenderSvg, ParabolaSceneCounts) {
  const CircleFamily fam = build_family(parse_family(read_file(family_path("parabola.dsl"))));
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  const std::string svg = render_svg(family_scene(fam, {curve_of(plus)}, 25, "parabola"));
  const pt::ptree tree = parse_xml(svg);
  EXPECT_EQ(count_tag(tree, "circle"), 25);
  EXPECT_EQ(count_tag(tree, "polyline"), 1);
  EXPECT_EQ(tree.get<std::string>("svg.title"), "parabola");
}

TEST(RenderSvg, EmptySceneIsRejected) { EXPECT_THROW(render_svg(Scene{}), DomainError); }

TEST(RenderSvg, SingleMarkerGetsUnitBox) {
  Scene scene;
  scene.marker({2.0, 3.0});
  const pt::ptree tree = parse_xml(render_svg(scene));
  const std::string view = tree.get<std::string>("svg.<xmlattr>.viewBox");
  std::istringstream is(view);
  double x = 0, y = 0, w = 0, h = 0;
  is >> x >> y >> w >> h;
  EXPECT_GT(w, 0.0);
  EXPECT_GT(h, 0.0);
  EXPECT_LE(x, 2.0);
  EXPECT_GE(x + w, 2.0);
  EXPECT_LE(y, -3.0);
  EXPECT_GE(y + h, -3.0);
  EXPECT_EQ(count_tag(tree, "rect"), 1);
}

TEST(RenderSvg, NonFiniteCoordinatesAreRejected) {
  Scene scene;
  scene.circle({0.0, 0.0}, std::numeric_limits<double>::infinity());
  EXPECT_THROW(render_svg(scene), DomainError);
}

TEST(RenderSvg, RepeatedRendersAreByteIdentical) {
  const CircleFamily fam = build_family(parse_family(read_file(family_path("unit_circle.dsl"))));
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  Scene scene = family_scene(fam, {curve_of(plus), curve_of(minus)}, 30, "unit <circle> & co");
  scene.polyline(fam.frontal.gamma, Style::Dashed);
  const std::string a = render_svg(scene), b = render_svg(scene);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("unit &lt;circle&gt; &amp; co"), std::string::npos);
  EXPECT_NO_THROW(parse_xml(a));
}

TEST(CurveCsv, RoundTripIsExact) {
  SampledCurve c;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 * i + 1.0 / 3.0;
    c.t.push_back(t);
    c.points.push_back({std::sin(t) * 1e-7, std::exp(t) * 1e5});
  }
  std::stringstream ss;
  write_curve_csv(ss, c);
  const SampledCurve back = read_curve_csv(ss);
  ASSERT_EQ(back.t.size(), c.t.size());
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    EXPECT_EQ(back.t[i], c.t[i]);
    EXPECT_EQ(back.points[i].x, c.points[i].x);
    EXPECT_EQ(back.points[i].y, c.points[i].y);
  }
}

TEST(Cli, ClassifyParabola) {
  const CliResult r = run({"classify", "--family", family_path("parabola.dsl")});
  EXPECT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("variant"), "Unique");
}

TEST(Cli, ClassifyUnitCircle) {
  const CliResult r = run({"classify", "--family", family_path("unit_circle.dsl"), "--grid", "501"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("variant"), "ExactlyTwo");
}

TEST(Cli, EnvelopeBothBranchesToFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "circenv_cli_test";
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "uc.csv").string();
  const CliResult r = run({"envelope", "--family", family_path("unit_circle.dsl"), "--branch", "both", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream plus_in(dir / "uc_plus.csv"), minus_in(dir / "uc_minus.csv");
  ASSERT_TRUE(plus_in && minus_in);
  const SampledCurve plus = read_curve_csv(plus_in), minus = read_curve_csv(minus_in);
  ASSERT_EQ(plus.points.size(), 2001U);
  for (std::size_t i = 0; i < plus.points.size(); ++i) {
    const double t = plus.t[i];
    ASSERT_LT(distance(plus.points[i], {2.0 * std::cos(t), 2.0 * std::sin(t)}), 1e-10);
    ASSERT_LT(norm(minus.points[i]), 1e-10);
  }
  std::filesystem::remove_all(dir);
}

TEST(Cli, BothBranchesCsvNeedsOut) {
  const CliResult r = run({"envelope", "--family", family_path("unit_circle.dsl"), "--branch", "both"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, EvoluteAtInflectionFails) {
  const CliResult r = run({"assoc", "--family", family_path("inflection.dsl"), "--kind", "evolute"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("evolute undefined at inflection"), std::string::npos) << r.err;
}

TEST(Cli, VerifyLineJson) {
  const CliResult r = run({"verify", "--family", family_path("line.dsl"), "--relation", "evolute"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"pass\": true"), std::string::npos) << r.out;
}

TEST(Cli, RenderIsByteIdentical) {
  const std::vector<std::string> args = {"render", "--family", family_path("parabola.dsl"), "--circles", "25",
                                         "--center"};
  const CliResult a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const pt::ptree tree = parse_xml(a.out);
  EXPECT_EQ(count_tag(tree, "circle"), 25);
  EXPECT_EQ(count_tag(tree, "polyline"), 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"envelope"}).code, 2);
  EXPECT_EQ(run({"classify", "--family", "/nonexistent.dsl"}).code, 2);
  EXPECT_EQ(run({"assoc", "--family", family_path("parabola.dsl"), "--kind", "spiral"}).code, 2);
  EXPECT_EQ(run({"verify"}).code, 2);
}
