#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "circenv/envelope.hpp"
#include "circenv/verify.hpp"

using namespace circenv;

namespace {

CircleFamily family(const std::string& text) { return build_family(parse_family(text)); }

const char* kParabola =
    "curve x=-4*t^3; y=3*t^2+1/2\n"
    "nu x=1/sqrt(1+4*t^2); y=2*t/sqrt(1+4*t^2)\n"
    "radius (1+4*t^2)^(3/2)/2\n"
    "domain (-1,1)\n";
const char* kCircle = "curve x=cos(t); y=sin(t)\nradius 1\ndomain (0,2*pi)\n";
const char* kLine = "curve x=0; y=t\nnu x=-1; y=0\nradius t\ndomain (0.1,5)\n";
const char* kPedalDouble =
    "curve x=t^3/6; y=t^6/12\n"
    "nu x=-t^3/sqrt(1+t^6); y=1/sqrt(1+t^6)\n"
    "radius t^3*sqrt(4+t^6)/12\n"
    "domain (0.05,1.5)\n";

double max_gap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, distance(a[i], b[i]));
  return m;
}

}  // namespace

TEST(CreativeCheck, ParabolaHasUnitCosine) {
  const CircleFamily fam = family(kParabola);
  const CreativeWitness w = creative_check(fam);
  EXPECT_TRUE(w.creative);
  EXPECT_TRUE(w.failure_samples.empty());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (!w.defined[i]) continue;
    EXPECT_NEAR(w.cos_theta[i], 1.0, 1e-12) << "t=" << fam.frontal.t[i];
  }
}

TEST(CreativeCheck, UnitCircleHasZeroCosine) {
  const CircleFamily fam = family(kCircle);
  const CreativeWitness w = creative_check(fam);
  EXPECT_TRUE(w.creative);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    EXPECT_NEAR(w.cos_theta[i], 0.0, 1e-15);
    EXPECT_NEAR(w.sin_theta[i], 1.0, 1e-15);
  }
}

TEST(CreativeCheck, PedalOfDoubleClosedForm) {
  const CircleFamily fam = family(kPedalDouble);
  const CreativeWitness w = creative_check(fam);
  ASSERT_TRUE(w.creative);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = fam.frontal.t[i], t6 = std::pow(t, 6);
    const double expected = -(2.0 + t6) / (std::sqrt(1.0 + t6) * std::sqrt(4.0 + t6));
    ASSERT_NEAR(w.cos_theta[i], expected, 1e-10) << "t=" << t;
    ASSERT_NEAR(w.cos_theta[i] * w.cos_theta[i] + w.sin_theta[i] * w.sin_theta[i], 1.0, 1e-12);
    ASSERT_GE(w.sin_theta[i], 0.0);
  }
}

TEST(CreativeCheck, TooFastRadiusIsNotCreative) {
  const CircleFamily fam = family("curve x=0; y=t\nnu x=-1; y=0\nradius 2*t\ndomain (0.1,5)\nsamples 101\n");
  const CreativeWitness w = creative_check(fam);
  EXPECT_FALSE(w.creative);
  EXPECT_EQ(w.failure_samples.size(), 101U);
  EXPECT_EQ(classify_count(fam, w).variant, EnvelopeCount::NotCreative);
  EXPECT_THROW(creators(fam, w), PreconditionError);
}

TEST(CreativeCheck, ClampsRoundoffAtUnitRatio) {
  // lambda' = beta (1 + 5e-10): within the clamp tolerance, snapped to cos = 1.
  const CircleFamily fam =
      family("curve x=0; y=t\nnu x=-1; y=0\nradius 1-1.0000000005*t\ndomain (0,0.5)\nsamples 101\n");
  const CreativeWitness w = creative_check(fam);
  EXPECT_TRUE(w.creative);
  for (double c : w.cos_theta) EXPECT_EQ(c, 1.0);
  const CircleFamily over = family("curve x=0; y=t\nnu x=-1; y=0\nradius 1-1.00001*t\ndomain (0,0.5)\nsamples 101\n");
  EXPECT_FALSE(creative_check(over).creative);
}

TEST(Creators, Examples) {
  {
    const CircleFamily fam = family(kParabola);
    const auto [plus, minus] = creators(fam, creative_check(fam));
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const double t = fam.frontal.t[i], s = std::sqrt(1.0 + 4.0 * t * t);
      const Vec2 expected{2.0 * t / s, -1.0 / s};
      ASSERT_LT(distance(plus.nu_tilde[i], expected), 1e-12);
      ASSERT_LT(distance(minus.nu_tilde[i], expected), 1e-12);
    }
  }
  {
    const CircleFamily fam = family(kCircle);
    const auto [plus, minus] = creators(fam, creative_check(fam));
    for (std::size_t i = 0; i < fam.size(); ++i) {
      ASSERT_LT(distance(plus.nu_tilde[i], fam.frontal.nu[i]), 1e-15);
      ASSERT_LT(distance(minus.nu_tilde[i], -fam.frontal.nu[i]), 1e-15);
    }
  }
  {
    const CircleFamily fam = family(kLine);
    const auto [plus, minus] = creators(fam, creative_check(fam));
    for (std::size_t i = 0; i < fam.size(); ++i) {
      ASSERT_LT(distance(plus.nu_tilde[i], {0.0, -1.0}), 1e-15);
      ASSERT_LT(distance(minus.nu_tilde[i], {0.0, -1.0}), 1e-15);
    }
  }
}

TEST(BuildEnvelope, ParabolaAndItsCurvature) {
  const CircleFamily fam = family(kParabola);
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = fam.frontal.t[i];
    ASSERT_LT(distance(plus.f[i], {t, t * t}), 1e-9) << "t=" << t;
    ASSERT_NEAR(plus.l_f[i], 2.0 / (1.0 + 4.0 * t * t), 1e-9) << "t=" << t;
    ASSERT_NEAR(plus.beta_f[i], std::sqrt(1.0 + 4.0 * t * t), 1e-9) << "t=" << t;
  }
  EXPECT_LT(max_gap(plus.f, minus.f), 1e-12);
}

TEST(BuildEnvelope, UnitCircleOriginAndDoubleCircle) {
  const CircleFamily fam = family(kCircle);
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = fam.frontal.t[i];
    ASSERT_LT(distance(plus.f[i], {2.0 * std::cos(t), 2.0 * std::sin(t)}), 1e-10);
    ASSERT_LT(norm(minus.f[i]), 1e-10);
  }
}

TEST(BuildEnvelope, PedalOfDoubleMinusBranch) {
  const CircleFamily fam = family(kPedalDouble);
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double t = fam.frontal.t[i], t6 = std::pow(t, 6);
    ASSERT_LT(distance(minus.f[i], {t * t * t * t6 / (6.0 * (1.0 + t6)), -t6 / (6.0 * (1.0 + t6))}), 1e-9);
    ASSERT_LT(norm(plus.f[i]), 1e-9);
  }
}

TEST(BuildEnvelope, TangencyAndFrameConsistency) {
  for (const char* text : {kParabola, kCircle, kLine, kPedalDouble}) {
    const CircleFamily fam = family(text);
    const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
    for (const EnvelopeBranch* br : {&plus, &minus}) {
      for (std::size_t i = 0; i < fam.size(); ++i) {
        const Vec2 r = br->f[i] - fam.frontal.gamma[i];
        const double lam = fam.lambda[i];
        ASSERT_LT(std::abs(dot(r, r) - lam * lam), 1e-9 * (1.0 + lam * lam));
        ASSERT_NEAR(norm(br->nu_tilde[i]), 1.0, 1e-12);
      }
      const VerificationReport def = verify_envelope_def(fam, curve_of(*br));
      EXPECT_TRUE(def.pass) << text << def.max_residual << " " << def.detail;
      const VerificationReport frame = verify_frontal_structure(fam, *br);
      EXPECT_TRUE(frame.pass) << text << frame.max_residual << " " << frame.detail;
    }
  }
}

TEST(ClassifyCount, Examples) {
  EXPECT_EQ(classify_count(family(kParabola)).variant, EnvelopeCount::Unique);
  EXPECT_EQ(classify_count(family(kLine)).variant, EnvelopeCount::Unique);
  const EnvelopeClassification two = classify_count(family(kCircle));
  EXPECT_EQ(two.variant, EnvelopeCount::ExactlyTwo);
  ASSERT_TRUE(two.witness_t0.has_value());
  const EnvelopeClassification many =
      classify_count(family("curve x=0; y=0\nnu x=1; y=0\nradius 1\ndomain (0,1)\nsamples 101\n"));
  EXPECT_EQ(many.variant, EnvelopeCount::UncountablyMany);
  EXPECT_EQ(many.density_beta_nonzero, 0.0);
}

TEST(ClassifyCount, InvariantUnderReversedParameter) {
  const CircleFamily reversed = family(
      "curve x=4*t^3; y=3*t^2+1/2\n"
      "nu x=1/sqrt(1+4*t^2); y=-2*t/sqrt(1+4*t^2)\n"
      "radius (1+4*t^2)^(3/2)/2\n"
      "domain (-1,1)\n");
  EXPECT_EQ(classify_count(reversed).variant, EnvelopeCount::Unique);
  EXPECT_EQ(classify_count(family("curve x=cos(t); y=-sin(t)\nradius 1\ndomain (-2*pi,0)\n")).variant,
            EnvelopeCount::ExactlyTwo);
  EXPECT_EQ(classify_count(family("curve x=0; y=-t\nnu x=1; y=0\nradius -t\ndomain (-5,-0.1)\n")).variant,
            EnvelopeCount::Unique);
}

TEST(BranchCsv, Columns) {
  const CircleFamily fam = family("curve x=cos(t); y=sin(t)\nradius 1\ndomain (0,0.2)\nsamples 5\n");
  const auto [plus, minus] = build_envelopes(fam, creative_check(fam));
  std::ostringstream os;
  write_branch_csv(os, plus);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,fx,fy,nutx,nuty,l_f,beta_f");
}
