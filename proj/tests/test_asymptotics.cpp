#include <gtest/gtest.h>

#include "permwalk/asymptotics.hpp"
#include "permwalk/embeddings.hpp"

using namespace permwalk;

namespace {

EnvelopeSpec spec(EnvelopeFamily f, double p = 0) {
  EnvelopeSpec s;
  s.family = f;
  s.param = p;
  return s;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

}  // namespace

TEST(ClosedForms, NSExample) {
  auto c = ns_closed_forms({2, 4, 4}, 3);
  EXPECT_EQ(c.V, 32u);
  EXPECT_EQ(c.diam, 10u);
  EXPECT_EQ(c.R, boost::rational<long long>(5));
}

TEST(ClosedForms, BaseCases) {
  for (long l1 : {2L, 4L, 6L, 16L}) {
    auto c = ns_closed_forms({l1}, 1);
    EXPECT_EQ(c.V, static_cast<unsigned long long>(l1));
    EXPECT_EQ(c.diam, static_cast<unsigned long long>(l1 / 2));
    EXPECT_EQ(c.R, boost::rational<long long>(l1, 4));
  }
}

TEST(ClosedForms, SumsAgreeWithRecursions) {
  std::vector<long> l{2, 4, 8, 16, 6, 4};
  for (int n = 1; n <= 6; ++n) {
    auto c = ns_closed_forms(l, n);
    boost::rational<long long> R(0);
    unsigned long long diam = 0;
    for (int j = 1; j <= n; ++j) {
      // 2^{n-j-2} l_j and 2^{n-j-1} l_j with negative powers kept exact
      int e = n - j - 2;
      R += e >= 0 ? boost::rational<long long>(l[j - 1] << e) : boost::rational<long long>(l[j - 1], 1LL << -e);
      diam += n - j - 1 >= 0 ? static_cast<unsigned long long>(l[j - 1]) << (n - j - 1)
                             : static_cast<unsigned long long>(l[j - 1] / 2);
    }
    EXPECT_EQ(c.R, R) << n;
    EXPECT_EQ(c.diam, diam) << n;
  }
}

TEST(ClosedForms, MatchBreadthFirstSearch) {
  for (auto l : std::vector<std::vector<long>>{{2, 4, 4}, {4, 4, 4}, {2, 6}}) {
    for (int n = 1; n <= static_cast<int>(l.size()); ++n) {
      auto g = build_ns(l, n);
      auto c = ns_closed_forms(l, n);
      EXPECT_EQ(g.size(), c.V);
      std::uint32_t far = 0;
      for (auto d : bfs_distances(g, g.root())) far = std::max<std::uint32_t>(far, d);
      // the copy of S_n is anchored at 0^n; its diameter is attained from that corner
      EXPECT_EQ(far, c.diam) << n;
    }
  }
}

TEST(ClosedForms, Bubble) {
  std::vector<long> a{2, 5, 9}, b{3, 3};
  EXPECT_EQ(bubble_k_of_r(a, 3), 3);
  for (int n = 1; n <= 3; ++n) EXPECT_EQ(bubble_closed_forms(a, b, n).V, static_cast<long>(build_bubble(a, b, n).size()));
  EXPECT_EQ(bubble_closed_forms(a, b, 3).s, 16);
  EXPECT_THROW(bubble_closed_forms(a, b, 4), Error);
}

TEST(Envelopes, BubbleExampleExponents) {
  auto s = spec(EnvelopeFamily::exa_bubb1, 1);
  auto p = *neglogphi_exponents(s);
  EXPECT_DOUBLE_EQ(p.first.power, 0.5);
  EXPECT_DOUBLE_EQ(p.first.log_power, 0.5);
  for (double t : {3.0, 100.0, 1e6})
    EXPECT_NEAR(predicted(s, Quantity::neglogphi, t).central(), std::sqrt(t * std::log(t)), 1e-9 * t);
  // the exponent sweeps (1/3, 1)
  for (double beta : {0.01, 0.5, 1.0, 4.0, 100.0}) {
    double e = neglogphi_exponents(spec(EnvelopeFamily::exa_bubb1, beta))->first.power;
    EXPECT_GT(e, 1.0 / 3);
    EXPECT_LT(e, 1.0);
  }
}

TEST(Envelopes, Exa01Exponents) {
  auto p = *neglogphi_exponents(spec(EnvelopeFamily::exa_01, 2));
  EXPECT_DOUBLE_EQ(p.first.power, 0.5);
  EXPECT_DOUBLE_EQ(p.second.power, 0.6);
  for (double k : {1.5, 2.0, 3.0})
    for (double t : grid(16, 1e15, 200)) {
      auto e = predicted(spec(EnvelopeFamily::exa_01, k), Quantity::neglogphi, t);
      EXPECT_LE(e.lower, e.upper * (1 + 1e-12)) << k << " " << t;
    }
}

TEST(Envelopes, OscillationExponentRelation) {
  for (double g = 0.34; g < 1; g += 0.01) EXPECT_LT(g, (g + 1) / (3 - g));
}

TEST(Envelopes, NSGammaLogTwoStructure) {
  for (double gamma : {1.0, 1.5, 3.0}) {
    auto s = spec(EnvelopeFamily::ns_gamma, gamma);
    for (double v : {1e3, 1e8, 1e30}) {
      double l1 = predicted(s, Quantity::lambda1, v).central();
      double expect = std::pow((1 + gamma) * std::log2(std::log(v)), gamma / (1 + gamma));
      EXPECT_NEAR(-std::log2(l1), expect, 1e-12);
      EXPECT_NEAR(predicted(s, Quantity::lambda2, v).central(), l1 * l1, 1e-15);
    }
    double t = 1e9;
    EXPECT_NEAR(std::log2(t / predicted(s, Quantity::neglogphi, t).central()),
                2 * std::pow((1 + gamma) * std::log2(t), gamma / (1 + gamma)), 1e-9);
  }
}

TEST(Envelopes, NSFirstRegime) {
  EnvelopeSpec s = spec(EnvelopeFamily::ns_thm);
  s.l = {2, 4, 16, 64};
  double V = 2 * 4, lp = 4;  // n = 3
  double t = V * lp * lp * lp * std::log(lp);
  auto e = predicted(s, Quantity::neglogphi, t);
  EXPECT_EQ(e.piece, "n=3 piece 1");
  EXPECT_NEAR(e.central(), std::pow(V, 2.0 / 3) * std::cbrt(t) * std::pow(std::log(t / V), 2.0 / 3), 1e-9);
}

TEST(Envelopes, NSPiecesAgreeAtBreakPoints) {
  EnvelopeSpec s = spec(EnvelopeFamily::ns_thm);
  s.l = {2, 4, 16, 64};
  double V = 1;
  for (std::size_t n = 1; n <= s.l.size(); ++n) {
    double ln = static_cast<double>(s.l[n - 1]);
    // lambda2 at log v = V_{n-1} l_n log l_n from both sides
    double lv = V * ln * std::log(ln);
    if (n == 1) {
      V *= ln;
      continue;
    }
    double left = predicted_profile(s, Quantity::lambda2, lv * (1 - 1e-12)).central();
    double right = predicted_profile(s, Quantity::lambda2, lv).central();
    EXPECT_NEAR(left / right, 1.0, 1e-6) << n;
    // -log Phi at t = V_{n-1} l_n^3 log l_n
    double t = V * ln * ln * ln * std::log(ln);
    {
      double a = predicted(s, Quantity::neglogphi, t * (1 - 1e-12)).central();
      double b = predicted(s, Quantity::neglogphi, t).central();
      EXPECT_GT(a / b, 0.25);
      EXPECT_LT(a / b, 4.0);
    }
    V *= ln;
  }
  EXPECT_THROW(predicted(s, Quantity::lambda2, 3.5), Error);  // below l_1 log l_1
}

TEST(Envelopes, NSThmPreconditions) {
  EnvelopeSpec s = spec(EnvelopeFamily::ns_thm);
  s.l = {2, 4, 6};
  EXPECT_THROW(predicted(s, Quantity::lambda2, 1e5), Error);
  s.l = {4, 4};
  EXPECT_THROW(predicted(s, Quantity::lambda2, 1e5), Error);
}

TEST(Envelopes, PositiveAndMonotone) {
  std::vector<EnvelopeSpec> specs{spec(EnvelopeFamily::exa_bubb1, 0.7), spec(EnvelopeFamily::exa_bubb2, 1.5),
                                  spec(EnvelopeFamily::ns_gamma, 2), spec(EnvelopeFamily::exa_01, 3),
                                  spec(EnvelopeFamily::exa_O2), spec(EnvelopeFamily::exa_O3),
                                  spec(EnvelopeFamily::exa_O4, 2)};
  auto pw = spec(EnvelopeFamily::exa_bubb2, 2);
  pw.form = Bubb2Form::power_kappa;
  specs.push_back(pw);
  for (const auto& s : specs) {
    double prev = 0;
    // t / 2^{2[(1+g) log2 t]^{g/(1+g)}} only turns upward near t = 3e6 for g = 2
    double t0 = s.family == EnvelopeFamily::ns_gamma ? 1e7 : 1e4;
    for (double t : grid(t0, 1e40, 120)) {
      auto e = predicted(s, Quantity::neglogphi, t);
      EXPECT_GT(e.lower, 0);
      EXPECT_GE(e.lower, prev) << to_string(s.family) << " t=" << t;
      prev = e.lower;
    }
  }
  for (const auto& s : {spec(EnvelopeFamily::exa_bubb1, 0.7), spec(EnvelopeFamily::ns_gamma, 2)}) {
    double prev = 1e300;
    for (double v : grid(1e6, 1e200, 120)) {
      double l2 = predicted(s, Quantity::lambda2, v).central();
      EXPECT_GT(l2, 0);
      EXPECT_LE(l2, prev * (1 + 1e-12)) << to_string(s.family);
      prev = l2;
    }
  }
}

TEST(Envelopes, BubbleFamily) {
  EnvelopeSpec s = spec(EnvelopeFamily::bubble_thm);
  s.a = {2, 4, 8, 16, 32, 64};
  s.b = {3, 3, 3, 3, 3, 3};
  double prev1 = 1, prev2 = 1;
  for (double v : {1e40, 1e80, 1e160, 1e300}) {
    auto l1 = predicted(s, Quantity::lambda1, v);
    auto l2 = predicted(s, Quantity::lambda2, v);
    EXPECT_TRUE(std::isnan(l1.upper));
    EXPECT_TRUE(std::isnan(l2.lower));
    EXPECT_LE(l1.lower, prev1);
    EXPECT_LE(l2.upper, prev2);
    prev1 = l1.lower;
    prev2 = l2.upper;
  }
  EXPECT_THROW(predicted(s, Quantity::neglogphi, 1e5), Error);
}

TEST(Envelopes, ArgumentDomain) {
  EXPECT_THROW(predicted(spec(EnvelopeFamily::exa_01, 2), Quantity::neglogphi, 2.5), Error);
  EXPECT_THROW(predicted(spec(EnvelopeFamily::exa_01, 2), Quantity::lambda2, 100), Error);
  EXPECT_THROW(predicted(spec(EnvelopeFamily::exa_01, 1), Quantity::neglogphi, 100), Error);
  EXPECT_THROW(parse_envelope_family("exa-99"), Error);
  EXPECT_EQ(parse_envelope_family("exa-O3"), EnvelopeFamily::exa_O3);
}

TEST(Compare, IdentityAndScaling) {
  auto s = spec(EnvelopeFamily::exa_O2);
  std::vector<std::pair<double, double>> same, twice;
  for (double t : grid(10, 1e9, 12)) {
    double p = predicted(s, Quantity::neglogphi, t).central();
    same.push_back({t, p});
    twice.push_back({t, 2 * p});
  }
  auto r1 = compare(same, s, Quantity::neglogphi);
  for (const auto& p : r1.points) EXPECT_NEAR(p.ratio, 1.0, 1e-12);
  EXPECT_TRUE(r1.stable);
  auto r2 = compare(twice, s, Quantity::neglogphi);
  for (const auto& p : r2.points) EXPECT_NEAR(p.ratio, 2.0, 1e-12);
  EXPECT_EQ(r2.trend, Trend::constant);
  EXPECT_TRUE(r2.stable);
  EXPECT_FALSE(r2.drift);
  EXPECT_THROW(compare({}, s, Quantity::neglogphi), Error);
}

TEST(Compare, DinftyQuotients) {
  std::vector<std::pair<double, double>> m;
  for (int n = 4; n <= 10; ++n) m.push_back({static_cast<double>(n), dinfty_tent(n).quotient});
  auto r = compare(m, spec(EnvelopeFamily::dinfty), Quantity::quotient);
  EXPECT_GE(r.min_ratio, 1.0 / 3);
  EXPECT_LE(r.max_ratio, 10.0 / 3);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.trend, Trend::increasing);  // 6/((N+1)(2N+1)) approaches 3/N^2 from below
}

TEST(Compare, DriftIsFlagged) {
  auto s = spec(EnvelopeFamily::exa_O2);
  std::vector<std::pair<double, double>> m;
  int i = 0;
  for (double t : grid(10, 1e9, 10)) m.push_back({t, predicted(s, Quantity::neglogphi, t).central() * (i++ % 2 ? 10 : 1)});
  auto r = compare(m, s, Quantity::neglogphi);
  EXPECT_FALSE(r.stable);
  EXPECT_TRUE(r.drift);
  EXPECT_EQ(r.trend, Trend::mixed);
}
