#include <gtest/gtest.h>

#include "permwalk/embeddings.hpp"

using namespace permwalk;

namespace {

const Letter s_{0, 1}, t_{1, 1};

Word ts_power(long k) { return power(Word{t_, s_}, k); }

template <class V>
SetFunction<V> pairs_through(const V& o, const std::vector<V>& B) {
  SetFunction<V> F;
  for (const auto& y : B)
    if (y != o) {
      std::vector<V> Y{o, y};
      std::sort(Y.begin(), Y.end());
      F.emplace(Y, 1.0);
    }
  return F;
}

Psi constant_psi(const std::vector<TargetElement>& group) {
  Psi p;
  for (const auto& g : group) p.emplace(g, 1.0);
  return p;
}

}  // namespace

// ---------------------------------------------------------------- dihedral

TEST(Dihedral, TargetIsTheDihedralGroupOfTheLine) {
  auto e = dihedral_embedding(3);
  EXPECT_EQ(target_closure(e).size(), 16u);
  EXPECT_NE(e.image(ts_power(4)), e.identity);
  EXPECT_EQ(e.image(ts_power(8)), e.identity);
  EXPECT_EQ(e.certification_depth, 5);
}

TEST(Dihedral, DomainIsEnforced) {
  auto e = dihedral_embedding(3);
  EXPECT_TRUE(e.in_domain(Word{s_}));
  EXPECT_TRUE(e.in_domain(Word{t_}));
  EXPECT_FALSE(e.in_domain(ts_power(4)));
  EXPECT_THROW(e(ts_power(4)), Error);
  EXPECT_NO_THROW(e(Word{s_, t_, s_}));
}

TEST(Dihedral, OmegaImageHasTwoToTheNPlusOneElements) {
  for (int n = 2; n <= 5; ++n) {
    auto e = dihedral_embedding(n);
    auto img = omega_image(e, e.J, e.B);
    EXPECT_EQ(img.size, std::size_t{1} << (n + 1)) << n;
    EXPECT_TRUE(img.injective) << n;
  }
}

TEST(Dihedral, HomomorphismOnSampledPairs) {
  auto e = dihedral_embedding(3);
  auto r = omega_hom_check(e, 1000, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.mult_checked, 1000u);
  EXPECT_GT(r.eq_checked, 100u);
  EXPECT_TRUE(r.counterexamples.empty());
}

TEST(Dihedral, BrokenMultiplicationIsReported) {
  auto e = dihedral_embedding(3);
  e.mul = [](const TargetElement& g, const TargetElement& h) { return detail::perm_mul(h, g); };
  auto r = omega_hom_check(e, 300, 1);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.mult_failures, 0u);
  EXPECT_FALSE(r.counterexamples.empty());
}

// ---------------------------------------------------------------- bubble

TEST(Bubble, HomomorphismOnSampledPairs) {
  std::vector<long> a{4, 16, 32, 64, 128}, b{3, 3, 3, 3, 3};
  auto e = bubble_embedding(a, b, 2, 1);
  auto r = omega_hom_check(e, 1000, 3);
  EXPECT_TRUE(r.pass) << (r.counterexamples.empty() ? "" : r.counterexamples.front());
  EXPECT_EQ(r.mult_checked, 1000u);
  EXPECT_GT(r.eq_checked, 0u);
}

TEST(Bubble, EqualActionOnTheTargetLevelMeansEqualImage) {
  // exhaustive over Omega-bar: the image is the action on X^{k+1}, and distinct deep actions
  // collapse only when they agree there
  std::vector<long> a{4, 16, 32, 64, 128}, b{3, 3, 3, 3, 3};
  auto e = bubble_embedding(a, b, 2, 1);
  auto img = omega_image(e, e.J, e.B);
  EXPECT_GE(img.size, img.images.size());
  EXPECT_GT(img.images.size(), 1u);
}

TEST(Bubble, PreconditionsAreChecked) {
  std::vector<long> a{4, 16, 32, 64, 128}, b{3, 3, 3, 3, 3};
  EXPECT_THROW(bubble_embedding(a, b, 2, 3), Error);   // 4(l+1) = 16 is not < 16
  EXPECT_THROW(bubble_embedding(a, b, 3, 1), Error);   // needs level 6
  EXPECT_THROW(bubble_embedding({2, 8, 16}, {3, 3}, 1, 1), Error);
}

// ---------------------------------------------------------------- NS

TEST(NS, LetterImages) {
  auto e = ns_embedding({2, 4}, 2);
  std::size_t N = e.identity.size() / 3;
  EXPECT_EQ(N, 8u);
  auto a = e.image(Word{{0, 1}});
  for (std::size_t i = N; i < 3 * N; ++i) EXPECT_EQ(a[i], 0);
  auto b = e.image(Word{{1, 1}});
  // b fixes 0^n and y = 0(l_n/2); lamp b at 0^n, lamp a at y
  auto aut = ns_automaton(ns_embedding_sequence({2, 4}, 2));
  auto level = aut.shape.level(2);
  std::size_t zero = 0, y = 0;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level[i] == TreeWord{0, 0}) zero = i;
    if (level[i] == TreeWord{0, 2}) y = i;
  }
  EXPECT_EQ(b[zero], static_cast<std::int64_t>(zero));
  EXPECT_EQ(b[y], static_cast<std::int64_t>(y));
  EXPECT_EQ(b[2 * N + zero], 1);
  EXPECT_EQ(b[N + y], 1);
  int nonzero = 0;
  for (std::size_t i = N; i < 3 * N; ++i) nonzero += b[i] != 0;
  EXPECT_EQ(nonzero, 2);
}

TEST(NS, InverseAndIdentity) {
  auto e = ns_embedding({2, 4, 6, 4}, 2);
  for (const auto& w : {Word{{0, 1}}, Word{{1, 1}, {0, 1}}, Word{{1, -1}, {0, 1}, {1, 1}}}) {
    auto g = e.image(w);
    EXPECT_EQ(e.mul(g, e.inv(g)), e.identity);
    EXPECT_EQ(e.mul(e.inv(g), g), e.identity);
    EXPECT_EQ(e.mul(g, e.identity), g);
  }
}

TEST(NS, HomomorphismOnSampledPairs) {
  for (auto [l, n] : std::vector<std::pair<std::vector<long>, int>>{
           {{2, 4}, 2}, {{2, 4, 6, 4}, 2}, {{4, 4, 4}, 1}, {{2, 2, 2, 2, 2}, 3}}) {
    auto e = ns_embedding(l, n);
    auto r = omega_hom_check(e, 1000, 11);
    EXPECT_TRUE(r.pass) << n << " " << (r.counterexamples.empty() ? "" : r.counterexamples.front());
    EXPECT_EQ(r.mult_checked, 1000u);
    EXPECT_GT(r.eq_checked, 0u);
  }
}

TEST(NS, ReadOffMatchesLetterProducts) {
  // theta of a word equals the product of letter images, computed independently
  auto e = ns_embedding({2, 4, 6, 4}, 2);
  auto dom = e.domain();
  auto rng = stream_rng(5, 0);
  for (int i = 0; i < 200; ++i) {
    auto w = random_omega_word(dom, 1 + i % 15, rng);
    auto prod = e.identity;
    for (auto l : w) prod = e.mul(prod, e.image(Word{l}));
    EXPECT_EQ(prod, e.image(w));
  }
}

// ---------------------------------------------------------------- component pair and Theta

TEST(Theta, DihedralTent) {
  auto e = dihedral_embedding(3);
  auto F = dinfty_tent(3).F;
  LampConfig<std::int64_t> up;
  for (auto x : F.base) up[x] = 1;
  auto cp = component_pair(e, F.weights, up, 2);
  auto r = theta_isomorphism_check(cp);
  EXPECT_TRUE(r.pass) << r.counterexample;
  EXPECT_EQ(r.size_G, r.size_P);
  EXPECT_GT(r.size_G, 16u);
  EXPECT_TRUE(r.boundary_matched);
  EXPECT_TRUE(r.lamps_agree);
  EXPECT_GT(r.boundary_checked, r.edges_checked);
}

TEST(Theta, BubbleTents) {
  {
    std::vector<long> a{2, 18, 36, 72, 144}, b{3, 3, 3, 3, 3};
    auto t = bubble_tent_F(a, b, 8);
    auto e = bubble_embedding(a, b, t.k, 2);
    LampConfig<BubbleVertex> up;
    for (const auto& x : t.F.base) up[x] = 1;
    auto r = theta_isomorphism_check(component_pair(e, t.F.weights, up, 1));
    EXPECT_TRUE(r.pass) << r.counterexample;
    EXPECT_EQ(r.size_G, 3u);  // the beta-orbit
  }
  {
    std::vector<long> a{2, 4, 34, 68, 136, 272}, b{3, 3, 3, 3, 3, 3};
    auto t = bubble_tent_F(a, b, 16);
    auto e = bubble_embedding(a, b, t.k, 4);
    LampConfig<BubbleVertex> up;
    for (const auto& x : t.F.base) up[x] = 1;
    auto r = theta_isomorphism_check(component_pair(e, t.F.weights, up, 1));
    EXPECT_TRUE(r.pass) << r.counterexample;
    EXPECT_EQ(r.size_G, r.size_P);
  }
}

TEST(Theta, NSPairsThroughTheRoot) {
  for (auto [l, n] : std::vector<std::pair<std::vector<long>, int>>{{{2, 4}, 2}, {{2, 4, 4, 4}, 2}, {{4, 4, 4, 4}, 2}, {{2, 2, 2, 2, 2}, 3}}) {
    auto e = ns_embedding(l, n);
    auto o = e.action->root();
    auto F = pairs_through(o, e.B);
    ASSERT_FALSE(F.empty());
    LampConfig<NSVertex> up;
    for (const auto& x : F.begin()->first) up[x] = 1;
    auto r = theta_isomorphism_check(component_pair(e, F, up, 2));
    EXPECT_TRUE(r.pass) << n << " " << r.counterexample;
    EXPECT_EQ(r.size_G, r.size_P);
  }
}

TEST(Theta, WrongLetterImagesAreCaught) {
  auto e = dihedral_embedding(3);
  auto good = e.image;
  e.image = [good](const Word& w) {
    Word v;
    for (auto l : w)
      if (l.gen == 1) v.push_back(l);  // s stabilizes A, so losing it is visible
    return good(v);
  };
  auto F = dinfty_tent(3).F;
  LampConfig<std::int64_t> up;
  for (auto x : F.base) up[x] = 1;
  auto r = theta_isomorphism_check(component_pair(e, F.weights, up, 2));
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.counterexample.empty());
}

// ---------------------------------------------------------------- Phi

TEST(Phi, DihedralClosedFormMatchesMaterialization) {
  auto e = dihedral_embedding(3);
  auto F = dinfty_tent(3).F;
  auto psi = constant_psi(target_closure(e));
  for (long M : {1L, 2L, 3L}) {
    auto r = assemble_phi(e, F, psi, M);
    ASSERT_TRUE(r.materialized);
    EXPECT_NEAR(r.Qpsi, 0.0, 1e-15);
    EXPECT_NEAR(r.materialized_twice, r.twice_quotient, 1e-12) << M;
    EXPECT_TRUE(r.bound_holds);
    EXPECT_LE(r.component_twice, r.twice_quotient + 1e-12);
    ASSERT_TRUE(r.transfer_checked);
    EXPECT_NEAR(r.transferred_twice, r.component_twice, 1e-12);
    EXPECT_TRUE(r.h0_identity);
    ASSERT_TRUE(r.volume_checked);
    EXPECT_TRUE(r.volume_holds) << r.component << " " << r.volume_bound;
  }
}

TEST(Phi, NSBoxIndicator) {
  auto e = ns_embedding({2, 4, 4}, 1);
  auto group = target_closure(e);
  std::size_t N = e.identity.size() / 3;
  const long r = 1, ord = 4;
  auto centered = [&](long c) { return c > ord / 2 ? c - ord : c; };
  Psi psi;
  for (const auto& g : group) {
    bool in = true;
    for (std::size_t i = N; i < 3 * N; ++i) in = in && std::labs(centered(g[i])) <= r;
    if (in) psi.emplace(g, 1.0);
  }
  ASSERT_LT(psi.size(), group.size());
  AdmissibleFunction<NSVertex> F;
  auto o = e.action->root();
  F.base = {o};
  F.J = {o};
  F.B = e.B;
  F.weights.emplace(std::vector<NSVertex>{o}, 1.0);
  auto rep = assemble_phi(e, F, psi, 2);
  ASSERT_TRUE(rep.materialized);
  EXPECT_GT(rep.Qpsi, 0.0);
  EXPECT_NEAR(rep.materialized_twice, rep.twice_quotient, 1e-12);
  EXPECT_TRUE(rep.bound_holds);
  ASSERT_TRUE(rep.transfer_checked);
  EXPECT_NEAR(rep.transferred_twice, rep.component_twice, 1e-12);
  ASSERT_TRUE(rep.volume_checked);
  EXPECT_TRUE(rep.volume_holds);
}

TEST(Phi, BubbleTentWithBetaOrbit) {
  std::vector<long> a{2, 18, 36, 72, 144}, b{3, 3, 3, 3, 3};
  auto t = bubble_tent_F(a, b, 8);
  auto e = bubble_embedding(a, b, t.k, 2);
  Psi psi;
  auto beta = e.image(Word{{1, 1}});
  for (auto g = e.identity;;) {
    psi.emplace(g, 1.0);
    g = e.mul(beta, g);
    if (g == e.identity) break;
  }
  EXPECT_EQ(psi.size(), 3u);
  auto rep = assemble_phi(e, t.F, psi, 1);
  ASSERT_TRUE(rep.materialized);
  EXPECT_NEAR(rep.materialized_twice, rep.twice_quotient, 1e-12);
  EXPECT_TRUE(rep.bound_holds);
  if (rep.volume_checked) {
    EXPECT_TRUE(rep.volume_holds);
  }
}

TEST(Phi, ClosedFormOnlyBeyondBudget) {
  auto e = dihedral_embedding(3);
  auto F = dinfty_tent(3).F;
  auto psi = constant_psi(target_closure(e));
  auto r = assemble_phi(e, F, psi, 2, 10);
  EXPECT_FALSE(r.materialized);
  EXPECT_TRUE(r.bound_holds);
}

TEST(Phi, BasePointOutsideJIsRejected) {
  auto e = dihedral_embedding(3);
  auto F = dinfty_tent(3).F;
  F.J = {1};
  EXPECT_THROW(assemble_phi(e, F, constant_psi(target_closure(e)), 1), Error);
}

// ---------------------------------------------------------------- worked example

TEST(WorkedExample, Dinfty) {
  for (int n = 2; n <= 9; ++n) {
    auto d = dinfty_worked_example(n);
    EXPECT_NEAR(d.Q, d.Q_closed, 1e-12);
    EXPECT_GE(d.scaled, 1.0 / 3);
    EXPECT_LE(d.scaled, 10.0 / 3);
    EXPECT_TRUE(std::isfinite(d.log_v));
  }
  auto d2 = dinfty_worked_example(2);
  EXPECT_EQ(d2.translates, 2u);
  EXPECT_NEAR(d2.Q, 0.4, 1e-12);
}
