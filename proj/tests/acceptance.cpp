// One pass/fail line per acceptance criterion.  Exit status is the number of failures.

#include <boost/rational.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "permwalk/asymptotics.hpp"
#include "permwalk/embeddings.hpp"
#include "permwalk/families.hpp"
#include "permwalk/resistance.hpp"
#include "permwalk/spectral.hpp"
#include "permwalk/suite.hpp"
#include "permwalk/tree.hpp"
#include "permwalk/words.hpp"
#include "permwalk/wreath.hpp"

using namespace permwalk;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later ones only flip the flag.
struct Tally {
  bool pass = true;
  std::string first;
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) first = what;
    pass = false;
  }
};

int failures = 0;

void criterion(int id, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
  }
  failures += !o.pass;
  std::printf("criterion %2d: %s  [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
}

std::vector<std::uint32_t> iota_n(std::uint32_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

std::uint32_t graph_diameter(const FiniteSchreierGraph& g) {
  int d = 0;
  for (std::uint32_t v = 0; v < g.size(); ++v)
    for (int x : bfs_distances(g, v)) d = std::max(d, x);
  return static_cast<std::uint32_t>(d);
}

// ------------------------------------------------------------------ 1

Outcome graph_closed_forms() {
  Tally t;
  int cases = 0;
  for (const auto& l : std::vector<std::vector<long>>{{2, 4, 4}, {2, 4, 8, 16}, {4, 4, 4, 4}})
    for (int n = 1; n <= std::min<int>(4, static_cast<int>(l.size())); ++n) {
      auto g = build_ns(l, n);
      long V = 1, twice_diam = 0;
      for (int m = 1; m <= n; ++m) {
        V *= l[m - 1];
        twice_diam += (1L << (n - m)) * l[m - 1];  // 2 * 2^{n-m-1} l_m
      }
      ++cases;
      t.check(static_cast<long>(g.size()) == V, "|S_n| mismatch");
      t.check(2L * graph_diameter(g) == twice_diam,
              "diameter " + std::to_string(graph_diameter(g)) + " vs " + std::to_string(twice_diam / 2.0));
    }
  struct BubbleCase {
    std::vector<long> a, b;
    int k;
  };
  std::vector<BubbleCase> bub{{{2, 5, 9}, {3, 3}, 3},       {{1, 1, 1}, {2, 2}, 3},     {{2, 4, 8, 16}, {3, 4, 2}, 4},
                              {{3}, {}, 1},                 {{2, 2, 2, 2}, {3, 3, 3}, 4}, {{1, 3, 3}, {5, 2}, 3}};
  for (const auto& c : bub) {
    ++cases;
    // counting recursion against the materialized graph
    long rec = bubble_vertex_count(c.a, c.b, c.k);
    t.check(static_cast<long>(build_bubble(c.a, c.b, c.k).size()) == rec, "bubble count mismatch");
  }
  return {t.pass, std::to_string(cases) + " cases " + t.first};
}

// ------------------------------------------------------------------ 2

FiniteKernel wreath_kernel_d8() {
  auto g = build_dihedral_line(4);
  PermHost host(g, {2});
  const Letter s{0, 1}, t{1, 1};
  auto q = make_measure(host, MeasureKind::sow, {{1, 1.0}}, {{s, 0.5}, {t, 0.5}});
  std::map<WreathElement<PermHost>, std::uint32_t> idx;
  std::vector<WreathElement<PermHost>> elems{wreath_identity(host)};
  idx[elems[0]] = 0;
  FiniteKernel K;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    std::vector<std::pair<std::uint32_t, double>> row;
    for (const auto& [x, p] : q.support) {
      auto y = wreath_mul(host, elems[i], x);
      auto [it, fresh] = idx.emplace(y, static_cast<std::uint32_t>(elems.size()));
      if (fresh) elems.push_back(y);
      row.emplace_back(it->second, p);
    }
    K.rows.push_back(std::move(row));
  }
  K.validate();
  return K;
}

Outcome cheeger_sandwich() {
  Tally t;
  int tables = 0;
  auto check = [&](const FiniteKernel& K, std::size_t vmax, const std::string& name) {
    auto tab = profile_exact(K, vmax, 50'000'000, 4);
    auto c = cheeger_check(tab, tab, 1e-10);
    ++tables;
    t.check(c.pass, name + ": " + c.message);
  };
  for (int d = 1; d <= 4; ++d) check(hypercube_kernel(d), std::size_t{1} << d, "Z2^" + std::to_string(d));
  for (std::uint32_t n = 3; n <= 12; ++n) check(cycle_kernel(n), n, "C" + std::to_string(n));
  auto W = wreath_kernel_d8();
  t.check(W.size() == 128, "wreath has " + std::to_string(W.size()) + " states");
  check(W, 6, "Z2 wr D8");
  return {t.pass, std::to_string(tables) + " tables " + t.first};
}

// ------------------------------------------------------------------ 3

Outcome harper() {
  Tally t;
  using Q = boost::rational<long>;
  int checked = 0;
  for (int d = 1; d <= 4; ++d) {
    const int N = 1 << d;
    // exhaustive minimum edge boundary per size, integer counts
    std::vector<long> best(N + 1, std::numeric_limits<long>::max());
    for (std::uint32_t mask = 1; mask < (1u << N); ++mask) {
      long edges = 0;
      for (int x = 0; x < N; ++x)
        if (mask >> x & 1)
          for (int i = 0; i < d; ++i) edges += !(mask >> (x ^ (1 << i)) & 1);
      int v = __builtin_popcount(mask);
      best[v] = std::min(best[v], edges);
    }
    auto tab = profile_exact(hypercube_kernel(d), N, 50'000'000, 4, false);
    for (int j = 0; j <= d; ++j) {
      long v = 1L << j;
      Q exhaustive(best[v], d * v);
      Q harper = Q(1) - Q(j, d);
      t.check(exhaustive == harper, "integer oracle at d=" + std::to_string(d) + " v=" + std::to_string(v));
      // the library value, read back as a rational with denominator d v
      double scaled = tab.at1(v) * static_cast<double>(d * v);
      long num = std::lround(scaled);
      t.check(std::abs(scaled - static_cast<double>(num)) < 1e-9 && Q(num, d * v) == harper,
              "library Lambda_1 at d=" + std::to_string(d) + " v=" + std::to_string(v));
      ++checked;
    }
  }
  LazyKernel<LatticePoint> P = lattice_moves;
  int boxes = 0;
  for (int d = 1; d <= 3; ++d) {
    std::vector<long> sides(d, 1);
    for (;;) {
      std::vector<LatticePoint> box{{}};
      for (int i = 0; i < d; ++i) {
        std::vector<LatticePoint> next;
        for (const auto& p : box)
          for (long j = 0; j < sides[i]; ++j) {
            auto q = p;
            q.push_back(j);
            next.push_back(std::move(q));
          }
        box.swap(next);
      }
      double b = boundary_measure(P, box), vol = static_cast<double>(box.size());
      t.check(2 * b >= std::pow(vol, (d - 1.0) / d) - 1e-12, "lattice box");
      ++boxes;
      int i = 0;
      while (i < d && sides[i] == 6) sides[i++] = 1;
      if (i == d) break;
      ++sides[i];
    }
  }
  return {t.pass, std::to_string(checked) + " Harper points, " + std::to_string(boxes) + " boxes " + t.first};
}

// ------------------------------------------------------------------ 4

std::vector<double> harmonic(const FiniteSchreierGraph& g, const LetterLaw& mu, const std::vector<std::uint32_t>& J,
                             const std::vector<std::uint32_t>& B) {
  return effective_resistance(resistance_problem(g, mu, J, complement(g.size(), B))).potential.h;
}

Outcome fh_lemma() {
  Tally t;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u;
  int brute = 0;
  std::vector<FiniteSchreierGraph> graphs{build_dihedral_line(16), build_ns({2, 4}, 2), build_bubble({2, 3}, {3}, 2)};
  for (const auto& g : graphs) {
    auto mu = uniform_letters(g.generators());
    for (std::uint32_t m = 0; m <= 14; ++m) {
      if (m > g.size()) break;
      std::vector<double> h(g.size(), 0.0);
      auto order = iota_n(g.size());
      std::shuffle(order.begin(), order.end(), rng);
      for (std::uint32_t i = 0; i < g.size(); ++i) h[order[i]] = i < m ? 0.01 + 0.98 * u(rng) : double(rng() % 2);
      double b = fh_bruteforce(g, h, mu);
      double c = fh_rayleigh_closed(g, h, mu).quotient;
      t.check(std::abs(b - c) <= 1e-10, "closed " + std::to_string(c) + " vs brute " + std::to_string(b));
      ++brute;
    }
  }
  int harmonic_cases = 0;
  auto bound = [&](const FiniteSchreierGraph& g, const std::vector<std::uint32_t>& J,
                   const std::vector<std::uint32_t>& B, const std::string& name) {
    if (B.size() == g.size()) return;
    auto mu = uniform_letters(g.generators());
    auto r = fh_rayleigh_closed(g, harmonic(g, mu, J, B), mu);
    t.check(r.bound_holds, name + ": quotient " + std::to_string(r.quotient) + " > " + std::to_string(r.bound));
    ++harmonic_cases;
  };
  for (std::uint32_t n = 4; n <= 64; n += 2) {
    auto d = build_dihedral_line(n);
    for (std::uint32_t b : {n / 4, n / 2, n - 1})
      if (b >= 2) bound(d, {0}, iota_n(b), "line " + std::to_string(n));
  }
  for (int n = 1; n <= 3; ++n) {
    NSAction x({2, 4, 4}, n);
    auto g = build_ns({2, 4, 4}, n);
    auto [near, far] = ns::halves(NSAction({2, 4, 4}), n);
    std::vector<std::uint32_t> B;
    for (const auto& v : near.vertices) B.push_back(g.find(x.label(v)));
    std::sort(B.begin(), B.end());
    bound(g, {g.root()}, B, "ns " + std::to_string(n));
  }
  for (int k = 2; k <= 3; ++k) {
    auto g = build_bubble({2, 5, 9}, {3, 3}, k);
    auto dist = bfs_distances(g, g.root());
    for (int r = 1; r <= 4; ++r) {
      std::vector<std::uint32_t> B;
      for (std::uint32_t v = 0; v < g.size(); ++v)
        if (dist[v] <= r) B.push_back(v);
      bound(g, {g.root()}, B, "bubble k=" + std::to_string(k));
    }
  }
  t.check(harmonic_cases >= 50, "only " + std::to_string(harmonic_cases) + " harmonic instances");
  return {t.pass, std::to_string(brute) + " brute-force, " + std::to_string(harmonic_cases) + " harmonic " + t.first};
}

// ------------------------------------------------------------------ 5

Outcome ns_resistance_formula_check() {
  Tally t;
  int cases = 0;
  std::vector<std::vector<long>> seqs{{2, 4, 4, 4}, {2, 4, 8, 8}, {4, 4, 4, 4}, {2, 2, 6, 8},
                                      {8, 2, 4, 6}, {6, 8, 2, 2}, {8, 8, 8, 8}, {2, 2, 2, 2}};
  for (const auto& l : seqs) {
    double prev = 0;
    for (int n = 1; n <= 4; ++n) {
      auto r = ns_resistance(l, n);
      ++cases;
      t.check(r.measured <= 2 * r.formula && r.measured >= r.formula / 2, "factor 2 at n=" + std::to_string(n));
      if (n > 1) {
        double rec = 2 * prev + l[n - 1] / 4.0;
        t.check(std::abs(r.measured - rec) <= 0.25 * rec, "recursion at n=" + std::to_string(n));
      }
      prev = r.measured;
    }
  }
  return {t.pass, std::to_string(cases) + " cases " + t.first};
}

// ------------------------------------------------------------------ 6

Outcome return_probability() {
  Tally t;
  auto g = build_dihedral_line(4);
  PermHost host(g, {2});
  const Letter s{0, 1}, tt{1, 1};
  auto q = make_measure(host, MeasureKind::sow, {{1, 1.0}}, {{s, 0.5}, {tt, 0.5}});
  auto ex = return_probability_exact(host, q, 6);
  t.check(ex.probability[1] == 0.375, "q^(2)(e) = " + std::to_string(ex.probability[1]));
  double worst = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    auto mc = return_probability_mc(host, q, n, 100'000, 1000 + n, 4);
    double z = std::abs(mc.estimate - ex.probability[n]) / mc.stderr_;
    worst = std::max(worst, z);
    t.check(z <= 3, "n=" + std::to_string(n) + " off by " + std::to_string(z) + " sigma");
    auto a = return_probability_mc(host, q, n, 100'000, 1000 + n, 1);
    auto b = return_probability_mc(host, q, n, 100'000, 1000 + n, 2);
    auto c = return_probability_mc(host, q, n, 100'000, 1000 + n, 8);
    t.check(a.hits == b.hits && b.hits == c.hits && c.hits == mc.hits, "worker dependence at n=" + std::to_string(n));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst |z| = %.2f ", worst);
  return {t.pass, buf + t.first};
}

// ------------------------------------------------------------------ 7

Outcome lemma_suite() {
  Tally t;
  std::ostringstream d;
  // orbit lemmas on bubble families under the prefix assumption
  {
    std::mt19937_64 rng(21);
    BubbleAction bub({2, 8, 32, 64, 128}, {3, 3, 3, 3});
    int cases = 0;
    for (int k : {2, 3})
      for (int l : {0, 1, 3}) {
        if (4L * (l + 1) > bub.a_at(k)) continue;
        auto m = bubble::midpoint(bub, k);
        OmegaDomain<BubbleAction> dom(bub, {m}, bubble::midpoint_ball(bub, k, l).vertices);
        for (int i = 0; i < 250; ++i) {
          auto rep = orbit_lemma_check(bub, k, l, random_omega_word(dom, 30, rng), 20, rng);
          t.check(rep.pass, "orbit lemma clause " + rep.failed_clause + ": " + rep.counterexample);
          ++cases;
        }
      }
    d << "orbit " << cases;
    t.check(cases >= 1000, "too few orbit cases");
  }
  // controls-inverted trajectories
  {
    std::mt19937_64 rng(31);
    int dih = 0, bub = 0;
    for (int n : {3, 4}) {
      DihedralAction ray;
      WordHost<DihedralAction> host(ray, {0});
      auto tent = dinfty_tent(n);
      SupportFamily<std::int64_t> family;
      for (const auto& [Y, w] : tent.F.weights) family.insert(Y);
      LampConfig<std::int64_t> u0;
      for (auto x : tent.F.base) u0[x] = 3;
      for (int i = 0; i < 500; ++i) {
        auto letters = random_constrained_trajectory(host, family, u0, 40, rng);
        auto rep = controls_inverted_check(host, family, tent.F.J, letters, u0);
        t.check(rep.pass, "dihedral: " + rep.message);
        ++dih;
      }
    }
    std::vector<long> a{2, 18, 36, 72, 144}, b{3, 3, 3, 3, 3};
    BubbleAction x(a, b);
    WordHost<BubbleAction> host(x, {0});
    for (long r : {8L, 16L}) {
      auto tent = bubble_tent_F(a, b, r);
      SupportFamily<BubbleVertex> family;
      for (const auto& [Y, w] : tent.F.weights) family.insert(Y);
      LampConfig<BubbleVertex> u0;
      for (const auto& v : tent.F.base) u0[v] = 3;
      for (int i = 0; i < 500; ++i) {
        auto letters = random_constrained_trajectory(host, family, u0, 30, rng);
        auto rep = controls_inverted_check(host, family, tent.F.J, letters, u0);
        t.check(rep.pass, "bubble: " + rep.message);
        ++bub;
      }
    }
    d << ", controls " << dih << "+" << bub;
  }
  // Omega multiplicativity and evaluation equality, then Theta on every materialized instance
  std::size_t theta = 0, hom = 0;
  auto run = [&](OmegaSuiteParams p) {
    p.M = {2, 3};
    for (const auto& c : omega_suite(p)) {
      if (c.check == "phi") continue;
      t.check(c.pass, c.family + " " + c.check + ": " + c.detail);
      if (c.check == "theta") theta += c.cases;
      if (c.check == "omega-hom") hom += c.cases;
    }
  };
  for (int n : {2, 3, 4}) {
    OmegaSuiteParams p;
    p.level = n;
    run(p);
  }
  {
    OmegaSuiteParams p;
    p.family = Family::bubble;
    p.level = 2;
    p.a = {4, 16, 32, 64, 128};
    p.radius = 1;
    run(p);
    p.a = default_suite_a();
    run(p);
  }
  for (auto [l, n] : std::vector<std::pair<std::vector<long>, int>>{
           {{2, 4, 4}, 1}, {{2, 4}, 2}, {{2, 4, 4, 4}, 2}, {{2, 2, 4}, 2}, {{2, 2, 2, 2, 2}, 3}}) {
    OmegaSuiteParams p;
    p.family = Family::ns;
    p.l = l;
    p.level = n;
    run(p);
  }
  d << ", omega " << hom << ", theta " << theta;
  return {t.pass, d.str() + " " + t.first};
}

// ------------------------------------------------------------------ 8

Outcome phi_contract() {
  Tally t;
  int assembled = 0, volume = 0;
  auto run = [&](OmegaSuiteParams p) {
    p.M = {2, 3};
    p.samples = 1;
    for (const auto& c : omega_suite(p)) {
      if (c.check != "phi") continue;
      t.check(c.pass, c.family + ": " + c.detail);
      assembled += static_cast<int>(c.cases);
      if (c.detail.find("volume-skipped") == std::string::npos) volume += static_cast<int>(c.cases);
    }
  };
  for (int n : {2, 3, 4}) {
    OmegaSuiteParams p;
    p.level = n;
    run(p);
  }
  {
    OmegaSuiteParams p;
    p.family = Family::bubble;
    p.level = 2;
    run(p);
  }
  for (auto [l, n] : std::vector<std::pair<std::vector<long>, int>>{
           {{2, 4, 4}, 1}, {{2, 4}, 2}, {{2, 4, 4, 4}, 2}, {{2, 2, 2, 2, 2}, 3}}) {
    OmegaSuiteParams p;
    p.family = Family::ns;
    p.l = l;
    p.level = n;
    run(p);
  }
  return {t.pass, std::to_string(assembled) + " assembled, " + std::to_string(volume) + " on lines with the volume check " +
                      t.first};
}

// ------------------------------------------------------------------ 9

Outcome dinfty_example() {
  Tally t;
  std::vector<double> scaled;
  for (int n = 4; n <= 10; ++n) {
    auto d = dinfty_worked_example(n);
    t.check(d.scaled >= 1.0 / 3 && d.scaled <= 10.0 / 3, "n=" + std::to_string(n) + " scaled " +
                                                               std::to_string(d.scaled));
    scaled.push_back(d.scaled);
  }
  for (std::size_t i = 2; i < scaled.size(); ++i)
    t.check(std::abs(scaled[i] - scaled[i - 1]) <= std::abs(scaled[i - 1] - scaled[i - 2]) + 1e-12,
            "ratio not settling");
  char buf[96];
  std::snprintf(buf, sizeof buf, "Q*4^(n-1): %.4f .. %.4f ", scaled.front(), scaled.back());
  return {t.pass, buf + t.first};
}

// ------------------------------------------------------------------ 10

Outcome growth_witnesses() {
  Tally t;
  std::vector<long> a{2};
  for (int k = 2; k <= 9; ++k) a.push_back((1L << k) + 1);  // 5, 9, 17, ...
  std::vector<long> b(a.size() - 1, 3);
  for (int n = 1; n <= 10; ++n) {
    auto r = bubble_distinct_words(a, b, n, 6);
    t.check(r.distinct == (std::size_t{1} << n), "n=" + std::to_string(n) + ": " + std::to_string(r.distinct));
  }
  std::mt19937_64 rng(9);
  int cases = 0;
  for (long L : {2L, 4L, 6L, 8L})
    for (int r : {1, 2, 3}) {
      if (cases == 10) break;
      std::vector<Word> targets;
      for (long x = 0; x < L / 2; ++x) {
        Word w;
        std::size_t len = rng() % (r + 1);
        for (std::size_t i = 0; i < len; ++i)
          w.push_back({static_cast<std::uint32_t>(rng() % 2), static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
        targets.push_back(w);
      }
      auto w = ns_ball_witness({L, 4, 6}, targets, r, 3);
      // (1 + 1/(2r)) r l = r l + l/2
      t.check(w.verified, "witness sections wrong");
      t.check(2 * static_cast<long>(w.word.size()) <= 2 * r * L + L, "witness too long");
      ++cases;
    }
  return {t.pass, "10 bubble counts, " + std::to_string(cases) + " ball witnesses " + t.first};
}

// ------------------------------------------------------------------ 11

EnvelopeSpec spec(EnvelopeFamily f, double p) {
  EnvelopeSpec s;
  s.family = f;
  s.param = p;
  return s;
}

Outcome envelope_arithmetic() {
  Tally t;
  auto b1 = *neglogphi_exponents(spec(EnvelopeFamily::exa_bubb1, 1));
  t.check(b1.first.power == 0.5, "exa-bubb1 exponent");
  auto e01 = *neglogphi_exponents(spec(EnvelopeFamily::exa_01, 2));
  t.check(e01.first.power == 0.5 && e01.second.power == 0.6, "exa-01 exponents");
  for (double gamma : {1.0, 1.5, 3.0}) {
    auto s = spec(EnvelopeFamily::ns_gamma, gamma);
    for (double v : {1e3, 1e8, 1e30}) {
      double l1 = predicted(s, Quantity::lambda1, v).central();
      double expect = std::pow((1 + gamma) * std::log2(std::log(v)), gamma / (1 + gamma));
      t.check(std::abs(-std::log2(l1) - expect) <= 1e-9, "ns-gamma log2 structure");
    }
  }
  int points = 0;
  for (double k : {1.5, 2.0, 3.0})
    for (double lt = std::log(16.0); lt <= std::log(1e15); lt += 0.05) {
      auto e = predicted(spec(EnvelopeFamily::exa_01, k), Quantity::neglogphi, std::exp(lt));
      t.check(e.lower <= e.upper * (1 + 1e-12), "exa-01 lower > upper");
      ++points;
    }
  return {t.pass, std::to_string(points) + " exa-01 points " + t.first};
}

}  // namespace

int main() {
  criterion(1, 10, graph_closed_forms);
  criterion(2, 0, cheeger_sandwich);
  criterion(3, 0, harper);
  criterion(4, 60, fh_lemma);
  criterion(5, 0, ns_resistance_formula_check);
  criterion(6, 0, return_probability);
  criterion(7, 0, lemma_suite);
  criterion(8, 0, phi_contract);
  criterion(9, 30, dinfty_example);
  criterion(10, 0, growth_witnesses);
  criterion(11, 0, envelope_arithmetic);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
