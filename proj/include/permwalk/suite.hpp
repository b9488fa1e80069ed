#pragma once

// Batteries of checks over one local embedding: multiplicativity on Omega, the Theta
// identification of lamp components, and the Phi contract.  Used by `verify omega` and the
// acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "embeddings.hpp"
#include "resistance.hpp"

namespace permwalk {

struct SuiteCheck {
  std::string family;
  std::string check;
  bool pass = true;
  std::size_t cases = 0;
  std::string detail;
};

struct OmegaSuiteParams {
  Family family = Family::dihedral;
  int level = 3;
  std::vector<long> l;     // ns
  std::vector<long> a, b;  // bubble
  int radius = 1;          // bubble midpoint ball
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::vector<long> M{2, 3};
  std::size_t budget = 100'000;  // per lamp component
};

inline std::vector<long> default_suite_a() { return {2, 18, 36, 72, 144}; }

namespace detail {

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

inline Psi constant_psi(const std::vector<TargetElement>& group) {
  Psi p;
  for (const auto& g : group) p.emplace(g, 1.0);
  return p;
}

template <class A>
SuiteCheck hom_line(const LocalEmbedding<A>& e, const OmegaSuiteParams& p) {
  auto r = omega_hom_check(e, p.samples, p.seed);
  SuiteCheck c{to_string(e.family), "omega-hom", r.pass, r.mult_checked + r.eq_checked, ""};
  std::ostringstream d;
  d << "mult " << r.mult_checked << "/" << r.mult_failures << " eq " << r.eq_checked << "/" << r.eq_failures
    << " depth " << e.certification_depth;
  if (!r.counterexamples.empty()) d << " first: " << r.counterexamples.front();
  c.detail = d.str();
  return c;
}

// Runs f, turning a budget refusal into a note on the line.
template <class F>
bool within_budget(SuiteCheck& c, long M, F&& f) {
  try {
    f();
    return true;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::budget) throw;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += "M=" + std::to_string(M) + " skipped (budget)";
    return false;
  }
}

inline void fold_theta(SuiteCheck& c, const ThetaReport& r, long M) {
  ++c.cases;
  if (!r.pass) {
    c.pass = false;
    if (c.detail.empty()) c.detail = "M=" + std::to_string(M) + ": " + r.counterexample;
  }
}

inline void fold_phi(SuiteCheck& c, const PhiReport& r, long M) {
  ++c.cases;
  bool ok = r.bound_holds;
  if (r.materialized) ok = ok && std::abs(r.materialized_twice - r.twice_quotient) <= 1e-9;
  if (r.transfer_checked) ok = ok && std::abs(r.transferred_twice - r.component_twice) <= 1e-9;
  if (r.volume_checked) ok = ok && r.volume_holds;
  std::ostringstream d;
  d.precision(6);
  d << "M=" << M << " Q=" << r.twice_quotient << " bound=" << r.bound << (r.volume_checked ? "" : " volume-skipped");
  if (!ok) c.pass = false;
  if (!ok) c.detail = d.str();
  else if (c.detail.empty()) c.detail = d.str();
}

// Smallest r >= 8 with k(r) = k, or 0.
inline long bubble_tent_radius(const std::vector<long>& a, int k) {
  if (k < 2 || k > static_cast<int>(a.size())) return 0;
  long r = std::max<long>(8, (a[k - 2] + 1) / 2);
  while (2 * r < a[k - 2]) ++r;
  return 2 * r < a[k - 1] ? r : 0;
}

}  // namespace detail

inline std::vector<SuiteCheck> omega_suite(const OmegaSuiteParams& p) {
  std::vector<SuiteCheck> out;
  switch (p.family) {
    case Family::dihedral: {
      auto e = dihedral_embedding(p.level);
      out.push_back(detail::hom_line(e, p));
      if (p.level <= 10) {
        auto img = omega_image(e, e.J, e.B);
        long want = 2L << p.level;
        out.push_back({"dihedral", "omega-image", static_cast<long>(img.size) == want, 1,
                       std::to_string(img.size) + " of " + std::to_string(want)});
      }
      if (p.level < 2) break;
      auto F = dinfty_tent(p.level).F;
      LampConfig<std::int64_t> up;
      for (auto x : F.base) up[x] = 1;
      SuiteCheck th{"dihedral", "theta", true, 0, ""}, ph{"dihedral", "phi", true, 0, ""};
      auto psi = detail::constant_psi(target_closure(e));
      for (long M : p.M) {
        detail::within_budget(th, M, [&] {
          detail::fold_theta(th, theta_isomorphism_check(component_pair(e, F.weights, up, M, p.budget)), M);
        });
        detail::within_budget(ph, M, [&] { detail::fold_phi(ph, assemble_phi(e, F, psi, M, p.budget), M); });
      }
      out.push_back(th);
      out.push_back(ph);
      break;
    }
    case Family::bubble: {
      auto a = p.a.empty() ? default_suite_a() : p.a;
      auto b = p.b.empty() ? std::vector<long>(a.size(), 3) : p.b;
      auto e = bubble_embedding(a, b, p.level, p.radius);
      out.push_back(detail::hom_line(e, p));
      long r = detail::bubble_tent_radius(a, p.level);
      if (r == 0) {
        out.push_back({"bubble", "theta", true, 0, "no tent radius with k(r) = " + std::to_string(p.level)});
        break;
      }
      auto t = bubble_tent_F(a, b, r, p.level);
      LampConfig<BubbleVertex> up;
      for (const auto& x : t.F.base) up[x] = 1;
      SuiteCheck th{"bubble", "theta", true, 0, ""}, ph{"bubble", "phi", true, 0, ""};
      Psi psi;
      auto beta = e.image(Word{{1, 1}});
      for (auto g = e.identity;;) {
        psi.emplace(g, 1.0);
        g = e.mul(beta, g);
        if (g == e.identity) break;
      }
      for (long M : p.M) {
        detail::within_budget(th, M, [&] {
          detail::fold_theta(th, theta_isomorphism_check(component_pair(e, t.F.weights, up, M, p.budget)), M);
        });
        detail::within_budget(ph, M, [&] { detail::fold_phi(ph, assemble_phi(e, t.F, psi, M, p.budget), M); });
      }
      out.push_back(th);
      out.push_back(ph);
      break;
    }
    case Family::ns: {
      require(!p.l.empty(), ErrorKind::invalid_parameter, "ns suite needs the sequence l");
      auto e = ns_embedding(p.l, p.level);
      out.push_back(detail::hom_line(e, p));
      auto o = e.action->root();
      auto pairs = detail::pairs_through(o, e.B);
      SuiteCheck th{"ns", "theta", true, 0, ""}, ph{"ns", "phi", true, 0, ""};
      if (!pairs.empty()) {
        LampConfig<NSVertex> up;
        for (const auto& x : pairs.begin()->first) up[x] = 1;
        for (long M : p.M)
          detail::within_budget(th, M, [&] {
            detail::fold_theta(th, theta_isomorphism_check(component_pair(e, pairs, up, M, p.budget)), M);
          });
      } else {
        th.detail = "B is the root alone";
      }
      // box of radius 1 in the lamp coordinates
      auto group = target_closure(e);
      std::size_t N = e.identity.size() / 3;
      std::int64_t ord_a = 1, ord_b = 1;
      for (const auto& g : group)
        for (std::size_t i = 0; i < N; ++i) {
          ord_a = std::max(ord_a, g[N + i] + 1);
          ord_b = std::max(ord_b, g[2 * N + i] + 1);
        }
      auto centered = [](std::int64_t c, std::int64_t ord) { return c > ord / 2 ? c - ord : c; };
      Psi psi;
      for (const auto& g : group) {
        bool in = true;
        for (std::size_t i = 0; i < N; ++i)
          in = in && std::abs(centered(g[N + i], ord_a)) <= 1 && std::abs(centered(g[2 * N + i], ord_b)) <= 1;
        if (in) psi.emplace(g, 1.0);
      }
      AdmissibleFunction<NSVertex> F;
      F.base = {o};
      F.J = {o};
      F.B = e.B;
      F.weights.emplace(std::vector<NSVertex>{o}, 1.0);
      for (long M : p.M)
        detail::within_budget(ph, M, [&] { detail::fold_phi(ph, assemble_phi(e, F, psi, M, p.budget), M); });
      out.push_back(th);
      out.push_back(ph);
      break;
    }
  }
  return out;
}

}  // namespace permwalk
