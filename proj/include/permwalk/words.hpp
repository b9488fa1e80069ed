#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "permwalk/families.hpp"
#include "permwalk/graph.hpp"

namespace permwalk {

// O(w;J): images of J under every left prefix w1...wj (j = 0..l).  Built from the right
// through O(g w; J) = J u g.O(w; J).
template <SchreierAction A>
std::vector<typename A::vertex_type> inverted_orbit(const A& a, const Word& w,
                                                    const std::vector<typename A::vertex_type>& J) {
  using V = typename A::vertex_type;
  std::set<V> cur(J.begin(), J.end());
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    std::set<V> next(J.begin(), J.end());
    for (const auto& v : cur) next.insert(a.act(*it, v));
    cur.swap(next);
  }
  return {cur.begin(), cur.end()};
}

template <SchreierAction A>
struct OmegaDomain {
  const A* action;
  std::vector<typename A::vertex_type> J;  // sorted
  std::vector<typename A::vertex_type> B;  // sorted

  OmegaDomain(const A& a, std::vector<typename A::vertex_type> j, std::vector<typename A::vertex_type> b)
      : action(&a), J(std::move(j)), B(std::move(b)) {
    std::sort(J.begin(), J.end());
    std::sort(B.begin(), B.end());
    for (const auto& x : J)
      require(std::binary_search(B.begin(), B.end(), x), ErrorKind::invalid_parameter, "J must lie in B");
  }
  bool in_B(const typename A::vertex_type& v) const { return std::binary_search(B.begin(), B.end(), v); }
};

template <SchreierAction A>
bool in_omega(const OmegaDomain<A>& dom, const Word& w) {
  for (const auto& v : inverted_orbit(*dom.action, w, dom.J))
    if (!dom.in_B(v)) return false;
  return true;
}

// Appending a letter on the right only adds (w g).J to the inverted orbit.
template <SchreierAction A>
bool extension_stays(const OmegaDomain<A>& dom, const Word& w_then_g) {
  for (const auto& x : dom.J)
    if (!dom.in_B(act_word(*dom.action, w_then_g, x))) return false;
  return true;
}

template <SchreierAction A>
std::vector<typename A::vertex_type> signature(const A& a, const Word& w,
                                               const std::vector<typename A::vertex_type>& probe) {
  std::vector<typename A::vertex_type> out;
  out.reserve(probe.size());
  for (const auto& x : probe) out.push_back(act_word(a, w, x));
  return out;
}

struct OmegaEnumeration {
  std::vector<Word> representatives;  // one shortest word per distinct evaluation, BFS order
  int depth_reached = 0;
  bool stabilized = false;       // the BFS ran out of new elements before maxlen
  bool separation_warning = false;  // probe set does not cover B; counts are lower bounds
};

// Evaluation image of Omega(J,B) restricted to words of length <= maxlen.  A word is in
// Omega iff every left prefix p satisfies p.J in B, so the image is the component of e in the
// right Cayley graph restricted to {g : g.J in B}.  Distinctness is decided by the action on
// `probe`.
template <SchreierAction A>
OmegaEnumeration enumerate_omega(const OmegaDomain<A>& dom, int maxlen,
                                 const std::vector<typename A::vertex_type>& probe,
                                 std::size_t budget = 2'000'000) {
  using V = typename A::vertex_type;
  require(maxlen >= 0, ErrorKind::invalid_parameter, "negative maxlen");
  OmegaEnumeration out;
  std::set<V> probe_set(probe.begin(), probe.end());
  for (const auto& b : dom.B)
    if (!probe_set.count(b)) out.separation_warning = true;
  std::map<std::vector<V>, std::size_t> seen;
  out.representatives.push_back({});
  seen.emplace(signature(*dom.action, {}, probe), 0);
  std::size_t frontier_begin = 0;
  const auto alphabet = dom.action->generators().alphabet();
  for (int depth = 1; depth <= maxlen; ++depth) {
    std::size_t frontier_end = out.representatives.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i)
      for (auto g : alphabet) {
        Word w = out.representatives[i];
        w.push_back(g);
        if (!extension_stays(dom, w)) continue;
        auto sig = signature(*dom.action, w, probe);
        if (seen.emplace(std::move(sig), out.representatives.size()).second) {
          out.representatives.push_back(std::move(w));
          require(out.representatives.size() <= budget, ErrorKind::budget,
                  "omega enumeration exceeded " + std::to_string(budget) + " elements");
        }
      }
    out.depth_reached = depth;
    if (out.representatives.size() == frontier_end) {
      out.stabilized = true;
      break;
    }
    frontier_begin = frontier_end;
  }
  if (maxlen == 0) out.stabilized = false;
  return out;
}

// Uniform letter choices with rejection: a letter is redrawn until the extended word stays in
// Omega (the inverse of the last letter always qualifies).
template <SchreierAction A, class Rng>
Word random_omega_word(const OmegaDomain<A>& dom, std::size_t length, Rng& rng) {
  const auto alphabet = dom.action->generators().alphabet();
  Word w;
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  while (w.size() < length) {
    for (int tries = 0;; ++tries) {
      Word cand = w;
      cand.push_back(alphabet[pick(rng)]);
      if (extension_stays(dom, cand)) {
        w = std::move(cand);
        break;
      }
      require(tries < 10000, ErrorKind::precondition_violation, "no admissible extension");
    }
  }
  return w;
}

// ------------------------------------------------------------ bubble orbit lemmas

struct OrbitLemmaReport {
  bool pass = true;
  std::string failed_clause;  // "i", "ii", "iii", "iv"
  std::string counterexample;
  std::vector<long> shifts;  // s_1..s_p
  std::size_t sampled_points = 0;
  std::size_t boundary_ties = 0;  // sampled points at distance exactly l from a branching end
};

namespace detail {

inline long bubble_offset(const BubbleAction& x, const BubbleVertex& v, const BubbleVertex& m) {
  require(v.w == m.w, ErrorKind::mismatch, "vertex left the bubble of the midpoint");
  (void)x;
  return v.u - m.u;
}

// Identification of a neighbourhood of the branching cycle at the end of w's bubble with the
// one at the end of the bubble of 1^{k-1}.
inline std::optional<BubbleVertex> iota(const BubbleAction& x, int k, const std::vector<std::uint16_t>& w,
                                        const BubbleVertex& y, long radius) {
  int lw = static_cast<int>(w.size()) + 1;
  std::vector<std::uint16_t> ones(k - 1, 1);
  if (y.w == w) {
    long i = y.u - x.a_at(lw);
    if (std::labs(i) > radius) return std::nullopt;
    return BubbleVertex{ones, x.a_at(k) + i};
  }
  if (y.w.size() == w.size() + 1 && std::equal(w.begin(), w.end(), y.w.begin())) {
    long len = 2 * x.a_at(lw + 1);
    long i = y.u <= len / 2 ? y.u : y.u - len;
    if (std::labs(i) > radius) return std::nullopt;
    auto img = ones;
    img.push_back(y.w.back());
    long target = 2 * x.a_at(k + 1);
    return BubbleVertex{img, ((i % target) + target) % target};
  }
  return std::nullopt;
}

}  // namespace detail

// Checks the commutation and orbit-identification lemmas for one word of Omega(m_k, B_k(l)).
template <class Rng>
OrbitLemmaReport orbit_lemma_check(const BubbleAction& x, int k, int l, const Word& w, std::size_t samples,
                                   Rng& rng) {
  require(k >= 1 && l >= 0 && 4L * (l + 1) <= x.a_at(k), ErrorKind::precondition_violation,
          "needs 0 <= l <= a_k/4 - 1");
  auto m = bubble::midpoint(x, k);
  auto B = bubble::midpoint_ball(x, k, l);
  OmegaDomain<BubbleAction> dom(x, {m}, B.vertices);
  require(in_omega(dom, w), ErrorKind::precondition_violation, "word is outside Omega_k(l)");

  OrbitLemmaReport rep;
  auto fail = [&](const char* clause, std::string msg) {
    if (rep.pass) {
      rep.pass = false;
      rep.failed_clause = clause;
      rep.counterexample = std::move(msg);
    }
  };
  const std::size_t p = w.size();
  auto alpha_pow = [&](long s) {
    BubbleVertex v = m;
    long len = 2 * x.a_at(k);
    v.u = ((v.u + s) % len + len) % len;
    return v;
  };

  // (i) prefixes land at alpha^{s_j} m with |s_j| <= l
  std::vector<long> s(p + 1, 0);
  for (std::size_t j = 1; j <= p; ++j) {
    Word pre(w.begin(), w.begin() + j);
    auto img = act_word(x, pre, m);
    if (img.w != m.w) {
      fail("i", "prefix " + std::to_string(j) + " left the bubble");
      return rep;
    }
    s[j] = img.u - m.u;
    if (std::labs(s[j]) > l) fail("i", "prefix " + std::to_string(j) + " shift " + std::to_string(s[j]));
  }
  rep.shifts.assign(s.begin() + 1, s.end());

  // (ii) prefix image equals reversed-prefix image
  for (std::size_t j = 1; j <= p; ++j) {
    Word pre(w.begin(), w.begin() + j);
    Word rev(pre.rbegin(), pre.rend());
    if (act_word(x, pre, m) != act_word(x, rev, m)) fail("ii", "prefix " + std::to_string(j));
  }

  // (iii) every subword moves m by the difference of shifts, its inverse by the opposite
  for (std::size_t i = 1; i <= p; ++i)
    for (std::size_t j = i; j <= p; ++j) {
      Word u(w.begin() + (i - 1), w.begin() + j);
      long d = s[j] - s[i - 1];
      if (act_word(x, u, m) != alpha_pow(d) || act_word(x, inverse(u), m) != alpha_pow(-d))
        fail("iii", "subword " + std::to_string(i) + ".." + std::to_string(j));
    }

  // (iv) forward orbits of deeper points follow the orbit of their model point
  int top = x.max_level() - 1;
  if (top >= k + 1) {
    const long big = 3L * l + 1;
    for (std::size_t n = 0; n < samples; ++n) {
      int t = std::uniform_int_distribution<int>(k + 1, std::min(top, k + 3))(rng);
      BubbleVertex v;
      for (int j = 1; j < t; ++j) {
        long bj = x.b_at(j);
        v.w.push_back(static_cast<std::uint16_t>(std::uniform_int_distribution<long>(1, bj - 1)(rng)));
      }
      long at = x.a_at(t);
      v.u = std::uniform_int_distribution<long>(0, 2 * at - 1)(rng);
      ++rep.sampled_points;
      long d0 = std::min(v.u, 2 * at - v.u);
      long da = std::labs(v.u - at);
      if (d0 == l || da == l) ++rep.boundary_ties;
      if (x.b_at(t - 1) != x.b_at(k) || (t < x.max_level() && x.b_at(t) != x.b_at(k)))
        require(false, ErrorKind::precondition_violation, "branching sequence must be constant on tested levels");

      std::function<std::optional<BubbleVertex>(const BubbleVertex&)> iota_hat;
      BubbleVertex vhat;
      if (d0 > l && da > l) {
        vhat = m;
        iota_hat = [&, v](const BubbleVertex& y) -> std::optional<BubbleVertex> {
          if (y.w != v.w || std::labs(y.u - v.u) > l) return std::nullopt;
          BubbleVertex r = m;
          r.u += y.u - v.u;
          return r;
        };
      } else if (d0 <= l) {
        std::vector<std::uint16_t> parent(v.w.begin(), v.w.end() - 1);
        iota_hat = [&, parent](const BubbleVertex& y) { return detail::iota(x, k, parent, y, big); };
        vhat = *iota_hat(v);
      } else {
        auto own = v.w;
        iota_hat = [&, own](const BubbleVertex& y) { return detail::iota(x, k, own, y, big); };
        vhat = *iota_hat(v);
      }
      BubbleVertex y = v, yh = vhat;
      for (std::size_t j = 0; j < p; ++j) {
        y = x.act(w[j].inverse(), y);
        yh = x.act(w[j].inverse(), yh);
        auto img = iota_hat(y);
        if (!img || *img != yh) {
          fail("iv", "point " + x.label(v) + " step " + std::to_string(j + 1));
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace permwalk
