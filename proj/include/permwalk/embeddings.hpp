#pragma once

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "permwalk/families.hpp"
#include "permwalk/resistance.hpp"
#include "permwalk/rng.hpp"
#include "permwalk/tree.hpp"
#include "permwalk/wreath.hpp"
#include "permwalk/words.hpp"

namespace permwalk {

enum class Family { dihedral, bubble, ns };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::dihedral: return "dihedral";
    case Family::bubble: return "bubble";
    case Family::ns: return "ns";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "dihedral") return Family::dihedral;
  if (s == "bubble") return Family::bubble;
  if (s == "ns") return Family::ns;
  fail(ErrorKind::invalid_parameter, "unknown family '" + s + "' (dihedral|bubble|ns)");
}

// Elements of the finite target group, encoded as integer tuples.
using TargetElement = std::vector<std::int64_t>;

namespace detail {

inline TargetElement perm_of(const FiniteSchreierGraph& g, const Word& w) {
  TargetElement p(g.size());
  for (std::uint32_t v = 0; v < g.size(); ++v) p[v] = act_word(g, w, v);
  return p;
}

inline TargetElement perm_mul(const TargetElement& g, const TargetElement& h) {
  TargetElement r(h.size());
  for (std::size_t v = 0; v < h.size(); ++v) r[v] = g[h[v]];
  return r;
}

inline TargetElement perm_inv(const TargetElement& g) {
  TargetElement r(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) r[g[v]] = static_cast<std::int64_t>(v);
  return r;
}

inline TargetElement perm_identity(std::size_t n) {
  TargetElement p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline std::int64_t mod(std::int64_t x, std::int64_t m) { return m == 0 ? x : ((x % m) + m) % m; }

}  // namespace detail

template <SchreierAction A>
struct LocalEmbedding {
  using vertex_type = typename A::vertex_type;

  Family family = Family::dihedral;
  int level = 0;
  std::string target;
  std::shared_ptr<const A> action;
  std::vector<vertex_type> J, B;  // Omega(J,B) is the domain
  std::shared_ptr<const FiniteSchreierGraph> deep;  // decides equality in Gamma
  int certification_depth = 0;
  std::function<TargetElement(const Word&)> image;  // no domain check
  std::function<TargetElement(const TargetElement&, const TargetElement&)> mul;
  std::function<TargetElement(const TargetElement&)> inv;
  TargetElement identity;

  const GeneratorSet& generators() const { return action->generators(); }
  OmegaDomain<A> domain() const { return OmegaDomain<A>(*action, J, B); }
  bool in_domain(const Word& w) const { return in_omega(domain(), w); }
  TargetElement operator()(const Word& w) const {
    require(in_domain(w), ErrorKind::domain_violation, "word " + format_word(w, generators()) + " is outside Omega");
    return image(w);
  }
  TargetElement deep_key(const Word& w) const { return detail::perm_of(*deep, w); }
};

// D_infinity on the marked ray, J = {0}, B = {0..2^n-1}; target: the dihedral group of the 2^n-line.
inline LocalEmbedding<DihedralAction> dihedral_embedding(int n) {
  require(n >= 1 && n <= 16, ErrorKind::out_of_range, "dihedral level must lie in 1..16");
  LocalEmbedding<DihedralAction> e;
  e.family = Family::dihedral;
  e.level = n;
  std::int64_t N = std::int64_t{1} << n;
  e.target = "D(" + std::to_string(2 * N) + ") on the " + std::to_string(N) + "-line";
  e.action = std::make_shared<DihedralAction>();
  e.J = {0};
  for (std::int64_t i = 0; i < N; ++i) e.B.push_back(i);
  auto tgt = std::make_shared<FiniteSchreierGraph>(build_dihedral_line(N));
  e.deep = std::make_shared<FiniteSchreierGraph>(build_dihedral_line(4 * N));
  e.certification_depth = n + 2;
  e.image = [tgt](const Word& w) { return detail::perm_of(*tgt, w); };
  e.mul = detail::perm_mul;
  e.inv = detail::perm_inv;
  e.identity = detail::perm_identity(tgt->size());
  return e;
}

// Omega_k(l) = Omega(m_k, B(m_k, l)); target: the finite bubble group on X^{k+1}.
inline LocalEmbedding<BubbleAction> bubble_embedding(const std::vector<long>& a, const std::vector<long>& b, int k,
                                                     int l) {
  require(k >= 1, ErrorKind::out_of_range, "k must be >= 1");
  require(l >= 0 && 4L * (l + 1) < a.at(k - 1), ErrorKind::precondition_violation,
          "local embedding needs 0 <= l < a_k/4 - 1");
  auto x = std::make_shared<BubbleAction>(a, b);
  require(k + 3 <= x->max_level(), ErrorKind::out_of_range,
          "parameter prefix must reach level k+3 for the deep truncation");
  LocalEmbedding<BubbleAction> e;
  e.family = Family::bubble;
  e.level = k;
  e.target = "bubble group on X^" + std::to_string(k + 1);
  e.action = x;
  e.J = {bubble::midpoint(*x, k)};
  e.B = bubble::midpoint_ball(*x, k, l).vertices;
  auto tgt = std::make_shared<FiniteSchreierGraph>(build_bubble(a, b, k + 1));
  e.deep = std::make_shared<FiniteSchreierGraph>(build_bubble(a, b, k + 3));
  e.certification_depth = k + 3;
  e.image = [tgt](const Word& w) { return detail::perm_of(*tgt, w); };
  e.mul = detail::perm_mul;
  e.inv = detail::perm_inv;
  e.identity = detail::perm_identity(tgt->size());
  return e;
}

// Sequence used by the NS embedding at level n: padded with 2 and cut at n+2.
inline std::vector<long> ns_embedding_sequence(std::vector<long> l, int n) {
  while (static_cast<int>(l.size()) < n + 2) l.push_back(2);
  l.resize(n + 2);
  return l;
}

struct NSTargetShape {
  std::size_t N = 0;        // |S_n|
  std::int64_t ord_a = 0;   // l_{n+1}
  std::int64_t ord_b = 0;   // order of beta_{n+1} on the deep truncation
};

// [<a> x <b>] wr_{S_n} pi_n(Gamma), encoded as (sigma, a-exponents, b-exponents) with the lamp
// of a section g_x stored at sigma(x).
inline LocalEmbedding<NSAction> ns_embedding(const std::vector<long>& l_in, int n) {
  require(n >= 1, ErrorKind::out_of_range, "NS level must be >= 1");
  auto l = ns_embedding_sequence(l_in, n);
  auto x = std::make_shared<NSAction>(l);
  auto aut = std::make_shared<NSAutomaton>(ns_automaton(l));
  LocalEmbedding<NSAction> e;
  e.family = Family::ns;
  e.level = n;
  e.action = x;
  e.J = {x->root()};
  e.B = ns::halves(*x, n).first.vertices;
  e.deep = std::make_shared<FiniteSchreierGraph>(build_ns(l, n + 2));
  e.certification_depth = n + 2;

  auto tail = aut->shape.tail(n);
  auto shape = std::make_shared<NSTargetShape>();
  shape->N = aut->shape.level(n).size();
  shape->ord_a = l[n];
  auto bn = aut->b(n);
  for (std::int64_t q = 1;; ++q)
    if (!moves_something(aut->A, bn.pow(q), tail, tail.depth())) {
      shape->ord_b = q;
      break;
    }
  e.target = "[Z" + std::to_string(shape->ord_a) + " x Z" + std::to_string(shape->ord_b) + "] wr S_" +
             std::to_string(n);

  e.image = [aut, shape, tail, n, l](const Word& w) {
    auto g = aut->from_word(w);
    auto d = decompose(aut->A, g, aut->shape, n);
    std::size_t N = shape->N;
    TargetElement out(3 * N, 0);
    for (std::size_t i = 0; i < N; ++i) out[i] = d.sigma[i];
    for (std::size_t i = 0; i < N; ++i) {
      const auto& s = d.sections[i];
      if (!moves_something(aut->A, s, tail, tail.depth())) continue;
      std::int64_t qa = -1, qb = -1;
      for (std::int64_t q = 1; q < shape->ord_a && qa < 0; ++q)
        if (same_action(aut->A, s, aut->a(n).pow(q), tail, tail.depth())) qa = q;
      for (std::int64_t q = 1; q < shape->ord_b && qa < 0 && qb < 0; ++q)
        if (same_action(aut->A, s, aut->b(n).pow(q), tail, tail.depth())) qb = q;
      require(qa >= 0 || qb >= 0, ErrorKind::domain_violation,
              "section at " + format_tree_word(d.vertices[i], aut->shape) +
                  " is not a power of a_{n+1} or b_{n+1}");
      auto t = static_cast<std::size_t>(d.sigma[i]);
      out[N + t] = std::max<std::int64_t>(qa, 0);
      out[2 * N + t] = std::max<std::int64_t>(qb, 0);
    }
    return out;
  };
  e.mul = [shape](const TargetElement& g, const TargetElement& h) {
    std::size_t N = shape->N;
    TargetElement r(3 * N);
    std::vector<std::size_t> ginv(N);
    for (std::size_t i = 0; i < N; ++i) ginv[g[i]] = i;
    for (std::size_t i = 0; i < N; ++i) r[i] = g[h[i]];
    for (std::size_t t = 0; t < N; ++t) {
      r[N + t] = detail::mod(g[N + t] + h[N + ginv[t]], shape->ord_a);
      r[2 * N + t] = detail::mod(g[2 * N + t] + h[2 * N + ginv[t]], shape->ord_b);
    }
    return r;
  };
  e.inv = [shape](const TargetElement& g) {
    std::size_t N = shape->N;
    TargetElement r(3 * N);
    for (std::size_t i = 0; i < N; ++i) r[g[i]] = static_cast<std::int64_t>(i);
    // (c, s)^{-1} = (-s^{-1}.c, s^{-1}); (s^{-1}.c)(t) = c(s t)
    for (std::size_t t = 0; t < N; ++t) {
      r[N + t] = detail::mod(-g[N + g[t]], shape->ord_a);
      r[2 * N + t] = detail::mod(-g[2 * N + g[t]], shape->ord_b);
    }
    return r;
  };
  e.identity = TargetElement(3 * shape->N, 0);
  for (std::size_t i = 0; i < shape->N; ++i) e.identity[i] = static_cast<std::int64_t>(i);
  return e;
}

// Subgroup of the target generated by the letter images.
template <SchreierAction A>
std::vector<TargetElement> target_closure(const LocalEmbedding<A>& e, std::size_t budget = 200'000) {
  std::set<TargetElement> seen{e.identity};
  std::vector<TargetElement> order{e.identity};
  std::vector<TargetElement> gens;
  for (auto l : e.generators().alphabet()) gens.push_back(e.image(Word{l}));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& s : gens) {
      auto y = e.mul(s, order[i]);
      if (seen.insert(y).second) {
        order.push_back(y);
        require(order.size() <= budget, ErrorKind::budget, "target group exceeds " + std::to_string(budget));
      }
    }
  return order;
}

// ------------------------------------------------------------------ hypothesis (Omega) checks

struct OmegaImage {
  std::size_t size = 0;                  // |Omega-bar| decided on the deep truncation
  std::set<TargetElement> images;        // theta(Omega)
  bool injective = true;                 // distinct evaluations have distinct images
};

// BFS over Omega-bar(J,B): w -> w g stays iff every prefix keeps J inside B.
template <SchreierAction A>
OmegaImage omega_image(const LocalEmbedding<A>& e, const std::vector<typename A::vertex_type>& J,
                       const std::vector<typename A::vertex_type>& B, std::size_t budget = 100'000) {
  OmegaDomain<A> dom(*e.action, J, B);
  const auto alph = e.generators().alphabet();
  std::vector<TargetElement> letter_perm;
  for (auto l : alph) letter_perm.push_back(e.deep_key(Word{l}));
  std::map<TargetElement, Word> seen;
  std::vector<std::map<TargetElement, Word>::iterator> queue;
  queue.push_back(seen.emplace(e.deep_key({}), Word{}).first);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto& [key, w] = *queue[i];
    for (std::size_t j = 0; j < alph.size(); ++j) {
      Word v = w;
      v.push_back(alph[j]);
      if (!extension_stays(dom, v)) continue;
      auto [it, fresh] = seen.emplace(detail::perm_mul(key, letter_perm[j]), std::move(v));
      if (fresh) {
        queue.push_back(it);
        require(queue.size() <= budget, ErrorKind::budget, "Omega-bar exceeds " + std::to_string(budget));
      }
    }
  }
  OmegaImage out;
  out.size = seen.size();
  for (const auto& [k, w] : seen) out.images.insert(e.image(w));
  out.injective = out.images.size() == out.size;
  return out;
}

struct OmegaHomReport {
  bool pass = true;
  std::size_t mult_checked = 0, mult_failures = 0;
  std::size_t eq_checked = 0, eq_failures = 0;
  std::size_t letters_outside = 0;  // informational: letters need not lie in Omega
  std::vector<std::string> counterexamples;
};

template <SchreierAction A>
OmegaHomReport omega_hom_check(const LocalEmbedding<A>& e, std::size_t samples, std::uint64_t seed,
                               std::size_t max_len = 24) {
  OmegaHomReport r;
  const auto& gens = e.generators();
  auto note = [&](const std::string& s) {
    r.pass = false;
    if (r.counterexamples.size() < 10) r.counterexamples.push_back(s);
  };
  for (auto l : gens.alphabet())
    if (!e.in_domain(Word{l})) ++r.letters_outside;
  auto dom = e.domain();
  auto rng = stream_rng(seed, 0);
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::map<TargetElement, std::pair<Word, TargetElement>> by_value;
  std::size_t attempts = 0;
  while (r.mult_checked < samples && attempts < 50 * samples + 100) {
    ++attempts;
    // a long Omega word split in two; both halves usually stay in Omega
    Word w = random_omega_word(dom, len(rng) + len(rng), rng);
    std::size_t cut = w.empty() ? 0 : rng() % (w.size() + 1);
    Word w1(w.begin(), w.begin() + static_cast<long>(cut)), w2(w.begin() + static_cast<long>(cut), w.end());
    if (attempts % 2 == 0) w2 = random_omega_word(dom, len(rng), rng);
    Word w12 = concat(w1, w2);
    if (!e.in_domain(w1) || !e.in_domain(w2) || !e.in_domain(w12)) continue;
    ++r.mult_checked;
    auto i1 = e.image(w1), i2 = e.image(w2), i12 = e.image(w12);
    if (e.mul(i1, i2) != i12) {
      ++r.mult_failures;
      note("theta(w1 w2) != theta(w1) theta(w2) for w1=" + format_word(w1, gens) + " w2=" + format_word(w2, gens));
    }
    for (const auto& [word, img] : {std::pair{w1, i1}, std::pair{w2, i2}, std::pair{w12, i12}}) {
      auto key = e.deep_key(word);
      auto [it, fresh] = by_value.emplace(key, std::pair{word, img});
      if (fresh) continue;
      ++r.eq_checked;
      if (it->second.second != img) {
        ++r.eq_failures;
        note("equal evaluations with different images: " + format_word(it->second.first, gens) + " vs " +
             format_word(word, gens));
      }
    }
  }
  return r;
}

// ------------------------------------------------------------------ component pair

template <class V>
struct LampedVertex {
  LampConfig<V> f;
  TargetElement base;
  friend auto operator<=>(const LampedVertex&, const LampedVertex&) = default;
};

template <class V>
struct Component {
  std::vector<LampedVertex<V>> vertices;
  std::vector<std::vector<std::int64_t>> edges;  // [vertex][label] -> vertex, or -1 when the move leaves
  std::vector<std::int64_t> parent;
  std::vector<int> parent_label;
};

// Labels: 0 = +1 at o, 1 = -1 at o, 2 + i = i-th letter of the symmetric alphabet.
template <class V>
struct ComponentPair {
  Component<V> G;  // (G, Q): base stored as the action on the deep truncation
  Component<V> P;  // (lamps x target, P)
  std::vector<std::string> labels;
  std::vector<Letter> letters;
  long M = 1;
};

namespace detail {

template <class V>
bool lamps_allowed(const LampConfig<V>& f, const SetFunction<V>& F, long M) {
  for (const auto& [x, c] : f)
    if (c < 1 || c > M) return false;
  return F.count(support(f)) > 0;
}

template <SchreierAction A>
LampConfig<typename A::vertex_type> push_lamps(const A& a, Letter s, const LampConfig<typename A::vertex_type>& f) {
  LampConfig<typename A::vertex_type> out;
  for (const auto& [x, c] : f) out[a.act(s, x)] = c;
  return out;
}

template <class V, class Step>
Component<V> explore(const LampedVertex<V>& start, std::size_t nlabels, Step&& step, const SetFunction<V>& F, long M,
                     std::size_t budget) {
  Component<V> c;
  std::map<LampedVertex<V>, std::int64_t> idx;
  idx.emplace(start, 0);
  c.vertices.push_back(start);
  c.parent.push_back(-1);
  c.parent_label.push_back(-1);
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    c.edges.emplace_back(nlabels, -1);
    for (std::size_t q = 0; q < nlabels; ++q) {
      auto v = step(c.vertices[i], q);
      if (!lamps_allowed(v.f, F, M)) continue;
      auto [it, fresh] = idx.emplace(v, static_cast<std::int64_t>(c.vertices.size()));
      if (fresh) {
        c.vertices.push_back(v);
        c.parent.push_back(static_cast<std::int64_t>(i));
        c.parent_label.push_back(static_cast<int>(q));
        require(c.vertices.size() <= budget, ErrorKind::budget,
                "component exceeds " + std::to_string(budget) + " vertices");
      }
      c.edges[i][q] = it->second;
    }
  }
  return c;
}

}  // namespace detail

template <SchreierAction A>
ComponentPair<typename A::vertex_type> component_pair(const LocalEmbedding<A>& e,
                                                      const SetFunction<typename A::vertex_type>& F,
                                                      const LampConfig<typename A::vertex_type>& upsilon0, long M,
                                                      std::size_t budget = 500'000) {
  using V = typename A::vertex_type;
  require(M >= 1, ErrorKind::invalid_parameter, "lamp range must be >= 1");
  require(detail::lamps_allowed(upsilon0, F, M), ErrorKind::precondition_violation,
          "initial lamps must have support in supp(F) and values in [1,M]");
  ComponentPair<V> cp;
  cp.M = M;
  cp.labels = {"+1o", "-1o"};
  cp.letters = e.generators().alphabet();
  for (auto l : cp.letters) cp.labels.push_back(format_word(Word{l}, e.generators()));
  const auto& a = *e.action;
  const V o = a.root();
  std::vector<TargetElement> deep_letters, theta_letters;
  for (auto l : cp.letters) {
    deep_letters.push_back(e.deep_key(Word{l}));
    theta_letters.push_back(e.image(Word{l}));
  }
  LampGroup Z{0};
  auto lamp_step = [&](LampedVertex<V> v, std::size_t q) {
    add_lamp(v.f, o, q == 0 ? 1 : -1, Z);
    return v;
  };
  cp.G = detail::explore<V>(
      {upsilon0, e.deep_key({})}, cp.labels.size(),
      [&](const LampedVertex<V>& v, std::size_t q) {
        if (q < 2) return lamp_step(v, q);
        return LampedVertex<V>{detail::push_lamps(a, cp.letters[q - 2], v.f),
                               detail::perm_mul(deep_letters[q - 2], v.base)};
      },
      F, M, budget);
  cp.P = detail::explore<V>(
      {upsilon0, e.identity}, cp.labels.size(),
      [&](const LampedVertex<V>& v, std::size_t q) {
        if (q < 2) return lamp_step(v, q);
        return LampedVertex<V>{detail::push_lamps(a, cp.letters[q - 2], v.f), e.mul(theta_letters[q - 2], v.base)};
      },
      F, M, budget);
  return cp;
}

struct ThetaReport {
  bool pass = true;
  bool bijective = true;
  bool boundary_matched = true;
  bool lamps_agree = true;
  std::size_t size_G = 0, size_P = 0, edges_checked = 0, boundary_checked = 0;
  std::vector<std::int64_t> theta;  // G index -> P index
  std::string counterexample;        // label path from the base point
};

template <class V>
ThetaReport theta_isomorphism_check(const ComponentPair<V>& cp) {
  ThetaReport r;
  r.size_G = cp.G.vertices.size();
  r.size_P = cp.P.vertices.size();
  r.theta.assign(r.size_G, -1);
  std::vector<std::int64_t> back(r.size_P, -1);
  auto path = [&](std::int64_t u, int extra) {
    std::vector<std::string> labs;
    if (extra >= 0) labs.push_back(cp.labels[extra]);
    for (; cp.G.parent[u] >= 0; u = cp.G.parent[u]) labs.push_back(cp.labels[cp.G.parent_label[u]]);
    std::string s;
    for (auto it = labs.rbegin(); it != labs.rend(); ++it) s += (s.empty() ? "" : " ") + *it;
    return s.empty() ? std::string("(base point)") : s;
  };
  auto fail_at = [&](std::int64_t u, int q, const std::string& why) {
    if (r.pass) r.counterexample = why + " after " + path(u, q);
    r.pass = false;
  };
  r.theta[0] = 0;
  back[0] = 0;
  for (std::size_t u = 0; u < r.size_G; ++u) {
    auto v = r.theta[u];
    if (v < 0) {
      fail_at(static_cast<std::int64_t>(u), -1, "unpaired vertex");
      r.bijective = false;
      continue;
    }
    if (cp.G.vertices[u].f != cp.P.vertices[v].f) {
      r.lamps_agree = false;
      fail_at(static_cast<std::int64_t>(u), -1, "lamp configurations differ");
    }
    for (std::size_t q = 0; q < cp.labels.size(); ++q) {
      auto u2 = cp.G.edges[u][q], v2 = cp.P.edges[v][q];
      ++r.boundary_checked;
      if ((u2 < 0) != (v2 < 0)) {
        r.boundary_matched = false;
        fail_at(static_cast<std::int64_t>(u), static_cast<int>(q), "exterior edge on one side only");
        continue;
      }
      if (u2 < 0) continue;
      ++r.edges_checked;
      if (r.theta[u2] < 0) {
        if (back[v2] >= 0) {
          r.bijective = false;
          fail_at(static_cast<std::int64_t>(u), static_cast<int>(q), "two vertices map to one");
          continue;
        }
        r.theta[u2] = v2;
        back[v2] = u2;
      } else if (r.theta[u2] != v2) {
        r.bijective = false;
        fail_at(static_cast<std::int64_t>(u), static_cast<int>(q), "pairing conflict");
      }
    }
  }
  if (r.size_G != r.size_P) {
    r.bijective = false;
    if (r.pass) r.counterexample = "component sizes differ";
    r.pass = false;
  }
  return r;
}

// ------------------------------------------------------------------ test function Phi

using Psi = std::map<TargetElement, double>;

template <SchreierAction A>
double psi_quotient(const LocalEmbedding<A>& e, const Psi& psi, const LetterLaw& mu) {
  double n2 = 0;
  for (const auto& [x, v] : psi) n2 += v * v;
  require(n2 > 0, ErrorKind::invalid_parameter, "psi must be nonzero");
  double num = 0;
  for (auto [l, p] : mu) {
    auto s = e.image(Word{l});
    double inner = 0;
    for (const auto& [x, v] : psi) {
      auto it = psi.find(e.mul(s, x));
      if (it != psi.end()) inner += v * it->second;
    }
    num += p * (2 * n2 - 2 * inner);
  }
  return num / n2;
}

struct PhiReport {
  double QF = 0, Qpsi = 0;
  double bound = 0;            // 1/M + Q(F) + Q(psi)
  double twice_quotient = 0;   // 2E/||Phi||^2, closed form
  double quotient = 0;         // E/||Phi||^2
  bool bound_holds = false;
  bool materialized = false;
  double materialized_twice = 0;
  std::size_t support = 0;     // |supp Phi|
  // transfer to the wreath product
  std::size_t component = 0;   // |supp Psi|
  double component_twice = 0;  // 2E/||.||^2 of the chosen component
  double transferred_twice = 0;  // same quantity computed on (G,Q) after the transfer
  bool h0_identity = false;
  std::size_t omega_factor = 0;  // |theta(Omega) cap supp(psi) h0^{-1}|
  double volume_bound = 0;       // omega_factor * M^{|B|}
  bool volume_holds = false;
  bool volume_checked = false;   // Omega-bar fit in its budget
  bool transfer_checked = false;
};

namespace detail {

// 2 E(phi,phi) on a component given per-label weights; exterior and zero vertices contribute
// through the symmetric kernel.
template <class V>
double twice_energy(const Component<V>& c, const std::vector<double>& phi, const std::vector<double>& w) {
  double e = 0;
  for (std::size_t u = 0; u < c.vertices.size(); ++u)
    for (std::size_t q = 0; q < w.size(); ++q) {
      auto v = c.edges[u][q];
      double pv = v < 0 ? 0.0 : phi[v];
      double d = phi[u] - pv;
      e += w[q] * d * d;
      if (v < 0) e += w[q] * phi[u] * phi[u];
    }
  return e;
}

}  // namespace detail

template <SchreierAction A>
PhiReport assemble_phi(const LocalEmbedding<A>& e, const AdmissibleFunction<typename A::vertex_type>& F,
                       const Psi& psi, long M, std::size_t budget = 2'000'000,
                       std::size_t omega_budget = 20'000) {
  using V = typename A::vertex_type;
  require(M >= 1, ErrorKind::invalid_parameter, "lamp range must be >= 1");
  require(!F.weights.empty() && !psi.empty(), ErrorKind::invalid_parameter, "empty test function");
  const V o = e.action->root();
  require(std::find(F.J.begin(), F.J.end(), o) != F.J.end(), ErrorKind::precondition_violation,
          "the base point must belong to J");
  auto mu = uniform_letters(e.generators());
  PhiReport r;
  r.QF = set_quotient(*e.action, F.weights, mu);
  r.Qpsi = psi_quotient(e, psi, mu);
  r.bound = 1.0 / M + r.QF + r.Qpsi;

  // per-letter overlaps: a_s for psi, b_s for F
  double psi2 = 0, F2 = squared_norm(F.weights);
  for (const auto& [x, v] : psi) psi2 += v * v;
  double base = 0;
  for (auto [l, p] : mu) {
    auto s = e.image(Word{l});
    double ip = 0, iF = 0;
    for (const auto& [x, v] : psi) {
      auto it = psi.find(e.mul(s, x));
      if (it != psi.end()) ip += v * it->second;
    }
    for (const auto& [Y, f] : F.weights) {
      auto it = F.weights.find(act_set(*e.action, Word{l}, Y));
      if (it != F.weights.end()) iF += f * it->second;
    }
    double as = 2 - 2 * ip / psi2, bs = 2 - 2 * iF / F2;
    base += p * (as + bs - as * bs / 2);
  }
  r.twice_quotient = 1.0 / M + 0.5 * base;
  r.quotient = r.twice_quotient / 2;
  r.bound_holds = r.twice_quotient <= r.bound + 1e-12;

  std::size_t A_size = F.base.size();
  double states = static_cast<double>(psi.size()) * static_cast<double>(F.weights.size()) *
                  std::pow(static_cast<double>(M), static_cast<double>(A_size));
  r.support = states < 1e18 ? static_cast<std::size_t>(states) : SIZE_MAX;
  if (states > static_cast<double>(budget)) return r;  // closed form only

  // materialize Phi on lamps x target
  r.materialized = true;
  std::map<LampedVertex<V>, std::size_t> idx;
  std::vector<LampedVertex<V>> verts;
  std::vector<double> phi;
  for (const auto& [Y, fw] : F.weights) {
    std::vector<long> vals(Y.size(), 1);
    while (true) {
      LampConfig<V> f;
      for (std::size_t i = 0; i < Y.size(); ++i) f[Y[i]] = vals[i];
      for (const auto& [g, pv] : psi) {
        idx.emplace(LampedVertex<V>{f, g}, verts.size());
        verts.push_back({f, g});
        phi.push_back(pv * fw);
      }
      std::size_t i = 0;
      while (i < vals.size() && vals[i] == M) vals[i++] = 1;
      if (i == vals.size()) break;
      ++vals[i];
    }
  }
  const auto letters = e.generators().alphabet();
  std::vector<TargetElement> theta_letters;
  for (auto l : letters) theta_letters.push_back(e.image(Word{l}));
  std::vector<double> w{0.25, 0.25};
  for (auto [l, p] : mu) w.push_back(0.5 * p);
  LampGroup Z{0};
  auto step = [&](const LampedVertex<V>& v, std::size_t q) {
    if (q < 2) {
      auto u = v;
      add_lamp(u.f, o, q == 0 ? 1 : -1, Z);
      return u;
    }
    return LampedVertex<V>{detail::push_lamps(*e.action, letters[q - 2], v.f), e.mul(theta_letters[q - 2], v.base)};
  };
  Component<V> all;
  all.vertices = verts;
  for (const auto& v : verts) {
    std::vector<std::int64_t> row;
    for (std::size_t q = 0; q < w.size(); ++q) {
      auto it = idx.find(step(v, q));
      row.push_back(it == idx.end() ? -1 : static_cast<std::int64_t>(it->second));
    }
    all.edges.push_back(std::move(row));
  }
  double norm = 0;
  for (double p : phi) norm += p * p;
  r.materialized_twice = detail::twice_energy(all, phi, w) / norm;

  // P-connected pieces of supp(Phi); the best one is no worse than the whole
  std::vector<std::int64_t> comp(verts.size(), -1);
  std::vector<std::vector<std::size_t>> pieces;
  for (std::size_t s = 0; s < verts.size(); ++s) {
    if (comp[s] >= 0 || phi[s] == 0) continue;
    pieces.push_back({s});
    comp[s] = static_cast<std::int64_t>(pieces.size() - 1);
    for (std::size_t i = 0; i < pieces.back().size(); ++i)
      for (auto v : all.edges[pieces.back()[i]])
        if (v >= 0 && comp[v] < 0 && phi[v] != 0) {
          comp[v] = comp[s];
          pieces.back().push_back(static_cast<std::size_t>(v));
        }
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_piece = 0;
  for (std::size_t c = 0; c < pieces.size(); ++c) {
    std::vector<double> restricted(verts.size(), 0.0);
    double n2 = 0;
    for (auto v : pieces[c]) {
      restricted[v] = phi[v];
      n2 += phi[v] * phi[v];
    }
    double q = detail::twice_energy(all, restricted, w) / n2;
    if (q < best) {
      best = q;
      best_piece = c;
    }
  }
  const auto& piece = pieces[best_piece];
  r.component = piece.size();
  r.component_twice = best;

  // h0: a point (f0, e) if the piece has one, else the first point found
  std::size_t pick = piece.front();
  for (auto v : piece)
    if (verts[v].base == e.identity) {
      pick = v;
      r.h0_identity = true;
      break;
    }
  auto h0inv = e.inv(verts[pick].base);
  auto cp = component_pair(e, F.weights, verts[pick].f, M, budget);
  std::map<LampedVertex<V>, std::size_t> pidx;
  for (std::size_t i = 0; i < cp.P.vertices.size(); ++i) pidx.emplace(cp.P.vertices[i], i);
  std::vector<double> onP(cp.P.vertices.size(), 0.0);
  bool inside = true;
  for (auto v : piece) {
    auto it = pidx.find({verts[v].f, e.mul(verts[v].base, h0inv)});
    if (it == pidx.end()) {
      inside = false;
      break;
    }
    onP[it->second] = phi[v];
  }
  auto th = theta_isomorphism_check(cp);
  if (inside && th.pass) {
    std::vector<double> onG(cp.G.vertices.size(), 0.0);
    for (std::size_t u = 0; u < onG.size(); ++u) onG[u] = onP[th.theta[u]];
    double n2 = 0;
    for (double x : onG) n2 += x * x;
    r.transferred_twice = detail::twice_energy(cp.G, onG, w) / n2;
    r.transfer_checked = true;
  }

  // volume: |supp Psi| <= |theta(Omega) cap supp(psi) h0^{-1}| M^{|B|}
  OmegaImage img;
  try {
    img = omega_image(e, F.J, F.B, omega_budget);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::budget) throw;
    return r;
  }
  r.volume_checked = true;
  for (const auto& [g, pv] : psi)
    if (pv != 0 && img.images.count(e.mul(g, h0inv))) ++r.omega_factor;
  r.volume_bound = static_cast<double>(r.omega_factor) * std::pow(static_cast<double>(M), static_cast<double>(F.B.size()));
  r.volume_holds = static_cast<double>(r.component) <= r.volume_bound;
  return r;
}

// ------------------------------------------------------------------ worked example

struct DinftyExample {
  int n = 0;
  double Q = 0;
  double Q_closed = 0;
  double scaled = 0;     // Q 4^{n-1}
  double log_v = 0;      // log of the volume threshold, |Omega-bar| Q^{-|B_n|}
  std::size_t translates = 0;
};

inline DinftyExample dinfty_worked_example(int n) {
  require(n >= 2 && n <= 12, ErrorKind::out_of_range, "worked example needs 2 <= n <= 12");
  auto t = dinfty_tent(n);
  DinftyExample d;
  d.n = n;
  d.Q = t.quotient;
  d.Q_closed = dinfty_tent_quotient_closed(t.N);
  d.scaled = d.Q * std::ldexp(1.0, 2 * (n - 1));
  d.translates = t.F.weights.size();
  double omega = std::ldexp(1.0, n + 1);
  d.log_v = std::log(omega) + std::ldexp(1.0, n) * std::log(1.0 / d.Q);
  return d;
}

}  // namespace permwalk
