#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "permwalk/graph.hpp"
#include "permwalk/rng.hpp"
#include "permwalk/words.hpp"

namespace permwalk {

// Z (modulus 0, checked 64-bit arithmetic) or Z/m.
struct LampGroup {
  long modulus = 0;

  long normalize(long c) const {
    if (modulus == 0) return c;
    long r = c % modulus;
    return r < 0 ? r + modulus : r;
  }
  long add(long a, long b) const {
    long r;
    require(!__builtin_add_overflow(a, b, &r), ErrorKind::out_of_range, "lamp value overflow");
    return normalize(r);
  }
  long neg(long a) const {
    require(a != std::numeric_limits<long>::min(), ErrorKind::out_of_range, "lamp value overflow");
    return normalize(-a);
  }
  bool finite() const { return modulus > 0; }
  friend bool operator==(const LampGroup&, const LampGroup&) = default;
};

template <class V>
using LampConfig = std::map<V, long>;  // no zero entries

template <class V>
void add_lamp(LampConfig<V>& f, const V& x, long c, const LampGroup& h) {
  long v = h.add(f.count(x) ? f.at(x) : 0, c);
  if (v == 0)
    f.erase(x);
  else
    f[x] = v;
}

template <class V>
std::vector<V> support(const LampConfig<V>& f) {
  std::vector<V> s;
  for (const auto& [x, c] : f) s.push_back(x);
  return s;
}

// Free reduction; involutive generators cancel with themselves.
inline Word reduce(const Word& w, const GeneratorSet& gens) {
  Word out;
  for (auto l : w) {
    l = gens.normalize(l);
    if (!out.empty() && gens.normalize(out.back().inverse()) == l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

// Base group elements as words with lazy action on an arbitrary Schreier action.
template <SchreierAction A>
class WordHost {
 public:
  using vertex_type = typename A::vertex_type;
  using base_type = Word;

  WordHost(const A& a, LampGroup h) : a_(&a), h_(h) {}

  const A& action() const { return *a_; }
  const LampGroup& lamps() const { return h_; }
  const GeneratorSet& generators() const { return a_->generators(); }
  vertex_type origin() const { return a_->root(); }
  Word identity() const { return {}; }
  Word mul(const Word& g, const Word& h) const { return reduce(concat(g, h), generators()); }
  Word inv(const Word& g) const { return reduce(inverse(g), generators()); }
  Word letter(Letter l) const { return reduce({l}, generators()); }
  vertex_type act(const Word& g, const vertex_type& v) const { return act_word(*a_, g, v); }
  void check(const Word& g) const {
    for (auto l : g)
      require(l.gen < generators().size() && (l.sign == 1 || l.sign == -1), ErrorKind::mismatch,
              "word does not belong to this host");
  }

 private:
  const A* a_;
  LampGroup h_;
};

// Base group elements as permutations of a finite Schreier graph.
class PermHost {
 public:
  using vertex_type = std::uint32_t;
  using base_type = std::vector<std::uint32_t>;

  PermHost(const FiniteSchreierGraph& g, LampGroup h) : g_(&g), h_(h) {}

  const FiniteSchreierGraph& graph() const { return *g_; }
  const LampGroup& lamps() const { return h_; }
  const GeneratorSet& generators() const { return g_->generators(); }
  vertex_type origin() const { return g_->root(); }
  std::uint32_t size() const { return g_->size(); }
  base_type identity() const {
    base_type p(g_->size());
    std::iota(p.begin(), p.end(), 0u);
    return p;
  }
  base_type mul(const base_type& g, const base_type& h) const {
    base_type r(h.size());
    for (std::size_t v = 0; v < h.size(); ++v) r[v] = g[h[v]];
    return r;
  }
  base_type inv(const base_type& g) const {
    base_type r(g.size());
    for (std::uint32_t v = 0; v < g.size(); ++v) r[g[v]] = v;
    return r;
  }
  base_type letter(Letter l) const { return l.sign > 0 ? g_->perm(l.gen) : g_->inverse_perm(l.gen); }
  base_type word(const Word& w) const {
    base_type p = identity();
    for (std::uint32_t v = 0; v < p.size(); ++v) p[v] = act_word(*g_, w, v);
    return p;
  }
  vertex_type act(const base_type& g, vertex_type v) const { return g[v]; }
  void check(const base_type& g) const {
    require(g.size() == g_->size(), ErrorKind::mismatch, "permutation does not belong to this host");
  }

 private:
  const FiniteSchreierGraph* g_;
  LampGroup h_;
};

template <class Host>
struct WreathElement {
  LampConfig<typename Host::vertex_type> lamps;
  typename Host::base_type base;

  friend bool operator==(const WreathElement&, const WreathElement&) = default;
  friend auto operator<=>(const WreathElement& a, const WreathElement& b) {
    if (auto c = a.lamps <=> b.lamps; c != 0) return c;
    return a.base <=> b.base;
  }
};

template <class Host>
WreathElement<Host> wreath_identity(const Host& host) {
  return {{}, host.identity()};
}

template <class Host>
WreathElement<Host> lamp_move(const Host& host, long c) {
  WreathElement<Host> x{{}, host.identity()};
  add_lamp(x.lamps, host.origin(), c, host.lamps());
  return x;
}

template <class Host>
WreathElement<Host> base_move(const Host& host, Letter l) {
  return {{}, host.letter(l)};
}

// (f,g)(f',g') = (f + g.f', g g') with (g.f')(x) = f'(g^{-1} x).
template <class Host>
WreathElement<Host> wreath_mul(const Host& host, const WreathElement<Host>& x, const WreathElement<Host>& y) {
  host.check(x.base);
  host.check(y.base);
  WreathElement<Host> r{x.lamps, host.mul(x.base, y.base)};
  for (const auto& [v, c] : y.lamps) add_lamp(r.lamps, host.act(x.base, v), c, host.lamps());
  return r;
}

// (f,g)^{-1} = (g^{-1}.(-f), g^{-1})
template <class Host>
WreathElement<Host> wreath_inverse(const Host& host, const WreathElement<Host>& x) {
  host.check(x.base);
  WreathElement<Host> r{{}, host.inv(x.base)};
  for (const auto& [v, c] : x.lamps) add_lamp(r.lamps, host.act(r.base, v), host.lamps().neg(c), host.lamps());
  return r;
}

// ------------------------------------------------------------------ measures

template <class Host>
struct Measure {
  std::vector<std::pair<WreathElement<Host>, double>> support;

  double total() const {
    double s = 0;
    for (const auto& [x, p] : support) s += p;
    return s;
  }
  double mass(const WreathElement<Host>& x) const {
    for (const auto& [y, p] : support)
      if (y == x) return p;
    return 0.0;
  }
};

enum class MeasureKind { sow, sws, custom };

inline MeasureKind parse_measure_kind(const std::string& s) {
  if (s == "sow") return MeasureKind::sow;
  if (s == "sws") return MeasureKind::sws;
  if (s == "custom") return MeasureKind::custom;
  fail(ErrorKind::invalid_parameter, "unknown measure '" + s + "' (sow|sws|custom)");
}

template <class Host>
Measure<Host> combine(std::map<WreathElement<Host>, double> acc) {
  Measure<Host> m;
  for (auto& [x, p] : acc)
    if (p > 0) m.support.emplace_back(x, p);
  return m;
}

template <class Host>
void check_symmetric(const Host& host, const Measure<Host>& m, double tol = 1e-12) {
  require(std::abs(m.total() - 1.0) <= 1e-9, ErrorKind::invalid_parameter, "measure does not sum to 1");
  std::map<WreathElement<Host>, double> idx;
  for (const auto& [x, p] : m.support) {
    require(p > 0, ErrorKind::invalid_parameter, "non-positive probability");
    idx[x] += p;
  }
  for (const auto& [x, p] : idx) {
    auto xi = wreath_inverse(host, x);
    auto it = idx.find(xi);
    require(it != idx.end() && std::abs(it->second - p) <= tol, ErrorKind::invalid_parameter,
            "measure is not symmetric");
  }
}

using LampLaw = std::vector<std::pair<long, double>>;
using BaseLaw = std::vector<std::pair<Letter, double>>;

template <class Host>
void check_laws(const Host& host, const LampLaw& eta, const BaseLaw& mu) {
  const auto& h = host.lamps();
  std::map<long, double> e;
  double se = 0, sm = 0;
  for (auto [c, p] : eta) {
    require(p > 0, ErrorKind::invalid_parameter, "lamp law needs positive weights");
    e[h.normalize(c)] += p;
    se += p;
  }
  for (auto [c, p] : e)
    require(std::abs(e[h.neg(c)] - p) <= 1e-12, ErrorKind::invalid_parameter, "lamp law is not symmetric");
  std::map<Letter, double> b;
  const auto& gens = host.generators();
  for (auto [l, p] : mu) {
    require(l.gen < gens.size(), ErrorKind::invalid_parameter, "unknown generator in base law");
    require(p > 0, ErrorKind::invalid_parameter, "base law needs positive weights");
    b[gens.normalize(l)] += p;
    sm += p;
  }
  for (auto [l, p] : b) {
    auto it = b.find(gens.normalize(l.inverse()));
    require(it != b.end() && std::abs(it->second - p) <= 1e-12, ErrorKind::invalid_parameter,
            "base law is not symmetric");
  }
  require(std::abs(se - 1) <= 1e-9 && std::abs(sm - 1) <= 1e-9, ErrorKind::invalid_parameter,
          "laws must sum to 1");
}

// sow: (mu_H + mu_Gamma)/2.  sws: mu_H * mu_Gamma * mu_H, convolved exactly.
template <class Host>
Measure<Host> make_measure(const Host& host, MeasureKind kind, const LampLaw& eta, const BaseLaw& mu) {
  require(kind != MeasureKind::custom, ErrorKind::invalid_parameter, "use make_custom_measure");
  check_laws(host, eta, mu);
  std::map<WreathElement<Host>, double> acc;
  if (kind == MeasureKind::sow) {
    for (auto [c, p] : eta) acc[lamp_move(host, c)] += p / 2;
    for (auto [l, p] : mu) acc[base_move(host, l)] += p / 2;
  } else {
    for (auto [c1, p1] : eta)
      for (auto [l, p] : mu)
        for (auto [c2, p2] : eta) {
          auto x = wreath_mul(host, wreath_mul(host, lamp_move(host, c1), base_move(host, l)), lamp_move(host, c2));
          acc[x] += p1 * p * p2;
        }
  }
  auto m = combine<Host>(std::move(acc));
  check_symmetric(host, m, 1e-12);
  return m;
}

template <class Host>
Measure<Host> make_custom_measure(const Host& host, std::vector<std::pair<WreathElement<Host>, double>> support) {
  std::map<WreathElement<Host>, double> acc;
  for (auto& [x, p] : support) acc[x] += p;
  auto m = combine<Host>(std::move(acc));
  check_symmetric(host, m, 1e-12);
  return m;
}

// Symmetric base law putting equal mass on every letter of the symmetric alphabet.
inline BaseLaw uniform_base_law(const GeneratorSet& gens) {
  auto alph = gens.alphabet();
  BaseLaw mu;
  for (auto l : alph) mu.emplace_back(l, 1.0 / static_cast<double>(alph.size()));
  return mu;
}

// ------------------------------------------------------------------ walks

template <class Host>
class MeasureSampler {
 public:
  explicit MeasureSampler(const Measure<Host>& m) : m_(&m) {
    std::vector<double> w;
    for (const auto& [x, p] : m.support) w.push_back(p);
    dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  template <class Rng>
  std::size_t index(Rng& rng) {
    return dist_(rng);
  }
  template <class Rng>
  const WreathElement<Host>& draw(Rng& rng) {
    return m_->support[dist_(rng)].first;
  }

 private:
  const Measure<Host>* m_;
  std::discrete_distribution<std::size_t> dist_;
};

// S_n = X_n S_{n-1}, S_0 = initial (identity by default).
template <class Host>
std::vector<WreathElement<Host>> simulate_left_walk(const Host& host, const Measure<Host>& m, std::size_t steps,
                                                    std::uint64_t seed, std::uint64_t stream = 0,
                                                    std::optional<WreathElement<Host>> initial = std::nullopt) {
  auto rng = stream_rng(seed, stream);
  MeasureSampler<Host> sampler(m);
  std::vector<WreathElement<Host>> traj{initial ? *initial : wreath_identity(host)};
  traj.reserve(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) traj.push_back(wreath_mul(host, sampler.draw(rng), traj.back()));
  return traj;
}

template <class Host>
std::vector<WreathElement<Host>> simulate_right_walk(const Host& host, const Measure<Host>& m, std::size_t steps,
                                                     std::uint64_t seed, std::uint64_t stream = 0) {
  auto rng = stream_rng(seed, stream);
  MeasureSampler<Host> sampler(m);
  std::vector<WreathElement<Host>> traj{wreath_identity(host)};
  for (std::size_t i = 0; i < steps; ++i) traj.push_back(wreath_mul(host, traj.back(), sampler.draw(rng)));
  return traj;
}

struct McEstimate {
  double estimate = 1.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  std::uint64_t seed = 0;
};

// Dense lamp vector plus base permutation; left multiplication in place.
struct DenseStep {
  std::vector<long> lamps;
  std::vector<std::uint32_t> perm;
  bool pure_lamp = false;
};

inline std::vector<DenseStep> densify(const PermHost& host, const Measure<PermHost>& m) {
  std::vector<DenseStep> out;
  auto id = host.identity();
  for (const auto& [x, p] : m.support) {
    DenseStep d{std::vector<long>(host.size(), 0), x.base, x.base == id};
    for (const auto& [v, c] : x.lamps) d.lamps[v] = c;
    out.push_back(std::move(d));
  }
  return out;
}

// Frequency of S_{2n} = e over independent trials; trial i uses stream i so the estimate does
// not depend on `workers`.
inline McEstimate return_probability_mc(const PermHost& host, const Measure<PermHost>& m, std::size_t n,
                                        std::uint64_t trials, std::uint64_t seed, unsigned workers = 1) {
  require(trials >= 1, ErrorKind::invalid_parameter, "trials must be >= 1");
  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  if (n == 0) {
    est.hits = trials;
    return est;
  }
  const auto steps = densify(host, m);
  const auto& h = host.lamps();
  const std::uint32_t N = host.size();
  std::vector<double> w;
  for (const auto& [x, p] : m.support) w.push_back(p);
  auto run = [&](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t hits = 0;
    std::vector<long> lamps(N), tmp(N);
    std::vector<std::uint32_t> perm(N), ptmp(N);
    std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
    for (std::uint64_t t = lo; t < hi; ++t) {
      auto rng = stream_rng(seed, t);
      dist.reset();
      std::fill(lamps.begin(), lamps.end(), 0);
      std::iota(perm.begin(), perm.end(), 0u);
      for (std::size_t k = 0; k < 2 * n; ++k) {
        const auto& x = steps[dist(rng)];
        if (x.pure_lamp) {
          for (std::uint32_t v = 0; v < N; ++v)
            if (x.lamps[v]) lamps[v] = h.add(lamps[v], x.lamps[v]);
          continue;
        }
        for (std::uint32_t v = 0; v < N; ++v) tmp[x.perm[v]] = lamps[v];
        for (std::uint32_t v = 0; v < N; ++v) {
          lamps[v] = h.add(tmp[v], x.lamps[v]);
          ptmp[v] = x.perm[perm[v]];
        }
        perm.swap(ptmp);
      }
      bool id = true;
      for (std::uint32_t v = 0; v < N && id; ++v) id = lamps[v] == 0 && perm[v] == v;
      hits += id;
    }
    return hits;
  };
  workers = std::max(1u, workers);
  if (workers == 1 || trials < 2 * workers) {
    est.hits = run(0, trials);
  } else {
    std::vector<std::uint64_t> part(workers, 0);
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) {
      std::uint64_t lo = trials * i / workers, hi = trials * (i + 1) / workers;
      pool.emplace_back([&, i, lo, hi] { part[i] = run(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (auto c : part) est.hits += c;
  }
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(trials);
  est.stderr_ = std::sqrt(est.estimate * (1 - est.estimate) / static_cast<double>(trials));
  return est;
}

struct ExactReturn {
  std::vector<double> probability;  // q^{(2n)}(e), n = 0..nmax
  std::vector<double> mass;         // total mass after each even step
  std::size_t max_states = 0;
  std::size_t base_order = 0;
};

// Elements of the permutation group generated by the host's generators.
inline std::vector<std::vector<std::uint32_t>> base_group(const PermHost& host, std::size_t budget) {
  std::vector<std::vector<std::uint32_t>> elems{host.identity()};
  std::set<std::vector<std::uint32_t>> seen{elems[0]};
  const auto alph = host.generators().alphabet();
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (auto l : alph) {
      auto p = host.mul(host.letter(l), elems[i]);
      if (seen.insert(p).second) {
        elems.push_back(std::move(p));
        require(elems.size() <= budget, ErrorKind::budget, "base group exceeds " + std::to_string(budget));
      }
    }
  return elems;
}

// Exact law of S_{2n} by sparse convolution over reachable states.
inline ExactReturn return_probability_exact(const PermHost& host, const Measure<PermHost>& m, std::size_t nmax,
                                            std::size_t max_states = 1'000'000) {
  const auto& h = host.lamps();
  const std::uint32_t N = host.size();
  auto group = base_group(host, max_states);
  if (h.finite()) {
    double states = std::pow(static_cast<double>(h.modulus), N) * static_cast<double>(group.size());
    require(states <= static_cast<double>(max_states), ErrorKind::budget,
            "state space " + std::to_string(static_cast<long double>(states)) + " exceeds " +
                std::to_string(max_states));
  }
  std::map<std::vector<std::uint32_t>, std::uint32_t> gidx;
  for (std::uint32_t i = 0; i < group.size(); ++i) gidx[group[i]] = i;
  auto steps = densify(host, m);
  std::vector<std::vector<std::uint32_t>> table(steps.size(), std::vector<std::uint32_t>(group.size()));
  for (std::size_t s = 0; s < steps.size(); ++s)
    for (std::uint32_t j = 0; j < group.size(); ++j) {
      auto it = gidx.find(host.mul(steps[s].perm, group[j]));
      require(it != gidx.end(), ErrorKind::mismatch, "measure base element outside the generated group");
      table[s][j] = it->second;
    }

  using Key = std::vector<long>;  // lamps..., base index
  using Dist = std::unordered_map<Key, double, boost::hash<Key>>;
  Dist cur;
  Key e(N + 1, 0);
  cur[e] = 1.0;
  ExactReturn out;
  out.base_order = group.size();
  out.probability.push_back(1.0);
  out.mass.push_back(1.0);
  Key nk(N + 1);
  for (std::size_t step = 1; step <= 2 * nmax; ++step) {
    Dist next;
    next.reserve(cur.size() * 2);
    for (const auto& [k, p] : cur)
      for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& x = steps[s];
        for (std::uint32_t v = 0; v < N; ++v) nk[x.perm[v]] = k[v];
        for (std::uint32_t v = 0; v < N; ++v) nk[v] = h.add(nk[v], x.lamps[v]);
        nk[N] = table[s][static_cast<std::size_t>(k[N])];
        next[nk] += p * m.support[s].second;
      }
    cur.swap(next);
    out.max_states = std::max(out.max_states, cur.size());
    require(cur.size() <= max_states, ErrorKind::budget,
            "reachable states " + std::to_string(cur.size()) + " exceed " + std::to_string(max_states));
    if (step % 2 == 0) {
      double mass = 0;
      for (const auto& [k, p] : cur) mass += p;
      auto it = cur.find(e);
      out.probability.push_back(it == cur.end() ? 0.0 : it->second);
      out.mass.push_back(mass);
    }
  }
  return out;
}

// ------------------------------------------------------------------ lamps control inverted orbits

// A trajectory letter: lamp +-1 at the origin, or a base generator.
struct TrajectoryLetter {
  bool lamp = false;
  int lamp_sign = 1;
  Letter base{};
};

struct ControlReport {
  bool pass = true;
  std::size_t steps_checked = 0;
  std::size_t first_violation = 0;  // step index, valid when !pass
  std::string message;
};

template <class V>
using SupportFamily = std::set<std::vector<V>>;  // sorted supports

// Checks O(g_m ... g_1; J) in supp(Upsilon_m) = g_m...g_1 . supp(Upsilon_0) for every m.
template <SchreierAction A>
ControlReport controls_inverted_check(const WordHost<A>& host, const SupportFamily<typename A::vertex_type>& family,
                                      const std::vector<typename A::vertex_type>& J,
                                      const std::vector<TrajectoryLetter>& letters,
                                      const LampConfig<typename A::vertex_type>& upsilon0) {
  using V = typename A::vertex_type;
  ControlReport rep;
  WreathElement<WordHost<A>> cur{upsilon0, {}};
  auto supp0 = support(upsilon0);
  require(family.count(supp0), ErrorKind::precondition_violation, "initial support outside the family");
  Word formal;  // g_m ... g_1 restricted to base letters
  for (std::size_t k = 0; k <= letters.size(); ++k) {
    if (k > 0) {
      const auto& g = letters[k - 1];
      WreathElement<WordHost<A>> step =
          g.lamp ? lamp_move(host, g.lamp_sign) : base_move(host, g.base);
      cur = wreath_mul(host, step, cur);
      if (!g.lamp) formal.insert(formal.begin(), g.base);
    }
    auto supp = support(cur.lamps);
    require(family.count(supp), ErrorKind::precondition_violation,
            "lamp support left the admissible family at step " + std::to_string(k));
    ++rep.steps_checked;
    std::vector<V> moved;
    for (const auto& x : supp0) moved.push_back(act_word(host.action(), formal, x));
    std::sort(moved.begin(), moved.end());
    bool ok = moved == supp;
    auto orbit = inverted_orbit(host.action(), formal, J);
    for (const auto& x : orbit) ok = ok && std::binary_search(supp.begin(), supp.end(), x);
    if (!ok && rep.pass) {
      rep.pass = false;
      rep.first_violation = k;
      rep.message = "inverted orbit not covered at step " + std::to_string(k);
    }
  }
  return rep;
}

// Uniform letters with rejection so that every lamp support stays in the family.
template <SchreierAction A, class Rng>
std::vector<TrajectoryLetter> random_constrained_trajectory(const WordHost<A>& host,
                                                            const SupportFamily<typename A::vertex_type>& family,
                                                            const LampConfig<typename A::vertex_type>& upsilon0,
                                                            std::size_t length, Rng& rng) {
  std::vector<TrajectoryLetter> choices{{true, 1, {}}, {true, -1, {}}};
  for (auto l : host.generators().alphabet()) choices.push_back({false, 1, l});
  WreathElement<WordHost<A>> cur{upsilon0, {}};
  std::vector<TrajectoryLetter> out;
  std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
  while (out.size() < length) {
    bool moved = false;
    for (int tries = 0; tries < 1000 && !moved; ++tries) {
      const auto& g = choices[pick(rng)];
      auto step = g.lamp ? lamp_move(host, g.lamp_sign) : base_move(host, g.base);
      auto next = wreath_mul(host, step, cur);
      if (family.count(support(next.lamps))) {
        cur = std::move(next);
        out.push_back(g);
        moved = true;
      }
    }
    require(moved, ErrorKind::precondition_violation, "no admissible continuation");
  }
  return out;
}

}  // namespace permwalk
