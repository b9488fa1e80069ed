#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "permwalk/families.hpp"
#include "permwalk/graph.hpp"

namespace permwalk {

using LetterLaw = std::vector<std::pair<Letter, double>>;

inline LetterLaw uniform_letters(const GeneratorSet& gens) {
  auto alph = gens.alphabet();
  LetterLaw mu;
  for (auto l : alph) mu.emplace_back(l, 1.0 / static_cast<double>(alph.size()));
  return mu;
}

// Dirichlet energy: 1/2 sum_g sum_x mu(g) |h(x) - h(g.x)|^2.
inline double schreier_energy(const FiniteSchreierGraph& g, const LetterLaw& mu, const std::vector<double>& h) {
  double e = 0;
  for (auto [l, p] : mu)
    for (std::uint32_t x = 0; x < g.size(); ++x) {
      double d = h[x] - h[g.act(l, x)];
      e += p * d * d;
    }
  return 0.5 * e;
}

struct ResistanceProblem {
  std::uint32_t n = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> conductance;  // x < y
  std::vector<std::uint32_t> U, V;

  void add(std::uint32_t x, std::uint32_t y, double c) {
    if (x == y) return;
    conductance[{std::min(x, y), std::max(x, y)}] += c;
  }
  double energy(const std::vector<double>& h) const {
    double e = 0;
    for (auto [xy, c] : conductance) {
      double d = h[xy.first] - h[xy.second];
      e += c * d * d;
    }
    return e;
  }
  void validate() const {
    require(!U.empty() && !V.empty(), ErrorKind::invalid_parameter, "source and sink must be nonempty");
    std::vector<char> mark(n, 0);
    for (auto u : U) {
      require(u < n, ErrorKind::out_of_range, "source outside graph");
      mark[u] = 1;
    }
    for (auto v : V) {
      require(v < n, ErrorKind::out_of_range, "sink outside graph");
      require(!mark[v], ErrorKind::invalid_parameter, "source and sink overlap");
    }
    for (auto [xy, c] : conductance) require(c > 0, ErrorKind::invalid_parameter, "nonpositive conductance");
  }
};

// mu(g)/2 on each oriented letter edge x -> g.x, so that sum_edges c dh^2 is the Dirichlet energy.
inline ResistanceProblem resistance_problem(const FiniteSchreierGraph& g, const LetterLaw& mu,
                                            std::vector<std::uint32_t> U, std::vector<std::uint32_t> V) {
  ResistanceProblem p{g.size(), {}, std::move(U), std::move(V)};
  for (auto [l, w] : mu)
    for (std::uint32_t x = 0; x < g.size(); ++x) p.add(x, g.act(l, x), 0.5 * w);
  p.validate();
  return p;
}

// Conductance 1 on every oriented generator edge x -> g.x.
inline ResistanceProblem unit_problem(const FiniteSchreierGraph& g, std::vector<std::uint32_t> U,
                                      std::vector<std::uint32_t> V) {
  ResistanceProblem p{g.size(), {}, std::move(U), std::move(V)};
  for (std::uint32_t gen = 0; gen < g.generators().size(); ++gen)
    for (std::uint32_t x = 0; x < g.size(); ++x) p.add(x, g.act({gen, 1}, x), 1.0);
  p.validate();
  return p;
}

struct PotentialProfile {
  std::vector<double> h;
  double energy = 0;
  double residual = 0;  // relative to the right-hand side
};

struct ResistanceResult {
  double R = std::numeric_limits<double>::infinity();
  PotentialProfile potential;
  bool connected = false;
  bool iterative = false;
};

inline constexpr std::size_t direct_solver_limit = 50'000;

inline ResistanceResult effective_resistance(const ResistanceProblem& p) {
  p.validate();
  std::vector<int> fixed(p.n, -1);  // -1 interior, 0 sink, 1 source
  for (auto u : p.U) fixed[u] = 1;
  for (auto v : p.V) fixed[v] = 0;

  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(p.n);
  for (auto [xy, c] : p.conductance) {
    adj[xy.first].emplace_back(xy.second, c);
    adj[xy.second].emplace_back(xy.first, c);
  }
  // components decide which interior vertices actually carry current
  std::vector<int> comp(p.n, -1);
  std::vector<std::array<bool, 2>> touches;
  for (std::uint32_t s = 0; s < p.n; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(touches.size());
    touches.push_back({false, false});
    std::vector<std::uint32_t> st{s};
    comp[s] = id;
    while (!st.empty()) {
      auto x = st.back();
      st.pop_back();
      if (fixed[x] >= 0) touches[id][fixed[x]] = true;
      for (auto [y, c] : adj[x])
        if (comp[y] < 0) {
          comp[y] = id;
          st.push_back(y);
        }
    }
  }

  ResistanceResult res;
  auto& h = res.potential.h;
  h.assign(p.n, 0.0);
  std::vector<std::int64_t> index(p.n, -1);
  std::int64_t m = 0;
  for (std::uint32_t x = 0; x < p.n; ++x) {
    if (fixed[x] >= 0) {
      h[x] = fixed[x];
    } else if (touches[comp[x]][0] && touches[comp[x]][1]) {
      index[x] = m++;
    } else {
      h[x] = touches[comp[x]][1] ? 1.0 : 0.0;
    }
  }
  for (std::size_t c = 0; c < touches.size(); ++c) res.connected |= touches[c][0] && touches[c][1];
  if (!res.connected) return res;

  if (m > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::uint32_t x = 0; x < p.n; ++x) {
      if (index[x] < 0) continue;
      double deg = 0;
      for (auto [y, c] : adj[x]) {
        deg += c;
        if (index[y] >= 0)
          trip.emplace_back(index[x], index[y], -c);
        else
          rhs[index[x]] += c * h[y];
      }
      trip.emplace_back(index[x], index[x], deg);
    }
    Eigen::SparseMatrix<double> L(m, m);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd sol;
    if (static_cast<std::size_t>(m) < direct_solver_limit) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
      require(solver.info() == Eigen::Success, ErrorKind::invalid_parameter, "Laplacian factorization failed");
      sol = solver.solve(rhs);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::IncompleteCholesky<double>>
          cg;
      cg.setTolerance(1e-12);
      cg.compute(L);
      sol = cg.solve(rhs);
      res.iterative = true;
    }
    double norm = std::max(rhs.norm(), 1e-300);
    res.potential.residual = (L * sol - rhs).norm() / norm;
    for (std::uint32_t x = 0; x < p.n; ++x)
      if (index[x] >= 0) h[x] = sol[index[x]];
  }
  res.potential.energy = p.energy(h);
  res.R = 1.0 / res.potential.energy;
  return res;
}

// Vertices of g outside `inside`.
inline std::vector<std::uint32_t> complement(std::uint32_t n, const std::vector<std::uint32_t>& inside) {
  std::vector<char> mark(n, 0);
  for (auto x : inside) mark[x] = 1;
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < n; ++x)
    if (!mark[x]) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------- F_h

// exact at the endpoints so forced lamps give exact zeros
inline double xi(double a, int bit) {
  if (a == 0) return bit ? 0.0 : 1.0;
  if (a == 1) return bit ? 1.0 : 0.0;
  return bit ? std::sin(std::numbers::pi * a / 2) : std::cos(std::numbers::pi * a / 2);
}

struct FhReport {
  double quotient = 0;
  std::vector<double> inner;  // <s.F_h, F_h> per letter of mu
  double energy = 0;
  double bound = 0;  // (pi^2/2) E(h,h)
  bool bound_applicable = false;
  bool bound_holds = false;
};

inline void check_potential(const std::vector<double>& h, std::uint32_t n) {
  require(h.size() == n, ErrorKind::invalid_parameter, "potential has wrong length");
  for (double v : h) require(v >= 0 && v <= 1, ErrorKind::invalid_parameter, "potential must take values in [0,1]");
}

inline FhReport fh_rayleigh_closed(const FiniteSchreierGraph& g, const std::vector<double>& h, const LetterLaw& mu) {
  check_potential(h, g.size());
  FhReport r;
  for (auto [l, p] : mu) {
    double prod = 1;
    auto inv = l.inverse();
    for (std::uint32_t v = 0; v < g.size(); ++v) {
      double d = h[g.act(inv, v)] - h[v];
      if (d != 0) prod *= std::cos(std::numbers::pi / 2 * d);
    }
    r.inner.push_back(prod);
    r.quotient += p * (2 - 2 * prod);
  }
  r.energy = schreier_energy(g, mu, h);
  r.bound = std::numbers::pi * std::numbers::pi / 2 * r.energy;
  r.bound_applicable = r.energy <= 0.5;
  r.bound_holds = r.quotient <= r.bound + 1e-12;
  return r;
}

inline constexpr int fh_bruteforce_limit = 14;

// Sum over every lamp configuration of the vertices where h is strictly between 0 and 1.
inline double fh_bruteforce(const FiniteSchreierGraph& g, const std::vector<double>& h, const LetterLaw& mu,
                            double* norm_out = nullptr) {
  check_potential(h, g.size());
  std::vector<std::uint32_t> free;
  std::vector<int> base(g.size(), 0);
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (h[v] > 0 && h[v] < 1) free.push_back(v);
    if (h[v] == 1) base[v] = 1;
  }
  require(free.size() <= fh_bruteforce_limit, ErrorKind::budget,
          std::to_string(free.size()) + " varying vertices exceed the brute-force limit of " +
              std::to_string(fh_bruteforce_limit));
  auto F = [&](const std::vector<int>& eta, auto&& at) {
    double f = 1;
    for (std::uint32_t v = 0; v < g.size() && f != 0; ++v) f *= xi(h[v], eta[at(v)]);
    return f;
  };
  double norm = 0;
  std::vector<double> inner(mu.size(), 0.0);
  std::vector<int> eta = base;
  for (std::uint64_t mask = 0; mask < (1ull << free.size()); ++mask) {
    for (std::size_t i = 0; i < free.size(); ++i) eta[free[i]] = mask >> i & 1;
    double f = F(eta, [](std::uint32_t v) { return v; });
    norm += f * f;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      auto l = mu[k].first;
      // (s.F)(eta) = F(s^{-1}.eta), (s^{-1}.eta)(v) = eta(s.v)
      double sf = F(eta, [&](std::uint32_t v) { return g.act(l, v); });
      inner[k] += sf * f;
    }
  }
  if (norm_out) *norm_out = norm;
  double q = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) q += mu[k].second * (2 * norm - 2 * inner[k]);
  return q / norm;
}

// ---------------------------------------------------------------- set functions

template <class V>
using SetFunction = std::map<std::vector<V>, double>;

template <SchreierAction A>
std::vector<typename A::vertex_type> act_set(const A& a, const Word& w, std::vector<typename A::vertex_type> Y) {
  for (auto& y : Y) y = act_word(a, w, y);
  std::sort(Y.begin(), Y.end());
  return Y;
}

template <class V>
double squared_norm(const SetFunction<V>& F) {
  double s = 0;
  for (const auto& [Y, f] : F) s += f * f;
  return s;
}

// sum_s mu(s) ||s.F - F||^2 / ||F||^2, using <s.F, F> = sum_Z F(Z) F(s.Z).
template <SchreierAction A>
double set_quotient(const A& a, const SetFunction<typename A::vertex_type>& F, const LetterLaw& mu) {
  double n2 = squared_norm(F);
  require(n2 > 0, ErrorKind::invalid_parameter, "zero function has no Rayleigh quotient");
  double num = 0;
  for (auto [l, p] : mu) {
    double inner = 0;
    for (const auto& [Z, f] : F) {
      auto it = F.find(act_set(a, Word{l}, Z));
      if (it != F.end()) inner += f * it->second;
    }
    num += p * (2 * n2 - 2 * inner);
  }
  return num / n2;
}

template <class V>
struct AdmissibleFunction {
  std::vector<V> base;  // A
  SetFunction<V> weights;
  std::map<std::vector<V>, Word> witness;  // Y = witness . A
  std::vector<V> J, B;
};

struct AdmissibleReport {
  bool pass = true;
  std::string failure;
};

template <SchreierAction A>
AdmissibleReport check_admissible(const A& a, const AdmissibleFunction<typename A::vertex_type>& F) {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  auto J = sorted(F.J), B = sorted(F.B);
  AdmissibleReport r;
  for (const auto& [Y, f] : F.weights) {
    auto fail = [&](const std::string& why) {
      if (r.pass) r.failure = why;
      r.pass = false;
    };
    if (!std::includes(Y.begin(), Y.end(), J.begin(), J.end())) fail("support set misses J");
    if (!std::includes(B.begin(), B.end(), Y.begin(), Y.end())) fail("support set leaves B");
    auto it = F.witness.find(Y);
    if (it == F.witness.end())
      fail("support set without translation witness");
    else if (act_set(a, it->second, F.base) != Y)
      fail("witness does not carry A onto the support set");
  }
  return r;
}

// Admissible restriction of F_h: the support of F_h splits into classes connected by single
// generator moves inside the support; classes do not interact in the quotient, so the best
// one is at least as good as F_h itself.
struct AdmissibleExtraction {
  AdmissibleFunction<std::uint32_t> F;
  double quotient = 0;
  double global_quotient = 0;
  std::size_t classes = 0;
};

inline constexpr int admissible_free_limit = 20;

inline AdmissibleExtraction admissible_from_h(const FiniteSchreierGraph& g, const std::vector<double>& h,
                                              std::vector<std::uint32_t> J, std::vector<std::uint32_t> B,
                                              const LetterLaw& mu) {
  check_potential(h, g.size());
  std::sort(J.begin(), J.end());
  std::sort(B.begin(), B.end());
  std::vector<char> inB(g.size(), 0);
  for (auto b : B) inB[b] = 1;
  for (auto j : J) require(h[j] == 1 && inB[j], ErrorKind::precondition_violation, "h must be 1 on J and J inside B");
  std::vector<std::uint32_t> free, ones;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    require(inB[v] || h[v] == 0, ErrorKind::precondition_violation, "h must vanish off B");
    if (h[v] > 0 && h[v] < 1) free.push_back(v);
    if (h[v] == 1) ones.push_back(v);
  }
  require(free.size() <= admissible_free_limit, ErrorKind::budget, "too many varying vertices");

  SetFunction<std::uint32_t> F;
  for (std::uint64_t mask = 0; mask < (1ull << free.size()); ++mask) {
    std::vector<std::uint32_t> Y = ones;
    double f = 1;
    for (auto v : ones) f *= xi(h[v], 1);
    for (std::size_t i = 0; i < free.size(); ++i) {
      int bit = mask >> i & 1;
      if (bit) Y.push_back(free[i]);
      f *= xi(h[free[i]], bit);
    }
    std::sort(Y.begin(), Y.end());
    if (f > 0) F.emplace(std::move(Y), f);
  }

  std::vector<std::vector<std::uint32_t>> keys;
  std::map<std::vector<std::uint32_t>, std::size_t> idx;
  for (const auto& [Y, f] : F) {
    idx[Y] = keys.size();
    keys.push_back(Y);
  }
  std::vector<std::size_t> cls(keys.size(), SIZE_MAX);
  std::vector<Word> reach(keys.size());
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t s = 0; s < keys.size(); ++s) {
    if (cls[s] != SIZE_MAX) continue;
    std::size_t c = members.size();
    members.push_back({s});
    cls[s] = c;
    for (std::size_t q = 0; q < members[c].size(); ++q) {
      auto y = members[c][q];
      for (auto [l, p] : mu) {
        auto it = idx.find(act_set(g, Word{l}, keys[y]));
        if (it == idx.end() || cls[it->second] != SIZE_MAX) continue;
        cls[it->second] = c;
        reach[it->second] = concat(Word{l}, reach[y]);
        members[c].push_back(it->second);
      }
    }
  }

  AdmissibleExtraction out;
  out.global_quotient = set_quotient(g, F, mu);
  out.classes = members.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_c = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    SetFunction<std::uint32_t> Fc;
    for (auto y : members[c]) Fc.emplace(keys[y], F.at(keys[y]));
    double q = set_quotient(g, Fc, mu);
    if (q < best) {
      best = q;
      best_c = c;
    }
  }
  require(best <= out.global_quotient + 1e-9, ErrorKind::precondition_violation,
          "no support class meets the average quotient");
  out.quotient = best;
  auto& A = out.F;
  A.base = keys[members[best_c][0]];
  A.J = J;
  A.B = B;
  for (auto y : members[best_c]) {
    A.weights.emplace(keys[y], F.at(keys[y]));
    A.witness.emplace(keys[y], reach[y]);
  }
  return out;
}

// ---------------------------------------------------------------- explicit test functions

// Reduced word of length ell in s,t whose rightmost letter is t (s = gen 0, t = gen 1).
inline Word dihedral_alternating(std::int64_t ell) {
  Word w;
  for (std::int64_t i = 0; i < ell; ++i) w.push_back({static_cast<std::uint32_t>(i % 2 == 0 ? 1 : 0), 1});
  std::reverse(w.begin(), w.end());
  return w;
}

struct DihedralTent {
  int n = 0;
  std::int64_t N = 0;
  AdmissibleFunction<std::int64_t> F;
  double quotient = 0;
};

// F_n on the marked ray: A = {0..N-1}, N = 2^{n-1}, weight 1 - ell/N on g_ell . A.
inline DihedralTent dinfty_tent(int n) {
  require(n >= 2 && n <= 24, ErrorKind::out_of_range, "dihedral tent needs 2 <= n <= 24");
  DihedralAction ray;
  DihedralTent t;
  t.n = n;
  t.N = std::int64_t{1} << (n - 1);
  auto& F = t.F;
  for (std::int64_t i = 0; i < t.N; ++i) F.base.push_back(i);
  F.J = {0};
  for (std::int64_t i = 0; i < 2 * t.N; ++i) F.B.push_back(i);
  auto Y = F.base;
  for (std::int64_t ell = 0; ell < t.N; ++ell) {
    auto g = dihedral_alternating(ell);
    if (ell > 0) Y = act_set(ray, Word{g.front()}, Y);
    require(F.weights.emplace(Y, 1.0 - static_cast<double>(ell) / static_cast<double>(t.N)).second,
            ErrorKind::precondition_violation, "translates collide");
    F.witness.emplace(Y, g);
  }
  t.quotient = set_quotient(ray, F.weights, uniform_letters(ray.generators()));
  return t;
}

inline double dinfty_tent_quotient_closed(std::int64_t N) {
  return 6.0 / (static_cast<double>(N + 1) * static_cast<double>(2 * N + 1));
}

struct BubbleTent {
  int k = 0;
  long r = 0;
  long radius = 0;  // floor(r/8)
  AdmissibleFunction<BubbleVertex> F;
  std::size_t translates = 0;  // including weight-0 ends
  bool beta_invariant = true;
  double quotient = 0;
  double scaled = 0;  // quotient * r^2
};

inline int bubble_k_of_r(const std::vector<long>& a, long r) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > 2 * r) return static_cast<int>(k + 1);
  fail(ErrorKind::out_of_range, "no a_k exceeds 2r; sequence too short for r = " + std::to_string(r));
}

// F_r(alpha^t . A_r) = 1 - 8|t|/r with A_r = W(k(r), r/8), J = {o, m_k}, B = W(k(r), r/4).
inline BubbleTent bubble_tent_F(const std::vector<long>& a, const std::vector<long>& b, long r, int k = 0) {
  require(r >= 8, ErrorKind::out_of_range, "bubble tent needs r >= 8");
  int kr = bubble_k_of_r(a, r);
  require(k == 0 || k == kr, ErrorKind::invalid_parameter,
          "k = " + std::to_string(k) + " differs from k(r) = " + std::to_string(kr));
  BubbleAction x(a, b);
  require(kr >= 2 && kr <= x.max_level(), ErrorKind::out_of_range, "r too large for the truncation");
  BubbleTent t;
  t.k = kr;
  t.r = r;
  t.radius = r / 8;
  auto A = bubble::w_set(x, kr, static_cast<int>(t.radius)).vertices;
  auto Bset = bubble::w_set(x, kr, static_cast<int>(r / 4)).vertices;
  auto& F = t.F;
  F.base = A;
  F.J = {x.root(), bubble::midpoint(x, kr)};
  std::sort(F.J.begin(), F.J.end());
  F.B = Bset;
  for (long s = -t.radius; s <= t.radius; ++s) {
    Word g = power(Word{{0, 1}}, s);
    auto Y = act_set(x, g, A);
    ++t.translates;
    if (act_set(x, Word{{1, 1}}, Y) != Y) t.beta_invariant = false;
    double w = 1.0 - 8.0 * static_cast<double>(std::abs(s)) / static_cast<double>(r);
    if (w <= 0) continue;
    F.weights.emplace(Y, w);
    F.witness.emplace(Y, g);
  }
  t.quotient = set_quotient(x, F.weights, uniform_letters(x.generators()));
  t.scaled = t.quotient * static_cast<double>(r) * static_cast<double>(r);
  return t;
}

// ---------------------------------------------------------------- NS

struct NSResistance {
  int n = 0;
  double measured = 0;
  double formula = 0;  // sum_j 2^{n-j-2} l_j
  double residual = 0;
};

inline double ns_resistance_formula(const std::vector<long>& l, int n) {
  double s = 0;
  for (int j = 1; j <= n; ++j) s += std::ldexp(static_cast<double>(l[j - 1]), n - j - 2);
  return s;
}

// Unit conductances on the level-(n+1) truncation; the sink is everything outside the copy of S_n
// at the root.  A missing l_{n+1} is taken to be 2.
inline NSResistance ns_resistance(std::vector<long> l, int n) {
  require(n >= 1 && n <= static_cast<int>(l.size()), ErrorKind::out_of_range, "need 1 <= n <= len(l)");
  if (static_cast<int>(l.size()) == n) l.push_back(2);
  auto g = build_ns(l, n + 1);
  NSAction trunc(l, n + 1);
  std::vector<std::uint32_t> sink;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    auto digits = trunc.parse(g.label(v));
    if (static_cast<int>(digits.size()) > n && digits[n] != 0) sink.push_back(v);
  }
  auto res = effective_resistance(unit_problem(g, {g.root()}, sink));
  return {n, res.R, ns_resistance_formula(l, n), res.potential.residual};
}

}  // namespace permwalk
