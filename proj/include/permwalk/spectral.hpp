#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "permwalk/graph.hpp"

namespace permwalk {

// Explicit finite Markov kernel: rows[x] lists (y, P(x,y)); loops allowed.
struct FiniteKernel {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  std::vector<std::string> labels;

  std::uint32_t size() const { return static_cast<std::uint32_t>(rows.size()); }

  void validate(double tol = 1e-12) const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> P;
    for (std::uint32_t x = 0; x < size(); ++x) {
      double s = 0;
      for (auto [y, p] : rows[x]) {
        require(y < size() && p >= 0, ErrorKind::invalid_parameter, "bad kernel entry");
        P[{x, y}] += p;
        s += p;
      }
      require(std::abs(s - 1) <= 1e-9, ErrorKind::invalid_parameter, "kernel row does not sum to 1");
    }
    for (auto [xy, p] : P) {
      auto it = P.find({xy.second, xy.first});
      require(it != P.end() && std::abs(it->second - p) <= tol, ErrorKind::invalid_parameter,
              "kernel is not symmetric");
    }
  }
};

// x -> s.x with probability mu(s) on a finite Schreier graph.
inline FiniteKernel kernel_from_graph(const FiniteSchreierGraph& g,
                                      const std::vector<std::pair<Letter, double>>& mu) {
  FiniteKernel k;
  k.rows.resize(g.size());
  for (std::uint32_t x = 0; x < g.size(); ++x) {
    for (auto [l, p] : mu) k.rows[x].emplace_back(g.act(l, x), p);
    k.labels.push_back(g.label(x));
  }
  return k;
}

// Uniform law over the symmetric alphabet.
inline FiniteKernel simple_kernel(const FiniteSchreierGraph& g) {
  auto alph = g.generators().alphabet();
  std::vector<std::pair<Letter, double>> mu;
  for (auto l : alph) mu.emplace_back(l, 1.0 / static_cast<double>(alph.size()));
  return kernel_from_graph(g, mu);
}

// zeta = |I|^{-1} sum_i eta_i, eta_i moving coordinate i.
struct ProductMove {
  std::size_t coordinate;
  long step;
  double p;
};

inline std::vector<ProductMove> product_chain_zeta(const std::vector<std::pair<long, double>>& eta, std::size_t I,
                                                   long modulus = 0) {
  require(I >= 1, ErrorKind::invalid_parameter, "empty index set");
  std::map<long, double> e;
  for (auto [h, p] : eta) {
    require(p > 0, ErrorKind::invalid_parameter, "eta needs positive weights");
    e[modulus ? ((h % modulus) + modulus) % modulus : h] += p;
  }
  for (auto [h, p] : e) {
    long inv = modulus ? (modulus - h) % modulus : -h;
    require(e.count(inv) && std::abs(e[inv] - p) <= 1e-12, ErrorKind::invalid_parameter, "eta is not symmetric");
  }
  std::vector<ProductMove> out;
  for (std::size_t i = 0; i < I; ++i)
    for (auto [h, p] : e) out.push_back({i, h, p / static_cast<double>(I)});
  return out;
}

// Z_2^d with zeta = uniform coordinate flips; state = bit mask.
inline FiniteKernel hypercube_kernel(int d) {
  require(d >= 1 && d <= 20, ErrorKind::invalid_parameter, "dimension out of range");
  auto zeta = product_chain_zeta({{1, 1.0}}, static_cast<std::size_t>(d), 2);
  FiniteKernel k;
  k.rows.resize(std::size_t{1} << d);
  for (std::uint32_t x = 0; x < k.rows.size(); ++x) {
    for (const auto& m : zeta) k.rows[x].emplace_back(x ^ (1u << m.coordinate), m.p);
    std::string lab;
    for (int i = 0; i < d; ++i) lab += ((x >> i) & 1) ? '1' : '0';
    k.labels.push_back(lab);
  }
  return k;
}

inline FiniteKernel cycle_kernel(std::uint32_t n) {
  require(n >= 3, ErrorKind::invalid_parameter, "cycle needs n >= 3");
  FiniteKernel k;
  k.rows.resize(n);
  for (std::uint32_t x = 0; x < n; ++x) {
    k.rows[x] = {{(x + 1) % n, 0.5}, {(x + n - 1) % n, 0.5}};
    k.labels.push_back(std::to_string(x));
  }
  return k;
}

using LatticePoint = std::vector<long>;

// Moves of Z^d under zeta built from eta uniform on {+-1}.
inline std::vector<std::pair<LatticePoint, double>> lattice_moves(const LatticePoint& x) {
  std::vector<std::pair<LatticePoint, double>> out;
  double p = 1.0 / (2.0 * static_cast<double>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (long s : {1L, -1L}) {
      auto y = x;
      y[i] += s;
      out.emplace_back(std::move(y), p);
    }
  return out;
}

// ------------------------------------------------------------------ energies

template <class V>
using LazyKernel = std::function<std::vector<std::pair<V, double>>(const V&)>;

// 1/2 sum_{x,y} |f(y) - f(x)|^2 P(x,y) for a symmetric kernel and finitely supported f.
template <class V>
double dirichlet_energy(const LazyKernel<V>& P, const std::map<V, double>& f) {
  long double inside = 0, outside = 0;
  for (const auto& [x, fx] : f)
    for (const auto& [y, p] : P(x)) {
      auto it = f.find(y);
      if (it == f.end())
        outside += static_cast<long double>(fx) * fx * p;
      else
        inside += static_cast<long double>(it->second - fx) * (it->second - fx) * p;
    }
  return static_cast<double>(inside / 2 + outside);
}

inline double dirichlet_energy(const FiniteKernel& K, const std::vector<double>& f) {
  require(f.size() == K.size(), ErrorKind::invalid_parameter, "function size mismatch");
  long double e = 0;
  for (std::uint32_t x = 0; x < K.size(); ++x)
    for (auto [y, p] : K.rows[x]) e += static_cast<long double>(f[y] - f[x]) * (f[y] - f[x]) * p;
  return static_cast<double>(e / 2);
}

// <f, (I - P) f>
inline double quadratic_form(const FiniteKernel& K, const std::vector<double>& f) {
  long double s = 0;
  for (std::uint32_t x = 0; x < K.size(); ++x) {
    long double pf = 0;
    for (auto [y, p] : K.rows[x]) pf += p * f[y];
    s += f[x] * (f[x] - pf);
  }
  return static_cast<double>(s);
}

struct DirichletEigen {
  double lambda = 0;
  double residual = 0;
  std::vector<double> vector;
};

// Lowest eigenvalue of I - P restricted to Omega (Dirichlet condition outside).
template <class V>
DirichletEigen lambda_dirichlet(const LazyKernel<V>& P, const std::vector<V>& omega) {
  require(!omega.empty(), ErrorKind::invalid_parameter, "empty region");
  std::map<V, int> idx;
  for (const auto& x : omega) idx.emplace(x, static_cast<int>(idx.size()));
  require(idx.size() == omega.size(), ErrorKind::invalid_parameter, "region has repeated points");
  const int n = static_cast<int>(omega.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& x : omega) {
    int i = idx.at(x);
    trip.emplace_back(i, i, 1.0);
    for (const auto& [y, p] : P(x)) {
      auto it = idx.find(y);
      if (it != idx.end()) trip.emplace_back(i, it->second, -p);
    }
  }
  DirichletEigen out;
  if (n <= 2000) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : trip) M(t.row(), t.col()) += t.value();
    M = (M + M.transpose()) / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    require(es.info() == Eigen::Success, ErrorKind::domain_violation, "eigensolver failed");
    out.lambda = std::max(0.0, es.eigenvalues()(0));
    Eigen::VectorXd v = es.eigenvectors().col(0);
    out.residual = (M * v - es.eigenvalues()(0) * v).norm();
    out.vector.assign(v.data(), v.data() + n);
    return out;
  }
  // shifted inverse iteration
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> Ms = M;
  for (int i = 0; i < n; ++i) Ms.coeffRef(i, i) += 1e-9;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ms);
  require(ldlt.info() == Eigen::Success, ErrorKind::domain_violation, "factorization failed");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lam = 0;
  for (int it = 0; it < 500; ++it) {
    v = ldlt.solve(v).normalized();
    Eigen::VectorXd Mv = M * v;
    lam = v.dot(Mv);
    out.residual = (Mv - lam * v).norm();
    if (out.residual <= 1e-10) break;
  }
  out.lambda = std::max(0.0, lam);
  out.vector.assign(v.data(), v.data() + n);
  return out;
}

inline LazyKernel<std::uint32_t> lazy(const FiniteKernel& K) {
  return [&K](const std::uint32_t& x) { return K.rows.at(x); };
}

inline DirichletEigen lambda_dirichlet(const FiniteKernel& K, const std::vector<std::uint32_t>& omega) {
  return lambda_dirichlet<std::uint32_t>(lazy(K), omega);
}

// phi(boundary) = sum over x in Omega of the mass of moves leaving Omega.
template <class V>
double boundary_measure(const LazyKernel<V>& P, const std::vector<V>& omega) {
  std::set<V> in(omega.begin(), omega.end());
  long double b = 0;
  for (const auto& x : in)
    for (const auto& [y, p] : P(x))
      if (!in.count(y)) b += p;
  return static_cast<double>(b);
}

// ------------------------------------------------------------------ profiles

enum class Provenance { exhaustive, candidate };

inline const char* to_string(Provenance p) { return p == Provenance::exhaustive ? "exhaustive" : "candidate"; }

struct ProfileTable {
  std::vector<long> volumes;  // 1..vmax
  std::vector<double> lambda1, lambda2;
  Provenance provenance = Provenance::exhaustive;

  double at1(long v) const { return lambda1.at(index(v)); }
  double at2(long v) const { return lambda2.at(index(v)); }
  std::size_t index(long v) const {
    auto it = std::find(volumes.begin(), volumes.end(), v);
    require(it != volumes.end(), ErrorKind::out_of_range, "volume not in table");
    return static_cast<std::size_t>(it - volumes.begin());
  }
};

namespace detail {

// Connected induced subsets of size <= vmax containing `root` as their minimum (ESU enumeration).
template <class F>
void connected_subsets(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t root, std::size_t vmax,
                       F&& visit) {
  std::vector<std::uint32_t> sub{root};
  std::vector<char> in_sub(adj.size(), 0);
  in_sub[root] = 1;
  auto adjacent_to_sub = [&](std::uint32_t u) {
    for (auto s : sub)
      if (std::binary_search(adj[s].begin(), adj[s].end(), u)) return true;
    return false;
  };
  std::function<void(std::vector<std::uint32_t>)> extend = [&](std::vector<std::uint32_t> ext) {
    visit(sub);
    if (sub.size() == vmax) return;
    while (!ext.empty()) {
      auto w = ext.back();
      ext.pop_back();
      std::vector<std::uint32_t> next = ext;
      for (auto u : adj[w])
        if (u > root && !in_sub[u] && !adjacent_to_sub(u) && std::find(next.begin(), next.end(), u) == next.end())
          next.push_back(u);
      sub.push_back(w);
      in_sub[w] = 1;
      extend(std::move(next));
      sub.pop_back();
      in_sub[w] = 0;
    }
  };
  std::vector<std::uint32_t> ext;
  for (auto u : adj[root])
    if (u > root) ext.push_back(u);
  extend(std::move(ext));
}

}  // namespace detail

// Exact Lambda_1 and Lambda_2 for v = 1..vmax by enumerating connected subsets (disconnected
// sets never beat their best component).
inline ProfileTable profile_exact(const FiniteKernel& K, std::size_t vmax, std::size_t budget = 5'000'000,
                                  unsigned workers = 1, bool with_lambda2 = true) {
  require(vmax >= 1, ErrorKind::invalid_parameter, "vmax must be >= 1");
  vmax = std::min<std::size_t>(vmax, K.size());
  std::vector<std::vector<std::uint32_t>> adj(K.size());
  for (std::uint32_t x = 0; x < K.size(); ++x) {
    for (auto [y, p] : K.rows[x])
      if (y != x && p > 0) adj[x].push_back(y), adj[y].push_back(x);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  auto P = lazy(K);
  struct Best {
    std::vector<double> l1, l2;
    std::size_t count = 0;
  };
  auto search = [&](std::uint32_t lo, std::uint32_t hi, Best& best) {
    best.l1.assign(vmax + 1, INFINITY);
    best.l2.assign(vmax + 1, INFINITY);
    for (std::uint32_t root = lo; root < hi; ++root) {
      detail::connected_subsets(adj, root, vmax, [&](const std::vector<std::uint32_t>& s) {
        require(++best.count <= budget, ErrorKind::budget,
                "more than " + std::to_string(budget) + " connected subsets; use candidate mode");
        std::size_t v = s.size();
        best.l1[v] = std::min(best.l1[v], boundary_measure<std::uint32_t>(P, s) / static_cast<double>(v));
        if (with_lambda2) best.l2[v] = std::min(best.l2[v], lambda_dirichlet(K, s).lambda);
      });
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, K.size()));
  std::vector<Best> parts(workers);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < workers; ++i) {
    std::uint32_t lo = static_cast<std::uint32_t>(std::size_t{K.size()} * i / workers);
    std::uint32_t hi = static_cast<std::uint32_t>(std::size_t{K.size()} * (i + 1) / workers);
    if (workers == 1)
      search(lo, hi, parts[i]);
    else
      pool.emplace_back([&, i, lo, hi] { search(lo, hi, parts[i]); });
  }
  for (auto& t : pool) t.join();
  std::size_t total = 0;
  for (const auto& b : parts) total += b.count;
  require(total <= budget, ErrorKind::budget, "subset budget exceeded");
  ProfileTable t;
  double m1 = INFINITY, m2 = INFINITY;
  for (std::size_t v = 1; v <= vmax; ++v) {
    for (const auto& b : parts) {
      m1 = std::min(m1, b.l1[v]);
      m2 = std::min(m2, b.l2[v]);
    }
    t.volumes.push_back(static_cast<long>(v));
    t.lambda1.push_back(m1);
    t.lambda2.push_back(m2);
  }
  t.provenance = Provenance::exhaustive;
  return t;
}

// Upper bounds from a caller-supplied family of regions.
template <class V>
ProfileTable profile_candidates(const LazyKernel<V>& P, const std::vector<std::vector<V>>& family, long vmax) {
  require(vmax >= 1, ErrorKind::invalid_parameter, "vmax must be >= 1");
  std::vector<double> l1(vmax + 1, INFINITY), l2(vmax + 1, INFINITY);
  for (const auto& omega : family) {
    long v = static_cast<long>(omega.size());
    if (v == 0 || v > vmax) continue;
    l1[v] = std::min(l1[v], boundary_measure(P, omega) / static_cast<double>(v));
    l2[v] = std::min(l2[v], lambda_dirichlet(P, omega).lambda);
  }
  ProfileTable t;
  t.provenance = Provenance::candidate;
  double m1 = INFINITY, m2 = INFINITY;
  for (long v = 1; v <= vmax; ++v) {
    m1 = std::min(m1, l1[v]);
    m2 = std::min(m2, l2[v]);
    t.volumes.push_back(v);
    t.lambda1.push_back(m1);
    t.lambda2.push_back(m2);
  }
  return t;
}

struct CheegerReport {
  bool pass = true;
  std::vector<long> checked;
  std::string message;
};

// 1/2 Lambda_1^2 <= Lambda_2 <= Lambda_1 on common volumes.
inline CheegerReport cheeger_check(const ProfileTable& t1, const ProfileTable& t2, double tol = 1e-10) {
  require(t1.provenance == Provenance::exhaustive && t2.provenance == Provenance::exhaustive,
          ErrorKind::precondition_violation, "Cheeger comparison needs exhaustive tables");
  CheegerReport r;
  for (std::size_t i = 0; i < t1.volumes.size(); ++i) {
    long v = t1.volumes[i];
    auto it = std::find(t2.volumes.begin(), t2.volumes.end(), v);
    if (it == t2.volumes.end()) continue;
    double l1 = t1.lambda1[i], l2 = t2.lambda2[it - t2.volumes.begin()];
    r.checked.push_back(v);
    if (0.5 * l1 * l1 > l2 + tol || l2 > l1 + tol) {
      if (r.pass) r.message = "violated at v=" + std::to_string(v);
      r.pass = false;
    }
  }
  return r;
}

// inf{v : Lambda_1(v) <= 1/t}; nullopt when the table does not reach that level.
inline std::optional<long> folner(const ProfileTable& t1, double t) {
  require(t1.provenance == Provenance::exhaustive, ErrorKind::precondition_violation, "needs an exhaustive table");
  require(t > 0, ErrorKind::invalid_parameter, "t must be positive");
  for (std::size_t i = 0; i < t1.volumes.size(); ++i)
    if (t1.lambda1[i] <= 1.0 / t + 1e-12) return t1.volumes[i];
  return std::nullopt;
}

inline double harper_bound(long v, int d) { return 1.0 - std::log2(static_cast<double>(v)) / d; }

// Box {0..k-1}^d in Z^d.
inline std::vector<LatticePoint> lattice_box(int d, long k) {
  std::vector<LatticePoint> out{{}};
  for (int i = 0; i < d; ++i) {
    std::vector<LatticePoint> next;
    for (const auto& p : out)
      for (long j = 0; j < k; ++j) {
        auto q = p;
        q.push_back(j);
        next.push_back(std::move(q));
      }
    out.swap(next);
  }
  return out;
}

}  // namespace permwalk
