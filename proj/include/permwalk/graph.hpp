#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "permwalk/core.hpp"

namespace permwalk {

// Anything that evaluates generator letters on vertices.
template <class A>
concept SchreierAction = requires(const A& a, const typename A::vertex_type& v, Letter l) {
  typename A::vertex_type;
  { a.act(l, v) } -> std::same_as<typename A::vertex_type>;
  { a.root() } -> std::same_as<typename A::vertex_type>;
  { a.generators() } -> std::same_as<const GeneratorSet&>;
  { a.label(v) } -> std::same_as<std::string>;
};

// w = w1 ... wl acts as w1(w2(...(wl x))).
template <SchreierAction A>
typename A::vertex_type act_word(const A& a, const Word& w, typename A::vertex_type x) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = a.act(*it, x);
  return x;
}

class FiniteSchreierGraph {
 public:
  using vertex_type = std::uint32_t;

  FiniteSchreierGraph() = default;
  FiniteSchreierGraph(GeneratorSet gens, std::vector<std::vector<vertex_type>> perms, vertex_type root,
                      std::vector<std::string> labels = {})
      : gens_(std::move(gens)), perm_(std::move(perms)), root_(root), labels_(std::move(labels)) {
    gens_.validate();
    require(perm_.size() == gens_.size(), ErrorKind::invalid_parameter, "one permutation per generator");
    n_ = perm_.empty() ? 0 : static_cast<vertex_type>(perm_[0].size());
    require(n_ > 0, ErrorKind::invalid_parameter, "empty graph");
    require(root_ < n_, ErrorKind::out_of_range, "root outside vertex range");
    require(labels_.empty() || labels_.size() == n_, ErrorKind::invalid_parameter, "label table size");
    inv_.assign(perm_.size(), std::vector<vertex_type>(n_, n_));
    for (std::size_t g = 0; g < perm_.size(); ++g) {
      require(perm_[g].size() == n_, ErrorKind::invalid_parameter, "permutation length mismatch");
      for (vertex_type v = 0; v < n_; ++v) {
        vertex_type img = perm_[g][v];
        require(img < n_ && inv_[g][img] == n_, ErrorKind::invalid_parameter,
                "generator " + gens_.names[g] + " is not a bijection");
        inv_[g][img] = v;
      }
      if (gens_.involution[g])
        for (vertex_type v = 0; v < n_; ++v)
          require(perm_[g][perm_[g][v]] == v, ErrorKind::invalid_parameter,
                  "generator " + gens_.names[g] + " flagged as involution");
    }
    for (vertex_type v = 0; v < labels_.size(); ++v) {
      require(labels_[v].find('\n') == std::string::npos, ErrorKind::invalid_label, "newline in label");
      require(label_index_.emplace(labels_[v], v).second, ErrorKind::invalid_label,
              "duplicate label " + labels_[v]);
    }
  }

  vertex_type size() const { return n_; }
  vertex_type root() const { return root_; }
  const GeneratorSet& generators() const { return gens_; }
  const std::vector<vertex_type>& perm(std::size_t g) const { return perm_.at(g); }
  const std::vector<vertex_type>& inverse_perm(std::size_t g) const { return inv_.at(g); }
  bool has_labels() const { return !labels_.empty(); }

  vertex_type act(Letter l, vertex_type v) const { return l.sign > 0 ? perm_[l.gen][v] : inv_[l.gen][v]; }

  std::string label(vertex_type v) const { return labels_.empty() ? std::to_string(v) : labels_.at(v); }

  vertex_type find(const std::string& label) const {
    if (labels_.empty()) {
      auto v = parse_int_list(label);
      require(v.size() == 1 && v[0] >= 0 && v[0] < n_, ErrorKind::invalid_label, "no vertex " + label);
      return static_cast<vertex_type>(v[0]);
    }
    auto it = label_index_.find(label);
    require(it != label_index_.end(), ErrorKind::invalid_label, "no vertex labelled " + label);
    return it->second;
  }
  bool contains(const std::string& label) const {
    return labels_.empty() ? false : label_index_.count(label) > 0;
  }

  // Undirected neighbours through every generator in both directions (loops included).
  template <class F>
  void for_each_neighbor(vertex_type v, F&& f) const {
    for (std::size_t g = 0; g < perm_.size(); ++g) {
      f(perm_[g][v]);
      f(inv_[g][v]);
    }
  }

  friend bool operator==(const FiniteSchreierGraph& a, const FiniteSchreierGraph& b) {
    return a.gens_ == b.gens_ && a.perm_ == b.perm_ && a.root_ == b.root_ && a.labels_ == b.labels_;
  }

 private:
  GeneratorSet gens_;
  std::vector<std::vector<vertex_type>> perm_, inv_;
  vertex_type n_ = 0;
  vertex_type root_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, vertex_type> label_index_;
};

inline std::vector<int> bfs_distances(const FiniteSchreierGraph& g, std::uint32_t src) {
  std::vector<int> d(g.size(), -1);
  std::vector<std::uint32_t> queue{src};
  d[src] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto v = queue[i];
    g.for_each_neighbor(v, [&](std::uint32_t u) {
      if (d[u] < 0) {
        d[u] = d[v] + 1;
        queue.push_back(u);
      }
    });
  }
  return d;
}

inline std::vector<int> bfs_distances(const FiniteSchreierGraph& g, const std::vector<std::uint32_t>& sources) {
  std::vector<int> d(g.size(), -1);
  std::vector<std::uint32_t> queue;
  for (auto s : sources)
    if (d[s] < 0) d[s] = 0, queue.push_back(s);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto v = queue[i];
    g.for_each_neighbor(v, [&](std::uint32_t u) {
      if (d[u] < 0) {
        d[u] = d[v] + 1;
        queue.push_back(u);
      }
    });
  }
  return d;
}

inline std::size_t component_count(const FiniteSchreierGraph& g) {
  std::vector<char> seen(g.size(), 0);
  std::size_t count = 0;
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    ++count;
    std::vector<std::uint32_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      g.for_each_neighbor(v, [&](std::uint32_t u) {
        if (!seen[u]) seen[u] = 1, stack.push_back(u);
      });
    }
  }
  return count;
}

// All-pairs BFS; double sweeps are not exact on general graphs.
inline int diameter(const FiniteSchreierGraph& g) {
  auto comps = component_count(g);
  require(comps == 1, ErrorKind::disconnected, "graph has " + std::to_string(comps) + " components");
  int best = 0;
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    auto d = bfs_distances(g, s);
    best = std::max(best, *std::max_element(d.begin(), d.end()));
  }
  return best;
}

template <class V>
struct Ball {
  std::vector<V> vertices;  // sorted
  std::map<V, int> distance;
};

// Exact metric ball, lazily explored through both directions of every generator.
template <SchreierAction A>
Ball<typename A::vertex_type> ball(const A& a, const std::vector<typename A::vertex_type>& centers, int r) {
  using V = typename A::vertex_type;
  require(r >= 0, ErrorKind::invalid_parameter, "negative radius");
  Ball<V> out;
  std::deque<V> queue;
  for (const auto& c : centers)
    if (out.distance.emplace(c, 0).second) queue.push_back(c);
  const auto alphabet = a.generators().alphabet();
  while (!queue.empty()) {
    V v = queue.front();
    queue.pop_front();
    int dv = out.distance.at(v);
    if (dv == r) continue;
    for (auto l : alphabet) {
      V u = a.act(l, v);
      if (out.distance.emplace(u, dv + 1).second) queue.push_back(u);
    }
  }
  for (auto& [v, d] : out.distance) out.vertices.push_back(v);
  return out;
}

template <SchreierAction A>
Ball<typename A::vertex_type> ball(const A& a, const typename A::vertex_type& center, int r) {
  return ball(a, std::vector<typename A::vertex_type>{center}, r);
}

// ---- graph text format v1 ----

inline std::string serialize(const FiniteSchreierGraph& g) {
  std::ostringstream out;
  out << "schreier v1\n";
  out << "vertices " << g.size() << "\n";
  out << "root " << g.root() << "\n";
  out << "generators";
  const auto& gens = g.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) out << ' ' << gens.names[i] << (gens.involution[i] ? "*" : "");
  out << "\n";
  for (std::size_t i = 0; i < gens.size(); ++i) {
    out << "perm " << gens.names[i] << ":";
    for (auto x : g.perm(i)) out << ' ' << x;
    out << "\n";
  }
  if (g.has_labels())
    for (std::uint32_t v = 0; v < g.size(); ++v) out << "label " << v << ": " << g.label(v) << "\n";
  return out.str();
}

inline FiniteSchreierGraph deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next = [&](const char* what) {
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::invalid_parameter,
            std::string("truncated graph text, expected ") + what);
  };
  auto expect_prefix = [&](const std::string& p) {
    require(line.rfind(p, 0) == 0, ErrorKind::invalid_parameter, "expected '" + p + "', got '" + line + "'");
    return line.substr(p.size());
  };
  next("header");
  require(line == "schreier v1", ErrorKind::invalid_parameter, "unsupported header '" + line + "'");
  next("vertices");
  auto nv = parse_int_list(expect_prefix("vertices "));
  require(nv.size() == 1 && nv[0] > 0, ErrorKind::invalid_parameter, "bad vertex count");
  std::uint32_t n = static_cast<std::uint32_t>(nv[0]);
  next("root");
  auto rv = parse_int_list(expect_prefix("root "));
  require(rv.size() == 1, ErrorKind::invalid_parameter, "bad root");
  next("generators");
  GeneratorSet gens;
  {
    std::istringstream gs(expect_prefix("generators "));
    std::string tok;
    while (gs >> tok) {
      bool inv = !tok.empty() && tok.back() == '*';
      if (inv) tok.pop_back();
      gens.names.push_back(tok);
      gens.involution.push_back(inv);
    }
  }
  std::vector<std::vector<std::uint32_t>> perms;
  for (const auto& name : gens.names) {
    next("perm");
    auto vals = parse_int_list(expect_prefix("perm " + name + ":"));
    require(vals.size() == n, ErrorKind::invalid_parameter, "perm " + name + " has wrong length");
    std::vector<std::uint32_t> p;
    for (long v : vals) {
      require(v >= 0 && v < static_cast<long>(n), ErrorKind::out_of_range, "image out of range in " + name);
      p.push_back(static_cast<std::uint32_t>(v));
    }
    perms.push_back(std::move(p));
  }
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto rest = expect_prefix("label ");
    auto colon = rest.find(": ");
    require(colon != std::string::npos, ErrorKind::invalid_parameter, "bad label line");
    long k = parse_int_list(rest.substr(0, colon)).at(0);
    require(k == static_cast<long>(labels.size()), ErrorKind::invalid_parameter, "label lines out of order");
    labels.push_back(rest.substr(colon + 2));
  }
  require(labels.empty() || labels.size() == n, ErrorKind::invalid_parameter, "incomplete label table");
  require(rv[0] >= 0 && rv[0] < static_cast<long>(n), ErrorKind::out_of_range, "root out of range");
  return FiniteSchreierGraph(std::move(gens), std::move(perms), static_cast<std::uint32_t>(rv[0]),
                             std::move(labels));
}

}  // namespace permwalk
