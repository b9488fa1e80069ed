#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "permwalk/core.hpp"
#include "permwalk/graph.hpp"

namespace permwalk {

// Builds the finite graph of a truncated action restricted to a closed vertex set.
// Vertex order is the order of `vertices`, which callers pass sorted by label.
template <SchreierAction A>
FiniteSchreierGraph materialize(const A& a, const std::vector<typename A::vertex_type>& vertices) {
  using V = typename A::vertex_type;
  std::map<V, std::uint32_t> index;
  for (std::uint32_t i = 0; i < vertices.size(); ++i) index.emplace(vertices[i], i);
  const auto& gens = a.generators();
  std::vector<std::vector<std::uint32_t>> perms(gens.size(), std::vector<std::uint32_t>(vertices.size()));
  for (std::uint32_t g = 0; g < gens.size(); ++g)
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
      auto it = index.find(a.act(Letter{g, 1}, vertices[i]));
      require(it != index.end(), ErrorKind::invalid_parameter, "vertex set is not closed under the action");
      perms[g][i] = it->second;
    }
  std::vector<std::string> labels;
  for (const auto& v : vertices) labels.push_back(a.label(v));
  auto root_it = index.find(a.root());
  require(root_it != index.end(), ErrorKind::invalid_parameter, "root missing from vertex set");
  return FiniteSchreierGraph(gens, std::move(perms), root_it->second, std::move(labels));
}

// ---------------------------------------------------------------- dihedral

// s pairs 2i <-> 2i+1, t fixes 0 and pairs 2i-1 <-> 2i. With n > 0 the line is cut at n
// vertices and moves that would leave it become loops.
class DihedralAction {
 public:
  using vertex_type = std::int64_t;

  explicit DihedralAction(std::int64_t n = 0) : n_(n) {
    require(n == 0 || n >= 2, ErrorKind::invalid_parameter, "dihedral line needs n >= 2");
    gens_.names = {"s", "t"};
    gens_.involution = {true, true};
  }

  const GeneratorSet& generators() const { return gens_; }
  vertex_type root() const { return 0; }
  std::int64_t length() const { return n_; }

  vertex_type act(Letter l, vertex_type v) const {
    require(v >= 0 && (n_ == 0 || v < n_), ErrorKind::invalid_label, "vertex " + std::to_string(v));
    vertex_type u = v;
    if (l.gen == 0) u = v ^ 1;
    else if (v > 0) u = (v & 1) ? v + 1 : v - 1;
    if (n_ > 0 && u >= n_) return v;
    return u;
  }

  std::string label(vertex_type v) const { return std::to_string(v); }
  vertex_type parse(const std::string& s) const {
    auto v = parse_int_list(s);
    require(v.size() == 1 && v[0] >= 0 && (n_ == 0 || v[0] < n_), ErrorKind::invalid_label, "bad label " + s);
    return v[0];
  }

 private:
  std::int64_t n_;
  GeneratorSet gens_;
};

inline FiniteSchreierGraph build_dihedral_line(std::int64_t n) {
  DihedralAction a(n);
  require(n >= 2, ErrorKind::invalid_parameter, "dihedral line needs n >= 2");
  std::vector<std::int64_t> vs(n);
  std::iota(vs.begin(), vs.end(), 0);
  return materialize(a, vs);
}

// ---------------------------------------------------------------- bubble

struct BubbleVertex {
  std::vector<std::uint16_t> w;  // letters in 1..b-1
  std::int64_t u = 0;
  int level() const { return static_cast<int>(w.size()) + 1; }
  friend bool operator==(const BubbleVertex&, const BubbleVertex&) = default;
  friend auto operator<=>(const BubbleVertex&, const BubbleVertex&) = default;
};

class BubbleAction {
 public:
  using vertex_type = BubbleVertex;

  // depth == 0: the infinite graph X (limited only by the parameter prefix).
  // depth == k: the truncation X^k where b fixes the far ends of level-k bubbles.
  BubbleAction(std::vector<long> a, std::vector<long> b, int depth = 0)
      : a_(std::move(a)), b_(std::move(b)), depth_(depth) {
    require(!a_.empty(), ErrorKind::invalid_parameter, "bubble needs a non-empty scaling sequence");
    for (std::size_t i = 0; i < a_.size(); ++i) {
      require(a_[i] >= 1, ErrorKind::invalid_parameter, "a_i must be positive");
      require(i == 0 || a_[i] >= a_[i - 1], ErrorKind::invalid_parameter, "a must be monotone");
    }
    for (long bi : b_) require(bi >= 2, ErrorKind::invalid_parameter, "b_i must be >= 2");
    require(depth_ >= 0, ErrorKind::invalid_parameter, "negative depth");
    if (depth_ > 0) {
      require(static_cast<int>(a_.size()) >= depth_, ErrorKind::invalid_parameter, "a shorter than depth");
      require(static_cast<int>(b_.size()) >= depth_ - 1, ErrorKind::invalid_parameter, "b shorter than depth-1");
    }
    gens_.names = {"a", "b"};
    gens_.involution = {false, false};
  }

  const GeneratorSet& generators() const { return gens_; }
  vertex_type root() const { return {}; }
  int depth() const { return depth_; }
  const std::vector<long>& a() const { return a_; }
  const std::vector<long>& b() const { return b_; }
  long a_at(int level) const {
    require(level >= 1 && level <= static_cast<int>(a_.size()), ErrorKind::invalid_label,
            "level " + std::to_string(level) + " beyond the scaling prefix");
    return a_[level - 1];
  }
  long b_at(int level) const {
    require(level >= 1 && level <= static_cast<int>(b_.size()), ErrorKind::invalid_label,
            "level " + std::to_string(level) + " beyond the branching prefix");
    return b_[level - 1];
  }
  int max_level() const {
    int cap = static_cast<int>(std::min(a_.size(), b_.size() + 1));
    return depth_ > 0 ? std::min(cap, depth_) : cap;
  }

  void check(const vertex_type& v) const {
    int lv = v.level();
    require(lv <= max_level(), ErrorKind::invalid_label, "vertex beyond the parameter prefix");
    for (std::size_t i = 0; i < v.w.size(); ++i)
      require(v.w[i] >= 1 && v.w[i] <= b_at(static_cast<int>(i) + 1) - 1, ErrorKind::invalid_label,
              "branch letter out of range");
    require(v.u >= 0 && v.u < 2 * a_at(lv), ErrorKind::invalid_label, "bubble coordinate out of range");
  }

  vertex_type act(Letter l, vertex_type v) const {
    check(v);
    int lv = v.level();
    if (l.gen == 0) {
      long len = 2 * a_at(lv);
      v.u = ((v.u + l.sign) % len + len) % len;
      return v;
    }
    bool open_end = depth_ == 0 || lv < depth_;
    if (l.sign > 0) {
      if (v.u == a_at(lv) && open_end) {
        b_at(lv);
        require(lv + 1 <= max_level(), ErrorKind::invalid_label, "move leaves the parameter prefix");
        v.w.push_back(1);
        v.u = 0;
      } else if (v.u == 0 && !v.w.empty()) {
        if (v.w.back() + 1 <= b_at(lv - 1) - 1) {
          ++v.w.back();
        } else {
          v.w.pop_back();
          v.u = a_at(lv - 1);
        }
      }
    } else {
      if (v.u == a_at(lv) && open_end) {
        long bl = b_at(lv);
        require(lv + 1 <= max_level(), ErrorKind::invalid_label, "move leaves the parameter prefix");
        v.w.push_back(static_cast<std::uint16_t>(bl - 1));
        v.u = 0;
      } else if (v.u == 0 && !v.w.empty()) {
        if (v.w.back() > 1) {
          --v.w.back();
        } else {
          v.w.pop_back();
          v.u = a_at(lv - 1);
        }
      }
    }
    return v;
  }

  std::string label(const vertex_type& v) const {
    std::string s = "(";
    for (std::size_t i = 0; i < v.w.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(v.w[i]);
    }
    return s + "," + std::to_string(v.u) + ")";
  }

  vertex_type parse(const std::string& s) const {
    require(s.size() >= 3 && s.front() == '(' && s.back() == ')', ErrorKind::invalid_label, "bad label " + s);
    auto comma = s.find(',');
    require(comma != std::string::npos, ErrorKind::invalid_label, "bad label " + s);
    vertex_type v;
    std::string ws = s.substr(1, comma - 1);
    if (!ws.empty()) {
      std::string cur;
      for (char c : ws + ".") {
        if (c == '.') {
          auto x = parse_int_list(cur);
          require(x.size() == 1 && x[0] >= 1 && x[0] < 65536, ErrorKind::invalid_label, "bad label " + s);
          v.w.push_back(static_cast<std::uint16_t>(x[0]));
          cur.clear();
        } else {
          cur += c;
        }
      }
    }
    auto u = parse_int_list(s.substr(comma + 1, s.size() - comma - 2));
    require(u.size() == 1, ErrorKind::invalid_label, "bad label " + s);
    v.u = u[0];
    check(v);
    return v;
  }

  // All vertices at a level, lexicographic.
  std::vector<vertex_type> level_vertices(int level) const {
    require(level >= 1 && level <= max_level(), ErrorKind::out_of_range, "level outside the prefix");
    std::vector<std::vector<std::uint16_t>> words{{}};
    for (int j = 1; j < level; ++j) {
      std::vector<std::vector<std::uint16_t>> next;
      for (const auto& w : words)
        for (long z = 1; z < b_at(j); ++z) {
          auto x = w;
          x.push_back(static_cast<std::uint16_t>(z));
          next.push_back(std::move(x));
        }
      words = std::move(next);
    }
    std::vector<vertex_type> out;
    for (const auto& w : words)
      for (long u = 0; u < 2 * a_at(level); ++u) out.push_back({w, u});
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<vertex_type> vertices_up_to(int level) const {
    std::vector<vertex_type> out;
    for (int j = 1; j <= level; ++j) {
      auto lv = level_vertices(j);
      out.insert(out.end(), lv.begin(), lv.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<long> a_, b_;
  int depth_;
  GeneratorSet gens_;
};

// |X^k| = 2a_1 + sum_{j=2..k} prod_{i<j}(b_i - 1) * 2a_j
inline long bubble_vertex_count(const std::vector<long>& a, const std::vector<long>& b, int k) {
  long total = 0, branches = 1;
  for (int j = 1; j <= k; ++j) {
    if (j > 1) branches *= b.at(j - 2) - 1;
    total += branches * 2 * a.at(j - 1);
  }
  return total;
}

inline FiniteSchreierGraph build_bubble(const std::vector<long>& a, const std::vector<long>& b, int k) {
  require(k >= 1, ErrorKind::invalid_parameter, "depth must be >= 1");
  BubbleAction act(a, b, k);
  return materialize(act, act.vertices_up_to(k));
}

// ---------------------------------------------------------------- Neumann-Segal type

using NSVertex = std::vector<std::int32_t>;  // digits x1 x2 ..., trailing zeros trimmed

class NSAction {
 public:
  using vertex_type = NSVertex;

  NSAction(std::vector<long> l, int depth = 0) : l_(std::move(l)), depth_(depth) {
    require(!l_.empty(), ErrorKind::invalid_parameter, "empty cycle-length sequence");
    for (long x : l_)
      require(x >= 2 && x % 2 == 0, ErrorKind::invalid_parameter, "cycle lengths must be even and >= 2");
    require(depth_ >= 0 && depth_ <= static_cast<int>(l_.size()), ErrorKind::invalid_parameter,
            "depth exceeds the length sequence");
    gens_.names = {"a", "b"};
    gens_.involution = {false, false};
  }

  const GeneratorSet& generators() const { return gens_; }
  vertex_type root() const { return {}; }
  int depth() const { return depth_; }
  const std::vector<long>& l() const { return l_; }
  int levels() const { return depth_ > 0 ? depth_ : static_cast<int>(l_.size()); }

  static void trim(vertex_type& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  }

  void check(const vertex_type& v) const {
    require(static_cast<int>(v.size()) <= levels(), ErrorKind::invalid_label, "digit string too long");
    require(v.empty() || v.back() != 0, ErrorKind::invalid_label, "untrimmed digit string");
    for (std::size_t i = 0; i < v.size(); ++i)
      require(v[i] >= 0 && v[i] < l_[i], ErrorKind::invalid_label, "digit out of range");
  }

  vertex_type act(Letter l, vertex_type v) const {
    check(v);
    auto bump = [&](std::size_t i, int s) {
      if (v.size() <= i) v.resize(i + 1, 0);
      long m = l_[i];
      v[i] = static_cast<std::int32_t>(((v[i] + s) % m + m) % m);
      trim(v);
    };
    if (l.gen == 0) {
      bump(0, l.sign);
      return v;
    }
    std::size_t j = 0;
    while (j < v.size() && v[j] == 0) ++j;
    if (j == v.size()) return v;  // the ray of zeros is fixed
    if (v[j] != l_[j] / 2) return v;
    if (static_cast<int>(j) + 1 >= levels()) {
      require(depth_ > 0, ErrorKind::invalid_label, "move leaves the parameter prefix");
      return v;
    }
    bump(j + 1, l.sign);
    return v;
  }

  std::string label(const vertex_type& v) const {
    std::size_t len = depth_ > 0 ? static_cast<std::size_t>(depth_) : std::max<std::size_t>(v.size(), 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) s += '.';
      s += std::to_string(i < v.size() ? v[i] : 0);
    }
    return s;
  }

  vertex_type parse(const std::string& s) const {
    auto digits = parse_int_list([&] {
      std::string t = s;
      std::replace(t.begin(), t.end(), '.', ',');
      return t;
    }());
    require(!digits.empty(), ErrorKind::invalid_label, "empty label");
    vertex_type v(digits.begin(), digits.end());
    trim(v);
    for (std::size_t i = 0; i < v.size(); ++i)
      require(i < l_.size() && v[i] >= 0 && v[i] < l_[i], ErrorKind::invalid_label, "bad label " + s);
    check(v);
    return v;
  }

  // All digit strings of length <= n (the copy of S_n anchored at the root), lexicographic
  // on the padded digit tuple.
  std::vector<vertex_type> copy_of_level(int n) const {
    require(n >= 1 && n <= levels(), ErrorKind::out_of_range, "level outside the prefix");
    std::vector<vertex_type> out;
    vertex_type cur(n, 0);
    while (true) {
      auto t = cur;
      trim(t);
      out.push_back(t);
      int i = n - 1;
      while (i >= 0 && cur[i] == l_[i] - 1) cur[i--] = 0;
      if (i < 0) break;
      ++cur[i];
    }
    return out;
  }

 private:
  std::vector<long> l_;
  int depth_;
  GeneratorSet gens_;
};

inline FiniteSchreierGraph build_ns(const std::vector<long>& l, int k) {
  require(k >= 1, ErrorKind::invalid_parameter, "depth must be >= 1");
  require(static_cast<int>(l.size()) >= k, ErrorKind::invalid_parameter, "need l_1..l_k");
  NSAction act(std::vector<long>(l.begin(), l.begin() + k), k);
  return materialize(act, act.copy_of_level(k));
}

// ---------------------------------------------------------------- regions

enum class RegionKind { branch_cycle, neighborhood, midpoint_ball, w_set, ball, level_set, ns_copy, ns_half };

inline const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::branch_cycle: return "branch-cycle";
    case RegionKind::neighborhood: return "neighborhood";
    case RegionKind::midpoint_ball: return "midpoint-ball";
    case RegionKind::w_set: return "W";
    case RegionKind::ball: return "ball";
    case RegionKind::level_set: return "level-set";
    case RegionKind::ns_copy: return "S_n-inside-S";
    case RegionKind::ns_half: return "half-copy";
  }
  return "region";
}

template <class V>
struct Region {
  RegionKind kind;
  std::string params;
  std::vector<V> vertices;  // sorted, unique

  bool contains(const V& v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }
};

template <class V>
Region<V> make_region(RegionKind kind, std::string params, std::vector<V> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return {kind, std::move(params), std::move(vs)};
}

namespace bubble {

inline BubbleVertex midpoint(const BubbleAction& x, int k) {
  require(k >= 1, ErrorKind::out_of_range, "midpoint level must be >= 1");
  BubbleVertex m;
  m.w.assign(k - 1, 1);
  m.u = x.a_at(k) / 2;
  x.check(m);
  return m;
}

inline std::vector<BubbleVertex> cycle_vertices(const BubbleAction& x, const std::vector<std::uint16_t>& w) {
  int j = static_cast<int>(w.size()) + 1;
  std::vector<BubbleVertex> out{{w, x.a_at(j)}};
  for (long z = 1; z < x.b_at(j); ++z) {
    auto c = w;
    c.push_back(static_cast<std::uint16_t>(z));
    out.push_back({c, 0});
  }
  return out;
}

inline Region<BubbleVertex> branch_cycle(const BubbleAction& x, const std::vector<std::uint16_t>& w) {
  return make_region(RegionKind::branch_cycle, x.label({w, 0}), cycle_vertices(x, w));
}

inline Region<BubbleVertex> neighborhood(const BubbleAction& x, const std::vector<std::uint16_t>& w, int r) {
  auto b = ball(x, cycle_vertices(x, w), r);
  return make_region(RegionKind::neighborhood, x.label({w, 0}) + " r=" + std::to_string(r), b.vertices);
}

inline Region<BubbleVertex> midpoint_ball(const BubbleAction& x, int k, int l) {
  require(l >= 0, ErrorKind::out_of_range, "negative radius");
  require(2L * l < x.a_at(k), ErrorKind::out_of_range, "B_k(l) needs l < a_k/2");
  auto b = ball(x, midpoint(x, k), l);
  return make_region(RegionKind::midpoint_ball, "k=" + std::to_string(k) + " l=" + std::to_string(l), b.vertices);
}

// W(k,t): every vertex of levels <= k-1, the t-neighbourhoods of the level-(k-1) branching
// cycles, and B(m_k, t).
inline Region<BubbleVertex> w_set(const BubbleAction& x, int k, int t) {
  require(k >= 2, ErrorKind::out_of_range, "W(k,t) needs k >= 2");
  require(t >= 0, ErrorKind::out_of_range, "negative radius");
  std::vector<BubbleVertex> vs = x.vertices_up_to(k - 1);
  std::vector<BubbleVertex> cycles;
  for (const auto& v : x.level_vertices(k - 1))
    if (v.u == 0) {
      auto c = cycle_vertices(x, v.w);
      cycles.insert(cycles.end(), c.begin(), c.end());
    }
  auto nb = ball(x, cycles, t);
  vs.insert(vs.end(), nb.vertices.begin(), nb.vertices.end());
  auto mb = ball(x, midpoint(x, k), t);
  vs.insert(vs.end(), mb.vertices.begin(), mb.vertices.end());
  return make_region(RegionKind::w_set, "k=" + std::to_string(k) + " t=" + std::to_string(t), vs);
}

inline Region<BubbleVertex> level_set(const BubbleAction& x, int level) {
  return make_region(RegionKind::level_set, std::to_string(level), x.level_vertices(level));
}

}  // namespace bubble

namespace ns {

inline NSVertex y_vertex(const NSAction& x, int n) {
  NSVertex v(n, 0);
  v[n - 1] = static_cast<std::int32_t>(x.l().at(n - 1) / 2);
  return v;
}

inline Region<NSVertex> copy_region(const NSAction& x, int n) {
  return make_region(RegionKind::ns_copy, std::to_string(n), x.copy_of_level(n));
}

// Points of the S_n copy strictly closer to the root than to 0^{n-1} y_n.  Geodesics between
// points of the copy stay inside it (copies hang off single vertices), so distances are
// measured on S_n itself.
inline std::pair<Region<NSVertex>, Region<NSVertex>> halves(const NSAction& x, int n) {
  NSAction trunc(std::vector<long>(x.l().begin(), x.l().begin() + n), n);
  auto vs = trunc.copy_of_level(n);
  auto g = materialize(trunc, vs);
  auto d0 = bfs_distances(g, g.root());
  auto y = y_vertex(x, n);
  auto dy = bfs_distances(g, static_cast<std::uint32_t>(std::lower_bound(vs.begin(), vs.end(), y) - vs.begin()));
  std::vector<NSVertex> near, far;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (d0[i] < dy[i]) near.push_back(vs[i]);
    if (dy[i] < d0[i]) far.push_back(vs[i]);
  }
  return {make_region(RegionKind::ns_half, "near n=" + std::to_string(n), near),
          make_region(RegionKind::ns_half, "far n=" + std::to_string(n), far)};
}

}  // namespace ns

}  // namespace permwalk
