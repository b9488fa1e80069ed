#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "permwalk/core.hpp"
#include "permwalk/families.hpp"
#include "permwalk/graph.hpp"

namespace permwalk {

using TreeWord = std::vector<int>;

// Finite-state (or level-indexed) description of tree automorphisms by wreath recursion:
// s(x w) = sigma_s(x) s_x(w).  State 0 is the identity on every alphabet.
class TreeAutomaton {
 public:
  struct State {
    std::string name;
    std::vector<int> sigma;     // empty for the identity
    std::vector<int> sigma_inv;
    std::vector<int> sections;  // section state per letter x (before sigma)
  };

  TreeAutomaton() { states_.push_back({"e", {}, {}, {}}); }

  static constexpr int identity = 0;

  int add_state(std::string name) {
    require(!index_.count(name) && name != "e", ErrorKind::invalid_parameter, "duplicate state " + name);
    index_[name] = static_cast<int>(states_.size());
    states_.push_back({std::move(name), {}, {}, {}});
    return static_cast<int>(states_.size()) - 1;
  }

  void define(int s, std::vector<int> sigma, std::vector<int> sections) {
    require(s > 0 && s < static_cast<int>(states_.size()), ErrorKind::out_of_range, "unknown state");
    require(sigma.size() == sections.size() && sigma.size() >= 2, ErrorKind::invalid_parameter,
            "state " + states_[s].name + ": sigma and sections need the same size >= 2");
    std::vector<int> inv(sigma.size(), -1);
    for (std::size_t x = 0; x < sigma.size(); ++x) {
      int y = sigma[x];
      require(y >= 0 && y < static_cast<int>(sigma.size()) && inv[y] < 0, ErrorKind::invalid_parameter,
              "state " + states_[s].name + ": sigma is not a permutation");
      inv[y] = static_cast<int>(x);
    }
    for (int t : sections)
      require(t >= 0 && t < static_cast<int>(states_.size()), ErrorKind::out_of_range, "unknown section state");
    states_[s] = {states_[s].name, std::move(sigma), std::move(inv), std::move(sections)};
  }

  int find(const std::string& name) const {
    if (name == "e") return identity;
    auto it = index_.find(name);
    require(it != index_.end(), ErrorKind::invalid_label, "unknown state " + name);
    return it->second;
  }
  const State& state(int s) const { return states_.at(s); }
  std::size_t size() const { return states_.size(); }

  void validate() const {
    for (std::size_t s = 1; s < states_.size(); ++s) {
      require(!states_[s].sigma.empty(), ErrorKind::invalid_parameter, "state " + states_[s].name + " undefined");
    }
  }

  int apply(int s, int x) const {
    const auto& st = states_[s];
    if (st.sigma.empty()) return x;
    require(x >= 0 && x < static_cast<int>(st.sigma.size()), ErrorKind::invalid_label,
            "letter " + std::to_string(x) + " outside the alphabet of " + st.name);
    return st.sigma[x];
  }
  int apply_inv(int s, int y) const {
    const auto& st = states_[s];
    if (st.sigma.empty()) return y;
    require(y >= 0 && y < static_cast<int>(st.sigma.size()), ErrorKind::invalid_label,
            "letter " + std::to_string(y) + " outside the alphabet of " + st.name);
    return st.sigma_inv[y];
  }
  int section(int s, int x) const { return states_[s].sigma.empty() ? identity : states_[s].sections[x]; }

 private:
  std::vector<State> states_;
  std::map<std::string, int> index_;
};

// Product of states; factors apply right to left.
struct TreeElement {
  struct Factor {
    int state;
    int sign;
    friend bool operator==(const Factor&, const Factor&) = default;
  };
  std::vector<Factor> factors;

  TreeElement inverse() const {
    TreeElement r;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) r.factors.push_back({it->state, -it->sign});
    return r;
  }
  friend TreeElement operator*(const TreeElement& g, const TreeElement& h) {
    TreeElement r = g;
    r.factors.insert(r.factors.end(), h.factors.begin(), h.factors.end());
    return r;
  }
  TreeElement pow(long k) const {
    TreeElement base = k < 0 ? inverse() : *this, r;
    for (long i = 0; i < std::labs(k); ++i) r = r * base;
    return r;
  }
};

inline TreeElement state_element(int s, int sign = 1) {
  if (s == TreeAutomaton::identity) return {};
  return TreeElement{{{s, sign}}};
}

// Maps generator letters to automaton states.
inline TreeElement element_from_word(const Word& w, const std::vector<int>& gen_states) {
  TreeElement r;
  for (auto l : w) {
    require(l.gen < gen_states.size(), ErrorKind::out_of_range, "letter without a state");
    if (gen_states[l.gen] != TreeAutomaton::identity) r.factors.push_back({gen_states[l.gen], l.sign});
  }
  return r;
}

inline TreeWord evaluate(const TreeAutomaton& A, const TreeElement& g, TreeWord v) {
  for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
    int s = it->state;
    for (auto& x : v) {
      if (s == TreeAutomaton::identity) {
        break;
      }
      if (it->sign > 0) {
        int y = A.apply(s, x);
        s = A.section(s, x);
        x = y;
      } else {
        int y = A.apply_inv(s, x);
        s = A.section(s, y);
        x = y;
      }
    }
  }
  return v;
}

// (g h)_u = g_{h(u)} h_u and (s^{-1})_u = (s_{s^{-1}(u)})^{-1}.
inline TreeElement section(const TreeAutomaton& A, const TreeElement& g, const TreeWord& u) {
  std::vector<TreeElement::Factor> rev;
  TreeWord cur = u;
  for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
    int s = it->state;
    for (auto& x : cur) {
      if (it->sign > 0) {
        int y = A.apply(s, x);
        s = A.section(s, x);
        x = y;
      } else {
        int y = A.apply_inv(s, x);
        s = A.section(s, y);
        x = y;
      }
    }
    if (s != TreeAutomaton::identity) rev.push_back({s, it->sign});
  }
  TreeElement out;
  out.factors.assign(rev.rbegin(), rev.rend());
  return out;
}

// Degree sequence d_1..d_D of a materialized prefix of the tree.
struct TreeShape {
  std::vector<int> degrees;  // d_1..d_D
  int depth() const { return static_cast<int>(degrees.size()); }

  std::vector<TreeWord> level(int k) const {
    require(k >= 0 && k <= depth(), ErrorKind::out_of_range, "level beyond materialized depth");
    std::vector<TreeWord> out{{}};
    for (int j = 0; j < k; ++j) {
      std::vector<TreeWord> next;
      for (const auto& w : out)
        for (int x = 0; x < degrees[j]; ++x) {
          auto c = w;
          c.push_back(x);
          next.push_back(std::move(c));
        }
      out.swap(next);
    }
    return out;
  }
  std::vector<TreeWord> up_to(int k) const {
    std::vector<TreeWord> out;
    for (int j = 0; j <= k; ++j) {
      auto l = level(j);
      out.insert(out.end(), l.begin(), l.end());
    }
    return out;
  }
  void check(const TreeWord& v) const {
    require(static_cast<int>(v.size()) <= depth(), ErrorKind::out_of_range, "word deeper than the tree");
    for (std::size_t i = 0; i < v.size(); ++i)
      require(v[i] >= 0 && v[i] < degrees[i], ErrorKind::invalid_label, "letter out of alphabet");
  }
  TreeShape tail(int from) const {
    return {std::vector<int>(degrees.begin() + std::min(from, depth()), degrees.end())};
  }
};

inline std::string format_tree_word(const TreeWord& v, const TreeShape& shape) {
  bool compact = std::all_of(shape.degrees.begin(), shape.degrees.end(), [](int d) { return d <= 10; });
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!compact && i) s += '.';
    s += std::to_string(v[i]);
  }
  return s;
}

inline TreeWord parse_tree_word(const std::string& text, const TreeShape& shape) {
  TreeWord v;
  if (text.find('.') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, '.')) {
      require(!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos, ErrorKind::invalid_label,
              "bad tree word " + text);
      v.push_back(std::stoi(tok));
    }
  } else {
    for (char c : text) {
      require(c >= '0' && c <= '9', ErrorKind::invalid_label, "bad tree word " + text);
      v.push_back(c - '0');
    }
  }
  shape.check(v);
  return v;
}

inline TreeWord evaluate_checked(const TreeAutomaton& A, const TreeElement& g, const TreeWord& v,
                                 const TreeShape& shape) {
  shape.check(v);
  return evaluate(A, g, v);
}

// True if g moves some word of length <= depth.
inline bool moves_something(const TreeAutomaton& A, const TreeElement& g, const TreeShape& shape, int depth) {
  for (const auto& v : shape.level(std::min(depth, shape.depth())))
    if (evaluate(A, g, v) != v) return true;
  return false;
}

inline bool same_action(const TreeAutomaton& A, const TreeElement& g, const TreeElement& h, const TreeShape& shape,
                        int depth) {
  for (const auto& v : shape.level(std::min(depth, shape.depth())))
    if (evaluate(A, g, v) != evaluate(A, h, v)) return false;
  return true;
}

enum class ActivityMode { active, nontrivial };

struct ActivityReport {
  long count = 0;
  int certification_depth = 0;
  ActivityMode mode = ActivityMode::active;
};

// active: sections whose root permutation is nontrivial.  nontrivial: sections moving some word of
// length <= depth below their vertex.
inline ActivityReport activity(const TreeAutomaton& A, const TreeElement& g, const TreeShape& shape, int k,
                               ActivityMode mode = ActivityMode::active, int depth = 1) {
  require(k >= 0 && k < shape.depth(), ErrorKind::out_of_range, "level outside the materialized tree");
  ActivityReport rep;
  rep.mode = mode;
  auto sub = shape.tail(k);
  rep.certification_depth = mode == ActivityMode::active ? 1 : std::min(depth, sub.depth());
  for (const auto& u : shape.level(k)) {
    auto s = section(A, g, u);
    if (moves_something(A, s, sub, rep.certification_depth)) ++rep.count;
  }
  return rep;
}

struct LevelDecomposition {
  std::vector<TreeWord> vertices;   // level-k words, lexicographic
  std::vector<int> sigma;           // index permutation on `vertices`
  std::vector<TreeElement> sections;
};

inline LevelDecomposition decompose(const TreeAutomaton& A, const TreeElement& g, const TreeShape& shape, int k) {
  LevelDecomposition d;
  d.vertices = shape.level(k);
  std::map<TreeWord, int> idx;
  for (std::size_t i = 0; i < d.vertices.size(); ++i) idx[d.vertices[i]] = static_cast<int>(i);
  for (const auto& u : d.vertices) {
    d.sigma.push_back(idx.at(evaluate(A, g, u)));
    d.sections.push_back(section(A, g, u));
  }
  return d;
}

inline bool in_stabilizer(const TreeAutomaton& A, const TreeElement& g, const TreeWord& u) {
  return evaluate(A, g, u) == u;
}

// Fixes every word of length <= depth that does not pass through u.
inline bool in_rigid_stabilizer(const TreeAutomaton& A, const TreeElement& g, const TreeWord& u,
                                const TreeShape& shape, int depth) {
  for (const auto& v : shape.level(std::min(depth, shape.depth()))) {
    bool inside = v.size() >= u.size() && std::equal(u.begin(), u.end(), v.begin());
    if (!inside && evaluate(A, g, v) != v) return false;
  }
  return true;
}

// ------------------------------------------------------------------ DSL

// One definition per line (or separated by '|'):
//   t: sigma=(); sections=[t,s]
//   s: sigma=(0 1); sections=[e,e]
// sigma is in cycle notation on 0..d-1, d = number of sections.
inline TreeAutomaton parse_automaton(const std::string& text) {
  struct Def {
    std::string name, sigma, sections;
  };
  std::vector<Def> defs;
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), '|', '\n');
  std::istringstream in(norm);
  std::string line;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    require(colon != std::string::npos, ErrorKind::invalid_parameter, "expected 'name: ...' in '" + line + "'");
    Def d{trim(line.substr(0, colon)), "", ""};
    std::string rest = line.substr(colon + 1);
    std::istringstream parts(rest);
    std::string part;
    while (std::getline(parts, part, ';')) {
      part = trim(part);
      if (part.rfind("sigma=", 0) == 0)
        d.sigma = trim(part.substr(6));
      else if (part.rfind("sections=", 0) == 0)
        d.sections = trim(part.substr(9));
      else if (!part.empty())
        fail(ErrorKind::invalid_parameter, "unknown field '" + part + "'");
    }
    require(!d.name.empty() && d.name.find_first_of(" ,[]()") == std::string::npos, ErrorKind::invalid_parameter,
            "bad state name '" + d.name + "'");
    require(d.sections.size() >= 2 && d.sections.front() == '[' && d.sections.back() == ']',
            ErrorKind::invalid_parameter, "state " + d.name + ": sections must be [..]");
    defs.push_back(std::move(d));
  }
  require(!defs.empty(), ErrorKind::invalid_parameter, "empty automaton");
  TreeAutomaton A;
  for (const auto& d : defs) A.add_state(d.name);
  for (const auto& d : defs) {
    std::vector<int> secs;
    std::istringstream ss(d.sections.substr(1, d.sections.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) secs.push_back(A.find(trim(tok)));
    int deg = static_cast<int>(secs.size());
    std::vector<int> sigma(deg);
    std::iota(sigma.begin(), sigma.end(), 0);
    // cycles
    std::string cyc = d.sigma.empty() ? "()" : d.sigma;
    std::size_t pos = 0;
    while ((pos = cyc.find('(', pos)) != std::string::npos) {
      auto close = cyc.find(')', pos);
      require(close != std::string::npos, ErrorKind::invalid_parameter, "unbalanced sigma in " + d.name);
      auto pts = parse_int_list(cyc.substr(pos + 1, close - pos - 1));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        require(pts[i] >= 0 && pts[i] < deg, ErrorKind::invalid_parameter, "sigma point out of range in " + d.name);
        sigma[pts[i]] = static_cast<int>(pts[(i + 1) % pts.size()]);
      }
      pos = close + 1;
    }
    A.define(A.find(d.name), sigma, secs);
  }
  A.validate();
  return A;
}

inline TreeElement parse_element(const TreeAutomaton& A, const std::string& text) {
  TreeElement g;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    int sign = 1;
    if (tok.back() == '\'') {
      sign = -1;
      tok.pop_back();
    } else if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      sign = -1;
      tok.resize(tok.size() - 3);
    }
    int s = A.find(tok);
    if (s != TreeAutomaton::identity) g.factors.push_back({s, sign});
  }
  return g;
}

inline TreeShape constant_shape(const TreeAutomaton& A, int depth) {
  int d = 0;
  for (std::size_t s = 1; s < A.size(); ++s) {
    int ds = static_cast<int>(A.state(static_cast<int>(s)).sigma.size());
    require(d == 0 || d == ds, ErrorKind::invalid_parameter, "states have different degrees");
    d = ds;
  }
  return {std::vector<int>(depth, d)};
}

// ------------------------------------------------------------------ named automata

inline TreeAutomaton dinfty_automaton() { return parse_automaton("s: sigma=(0 1); sections=[e,e]\nt: sigma=(); sections=[t,s]"); }

// Level-indexed alpha_j, beta_j acting on the subtree with alphabets l[j], l[j+1], ...; states
// beyond the last listed level are the identity.
struct NSAutomaton {
  TreeAutomaton A;
  TreeShape shape;
  std::vector<int> alpha, beta;  // per level j = 0..D-1

  TreeElement a(int j = 0, int sign = 1) const { return state_element(alpha.at(j), sign); }
  TreeElement b(int j = 0, int sign = 1) const { return state_element(beta.at(j), sign); }
  TreeElement from_word(const Word& w, int j = 0) const { return element_from_word(w, {alpha.at(j), beta.at(j)}); }
};

inline NSAutomaton ns_automaton(const std::vector<long>& l) {
  require(!l.empty(), ErrorKind::invalid_parameter, "empty length sequence");
  NSAutomaton n;
  int D = static_cast<int>(l.size());
  for (int j = 0; j < D; ++j) {
    require(l[j] >= 2 && l[j] % 2 == 0, ErrorKind::invalid_parameter, "cycle lengths must be even and >= 2");
    n.shape.degrees.push_back(static_cast<int>(l[j]));
    n.alpha.push_back(n.A.add_state("a" + std::to_string(j)));
    n.beta.push_back(n.A.add_state("b" + std::to_string(j)));
  }
  for (int j = 0; j < D; ++j) {
    int d = static_cast<int>(l[j]);
    std::vector<int> rot(d), id(d);
    std::iota(id.begin(), id.end(), 0);
    for (int x = 0; x < d; ++x) rot[x] = (x + 1) % d;
    n.A.define(n.alpha[j], rot, std::vector<int>(d, TreeAutomaton::identity));
    std::vector<int> secs(d, TreeAutomaton::identity);
    if (j + 1 < D) {
      secs[0] = n.beta[j + 1];
      secs[d / 2] = n.alpha[j + 1];
    }
    n.A.define(n.beta[j], id, secs);
  }
  return n;
}

// ------------------------------------------------------------------ witnesses

struct RigidWitness {
  TreeElement rho;
  long M = 1;
  int depth = 0;
  bool fixes_outside = false;
  bool moves_inside = false;
  bool inconclusive = false;  // trivial at the tested depth
};

// rho_n = beta^M with M = lcm(l_2..l_{n+1}); it lies in rist(0^n).
inline RigidWitness rigid_stabilizer_witness(const std::vector<long>& l, int n, int depth) {
  require(n >= 0, ErrorKind::invalid_parameter, "n must be >= 0");
  require(depth >= 1 && depth <= static_cast<int>(l.size()), ErrorKind::invalid_parameter,
          "depth must lie in 1..len(l)");
  require(n + 1 <= static_cast<int>(l.size()), ErrorKind::invalid_parameter, "sequence too short for n");
  auto ns = ns_automaton(l);
  RigidWitness w;
  w.depth = depth;
  for (int i = 1; i <= n; ++i) w.M = std::lcm(w.M, l[i]);
  w.rho = ns.b().pow(w.M);
  TreeWord u(n, 0);
  w.fixes_outside = in_rigid_stabilizer(ns.A, w.rho, u, ns.shape, depth);
  w.moves_inside = moves_something(ns.A, w.rho, ns.shape, depth);
  w.inconclusive = !w.moves_inside;
  return w;
}

struct BallWitness {
  Word word;             // over alpha_i, beta_i (generators a, b)
  long length_bound2 = 0;  // 2 (r l + l/2), kept integral
  bool verified = false;
};

// Word in alpha_i, beta_i whose sections at 0..l/2-1 are the given words in alpha_{i+1}, beta_{i+1}.
// The conjugate alpha^p beta alpha^{-p} carries beta_{i+1} at p and alpha_{i+1} at p + l/2, so each
// position x has slots of alternating type at x, x + l/2, x + l, ...  Runs of each target are placed
// on those slots, the last run on the lowest slot of its type, and the slots are swept downward so
// the word ends at the root.  `l` lists the cycle lengths from level i on.
inline BallWitness ns_ball_witness(const std::vector<long>& l, const std::vector<Word>& targets, int r,
                                   int verify_depth = 0) {
  require(!l.empty(), ErrorKind::invalid_parameter, "empty length sequence");
  const long L = l[0], y = L / 2;
  require(L >= 2 && L % 2 == 0, ErrorKind::invalid_parameter, "cycle length must be even");
  require(r >= 1, ErrorKind::invalid_parameter, "r must be >= 1");
  require(static_cast<long>(targets.size()) == y, ErrorKind::invalid_parameter, "need l/2 targets");
  for (const auto& t : targets) {
    require(static_cast<int>(t.size()) <= r, ErrorKind::invalid_parameter, "target longer than r");
    for (auto x : t) require(x.gen < 2, ErrorKind::invalid_parameter, "targets use generators a, b only");
  }

  // slot position p -> letters emitted there (each a run of one target)
  std::map<long, std::vector<int>, std::greater<>> slots;  // signs
  for (long x = 0; x < y; ++x) {
    const auto& t = targets[x];
    std::vector<std::pair<int, std::vector<int>>> runs;  // (type 0 = alpha, 1 = beta), signs
    for (auto letter : t) {
      if (runs.empty() || runs.back().first != static_cast<int>(letter.gen)) runs.push_back({letter.gen, {}});
      runs.back().second.push_back(letter.sign);
    }
    if (runs.empty()) continue;
    // slot index m has type beta for even m, alpha for odd m
    long m = runs.back().first == 1 ? 0 : 1;
    for (auto it = runs.rbegin(); it != runs.rend(); ++it, ++m) {
      auto& dst = slots[x + m * y];
      dst.insert(dst.end(), it->second.begin(), it->second.end());
    }
  }

  BallWitness out;
  out.length_bound2 = 2 * r * L + L;
  long cur = -1;
  for (const auto& [p, signs] : slots) {
    if (cur >= 0)
      for (long i = 0; i < cur - p; ++i) out.word.push_back({0, -1});
    for (int s : signs) out.word.push_back({1, static_cast<std::int8_t>(s)});
    cur = p;
  }
  for (long i = 0; i < std::max(cur, 0L); ++i) out.word.push_back({0, -1});

  if (verify_depth > 0) {
    require(verify_depth <= static_cast<int>(l.size()), ErrorKind::invalid_parameter, "verify depth beyond l");
    auto ns = ns_automaton(l);
    auto g = ns.from_word(out.word, 0);
    auto sub = ns.shape.tail(1);
    bool ok = true;
    for (long x = 0; x < y && ok; ++x) {
      auto sx = section(ns.A, g, {static_cast<int>(x)});
      ok = same_action(ns.A, sx, ns.from_word(targets[x], 1), sub, verify_depth - 1);
    }
    out.verified = ok;
  }
  return out;
}

struct DistinctWordsReport {
  std::size_t distinct = 0;
  std::size_t total = 0;
  int depth = 0;
  bool shallow = false;      // no a_i >= n+2 within the truncation
  bool lower_bound = false;  // fewer distinct actions than words seen
};

// alpha^{n-1} beta^{e_1} alpha^{-1} beta^{e_2} ... alpha^{-1} beta^{e_n}
inline Word bubble_sign_word(int n, unsigned mask) {
  Word w;
  for (int i = 0; i < n - 1; ++i) w.push_back({0, 1});
  for (int i = 0; i < n; ++i) {
    if (i) w.push_back({0, -1});
    w.push_back({1, static_cast<std::int8_t>((mask >> i) & 1 ? -1 : 1)});
  }
  return w;
}

// Counts distinct actions of the 2^n sign words on the truncated Schreier graph X^K.
inline DistinctWordsReport bubble_distinct_words(const std::vector<long>& a, const std::vector<long>& b, int n, int K,
                                                 Word (*make)(int, unsigned) = bubble_sign_word) {
  require(n >= 1 && n <= 20, ErrorKind::invalid_parameter, "n must lie in 1..20");
  require(K >= 1, ErrorKind::invalid_parameter, "K must be >= 1");
  auto g = build_bubble(a, b, K);
  DistinctWordsReport rep;
  rep.depth = K;
  rep.total = std::size_t{1} << n;
  rep.shallow = true;
  for (int i = 0; i < K; ++i)
    if (a[i] >= n + 2) rep.shallow = false;
  std::set<std::vector<std::uint32_t>> seen;
  for (unsigned mask = 0; mask < rep.total; ++mask) {
    auto w = make(n, mask);
    std::vector<std::uint32_t> img(g.size());
    for (std::uint32_t v = 0; v < g.size(); ++v) img[v] = act_word(g, w, v);
    seen.insert(std::move(img));
  }
  rep.distinct = seen.size();
  rep.lower_bound = rep.distinct < rep.total;
  return rep;
}

}  // namespace permwalk
