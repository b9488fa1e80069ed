#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace permwalk {

enum class ErrorKind {
  invalid_parameter,
  invalid_label,
  out_of_range,
  precondition_violation,
  domain_violation,
  budget,
  disconnected,
  mismatch,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::precondition_violation: return "precondition-violation";
    case ErrorKind::domain_violation: return "domain-violation";
    case ErrorKind::budget: return "budget";
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::mismatch: return "mismatch";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) fail(kind, msg);
}

// A generator letter: index into the generator set plus exponent sign.
struct Letter {
  std::uint32_t gen = 0;
  std::int8_t sign = 1;

  Letter inverse() const { return {gen, static_cast<std::int8_t>(-sign)}; }
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

inline Word inverse(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->inverse());
  return r;
}

inline Word concat(const Word& a, const Word& b) {
  Word r(a);
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Word power(const Word& w, long k) {
  Word base = k < 0 ? inverse(w) : w;
  Word r;
  for (long i = 0; i < (k < 0 ? -k : k); ++i) r.insert(r.end(), base.begin(), base.end());
  return r;
}

struct GeneratorSet {
  std::vector<std::string> names;
  std::vector<bool> involution;

  std::size_t size() const { return names.size(); }

  std::uint32_t index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<std::uint32_t>(i);
    fail(ErrorKind::invalid_label, "unknown generator '" + std::string(name) + "'");
  }

  // Letters of the symmetric alphabet S: g and g' for non-involutions.
  std::vector<Letter> alphabet() const {
    std::vector<Letter> out;
    for (std::uint32_t i = 0; i < names.size(); ++i) {
      out.push_back({i, 1});
      if (!involution[i]) out.push_back({i, -1});
    }
    return out;
  }

  Letter normalize(Letter l) const {
    if (involution[l.gen]) l.sign = 1;
    return l;
  }

  void validate() const {
    require(names.size() == involution.size(), ErrorKind::invalid_parameter, "flag count mismatch");
    for (std::size_t i = 0; i < names.size(); ++i) {
      require(!names[i].empty(), ErrorKind::invalid_parameter, "empty generator name");
      require(names[i].find_first_of(" '*:") == std::string::npos, ErrorKind::invalid_parameter,
              "bad generator name '" + names[i] + "'");
      for (std::size_t j = 0; j < i; ++j)
        require(names[i] != names[j], ErrorKind::invalid_parameter, "duplicate generator " + names[i]);
    }
  }

  friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;
};

// Words print as space separated names with ' marking inverses: "a b a' b".
inline std::string format_word(const Word& w, const GeneratorSet& gens) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += gens.names.at(w[i].gen);
    if (w[i].sign < 0 && !gens.involution[w[i].gen]) out += '\'';
  }
  return out;
}

inline Word parse_word(std::string_view text, const GeneratorSet& gens) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    int sign = 1;
    while (!tok.empty() && tok.back() == '\'') {
      sign = -sign;
      tok.pop_back();
    }
    Letter l{gens.index(tok), static_cast<std::int8_t>(sign)};
    w.push_back(gens.normalize(l));
  }
  return w;
}

inline std::vector<long> parse_int_list(std::string_view text) {
  std::vector<long> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(cur, &pos);
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_parameter, "not an integer: '" + cur + "'");
    }
    require(pos == cur.size(), ErrorKind::invalid_parameter, "not an integer: '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '(' || c == ')') flush();
    else cur += c;
  }
  flush();
  return out;
}

}  // namespace permwalk
