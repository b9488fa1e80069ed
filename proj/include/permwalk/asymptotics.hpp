#pragma once

#include <boost/rational.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "permwalk/core.hpp"
#include "permwalk/families.hpp"
#include "permwalk/resistance.hpp"

namespace permwalk {

// ------------------------------------------------------------------ closed forms

struct NSClosedForms {
  int n = 0;
  unsigned long long V = 1;     // |S_n| = prod l_m
  unsigned long long diam = 0;  // Diam(S_n) = 2 Diam(S_{n-1}) + l_n/2
  boost::rational<long long> R{0};  // sum_j 2^{n-j-2} l_j
};

inline NSClosedForms ns_closed_forms(const std::vector<long>& l, int n) {
  require(n >= 1 && n <= static_cast<int>(l.size()), ErrorKind::out_of_range, "n outside the sequence");
  NSClosedForms c;
  c.n = n;
  for (int m = 1; m <= n; ++m) {
    long lm = l[m - 1];
    require(lm >= 2 && lm % 2 == 0, ErrorKind::invalid_parameter, "l must be even and >= 2");
    require(!__builtin_mul_overflow(c.V, static_cast<unsigned long long>(lm), &c.V), ErrorKind::out_of_range,
            "V_n overflows 64 bits");
    c.diam = 2 * c.diam + static_cast<unsigned long long>(lm / 2);
    c.R = 2 * c.R + boost::rational<long long>(lm, 4);  // R_m = 2 R_{m-1} + l_m/4
  }
  return c;
}

struct BubbleClosedForms {
  int n = 0;
  long V = 0;  // |X^n|
  long s = 0;  // sum_{i<=n} a_i, the distance scale to level-n branching cycles
};

inline BubbleClosedForms bubble_closed_forms(const std::vector<long>& a, const std::vector<long>& b, int n) {
  require(n >= 1 && n <= static_cast<int>(a.size()) && n <= static_cast<int>(b.size()) + 1, ErrorKind::out_of_range,
          "n outside the parameter prefix");
  for (int i = 0; i < n; ++i) require(a[i] >= 1, ErrorKind::invalid_parameter, "a must be positive");
  BubbleClosedForms c;
  c.n = n;
  c.V = bubble_vertex_count(a, b, n);
  for (int i = 0; i < n; ++i) c.s += a[i];
  return c;
}

// ------------------------------------------------------------------ envelopes

enum class EnvelopeFamily { bubble_thm, exa_bubb1, exa_bubb2, ns_thm, ns_gamma, exa_01, exa_O2, exa_O3, exa_O4, dinfty };
enum class Quantity { lambda1, lambda2, neglogphi, quotient };

inline const char* to_string(EnvelopeFamily f) {
  switch (f) {
    case EnvelopeFamily::bubble_thm: return "bubble-thm";
    case EnvelopeFamily::exa_bubb1: return "exa-bubb1";
    case EnvelopeFamily::exa_bubb2: return "exa-bubb2";
    case EnvelopeFamily::ns_thm: return "ns-thm";
    case EnvelopeFamily::ns_gamma: return "ns-gamma";
    case EnvelopeFamily::exa_01: return "exa-01";
    case EnvelopeFamily::exa_O2: return "exa-O2";
    case EnvelopeFamily::exa_O3: return "exa-O3";
    case EnvelopeFamily::exa_O4: return "exa-O4";
    case EnvelopeFamily::dinfty: return "dinfty";
  }
  return "?";
}

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::lambda1: return "lambda1";
    case Quantity::lambda2: return "lambda2";
    case Quantity::neglogphi: return "neglogphi";
    case Quantity::quotient: return "quotient";
  }
  return "?";
}

inline EnvelopeFamily parse_envelope_family(const std::string& s) {
  for (auto f : {EnvelopeFamily::bubble_thm, EnvelopeFamily::exa_bubb1, EnvelopeFamily::exa_bubb2,
                 EnvelopeFamily::ns_thm, EnvelopeFamily::ns_gamma, EnvelopeFamily::exa_01, EnvelopeFamily::exa_O2,
                 EnvelopeFamily::exa_O3, EnvelopeFamily::exa_O4, EnvelopeFamily::dinfty})
    if (s == to_string(f)) return f;
  fail(ErrorKind::invalid_parameter, "unknown envelope family '" + s + "'");
}

inline Quantity parse_quantity(const std::string& s) {
  for (auto q : {Quantity::lambda1, Quantity::lambda2, Quantity::neglogphi, Quantity::quotient})
    if (s == to_string(q)) return q;
  fail(ErrorKind::invalid_parameter, "unknown quantity '" + s + "'");
}

// exa-bubb2 comes in the two explicit forms the text works out.
enum class Bubb2Form { exp_kappa, power_kappa };  // 2^{f^{-1}(t)} = t^kappa | f(t) = t^kappa

struct EnvelopeSpec {
  EnvelopeFamily family = EnvelopeFamily::dinfty;
  double param = 0;  // beta, gamma, varkappa or kappa
  Bubb2Form form = Bubb2Form::exp_kappa;
  std::vector<long> l;     // ns-thm
  std::vector<long> a, b;  // bubble-thm
};

// t^power (log t)^log_power
struct PowerLog {
  double power = 0, log_power = 0;
  double at(double t) const { return std::pow(t, power) * std::pow(std::log(t), log_power); }
};

struct Envelope {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  std::string piece;
  double central() const {
    if (std::isnan(lower)) return upper;
    if (std::isnan(upper)) return lower;
    return std::sqrt(lower * upper);
  }
};

inline void validate(const EnvelopeSpec& s) {
  switch (s.family) {
    case EnvelopeFamily::exa_bubb1:
      require(s.param > 0, ErrorKind::invalid_parameter, "beta must be > 0");
      break;
    case EnvelopeFamily::exa_bubb2:
      require(s.param > 0, ErrorKind::invalid_parameter, "kappa must be > 0");
      require(s.form == Bubb2Form::exp_kappa || s.param > 1, ErrorKind::invalid_parameter,
              "f(t) = t^kappa needs kappa > 1");
      break;
    case EnvelopeFamily::ns_gamma:
      require(s.param >= 1, ErrorKind::invalid_parameter, "gamma must be >= 1");
      break;
    case EnvelopeFamily::exa_01:
    case EnvelopeFamily::exa_O4:
      require(s.param > 1, ErrorKind::invalid_parameter, "varkappa must be > 1");
      break;
    case EnvelopeFamily::ns_thm:
      require(!s.l.empty(), ErrorKind::invalid_parameter, "ns-thm needs the sequence l");
      for (std::size_t i = 0; i < s.l.size(); ++i) {
        require(s.l[i] >= 2 && (s.l[i] & (s.l[i] - 1)) == 0, ErrorKind::invalid_parameter,
                "ns-thm needs l_n = 2^kappa(n)");
        if (i > 0)
          require(s.l[i] >= 2 * s.l[i - 1], ErrorKind::invalid_parameter, "ns-thm needs kappa(n+1) >= kappa(n)+1");
      }
      break;
    case EnvelopeFamily::bubble_thm:
      require(!s.a.empty() && s.b.size() + 1 >= s.a.size(), ErrorKind::invalid_parameter,
              "bubble-thm needs a and b with |b| >= |a| - 1");
      break;
    default:
      break;
  }
}

// Exponent pairs of the pure t^p (log t)^q envelopes of -log Phi; nullopt when the family has
// no such form.  first = lower envelope, second = upper.
inline std::optional<std::pair<PowerLog, PowerLog>> neglogphi_exponents(const EnvelopeSpec& s) {
  double k = s.param;
  PowerLog lo, hi;
  switch (s.family) {
    case EnvelopeFamily::exa_bubb1:
      lo = hi = {(k + 1) / (3 * k + 1), 2 * k / (3 * k + 1)};
      return std::pair{lo, hi};
    case EnvelopeFamily::exa_01:
      lo = {k / (3 * k - 2), (2 * k - 2) / (3 * k - 2)};
      hi = {(2 * k - 1) / (4 * k - 3), (2 * k - 2) / (4 * k - 3)};
      return std::pair{lo, hi};
    case EnvelopeFamily::exa_O2:
      return std::pair{PowerLog{1.0 / 3, 4.0 / 3}, PowerLog{0.5, 1}};
    default:
      return std::nullopt;
  }
}

// exponent of [(1+gamma) log2 log v] in the log2 of the NS-gamma profiles
inline double ns_gamma_exponent(double gamma) { return gamma / (1 + gamma); }

namespace detail {

// smallest r in [lo, hi] with g(r) >= target, g increasing
template <class G>
double invert_increasing(G g, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

inline Envelope ns_thm_lambda2(const std::vector<long>& l, double lv) {
  double V = 1;
  for (std::size_t n = 1; n <= l.size(); ++n) {
    double ln = static_cast<double>(l[n - 1]);
    double lprev = n >= 2 ? static_cast<double>(l[n - 2]) : 0;
    if (n >= 2) {
      double lo = V * lprev * std::log(lprev), hi = V * ln * std::log(ln);
      if (lv >= lo && lv < hi) {
        double r = invert_increasing([&](double x) { return V * x * std::log(x); }, lv, lprev, ln);
        Envelope e;
        e.lower = e.upper = 1 / (r * r);
        e.piece = "n=" + std::to_string(n) + " r=" + std::to_string(r);
        return e;
      }
    }
    double lo = V * ln * std::log(ln), hi = V * ln * ln * std::log(ln);
    bool last = n == l.size();
    if (lv >= lo && (lv < hi || (last && lv <= hi))) {
      Envelope e;
      e.lower = e.upper = 1 / (ln * ln);
      e.piece = "n=" + std::to_string(n) + " plateau";
      return e;
    }
    V *= ln;
  }
  fail(ErrorKind::out_of_range, "v outside the range covered by the sequence");
}

inline Envelope ns_thm_neglogphi(const std::vector<long>& l, double t) {
  double V = 1;
  for (std::size_t n = 1; n <= l.size(); ++n) {
    double ln = static_cast<double>(l[n - 1]);
    if (n >= 2) {
      double lp = static_cast<double>(l[n - 2]);
      double lo = V * lp * lp * lp * std::log(lp), hi = V * ln * ln * ln * std::log(ln);
      if (t >= lo && t < hi) {
        Envelope e;
        e.lower = e.upper = std::pow(V, 2.0 / 3) * std::cbrt(t) * std::pow(std::log(t / V), 2.0 / 3);
        e.piece = "n=" + std::to_string(n) + " piece 1";
        return e;
      }
    }
    double lo = V * ln * ln * ln * std::log(ln), hi = V * ln * ln * ln * ln * std::log(ln);
    bool last = n == l.size();
    if (t >= lo && (t < hi || (last && t <= hi))) {
      Envelope e;
      e.lower = e.upper = t / (ln * ln);
      e.piece = "n=" + std::to_string(n) + " piece 2";
      return e;
    }
    V *= ln;
  }
  fail(ErrorKind::out_of_range, "t outside the range covered by the sequence");
}

// |B_X(o, r)| by BFS on the bubble graph
inline long bubble_ball_size(const std::vector<long>& a, const std::vector<long>& b, long r) {
  BubbleAction x(a, b);
  try {
    return static_cast<long>(ball(x, std::vector<BubbleVertex>{x.root()}, static_cast<int>(r)).vertices.size());
  } catch (const Error&) {
    fail(ErrorKind::out_of_range, "ball of radius " + std::to_string(r) + " leaves the parameter prefix");
  }
}

// (|X^{k(r)-1}| + prod_{i<=k(r)} (b_i - 1) r/2)!, in logs
inline double bubble_log_threshold(const std::vector<long>& a, const std::vector<long>& b, long r) {
  int k = bubble_k_of_r(a, r);
  double m = k >= 2 ? static_cast<double>(bubble_vertex_count(a, b, k - 1)) : 0.0;
  double branch = 1;
  for (int i = 1; i <= k && i <= static_cast<int>(b.size()); ++i) branch *= static_cast<double>(b[i - 1] - 1);
  m += branch * static_cast<double>(r) / 2;
  return std::lgamma(m + 1);
}

}  // namespace detail

namespace detail {

[[noreturn]] inline void unsupported(const EnvelopeSpec& s, Quantity q) {
  fail(ErrorKind::invalid_parameter, std::string("quantity ") + to_string(q) + " is not predicted for " + to_string(s.family));
}

}  // namespace detail

// Profile envelopes depend on v only through log v; volumes in these families overflow a double
// long before the envelopes become interesting.
inline Envelope predicted_profile(const EnvelopeSpec& s, Quantity q, double log_v) {
  validate(s);
  if (q != Quantity::lambda1 && q != Quantity::lambda2) detail::unsupported(s, q);
  require(log_v >= std::log(3.0), ErrorKind::out_of_range, "argument must be >= 3");
  const double k = s.param;
  Envelope e;
  auto from_2 = [&](double l2) {
    e.lower = e.upper = q == Quantity::lambda1 ? std::sqrt(l2) : l2;
    return e;
  };
  auto loglog = [&] {
    require(log_v > 1, ErrorKind::out_of_range, "log log v must be positive");
    return std::log(log_v);
  };
  switch (s.family) {
    case EnvelopeFamily::exa_bubb1:
      return from_2(std::pow(loglog() / log_v, 2 * k / (k + 1)));
    case EnvelopeFamily::exa_bubb2: {
      double ll = loglog();
      double growth = s.form == Bubb2Form::exp_kappa ? std::pow(ll, k) : std::exp2(std::pow(ll, 1 / k));
      double r = growth * ll / log_v;
      return from_2(r * r);
    }
    case EnvelopeFamily::ns_gamma: {
      loglog();
      double l1 = std::exp2(-std::pow((1 + k) * std::log2(log_v), ns_gamma_exponent(k)));
      return from_2(l1 * l1);
    }
    case EnvelopeFamily::ns_thm: {
      auto l2 = detail::ns_thm_lambda2(s.l, log_v);
      if (q == Quantity::lambda1) l2.lower = l2.upper = std::sqrt(l2.lower);
      return l2;
    }
    case EnvelopeFamily::bubble_thm: {
      if (q == Quantity::lambda1) {
        // 1/r for v <= r^{|B(o,r)|}: the smallest admissible r gives the best lower bound
        for (long r = 2;; ++r)
          if (log_v <= static_cast<double>(detail::bubble_ball_size(s.a, s.b, r)) * std::log(static_cast<double>(r))) {
            e.lower = 1.0 / static_cast<double>(r);
            e.piece = "r=" + std::to_string(r);
            return e;
          }
      }
      // C/r^2 for v >= (...)!: the largest admissible r
      long best = 0;
      for (long r = 2; 2 * r < s.a.back() && detail::bubble_log_threshold(s.a, s.b, r) <= log_v; ++r) best = r;
      require(best > 0, ErrorKind::out_of_range, "v below the first threshold");
      e.upper = 1.0 / static_cast<double>(best * best);
      e.piece = "r=" + std::to_string(best) + " k=" + std::to_string(bubble_k_of_r(s.a, best));
      return e;
    }
    default:
      detail::unsupported(s, q);
  }
}

// Envelope of the chosen quantity at argument x (volume v, time t, or level n for dinfty), unit
// constants throughout.
inline Envelope predicted(const EnvelopeSpec& s, Quantity q, double x) {
  validate(s);
  if (s.family == EnvelopeFamily::dinfty) {
    if (q != Quantity::quotient) detail::unsupported(s, q);
    require(x >= 1, ErrorKind::out_of_range, "level must be >= 1");
    Envelope e;
    e.lower = e.upper = 3.0 / std::pow(4.0, x - 1);
    return e;
  }
  require(x >= 3, ErrorKind::out_of_range, "argument must be >= 3");
  if (q == Quantity::lambda1 || q == Quantity::lambda2) return predicted_profile(s, q, std::log(x));
  if (q != Quantity::neglogphi) detail::unsupported(s, q);
  const double k = s.param;
  Envelope e;
  auto both = [&](double v) {
    e.lower = e.upper = v;
    return e;
  };
  const double lt = std::log(x);
  switch (s.family) {
    case EnvelopeFamily::exa_bubb1:
      return both(neglogphi_exponents(s)->first.at(x));
    case EnvelopeFamily::exa_bubb2:
      if (s.form == Bubb2Form::exp_kappa) return both(std::cbrt(x) * std::pow(lt, 2 * (1 + k) / 3));
      return both(std::cbrt(x) * std::pow(lt, 2.0 / 3) * std::exp2(2.0 / 3 * std::pow(lt, 1 / k)));
    case EnvelopeFamily::ns_gamma:
      return both(x / std::exp2(2 * std::pow((1 + k) * std::log2(x), ns_gamma_exponent(k))));
    case EnvelopeFamily::exa_01:
    case EnvelopeFamily::exa_O2: {
      auto p = *neglogphi_exponents(s);
      e.lower = p.first.at(x);
      e.upper = p.second.at(x);
      return e;
    }
    case EnvelopeFamily::exa_O3:
    case EnvelopeFamily::exa_O4: {
      bool o3 = s.family == EnvelopeFamily::exa_O3;
      PowerLog lo = o3 ? PowerLog{1.0 / 3, 4.0 / 3} : PowerLog{k / (3 * k - 2), (2 * k - 2) / (3 * k - 2)};
      double inner = 2.0 / 3 * (o3 ? std::log2(x) : lt);
      e.lower = lo.at(x);
      e.upper = x / std::exp2(4 * std::sqrt(inner));
      return e;
    }
    case EnvelopeFamily::ns_thm:
      return detail::ns_thm_neglogphi(s.l, x);
    default:
      detail::unsupported(s, q);
  }
}

// Times where ns-thm switches from the cube-root piece to the linear piece:
// t = V_{n-1} l_n^3 log l_n, n = 1..|l|.
inline std::vector<double> ns_thm_breaks(const std::vector<long>& l) {
  std::vector<double> out;
  double V = 1;
  for (long ln : l) {
    double x = static_cast<double>(ln);
    out.push_back(V * x * x * x * std::log(x));
    V *= x;
  }
  return out;
}

// ------------------------------------------------------------------ comparisons

struct ComparePoint {
  double x = 0, measured = 0, predicted = 0, ratio = 0;
};

enum class Trend { constant, increasing, decreasing, mixed };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::constant: return "constant";
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::mixed: return "mixed";
  }
  return "?";
}

struct CompareReport {
  std::vector<ComparePoint> points;
  double min_ratio = 0, max_ratio = 0;
  Trend trend = Trend::constant;
  bool stable = true;  // max/min within the band
  bool drift = false;  // unstable and not monotone settling
};

inline CompareReport compare(const std::vector<std::pair<double, double>>& measured, const EnvelopeSpec& s, Quantity q,
                             double band = 4.0) {
  require(!measured.empty(), ErrorKind::invalid_parameter, "measured table is empty");
  require(band >= 1, ErrorKind::invalid_parameter, "band must be >= 1");
  CompareReport r;
  for (auto [x, m] : measured) {
    ComparePoint p{x, m, predicted(s, q, x).central(), 0};
    p.ratio = p.measured / p.predicted;
    r.points.push_back(p);
  }
  r.min_ratio = r.max_ratio = r.points.front().ratio;
  bool up = false, down = false;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    r.min_ratio = std::min(r.min_ratio, r.points[i].ratio);
    r.max_ratio = std::max(r.max_ratio, r.points[i].ratio);
    if (i == 0) continue;
    double d = r.points[i].ratio - r.points[i - 1].ratio;
    double tol = 1e-9 * std::max(1.0, std::abs(r.points[i].ratio));  // tables carry 12 digits
    if (d > tol) up = true;
    if (d < -tol) down = true;
  }
  r.trend = up && down ? Trend::mixed : up ? Trend::increasing : down ? Trend::decreasing : Trend::constant;
  r.stable = r.max_ratio <= band * r.min_ratio;
  r.drift = !r.stable && r.trend == Trend::mixed;
  return r;
}

}  // namespace permwalk
