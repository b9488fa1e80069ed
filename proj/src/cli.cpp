#include "cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "permwalk/asymptotics.hpp"
#include "permwalk/families.hpp"
#include "permwalk/resistance.hpp"
#include "permwalk/spectral.hpp"
#include "permwalk/suite.hpp"
#include "permwalk/tree.hpp"
#include "permwalk/wreath.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace permwalk::cli {

std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv(out_dir_env);
  if (dir == nullptr || *dir == '\0' || fs::path(path).is_absolute()) return path;
  return (fs::path(dir) / path).string();
}

void write_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

namespace {

using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::string p = path;
  if (!fs::exists(p)) {
    // files written by earlier commands sit in the output directory
    auto alt = resolve_output(path);
    if (fs::exists(alt)) p = alt;
  }
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<long> int_list(const std::string& s, const char* what) {
  try {
    return parse_int_list(s);
  } catch (const Error&) {
    throw UsageError(std::string("--") + what + ": expected comma-separated integers, got '" + s + "'");
  }
}

double number(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw UsageError(std::string("--") + what + ": not a number: '" + s + "'");
  return v;
}

void need(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

// Per-command options; every leaf command also has --config, --seed and --out.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, const char* out_help = "output path (default: stdout)") {
  sub->add_option("--config", c.config, "key=value experiment file; flags override it");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, out_help);
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty() || out_path == "-")
    out << content;
  else
    write_atomic(resolve_output(out_path), content);
}

// ------------------------------------------------------------------ build

struct BuildOpts {
  Common c;
  std::string family, l, a, b;
  int depth = 0;
};

std::string cmd_build(const BuildOpts& o, std::ostream& out) {
  need(!o.family.empty(), "build: --family is required (ns|bubble|dihedral)");
  need(o.depth >= 1, "build: --depth must be >= 1");
  FiniteSchreierGraph g = [&] {
    if (o.family == "ns") {
      need(!o.l.empty(), "build: --l is required for ns");
      return build_ns(int_list(o.l, "l"), o.depth);
    }
    if (o.family == "bubble") {
      need(!o.a.empty() && !o.b.empty(), "build: --a and --b are required for bubble");
      return build_bubble(int_list(o.a, "a"), int_list(o.b, "b"), o.depth);
    }
    if (o.family == "dihedral") {
      need(o.depth <= 24, "build: dihedral depth must be <= 24");
      return build_dihedral_line(std::int64_t{1} << o.depth);
    }
    throw UsageError("build: unknown family '" + o.family + "' (ns|bubble|dihedral)");
  }();
  emit(o.c.out, serialize(g), out);
  return "vertices=" + std::to_string(g.size());
}

// ------------------------------------------------------------------ walk

struct WalkOpts {
  Common c;
  std::string graph, lamp = "Z2", measure = "sow";
  int n = 0;
  std::uint64_t trials = 10000;
  unsigned workers = 1;
  bool exact = false;
  std::size_t max_states = 1'000'000;
};

LampGroup parse_lamp(const std::string& s) {
  if (s == "Z") return {0};
  if (s.size() > 1 && s[0] == 'Z' && s.find_first_not_of("0123456789", 1) == std::string::npos) {
    long m = std::stol(s.substr(1));
    if (m >= 2) return {m};
  }
  throw UsageError("--lamp: expected Z or Zm with m >= 2, got '" + s + "'");
}

void cmd_walk(const WalkOpts& o, std::ostream& out) {
  need(!o.graph.empty(), "walk: --graph is required");
  need(o.n >= 1, "walk: --n must be >= 1");
  need(o.exact || o.c.seed.has_value(), "walk: --seed is required for Monte Carlo runs");
  need(o.trials >= 1, "walk: --trials must be >= 1");
  auto g = deserialize(read_file(o.graph));
  auto h = parse_lamp(o.lamp);
  PermHost host(g, h);
  LampLaw eta = h.modulus == 2 ? LampLaw{{1, 1.0}} : LampLaw{{1, 0.5}, {-1, 0.5}};
  MeasureKind kind;
  try {
    kind = parse_measure_kind(o.measure);
  } catch (const Error& e) {
    throw UsageError(std::string("--measure: ") + e.what());
  }
  need(kind != MeasureKind::custom, "walk: --measure must be sow or sws");
  auto m = make_measure(host, kind, eta, uniform_base_law(g.generators()));
  std::ostringstream csv;
  if (o.exact) {
    auto ex = return_probability_exact(host, m, static_cast<std::size_t>(o.n), o.max_states);
    csv << "n,probability\n";
    for (int k = 1; k <= o.n; ++k) csv << k << "," << fmt(ex.probability[k]) << "\n";
  } else {
    csv << "n,estimate,stderr,trials,seed\n";
    for (int k = 1; k <= o.n; ++k) {
      auto est = return_probability_mc(host, m, static_cast<std::size_t>(k), o.trials, *o.c.seed, o.workers);
      csv << k << "," << fmt(est.estimate) << "," << fmt(est.stderr_) << "," << est.trials << "," << est.seed
          << "\n";
    }
  }
  emit(o.c.out, csv.str(), out);
}

// ------------------------------------------------------------------ profile

struct ProfileOpts {
  Common c;
  std::string graph;
  std::size_t vmax = 0, budget = 5'000'000;
  unsigned workers = 1;
  bool no_lambda2 = false;
};

void cmd_profile(const ProfileOpts& o, std::ostream& out) {
  need(!o.graph.empty(), "profile: --graph is required");
  need(o.vmax >= 1, "profile: --vmax must be >= 1");
  auto g = deserialize(read_file(o.graph));
  auto t = profile_exact(simple_kernel(g), o.vmax, o.budget, o.workers, !o.no_lambda2);
  std::ostringstream csv;
  csv << "v,lambda1,lambda2,provenance\n";
  for (std::size_t i = 0; i < t.volumes.size(); ++i)
    csv << t.volumes[i] << "," << fmt(t.lambda1[i]) << "," << (o.no_lambda2 ? "" : fmt(t.lambda2[i])) << ","
        << to_string(t.provenance) << "\n";
  emit(o.c.out, csv.str(), out);
}

// ------------------------------------------------------------------ resistance

struct ResistanceOpts {
  Common c;
  std::string graph, source, sink, potentials, conductance = "law";
  int sink_beyond = -1;
};

std::vector<std::uint32_t> labels_to_vertices(const FiniteSchreierGraph& g, const std::string& list) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(' '), e = tok.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(g.find(tok.substr(b, e - b + 1)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void cmd_resistance(const ResistanceOpts& o, std::ostream& out) {
  need(!o.graph.empty(), "resistance: --graph is required");
  need(o.sink.empty() != (o.sink_beyond < 0), "resistance: give exactly one of --sink and --sink-beyond");
  auto g = deserialize(read_file(o.graph));
  std::vector<std::uint32_t> U = o.source.empty() ? std::vector<std::uint32_t>{g.root()} : labels_to_vertices(g, o.source);
  std::vector<std::uint32_t> V;
  if (!o.sink.empty()) {
    V = labels_to_vertices(g, o.sink);
  } else {
    auto d = bfs_distances(g, U);
    for (std::uint32_t x = 0; x < g.size(); ++x)
      if (d[x] > o.sink_beyond) V.push_back(x);
    need(!V.empty(), "resistance: no vertex lies beyond distance " + std::to_string(o.sink_beyond));
  }
  ResistanceProblem p;
  if (o.conductance == "law")
    p = resistance_problem(g, uniform_letters(g.generators()), U, V);
  else if (o.conductance == "unit")
    p = unit_problem(g, U, V);
  else
    throw UsageError("--conductance: expected law or unit");
  auto r = effective_resistance(p);
  std::ostringstream csv;
  csv << "R,energy,solver_residual\n" << fmt(r.R) << "," << fmt(r.potential.energy) << "," << fmt(r.potential.residual)
      << "\n";
  emit(o.c.out, csv.str(), out);
  if (!o.potentials.empty()) {
    std::ostringstream pc;
    pc << "vertex,h\n";
    for (std::uint32_t x = 0; x < g.size(); ++x) pc << g.label(x) << "," << fmt(r.potential.h[x]) << "\n";
    write_atomic(resolve_output(o.potentials), pc.str());
  }
}

// ------------------------------------------------------------------ verify omega

struct VerifyOpts {
  Common c;
  std::string family, l, a, b, m = "2,3";
  int level = 0, radius = 1;
  std::size_t samples = 1000, budget = 100'000;
};

int cmd_verify_omega(const VerifyOpts& o, std::ostream& out) {
  need(!o.family.empty(), "verify omega: --family is required (dihedral|bubble|ns)");
  need(o.level >= 1, "verify omega: --level must be >= 1");
  OmegaSuiteParams p;
  try {
    p.family = parse_family(o.family);
  } catch (const Error& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
  p.level = o.level;
  p.samples = o.samples;
  p.seed = o.c.seed.value_or(1);
  p.radius = o.radius;
  p.budget = o.budget;
  if (!o.l.empty()) p.l = int_list(o.l, "l");
  if (!o.a.empty()) p.a = int_list(o.a, "a");
  if (!o.b.empty()) p.b = int_list(o.b, "b");
  p.M = int_list(o.m, "m");
  need(!p.M.empty() && std::all_of(p.M.begin(), p.M.end(), [](long M) { return M >= 1; }),
       "--m: lamp ranges must be >= 1");
  need(p.family != Family::ns || !p.l.empty(), "verify omega: --l is required for ns");
  auto checks = omega_suite(p);
  bool all = true;
  std::ostringstream lines;
  for (const auto& c : checks) {
    all = all && c.pass;
    json j = {{"family", c.family}, {"level", p.level},  {"check", c.check},
              {"pass", c.pass},     {"cases", c.cases},  {"detail", c.detail}};
    lines << j.dump() << "\n";
  }
  json s = {{"suite", "omega"}, {"family", to_string(p.family)}, {"level", p.level},
            {"seed", p.seed},   {"checks", checks.size()},       {"pass", all}};
  lines << s.dump() << "\n";
  emit(o.c.out, lines.str(), out);
  return all ? exit_ok : exit_check_failed;
}

// ------------------------------------------------------------------ envelopes

struct EnvelopeOpts {
  std::string family, param, quantity, form = "exp", l, a, b;
};

void add_envelope(CLI::App* sub, EnvelopeOpts& e) {
  sub->add_option("--family", e.family,
                  "bubble-thm|exa-bubb1|exa-bubb2|ns-thm|ns-gamma|exa-01|exa-O2|exa-O3|exa-O4|dinfty");
  sub->add_option("--param", e.param, "beta, gamma, varkappa or kappa; the sequence l for ns-thm");
  sub->add_option("--quantity", e.quantity, "lambda1|lambda2|neglogphi|quotient");
  sub->add_option("--form", e.form, "exa-bubb2 form: exp|power");
  sub->add_option("--l", e.l, "ns-thm sequence");
  sub->add_option("--a", e.a, "bubble-thm a");
  sub->add_option("--b", e.b, "bubble-thm b");
}

std::pair<EnvelopeSpec, Quantity> envelope_of(const EnvelopeOpts& o) {
  need(!o.family.empty(), "--family is required");
  EnvelopeSpec s;
  try {
    s.family = parse_envelope_family(o.family);
  } catch (const Error& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
  switch (s.family) {
    case EnvelopeFamily::ns_thm:
      s.l = int_list(o.l.empty() ? o.param : o.l, "param");
      need(!s.l.empty(), "ns-thm needs --param l1,l2,...");
      break;
    case EnvelopeFamily::bubble_thm:
      need(!o.a.empty() && !o.b.empty(), "bubble-thm needs --a and --b");
      s.a = int_list(o.a, "a");
      s.b = int_list(o.b, "b");
      break;
    case EnvelopeFamily::dinfty:
      break;
    default:
      need(!o.param.empty(), o.family + " needs --param");
      s.param = number(o.param, "param");
  }
  if (o.form == "exp")
    s.form = Bubb2Form::exp_kappa;
  else if (o.form == "power")
    s.form = Bubb2Form::power_kappa;
  else
    throw UsageError("--form: expected exp or power");
  Quantity q = s.family == EnvelopeFamily::dinfty       ? Quantity::quotient
               : s.family == EnvelopeFamily::bubble_thm ? Quantity::lambda2
                                                        : Quantity::neglogphi;
  if (!o.quantity.empty()) {
    try {
      q = parse_quantity(o.quantity);
    } catch (const Error& e) {
      throw UsageError(std::string("--quantity: ") + e.what());
    }
  }
  validate(s);
  return {s, q};
}

struct PredictOpts {
  Common c;
  EnvelopeOpts env;
  double from = 0, to = 0;
  int points = 20;
};

void cmd_predict(const PredictOpts& o, std::ostream& out) {
  auto [s, q] = envelope_of(o.env);
  std::vector<double> xs;
  if (s.family == EnvelopeFamily::dinfty) {
    long lo = o.from > 0 ? static_cast<long>(o.from) : 1, hi = o.to > 0 ? static_cast<long>(o.to) : 10;
    need(lo >= 1 && hi >= lo, "predict: need 1 <= --from <= --to");
    for (long n = lo; n <= hi; ++n) xs.push_back(static_cast<double>(n));
  } else {
    double lo = o.from > 0 ? o.from : 16, hi = o.to > 0 ? o.to : 1e6;
    need(lo >= 3 && hi >= lo, "predict: need 3 <= --from <= --to");
    need(o.points >= 1, "predict: --points must be >= 1");
    for (int i = 0; i < o.points; ++i)
      xs.push_back(o.points == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (o.points - 1)));
  }
  std::ostringstream csv;
  csv << "x,value\n";
  for (double x : xs) csv << fmt(x) << "," << fmt(predicted(s, q, x).central()) << "\n";
  emit(o.c.out, csv.str(), out);
}

// ------------------------------------------------------------------ report

struct ReportOpts {
  Common c;
  EnvelopeOpts env;
  std::vector<std::string> measured;
  std::string summary, xcol = "x", ycol = "value";
  double band = 4;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<double, double>> rows;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(" \t\r"), e = tok.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(const std::string& path, const std::string& xcol, const std::string& ycol) {
  std::istringstream in(read_file(path));
  std::string line;
  Table t;
  while (std::getline(in, line) && split_csv(line).empty()) {
  }
  if (in.fail() && line.empty()) throw UsageError(path + ": empty table");
  t.header = split_csv(line);
  auto col = [&](const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw UsageError(path + ": no column '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
  };
  std::size_t ix = col(xcol), iy = col(ycol);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_csv(line);
    if (f.empty() || (f.size() == 1 && f[0].empty())) continue;
    if (f.size() != t.header.size())
      throw UsageError(path + ":" + std::to_string(lineno) + ": " + std::to_string(f.size()) + " columns, header has " +
                       std::to_string(t.header.size()));
    t.rows.emplace_back(number(f[ix], "measured x"), number(f[iy], "measured value"));
  }
  if (t.rows.empty()) throw UsageError(path + ": empty table");
  return t;
}

void cmd_report(const ReportOpts& o, std::ostream& out, std::ostream& err) {
  need(!o.measured.empty(), "report: --measured is required");
  need(!o.c.out.empty() && o.c.out != "-", "report: --out <plot.svg> is required");
  auto [s, q] = envelope_of(o.env);
  std::vector<std::pair<double, double>> pts;
  std::vector<std::string> header;
  for (const auto& path : o.measured) {
    auto t = read_table(path, o.xcol, o.ycol);
    if (header.empty())
      header = t.header;
    else if (t.header != header)
      throw UsageError(path + ": columns differ from " + o.measured.front());
    pts.insert(pts.end(), t.rows.begin(), t.rows.end());
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  auto rep = compare(pts, s, q, o.band);

  PlotSpec plot;
  plot.title = std::string(to_string(s.family)) + ": " + to_string(q) + " measured vs predicted";
  plot.xlabel = s.family == EnvelopeFamily::dinfty                              ? "level n"
                : (q == Quantity::lambda1 || q == Quantity::lambda2) ? "volume v"
                                                                               : "time t";
  plot.ylabel = to_string(q);
  PlotSeries meas{"measured", {}, {}, "#1f77b4", false, true};
  for (const auto& p : rep.points) {
    meas.x.push_back(p.x);
    meas.y.push_back(p.measured);
    plot.ratio_x.push_back(p.x);
    plot.ratio_y.push_back(p.ratio);
  }
  PlotSeries central{"predicted", {}, {}, "#ff7f0e", false, false};
  PlotSeries lower{"lower", {}, {}, "#ff7f0e", true, false}, upper{"upper", {}, {}, "#ff7f0e", true, false};
  double lo = pts.front().first, hi = pts.back().first;
  const int dense = 200;
  bool band = false;
  for (int i = 0; i < dense; ++i) {
    double x = lo == hi ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (dense - 1));
    Envelope e;
    try {
      e = predicted(s, q, x);
    } catch (const Error&) {
      continue;
    }
    central.x.push_back(x);
    central.y.push_back(e.central());
    if (!std::isnan(e.lower) && !std::isnan(e.upper) && e.lower != e.upper) band = true;
    lower.x.push_back(x);
    lower.y.push_back(std::isnan(e.lower) ? e.central() : e.lower);
    upper.x.push_back(x);
    upper.y.push_back(std::isnan(e.upper) ? e.central() : e.upper);
  }
  plot.series.push_back(meas);
  plot.series.push_back(central);
  if (band) {
    plot.series.push_back(lower);
    plot.series.push_back(upper);
  }
  if (s.family == EnvelopeFamily::ns_thm && q == Quantity::neglogphi) {
    auto br = ns_thm_breaks(s.l);
    for (std::size_t n = 1; n < br.size(); ++n) plot.marks.emplace_back(br[n], "break n=" + std::to_string(n + 1));
  }
  write_atomic(resolve_output(o.c.out), render_svg(plot));

  std::ostringstream csv;
  csv << "x,measured,predicted,ratio\n";
  for (const auto& p : rep.points)
    csv << fmt(p.x) << "," << fmt(p.measured) << "," << fmt(p.predicted) << "," << fmt(p.ratio) << "\n";
  emit(o.summary, csv.str(), out);
  err << "trend=" << to_string(rep.trend) << " min_ratio=" << fmt(rep.min_ratio) << " max_ratio=" << fmt(rep.max_ratio)
      << " stable=" << (rep.stable ? "yes" : "no") << (rep.drift ? " drift" : "") << "\n";
}

// ------------------------------------------------------------------ treeauto

struct TreeautoOpts {
  Common c;
  std::string automaton, element, vertex;
};

void cmd_treeauto_eval(const TreeautoOpts& o, std::ostream& out) {
  need(!o.automaton.empty() && !o.element.empty() && !o.vertex.empty(),
       "treeauto eval: --automaton, --element and --vertex are required");
  std::string text = o.automaton;
  if (o.automaton.find(':') == std::string::npos) text = read_file(o.automaton);
  auto A = parse_automaton(text);
  auto g = parse_element(A, o.element);
  int depth = 0;
  for (char ch : o.vertex) depth += ch != '.';
  if (o.vertex.find('.') != std::string::npos)
    depth = static_cast<int>(std::count(o.vertex.begin(), o.vertex.end(), '.')) + 1;
  auto shape = constant_shape(A, depth);
  auto v = parse_tree_word(o.vertex, shape);
  emit(o.c.out, format_tree_word(evaluate_checked(A, g, v, shape), shape) + "\n", out);
}

void print_error(std::ostream& err, const std::string& command, const std::string& kind, const std::string& msg) {
  json j = {{"error", kind}, {"command", command}, {"message", msg}};
  err << j.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"permutation wreath product random walks on Schreier graphs", "permwalk"};
  app.require_subcommand(1);
  app.fallthrough(false);

  BuildOpts build;
  auto* sb = app.add_subcommand("build", "materialize a Schreier graph (graph text format v1)");
  add_common(sb, build.c);
  sb->add_option("--family", build.family, "ns|bubble|dihedral");
  sb->add_option("--l", build.l, "ns sequence, e.g. 2,4,4");
  sb->add_option("--a", build.a, "bubble a sequence");
  sb->add_option("--b", build.b, "bubble b sequence");
  sb->add_option("--depth", build.depth, "level (dihedral: 2^depth vertices)");

  WalkOpts walk;
  auto* sw = app.add_subcommand("walk", "return probabilities of the lamplighter walk");
  add_common(sw, walk.c);
  sw->add_option("--graph", walk.graph, "graph file");
  sw->add_option("--lamp", walk.lamp, "Z2, Zm or Z")->capture_default_str();
  sw->add_option("--measure", walk.measure, "sow|sws")->capture_default_str();
  sw->add_option("--n", walk.n, "rows n = 1..N of q^(2n)(e)");
  sw->add_option("--trials", walk.trials, "Monte Carlo trials")->capture_default_str();
  sw->add_option("--workers", walk.workers, "threads; output does not depend on it")->capture_default_str();
  sw->add_flag("--exact", walk.exact, "exact convolution instead of Monte Carlo");
  sw->add_option("--max-states", walk.max_states, "exact state budget")->capture_default_str();

  ProfileOpts prof;
  auto* sp = app.add_subcommand("profile", "exact isoperimetric profiles");
  add_common(sp, prof.c);
  sp->add_option("--graph", prof.graph, "graph file");
  sp->add_option("--vmax", prof.vmax, "largest volume");
  sp->add_option("--budget", prof.budget, "subset enumeration budget")->capture_default_str();
  sp->add_option("--workers", prof.workers, "threads")->capture_default_str();
  sp->add_flag("--no-lambda2", prof.no_lambda2, "skip the Dirichlet eigenvalue");

  ResistanceOpts res;
  auto* sr = app.add_subcommand("resistance", "effective resistance between vertex sets");
  add_common(sr, res.c);
  sr->add_option("--graph", res.graph, "graph file");
  sr->add_option("--source", res.source, "comma-separated labels (default: root)");
  sr->add_option("--sink", res.sink, "comma-separated labels");
  sr->add_option("--sink-beyond", res.sink_beyond, "sink = vertices farther than R from the source");
  sr->add_option("--conductance", res.conductance, "law (mu/2 per letter edge) or unit")->capture_default_str();
  sr->add_option("--potentials", res.potentials, "write vertex,h CSV here");

  VerifyOpts ver;
  auto* sv = app.add_subcommand("verify", "lemma checks");
  sv->require_subcommand(1);
  auto* svo = sv->add_subcommand("omega", "local embedding suite: multiplicativity, Theta, Phi");
  add_common(svo, ver.c);
  svo->add_option("--family", ver.family, "dihedral|bubble|ns");
  svo->add_option("--level", ver.level, "n (dihedral, ns) or k (bubble)");
  svo->add_option("--l", ver.l, "ns sequence");
  svo->add_option("--a", ver.a, "bubble a sequence");
  svo->add_option("--b", ver.b, "bubble b sequence");
  svo->add_option("--radius", ver.radius, "bubble midpoint ball radius")->capture_default_str();
  svo->add_option("--samples", ver.samples, "random word pairs")->capture_default_str();
  svo->add_option("--m", ver.m, "lamp ranges M")->capture_default_str();
  svo->add_option("--budget", ver.budget, "vertices per lamp component")->capture_default_str();

  PredictOpts pred;
  auto* spr = app.add_subcommand("predict", "envelope at unit constants");
  add_common(spr, pred.c);
  add_envelope(spr, pred.env);
  spr->add_option("--from", pred.from, "first argument");
  spr->add_option("--to", pred.to, "last argument");
  spr->add_option("--points", pred.points, "log-spaced points")->capture_default_str();

  ReportOpts rep;
  auto* srp = app.add_subcommand("report", "plot measured against predicted");
  add_common(srp, rep.c, "SVG path");
  add_envelope(srp, rep.env);
  srp->add_option("--measured", rep.measured, "measured CSV (repeatable)");
  srp->add_option("--summary", rep.summary, "summary CSV path (default: stdout)");
  srp->add_option("--x-column", rep.xcol, "argument column")->capture_default_str();
  srp->add_option("--y-column", rep.ycol, "value column")->capture_default_str();
  srp->add_option("--band", rep.band, "ratio band for stability")->capture_default_str();

  TreeautoOpts ta;
  auto* st = app.add_subcommand("treeauto", "rooted tree automorphisms");
  st->require_subcommand(1);
  auto* ste = st->add_subcommand("eval", "image of a vertex");
  add_common(ste, ta.c);
  ste->add_option("--automaton", ta.automaton, "DSL text or file");
  ste->add_option("--element", ta.element, "product of states, e.g. \"a b'\"");
  ste->add_option("--vertex", ta.vertex, "tree word, e.g. 0110 or 0.1.10");

  std::string command = "permwalk";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "permwalk: " << e.what() << "\n";
    const CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    err << leaf->help();
    return exit_usage;
  }

  CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) {
    leaf = leaf->get_subcommands().front();
    command = command == "permwalk" ? leaf->get_name() : command + " " + leaf->get_name();
  }
  try {
    std::string config_path;
    if (auto* c = leaf->get_option_no_throw("--config"); c != nullptr && c->count() > 0) config_path = c->as<std::string>();
    if (!config_path.empty()) apply_config(*leaf, load_config(config_path));

    if (leaf == sb) {
      err << cmd_build(build, out) << "\n";
    } else if (leaf == sw) {
      cmd_walk(walk, out);
    } else if (leaf == sp) {
      cmd_profile(prof, out);
    } else if (leaf == sr) {
      cmd_resistance(res, out);
    } else if (leaf == svo) {
      return cmd_verify_omega(ver, out);
    } else if (leaf == spr) {
      cmd_predict(pred, out);
    } else if (leaf == srp) {
      cmd_report(rep, out, err);
    } else if (leaf == ste) {
      cmd_treeauto_eval(ta, out);
    }
    return exit_ok;
  } catch (const UsageError& e) {
    err << "permwalk: " << e.what() << "\n" << leaf->help();
    return exit_usage;
  } catch (const Error& e) {
    print_error(err, command, to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::budget ? exit_budget : exit_usage;
  } catch (const std::exception& e) {
    print_error(err, command, "internal", e.what());
    return exit_internal;
  }
}

}  // namespace permwalk::cli
