#include "delaysub/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "delaysub/errors.hpp"
#include "delaysub/special_functions.hpp"
#include "delaysub/text_output.hpp"

namespace delaysub {

double PowerTerm::operator()(double t) const {
  const double d = t - shift;
  if (positive_part && d <= 0.0) return 0.0;
  if (power == 0.0) return coeff;
  return coeff * std::pow(d, power);
}

double PowerTerm::derivative(double t) const {
  const double d = t - shift;
  if (power == 0.0 || (positive_part && d <= 0.0)) return 0.0;
  return coeff * power * std::pow(d, power - 1.0);
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

std::optional<double> parse_number(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  auto plain = [](const std::string& text) -> std::optional<double> {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return plain(s);
  auto num = plain(s.substr(0, slash)), den = plain(s.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

// A mapping node plus its dotted key path; remembers which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail_here("must be a mapping");
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const auto key = it->first.as<std::string>();
      lines_[key] = line_of(it->first);
    }
  }

  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return lines_.count(key) > 0; }

  YAML::Node take(const std::string& key) {
    used_.insert(key);
    return node_[key];
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    auto it = lines_.find(key);
    std::string where = key_path(key);
    if (it != lines_.end() && it->second > 0) where += " (line " + std::to_string(it->second) + ")";
    throw ConfigurationError(where + ": " + message);
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    std::string where = path_.empty() ? "config" : path_;
    if (line_of(node_) > 0) where += " (line " + std::to_string(line_of(node_)) + ")";
    throw ConfigurationError(where + ": " + message);
  }

  double number(const std::string& key) {
    auto n = take(key);
    if (!n.IsScalar()) fail(key, "must be a number");
    auto v = parse_number(n.Scalar());
    if (!v || !std::isfinite(*v)) fail(key, "'" + n.Scalar() + "' is not a finite number");
    return *v;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "must be an integer");
    return static_cast<int>(v);
  }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::string text(const std::string& key) {
    auto n = take(key);
    if (!n.IsScalar()) fail(key, "must be a string");
    return n.Scalar();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    auto n = take(key);
    if (!n.IsScalar()) fail(key, "must be true or false");
    const auto& s = n.Scalar();
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
    fail(key, "'" + s + "' is not true or false");
  }

  std::vector<double> numbers(const std::string& key) {
    auto n = take(key);
    if (!n.IsSequence()) fail(key, "must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : n) {
      auto v = item.IsScalar() ? parse_number(item.Scalar()) : std::nullopt;
      if (!v || !std::isfinite(*v)) fail(key, "entry at line " + std::to_string(line_of(item)) + " is not a number");
      out.push_back(*v);
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    std::vector<int> out;
    for (double v : numbers(key)) {
      if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "entries must be integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  Section child(const std::string& key) { return Section(take(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, line] : lines_) {
      if (!used_.count(key)) fail(key, "unknown key");
    }
  }

  // Re-throw a validation error whose message starts with "<path>.<key>:" with the key's line attached.
  [[noreturn]] void rethrow(const ConfigurationError& e) const {
    const std::string msg = e.what();
    const std::string prefix = path_ + ".";
    const auto colon = msg.find(':');
    if (msg.rfind(prefix, 0) == 0 && colon != std::string::npos) {
      const auto key = msg.substr(prefix.size(), colon - prefix.size());
      if (has(key)) fail(key, msg.substr(colon + 2));
    }
    throw ConfigurationError(msg);
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::map<std::string, int> lines_;
  std::set<std::string> used_;
};

std::vector<PowerTerm> parse_terms(Section& parent, const std::string& key) {
  auto node = parent.take(key);
  const auto path = parent.key_path(key);
  std::vector<PowerTerm> terms;
  if (node.IsScalar()) {
    auto v = parse_number(node.Scalar());
    if (!v) parent.fail(key, "must be a number or a list of terms");
    terms.push_back({*v, 0.0, 0.0, false});
    return terms;
  }
  if (!node.IsSequence()) parent.fail(key, "must be a number or a list of terms");
  int idx = 0;
  for (const auto& item : node) {
    Section term(item, path + "[" + std::to_string(idx++) + "]");
    PowerTerm pt;
    pt.coeff = term.number("coeff", 1.0);
    pt.power = term.number("power", 0.0);
    pt.shift = term.number("shift", 0.0);
    pt.positive_part = term.boolean("positive_part", false);
    if (pt.positive_part && pt.power < 0.0) term.fail("power", "must be >= 0 for a positive part");
    term.finish();
    terms.push_back(pt);
  }
  return terms;
}

double sum_terms(const std::vector<PowerTerm>& terms, double t) {
  double s = 0.0;
  for (const auto& term : terms) s += term(t);
  return s;
}

// I^{beta} of (t - shift)_+^power is Γ(power+1)/Γ(power+1+beta) (t - shift)_+^{power+beta}; exact on
// (0, T] when the term vanishes before its shift or is anchored at 0.
bool has_closed_frac_integral(const std::vector<PowerTerm>& terms) {
  for (const auto& term : terms) {
    const bool anchored = term.shift == 0.0 && term.power > -1.0;
    const bool switched_on = term.positive_part && term.shift >= 0.0;
    if (!anchored && !switched_on) return false;
  }
  return true;
}

TimeFn frac_integral_of(const std::vector<PowerTerm>& terms, double beta) {
  std::vector<double> scale;
  for (const auto& term : terms) scale.push_back(term.coeff * gamma_fn(term.power + 1.0) / gamma_fn(term.power + 1.0 + beta));
  return [terms, scale, beta](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double d = t - terms[i].shift;
      if (d > 0.0) s += scale[i] * std::pow(d, terms[i].power + beta);
    }
    return s;
  };
}

ProblemConfig parse_inline_problem(Section& sec) {
  ProblemConfig pc;
  ProblemSpec& s = pc.spec;
  s.alpha = sec.number("alpha");
  s.tau = sec.number("tau", 1.0);
  s.K = sec.integer("K", 1);
  if (!sec.has("p")) sec.fail_here("p is required for inline problems");
  s.p = sec.number("p");
  s.a = sec.number("a", 0.0);
  if (!sec.has("b")) sec.fail_here("b is required for inline problems");
  s.b = sec.number("b");
  s.L = sec.number("L", 1.0);
  if (!sec.has("modes")) sec.fail_here("inline problems need a modes list (or name a builtin)");

  auto modes_node = sec.take("modes");
  if (!modes_node.IsSequence() || modes_node.size() == 0) sec.fail("modes", "must be a non-empty list");
  std::vector<std::vector<PowerTerm>> forcings;
  std::set<int> seen;
  int idx = 0;
  for (const auto& item : modes_node) {
    Section ms(item, sec.key_path("modes") + "[" + std::to_string(idx++) + "]");
    SineMode mode;
    mode.index = ms.integer("index", 1);
    if (mode.index < 1) ms.fail("index", "must be >= 1");
    if (!seen.insert(mode.index).second) ms.fail("index", "duplicate mode index");
    auto history = ms.has("history") ? parse_terms(ms, "history") : std::vector<PowerTerm>{};
    auto forcing = ms.has("forcing") ? parse_terms(ms, "forcing") : std::vector<PowerTerm>{};
    ms.finish();
    mode.history = [history](double t) { return sum_terms(history, t); };
    mode.history_dt = [history](double t) {
      double d = 0.0;
      for (const auto& term : history) d += term.derivative(t);
      return d;
    };
    mode.forcing = [forcing](double t) { return sum_terms(forcing, t); };
    pc.modal.modes.push_back(std::move(mode));
    forcings.push_back(std::move(forcing));
  }
  attach_modal_data(s, pc.modal);

  bool closed = true;
  for (const auto& f : forcings) closed = closed && has_closed_frac_integral(f);
  if (closed) {
    std::vector<TimeFn> integrals;
    for (const auto& f : forcings) integrals.push_back(frac_integral_of(f, 1.0 - s.alpha));
    std::vector<int> index;
    for (const auto& m : pc.modal.modes) index.push_back(m.index);
    const double L = s.L;
    s.forcing.frac_integral = [integrals, index, L](double x, double t) {
      double v = 0.0;
      for (std::size_t i = 0; i < integrals.size(); ++i) v += integrals[i](t) * std::sin(index[i] * std::numbers::pi * x / L);
      return v;
    };
  }
  return pc;
}

ProblemConfig parse_builtin_problem(Section& sec, const std::string& name) {
  const auto names = builtin_problem_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    sec.fail("builtin", "unknown builtin '" + name + "' (expected one of " + list + ")");
  }
  if (sec.has("modes")) sec.fail("modes", "not allowed together with a builtin");
  const double alpha = sec.number("alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) sec.fail("alpha", "must satisfy 0 < alpha < 1");

  BuiltinProblem bp;
  if (name == "homogeneous") {
    const double p = sec.number("p", 0.2), a = sec.number("a", 0.0), b = sec.number("b", 1.0);
    const double amplitude = sec.number("amplitude", 1.0);
    const int K = sec.integer("K", 1);
    for (const char* key : {"tau", "L"})
      if (sec.has(key)) sec.fail(key, "fixed at 1 by builtin homogeneous");
    ProblemSpec probe;
    probe.alpha = alpha;
    probe.p = p;
    probe.a = a;
    probe.b = b;
    probe.K = K;
    probe.phi = [](double, double) { return 0.0; };
    probe.dt_phi0 = [](double) { return 0.0; };
    probe.phi_minus_tau = [](double) { return 0.0; };
    probe.forcing.source = [](double, double) { return 0.0; };
    try {
      probe.validate();
    } catch (const ConfigurationError& e) {
      sec.rethrow(e);
    }
    bp = homogeneous_relaxation(alpha, p, a, b, amplitude, K);
  } else {
    if (sec.has("amplitude")) sec.fail("amplitude", "only the homogeneous builtin takes an amplitude");
    bp = name == "zero" ? zero_problem(alpha, sec.integer("K", 1)) : builtin_problem(name, alpha);
    ProblemSpec s = bp.spec;
    const ProblemSpec fixed = bp.spec;
    s.tau = sec.number("tau", s.tau);
    if (name != "zero") s.K = sec.integer("K", s.K);
    s.p = sec.number("p", s.p);
    s.a = sec.number("a", s.a);
    s.b = sec.number("b", s.b);
    s.L = sec.number("L", s.L);
    try {
      s.validate();
    } catch (const ConfigurationError& e) {
      sec.rethrow(e);
    }
    if (name != "zero") {
      auto pin = [&](const char* key, double given, double expected) {
        if (given != expected)
          sec.fail(key, "fixed at " + format_full(expected) + " by builtin " + name);
      };
      pin("tau", s.tau, fixed.tau);
      pin("p", s.p, fixed.p);
      pin("a", s.a, fixed.a);
      pin("b", s.b, fixed.b);
      pin("L", s.L, fixed.L);
      if (s.K > fixed.K) sec.fail("K", "at most " + std::to_string(fixed.K) + " for builtin " + name);
    }
    bp.spec.tau = s.tau;
    bp.spec.K = s.K;
    bp.spec.p = s.p;
    bp.spec.a = s.a;
    bp.spec.b = s.b;
    bp.spec.L = s.L;
  }
  ProblemConfig pc;
  pc.builtin = name;
  pc.spec = std::move(bp.spec);
  pc.modal = std::move(bp.modal);
  pc.exact = std::move(bp.exact);
  return pc;
}

ProblemConfig parse_problem(Section sec) {
  ProblemConfig pc;
  if (sec.has("builtin")) {
    const auto name = sec.text("builtin");
    pc = parse_builtin_problem(sec, name);
  } else {
    pc = parse_inline_problem(sec);
    try {
      pc.spec.validate();
    } catch (const ConfigurationError& e) {
      sec.rethrow(e);
    }
  }
  sec.finish();
  return pc;
}

ForcingQuadrature parse_forcing(Section& sec) {
  const auto s = sec.text("forcing", "gl");
  if (s == "gl") return ForcingQuadrature::GrunwaldLetnikov;
  if (s == "analytic") return ForcingQuadrature::Analytic;
  sec.fail("forcing", "'" + s + "' is not gl or analytic");
}

int elements_from_h(Section& sec, const std::string& key, double h, double L) {
  if (!(h > 0.0)) sec.fail(key, "must be > 0");
  const double ratio = L / h;
  const double rounded = std::round(ratio);
  if (rounded < 2.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
    sec.fail(key, "L/h = " + format_full(ratio) + " is not an integer >= 2");
  return static_cast<int>(rounded);
}

DiscretizationConfig parse_discretization(Section sec, const ProblemConfig* problem) {
  DiscretizationConfig dc;
  const double tau = problem ? problem->spec.tau : 1.0;
  const int K = problem ? problem->spec.K : 1;
  const double L = problem ? problem->spec.L : 1.0;
  if (sec.has("N") && sec.has("rho")) sec.fail("rho", "give either N or rho, not both");
  try {
    if (sec.has("N")) {
      dc.N = sec.integer("N");
      dc.N = TimeGrid(tau, dc.N, K).N();
    } else if (sec.has("rho")) {
      dc.N = TimeGrid::from_step(tau, sec.number("rho"), K).N();
    }
  } catch (const ConfigurationError& e) {
    sec.rethrow(e);
  }
  if (sec.has("elements") && sec.has("h")) sec.fail("h", "give either elements or h, not both");
  if (sec.has("elements")) {
    dc.elements = sec.integer("elements");
    if (dc.elements < 2) sec.fail("elements", "must be >= 2");
  } else if (sec.has("h")) {
    dc.elements = elements_from_h(sec, "h", sec.number("h"), L);
  }
  if (sec.has("forcing")) {
    dc.solver.forcing = parse_forcing(sec);
  } else if (problem && problem->spec.forcing.has_frac_integral() &&
             !(problem->spec.forcing.has_source() &&
               std::isfinite(problem->spec.forcing.source(0.5 * problem->spec.L, 0.0)))) {
    // f cannot be sampled at t = 0, so the GL rule is unusable
    dc.solver.forcing = ForcingQuadrature::Analytic;
  }
  if (dc.solver.forcing == ForcingQuadrature::Analytic && problem && !problem->spec.forcing.has_frac_integral())
    sec.fail("forcing", "analytic needs a closed-form I^{1-alpha} f, which this problem does not have");
  const auto seam = sec.text("seam", "lower");
  if (seam == "lower") dc.solver.seam = SeamBranch::Lower;
  else if (seam == "upper") dc.solver.seam = SeamBranch::Upper;
  else sec.fail("seam", "'" + seam + "' is not lower or upper");
  dc.solver.block = sec.integer("block", dc.solver.block);
  if (dc.solver.block < 1) sec.fail("block", "must be >= 1");
  sec.finish();
  return dc;
}

void check_doubling(Section& sec, const std::string& key, const std::vector<int>& values) {
  if (values.empty()) sec.fail(key, "must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 2) sec.fail(key, "entries must be >= 2");
    if (i > 0 && values[i] <= values[i - 1]) sec.fail(key, "entries must be strictly increasing");
  }
}

StudyConfig parse_study(Section sec, const ProblemConfig* problem) {
  StudyConfig sc;
  try {
    sc.kind = study_kind_from_string(sec.text("kind", "temporal-window"));
  } catch (const ConfigurationError& e) {
    sec.fail("kind", e.what());
  }
  const int K = problem ? problem->spec.K : 1;
  const double L = problem ? problem->spec.L : 1.0;
  const double tau = problem ? problem->spec.tau : 1.0;
  if (sc.kind == StudyKind::Spatial) {
    if (sec.has("N_list")) sec.fail("N_list", "spatial studies take elements_list or h_list");
    if (sec.has("elements_list") && sec.has("h_list")) sec.fail("h_list", "give either elements_list or h_list");
    if (sec.has("elements_list")) {
      sc.elements_list = sec.integers("elements_list");
      check_doubling(sec, "elements_list", sc.elements_list);
    } else if (sec.has("h_list")) {
      for (double h : sec.numbers("h_list")) sc.elements_list.push_back(elements_from_h(sec, "h_list", h, L));
      check_doubling(sec, "h_list", sc.elements_list);
    } else {
      sec.fail_here("spatial studies need elements_list or h_list");
    }
  } else {
    if (sec.has("elements_list") || sec.has("h_list")) sec.fail_here("temporal studies take N_list");
    if (!sec.has("N_list")) sec.fail_here("temporal studies need N_list");
    sc.N_list = sec.integers("N_list");
    check_doubling(sec, "N_list", sc.N_list);
  }
  if (sec.has("windows")) {
    sc.windows = sec.integers("windows");
    for (int k : sc.windows)
      if (k < 1 || k > K) sec.fail("windows", "entries must lie in 1.." + std::to_string(K));
  } else {
    for (int k = 1; k <= K; ++k) sc.windows.push_back(k);
  }
  try {
    sc.reference = reference_kind_from_string(sec.text("reference", problem && problem->exact ? "exact" : "fine-grid"));
  } catch (const ConfigurationError& e) {
    sec.fail("reference", e.what());
  }
  if (sc.reference == ReferenceKind::Exact && problem && !problem->exact)
    sec.fail("reference", "exact needs a closed-form solution, which this problem does not have");
  if (sec.has("reference_N") && sec.has("reference_rho")) sec.fail("reference_rho", "give either reference_N or reference_rho");
  if (sec.has("reference_N")) sc.reference_N = sec.integer("reference_N");
  if (sec.has("reference_rho")) {
    try {
      sc.reference_N = TimeGrid::from_step(tau, sec.number("reference_rho"), K).N();
    } catch (const ConfigurationError& e) {
      sec.fail("reference_rho", e.what());
    }
  }
  if (sec.has("reference_elements") && sec.has("reference_h")) sec.fail("reference_h", "give either reference_elements or reference_h");
  if (sec.has("reference_elements")) sc.reference_elements = sec.integer("reference_elements");
  if (sec.has("reference_h")) sc.reference_elements = elements_from_h(sec, "reference_h", sec.number("reference_h"), L);
  try {
    sc.norm = error_norm_from_string(sec.text("norm", "nodal"));
  } catch (const ConfigurationError& e) {
    sec.fail("norm", e.what());
  }
  if (sc.reference_N < 0) sec.fail("reference_N", "must be >= 0");
  if (sc.reference_elements < 0) sec.fail("reference_elements", "must be >= 0");
  sec.finish();
  return sc;
}

void parse_quad(Section& sec, QuadSettings& quad) {
  quad.panels = sec.integer("panels", quad.panels);
  quad.points = sec.integer("points", quad.points);
  quad.tolerance = sec.number("tolerance", quad.tolerance);
  quad.samples = sec.integer("samples", quad.samples);
  quad.grading = sec.number("grading", quad.grading);
  try {
    quad.validate();
  } catch (const ConfigurationError& e) {
    // messages are phrased "oracle.<key>: ..."
    const std::string msg = e.what();
    const auto dot = msg.find('.'), colon = msg.find(':');
    if (dot != std::string::npos && colon != std::string::npos && colon > dot)
      sec.fail(msg.substr(dot + 1, colon - dot - 1), msg.substr(colon + 2));
    throw;
  }
}

void check_times(Section& sec, const std::string& key, const std::vector<double>& t, const ProblemConfig* problem) {
  if (t.empty()) sec.fail(key, "must not be empty");
  const double T = problem ? problem->spec.final_time() : 0.0;
  for (double v : t)
    if (!(v > 0.0) || (problem && v > T)) sec.fail(key, "entries must lie in (0, K tau]");
}

OracleConfig parse_oracle(Section sec, const ProblemConfig* problem) {
  OracleConfig oc;
  if (!sec.has("x") || !sec.has("t")) sec.fail_here("needs x and t lists");
  oc.x = sec.numbers("x");
  if (oc.x.empty()) sec.fail("x", "must not be empty");
  const double L = problem ? problem->spec.L : 1.0;
  for (double x : oc.x)
    if (x < 0.0 || x > L) sec.fail("x", "entries must lie in [0, L]");
  oc.t = sec.numbers("t");
  check_times(sec, "t", oc.t, problem);
  parse_quad(sec, oc.quad);
  sec.finish();
  return oc;
}

ProbeConfig parse_probe(Section sec, const ProblemConfig* problem) {
  ProbeConfig pc;
  if (!sec.has("t")) sec.fail_here("needs a t list");
  pc.t = sec.numbers("t");
  check_times(sec, "t", pc.t, problem);
  pc.x = sec.number("x", -1.0);
  if (sec.has("x") && problem && !(pc.x > 0.0 && pc.x < problem->spec.L)) sec.fail("x", "must lie in (0, L)");
  parse_quad(sec, pc.quad);
  sec.finish();
  return pc;
}

WeightsConfig parse_weights(Section sec, const ProblemConfig* problem, const DiscretizationConfig* disc) {
  WeightsConfig wc;
  if (sec.has("alpha")) wc.alpha = sec.number("alpha");
  else if (problem) wc.alpha = problem->spec.alpha;
  else sec.fail_here("alpha is required without a problem section");
  if (!(wc.alpha > 0.0 && wc.alpha < 1.0)) sec.fail("alpha", "must satisfy 0 < alpha < 1");
  const double tau = problem ? problem->spec.tau : 1.0;
  if (sec.has("rho") && sec.has("N")) sec.fail("rho", "give either rho or N");
  if (sec.has("rho")) {
    wc.rho = sec.number("rho");
    if (!(wc.rho > 0.0)) sec.fail("rho", "must be > 0");
  } else if (sec.has("N")) {
    const int N = sec.integer("N");
    if (N < 1) sec.fail("N", "must be >= 1");
    wc.rho = tau / N;
  } else if (disc && disc->N > 0) {
    wc.rho = tau / disc->N;
  } else {
    sec.fail_here("rho (or N) is required");
  }
  wc.n_max = sec.integer("n_max", wc.n_max);
  if (wc.n_max < 0 || wc.n_max > 10000000) sec.fail("n_max", "must lie in 0..1e7");
  sec.finish();
  return wc;
}

OutputConfig parse_output(Section sec, const ProblemConfig* problem) {
  OutputConfig oc;
  oc.directory = sec.text("directory", "out");
  oc.name = sec.text("name", problem ? (problem->builtin.empty() ? "inline" : problem->builtin) : "run");
  if (oc.name.empty() || oc.name.find('/') != std::string::npos) sec.fail("name", "must be a non-empty file stem");
  if (sec.has("formats")) {
    auto node = sec.take("formats");
    if (!node.IsSequence()) sec.fail("formats", "must be a list of csv / markdown");
    oc.csv = oc.markdown = false;
    for (const auto& item : node) {
      const auto s = item.IsScalar() ? item.Scalar() : std::string();
      if (s == "csv") oc.csv = true;
      else if (s == "markdown") oc.markdown = true;
      else sec.fail("formats", "'" + s + "' is not csv or markdown");
    }
  }
  if (sec.has("snapshots")) oc.snapshots = sec.integers("snapshots");
  sec.finish();
  return oc;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigurationError("config: parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigurationError("config: empty document");
  Section top(root, "");
  RunConfig rc;
  if (top.has("problem")) rc.problem = parse_problem(top.child("problem"));
  const ProblemConfig* problem = rc.problem ? &*rc.problem : nullptr;
  if (top.has("discretization")) rc.discretization = parse_discretization(top.child("discretization"), problem);
  if (top.has("study")) rc.study = parse_study(top.child("study"), problem);
  if (top.has("oracle")) rc.oracle = parse_oracle(top.child("oracle"), problem);
  if (top.has("probe")) rc.probe = parse_probe(top.child("probe"), problem);
  if (top.has("weights"))
    rc.weights = parse_weights(top.child("weights"), problem, rc.discretization ? &*rc.discretization : nullptr);
  if (top.has("output")) rc.output = parse_output(top.child("output"), problem);
  else rc.output.name = problem ? (problem->builtin.empty() ? "inline" : problem->builtin) : "run";
  top.finish();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigurationError("config: cannot read " + path.string() + ": " + e.what());
  }
  return parse_config(text);
}

}  // namespace delaysub
