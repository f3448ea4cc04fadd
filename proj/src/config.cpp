#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "vrmhd/io.hpp"

namespace vrmhd {

namespace {

enum class Kind { Real, Int, Bool, Set };

struct ParamKey {
  const char* name;
  Kind kind;
};

const std::vector<ParamKey>& param_keys() {
  static const std::vector<ParamKey> k{
      {"gamma", Kind::Real},    {"mu", Kind::Real},         {"eta", Kind::Real},          {"Pr", Kind::Real},
      {"cv", Kind::Real},       {"cfl", Kind::Real},        {"theta_b", Kind::Real},      {"theta_p", Kind::Real},
      {"alpha", Kind::Real},    {"picard_R", Kind::Int},    {"picard_S", Kind::Int},      {"cg_tol", Kind::Real},
      {"cg_maxit", Kind::Int},  {"eigen_set", Kind::Set},   {"limiter", Kind::Bool},      {"second_order", Kind::Bool},
      {"line_precond", Kind::Bool}, {"dt_fixed", Kind::Real}, {"dt_max", Kind::Real}};
  return k;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& m) {
  throw ConfigError(line > 0 ? "config line " + std::to_string(line) + ": " + m : m);
}

double to_real(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e) fail(line, key + ": expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v, int line) {
  int x = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e) fail(line, key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  std::string l = v;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  fail(line, key + ": expected true/false, got '" + v + "'");
}

EigenSet to_set(const std::string& v, int line) {
  if (v == "V") return EigenSet::V;
  if (v == "VB") return EigenSet::VB;
  if (v == "FULL") return EigenSet::FULL;
  fail(line, "eigen_set: expected V, VB or FULL, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string canonical_param(const ParamKey& k, const std::string& v, int line) {
  switch (k.kind) {
    case Kind::Real: {
      const double x = to_real(k.name, v, line);
      if (std::string(k.name) == "cfl" && !(x > 0.0 && x <= 1.0)) fail(line, "cfl must lie in (0,1], got " + v);
      return fmt(x);
    }
    case Kind::Int: return std::to_string(to_int(k.name, v, line));
    case Kind::Bool: return to_bool(k.name, v, line) ? "true" : "false";
    case Kind::Set: return eigen_set_name(to_set(v, line));
  }
  return v;
}

void apply_param(Params& p, const std::string& key, const std::string& v) {
  const auto R = [&] { return to_real(key, v, 0); };
  const auto I = [&] { return to_int(key, v, 0); };
  const auto B = [&] { return to_bool(key, v, 0); };
  if (key == "gamma") p.gamma = R();
  else if (key == "mu") p.mu = R();
  else if (key == "eta") p.eta = R();
  else if (key == "Pr") p.Pr = R();
  else if (key == "cv") p.cv = R();
  else if (key == "cfl") p.cfl = R();
  else if (key == "theta_b") p.theta_b = R();
  else if (key == "theta_p") p.theta_p = R();
  else if (key == "alpha") p.alpha = R();
  else if (key == "picard_R") p.picard_R = I();
  else if (key == "picard_S") p.picard_S = I();
  else if (key == "cg_tol") p.cg_tol = R();
  else if (key == "cg_maxit") p.cg_maxit = I();
  else if (key == "eigen_set") p.eigen_set = to_set(v, 0);
  else if (key == "limiter") p.limiter_on = B();
  else if (key == "second_order") p.second_order = B();
  else if (key == "line_precond") p.line_precond = B();
  else if (key == "dt_fixed") p.dt_fixed = R();
  else if (key == "dt_max") p.dt_max = R();
  else throw ConfigError("unknown parameter '" + key + "'");
}

template <class T, std::size_t N>
std::string join(const std::array<T, N>& a) {
  std::string s;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) s += ' ';
    if constexpr (std::is_same_v<T, double>)
      s += fmt(a[i]);
    else
      s += std::to_string(a[i]);
  }
  return s;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k{"case", "n", "lo", "hi", "t_end", "output_every", "output_times", "output_dir",
                               "snapshot_format", "dump_jacobian", "jacobian_eps", "power_iterations"};
    for (const auto& p : param_keys()) k.push_back(p.name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::set<std::string> seen;
  int ln = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++ln;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section headers carry no meaning
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ln, "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) fail(ln, "empty key");
    if (!seen.insert(key).second) fail(ln, "duplicate key '" + key + "'");

    if (key.rfind("knob.", 0) == 0) {
      if (key.size() == 5) fail(ln, "empty knob name");
      c.knobs[key.substr(5)] = to_real(key, val, ln);
      continue;
    }
    const auto pk = std::find_if(param_keys().begin(), param_keys().end(),
                                 [&](const ParamKey& p) { return key == p.name; });
    if (pk != param_keys().end()) {
      c.params[key] = canonical_param(*pk, val, ln);
      continue;
    }
    if (key == "case") {
      if (val.empty()) fail(ln, "case: empty name");
      c.case_name = val;
    } else if (key == "n") {
      const auto w = split_list(val);
      if (w.empty() || w.size() > 3) fail(ln, "n: expected 1 to 3 cell counts");
      std::array<int, 3> n{1, 1, 1};
      for (std::size_t i = 0; i < w.size(); ++i) {
        n[i] = to_int(key, w[i], ln);
        if (n[i] < 1) fail(ln, "n: cell counts must be positive");
      }
      c.n = n;
    } else if (key == "lo" || key == "hi") {
      const auto w = split_list(val);
      if (w.size() != 3) fail(ln, key + ": expected 3 coordinates");
      std::array<double, 3> x{};
      for (int i = 0; i < 3; ++i) x[i] = to_real(key, w[i], ln);
      (key == "lo" ? c.lo : c.hi) = x;
    } else if (key == "t_end") {
      const double t = to_real(key, val, ln);
      if (!(t >= 0.0)) fail(ln, "t_end must be non-negative");
      c.t_end = t;
    } else if (key == "output_every") {
      const double t = to_real(key, val, ln);
      if (!(t > 0.0)) fail(ln, "output_every must be positive");
      c.output_every = t;
    } else if (key == "output_times") {
      for (const auto& w : split_list(val)) c.output_times.push_back(to_real(key, w, ln));
    } else if (key == "output_dir") {
      if (val.empty()) fail(ln, "output_dir: empty path");
      c.output_dir = val;
    } else if (key == "snapshot_format") {
      if (val != "vtk" && val != "raw") fail(ln, "snapshot_format: expected vtk or raw");
      c.snapshot_format = val;
    } else if (key == "dump_jacobian") {
      c.dump_jacobian = to_bool(key, val, ln);
    } else if (key == "jacobian_eps") {
      c.jacobian_eps = to_real(key, val, ln);
      if (!(c.jacobian_eps > 0.0)) fail(ln, "jacobian_eps must be positive");
    } else if (key == "power_iterations") {
      c.power_iterations = to_int(key, val, ln);
      if (c.power_iterations < 1) fail(ln, "power_iterations must be positive");
    } else {
      fail(ln, "unknown key '" + key + "'");
    }
  }
  if (c.case_name.empty()) throw ConfigError("config: missing case");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  const RunConfig d;
  o << "case = " << c.case_name << '\n';
  if (c.n) o << "n = " << join(*c.n) << '\n';
  if (c.lo) o << "lo = " << join(*c.lo) << '\n';
  if (c.hi) o << "hi = " << join(*c.hi) << '\n';
  if (c.t_end) o << "t_end = " << fmt(*c.t_end) << '\n';
  if (c.output_every) o << "output_every = " << fmt(*c.output_every) << '\n';
  if (!c.output_times.empty()) {
    o << "output_times =";
    for (double t : c.output_times) o << ' ' << fmt(t);
    o << '\n';
  }
  o << "output_dir = " << c.output_dir << '\n';
  o << "snapshot_format = " << c.snapshot_format << '\n';
  if (c.dump_jacobian != d.dump_jacobian) o << "dump_jacobian = " << (c.dump_jacobian ? "true" : "false") << '\n';
  if (c.jacobian_eps != d.jacobian_eps) o << "jacobian_eps = " << fmt(c.jacobian_eps) << '\n';
  if (c.power_iterations != d.power_iterations) o << "power_iterations = " << c.power_iterations << '\n';
  for (const auto& p : param_keys()) {
    const auto it = c.params.find(p.name);
    if (it != c.params.end()) o << p.name << " = " << it->second << '\n';
  }
  for (const auto& [k, v] : c.knobs) o << "knob." << k << " = " << fmt(v) << '\n';
  return o.str();
}

CaseInit resolve_config(const RunConfig& c) {
  CaseOptions o;
  o.n = c.n;
  o.knobs = c.knobs;
  CaseInit ci = init_case(c.case_name, o);
  Params pr = ci.spec.params;
  for (const auto& [k, v] : c.params) apply_param(pr, k, v);
  pr.validate();
  if (c.lo || c.hi) {
    std::array<std::array<double, 2>, 3> ext;
    for (int a = 0; a < 3; ++a) ext[a] = {c.lo ? (*c.lo)[a] : ci.spec.grid.lo[a], c.hi ? (*c.hi)[a] : ci.spec.grid.hi[a]};
    o.extents = ext;
  }
  if (!c.params.empty() || o.extents) {
    o.params = pr;
    ci = init_case(c.case_name, o);
  }
  if (c.t_end) ci.spec.t_end = *c.t_end;
  ci.spec.output_times = resolve_output_times(c, ci.spec, ci.spec.t_end);
  return ci;
}

std::vector<double> resolve_output_times(const RunConfig& c, const CaseSpec& spec, double t_end) {
  std::vector<double> t;
  if (!c.output_times.empty()) {
    t = c.output_times;
  } else if (c.output_every) {
    for (long k = 1; double(k) * *c.output_every < t_end * (1 - 1e-12); ++k) t.push_back(double(k) * *c.output_every);
  } else {
    for (double x : spec.output_times)
      if (x < t_end) t.push_back(x);
  }
  t.push_back(t_end);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.erase(std::remove_if(t.begin(), t.end(), [&](double x) { return x > t_end || x < 0.0; }), t.end());
  return t;
}

std::filesystem::path output_directory(const RunConfig& c) {
  if (const char* env = std::getenv("SOLVER_OUT"); env && *env) return env;
  return c.output_dir;
}

}  // namespace vrmhd
