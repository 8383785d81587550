#include "ddestab/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ddestab {

using json = nlohmann::ordered_json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw JsonError(std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw JsonError(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw JsonError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw JsonError(std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& j) {
  if (!j.is_number()) throw JsonError("expected a number, got " + j.dump());
  return j.get<double>();
}

std::optional<double> opt_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return number(*it);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <class E, std::size_t N>
E enum_from(const std::string& s, const E (&all)[N], const char* what) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  throw JsonError(std::string("unknown ") + what + ": " + s);
}

int integer(const json& j) {
  const double v = number(j);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw JsonError("expected an integer, got " + j.dump());
  return static_cast<int>(v);
}

// ---------------------------------------------------------------------------

json dist_json(const DelayDistribution& d) {
  json j;
  if (d.is_discrete()) {
    j["type"] = "discrete";
    json atoms = json::array();
    for (const auto& a : d.atoms().atoms()) atoms.push_back({a.weight, a.delay});
    j["atoms"] = atoms;
  } else {
    j["type"] = "gamma_mixture";
    json comps = json::array();
    for (const auto& c : d.mixture().components()) {
      comps.push_back({c.weight, c.kernel.shape, c.kernel.rate});
    }
    j["components"] = comps;
  }
  j["scale"] = d.scale();
  return j;
}

DelayDistribution dist_from(const json& j) {
  const std::string type = field(j, "type").get<std::string>();
  const double rho = j.contains("scale") ? number(j["scale"]) : 1.0;
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw JsonError("scale must be finite and >= 0");
  if (type == "discrete") {
    std::vector<Atom> atoms;
    for (const auto& a : field(j, "atoms")) {
      if (!a.is_array() || a.size() != 2) throw JsonError("atoms entries must be [p, tau]");
      atoms.push_back({number(a[0]), number(a[1])});
    }
    return DelayDistribution(DiscreteAtoms(std::move(atoms)), rho);
  }
  if (type == "gamma_mixture") {
    std::vector<MixtureComponent> comps;
    for (const auto& c : field(j, "components")) {
      if (!c.is_array() || c.size() != 3) throw JsonError("components entries must be [p, q, beta]");
      comps.push_back({number(c[0]), GammaKernel(integer(c[1]), number(c[2]))});
    }
    return DelayDistribution(GammaMixture(std::move(comps)), rho);
  }
  throw JsonError("unknown distribution type: " + type);
}

json verdict_json(const StabilityVerdict& v) {
  json j;
  j["region"] = to_string(v.region);
  j["decided_by"] = to_string(v.decided_by);
  j["stable"] = v.stable ? json(*v.stable) : json(nullptr);
  j["details"] = v.details;
  j["critical_mean"] = opt(v.critical_mean);
  j["mean_delay"] = opt(v.mean_delay);
  j["rightmost_real"] = opt(v.rightmost_real);
  return j;
}

template <class F>
auto named(F&& from_string, const std::string& s) {
  try {
    return from_string(s);
  } catch (const std::invalid_argument& e) {
    throw JsonError(e.what());
  }
}

StabilityVerdict verdict_from(const json& j) {
  StabilityVerdict v;
  v.region = named(region_from_string, field(j, "region").get<std::string>());
  v.decided_by = named(decided_by_from_string, field(j, "decided_by").get<std::string>());
  const json& s = field(j, "stable");
  if (!s.is_null()) v.stable = s.get<bool>();
  if (j.contains("details")) v.details = j["details"].get<std::string>();
  v.critical_mean = opt_number(j, "critical_mean");
  v.mean_delay = opt_number(j, "mean_delay");
  v.rightmost_real = opt_number(j, "rightmost_real");
  return v;
}

json model_json(const HematoModel& m) {
  json j;
  j["alpha"] = m.alpha;
  j["k0"] = m.k0;
  j["r"] = m.r;
  j["h"] = m.h;
  json lin = json::array();
  for (const auto& l : m.lineages) lin.push_back({l.weight, l.length, l.rate});
  j["lineages"] = lin;
  return j;
}

HematoModel model_from(const json& j) {
  HematoModel m;
  m.alpha = number(field(j, "alpha"));
  m.k0 = number(field(j, "k0"));
  m.r = number(field(j, "r"));
  m.h = number(field(j, "h"));
  for (const auto& l : field(j, "lineages")) {
    if (!l.is_array() || l.size() != 3) throw JsonError("lineages entries must be [p, q, beta]");
    m.lineages.push_back({number(l[0]), integer(l[1]), number(l[2])});
  }
  m.validate();
  return m;
}

json pairs_json(const std::vector<std::pair<double, double>>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.first, p.second});
  return arr;
}

std::vector<double> doubles(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v));
  return out;
}

constexpr RootMethod kMethods[] = {RootMethod::polynomial, RootMethod::quasi_argument_principle,
                                   RootMethod::explicit_formula};
constexpr SteadyBranch kBranches[] = {SteadyBranch::zero, SteadyBranch::unique, SteadyBranch::smaller,
                                      SteadyBranch::larger, SteadyBranch::coincident};

std::string sweep_name(SweepOutcome o) {
  return o == SweepOutcome::certified_stable ? "certified_stable" : "inconclusive";
}

}  // namespace

// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw JsonError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_json(const DelayDistribution& d) { return dist_json(d).dump(); }

DelayDistribution distribution_from_json(const std::string& text) {
  return guarded("distribution", [&] { return dist_from(parse(text)); });
}

DelayDistribution parse_distribution_arg(const std::string& arg) {
  const std::string prefix = "single:";
  if (arg.rfind(prefix, 0) == 0) {
    const std::string num = arg.substr(prefix.size());
    std::size_t used = 0;
    double tau = 0.0;
    try {
      tau = std::stod(num, &used);
    } catch (const std::exception&) {
      throw JsonError("bad delay in " + arg);
    }
    if (used != num.size()) throw JsonError("bad delay in " + arg);
    return DelayDistribution::single(tau);
  }
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return distribution_from_json(arg);
  return distribution_from_json(read_text_file(arg));
}

std::string to_json(const RootReport& r) {
  json j;
  j["method"] = to_string(r.method);
  j["rightmost_real"] = r.rightmost_real;
  j["winding_count"] = r.winding_count;
  j["box"] = {{"re", {r.search_box.re_min, r.search_box.re_max}},
              {"im", {r.search_box.im_min, r.search_box.im_max}}};
  json roots = json::array();
  for (const auto& c : r.roots) roots.push_back({c.value.real(), c.value.imag(), c.residual});
  j["roots"] = roots;
  return j.dump();
}

RootReport root_report_from_json(const std::string& text) {
  return guarded("root report", [&] {
    const json j = parse(text);
    RootReport r;
    r.method = enum_from(field(j, "method").get<std::string>(), kMethods, "root method");
    r.rightmost_real = number(field(j, "rightmost_real"));
    r.winding_count = integer(field(j, "winding_count"));
    const json& box = field(j, "box");
    r.search_box = {number(field(box, "re")[0]), number(box["re"][1]), number(field(box, "im")[0]),
                    number(box["im"][1])};
    for (const auto& t : field(j, "roots")) {
      if (!t.is_array() || t.size() != 3) throw JsonError("roots entries must be [re, im, residual]");
      r.roots.push_back({{number(t[0]), number(t[1])}, number(t[2])});
    }
    return r;
  });
}

std::string to_json(const StabilityVerdict& v) { return verdict_json(v).dump(); }

StabilityVerdict verdict_from_json(const std::string& text) {
  return guarded("verdict", [&] { return verdict_from(parse(text)); });
}

std::string to_json(const SweepResult& s) {
  json j;
  j["outcome"] = sweep_name(s.outcome);
  j["omega_c"] = s.omega_c;
  json cr = json::array();
  for (const auto& c : s.crossings) cr.push_back({c.omega, c.s});
  j["crossings"] = cr;
  return j.dump();
}

SweepResult sweep_result_from_json(const std::string& text) {
  return guarded("sweep", [&] {
    const json j = parse(text);
    SweepResult s;
    const std::string o = field(j, "outcome").get<std::string>();
    if (o == "certified_stable") {
      s.outcome = SweepOutcome::certified_stable;
    } else if (o == "inconclusive") {
      s.outcome = SweepOutcome::inconclusive;
    } else {
      throw JsonError("unknown sweep outcome: " + o);
    }
    s.omega_c = number(field(j, "omega_c"));
    for (const auto& c : field(j, "crossings")) s.crossings.push_back({number(c[0]), number(c[1])});
    return s;
  });
}

std::string to_json(const ExtremalReport& r) {
  json j;
  j["a"] = r.a;
  j["E"] = r.mean;
  j["omega_s"] = r.omega_s;
  if (r.f_star) {
    const auto& f = *r.f_star;
    j["f_star"] = {{"p2_star", f.p2_star},
                   {"tau2_star", f.tau2_star},
                   {"omega_s", f.omega_s},
                   {"other_roots", f.other_roots},
                   {"C", f.c_value()},
                   {"S", f.s_value()},
                   {"distribution", dist_json(f.distribution())}};
  } else {
    j["f_star"] = nullptr;
  }
  j["f_star_error"] = r.f_star_error;
  if (r.chord) {
    const auto& c = *r.chord;
    json ch = {{"u", c.u}, {"T", c.t}, {"v1", c.v1}, {"S", c.s_value},
               {"p1", c.p1}, {"p2", c.p2}, {"roots", c.roots}};
    if (r.omega_s > 0.0) ch["distribution"] = dist_json(c.density(r.omega_s));
    j["chord"] = ch;
  } else {
    j["chord"] = nullptr;
  }
  return j.dump();
}

ExtremalReport extremal_report_from_json(const std::string& text) {
  return guarded("extremal report", [&] {
    const json j = parse(text);
    ExtremalReport r;
    r.a = number(field(j, "a"));
    r.mean = number(field(j, "E"));
    r.omega_s = number(field(j, "omega_s"));
    const json& f = field(j, "f_star");
    if (!f.is_null()) {
      ExtremalDistribution e;
      e.p2_star = number(field(f, "p2_star"));
      e.tau2_star = number(field(f, "tau2_star"));
      e.omega_s = number(field(f, "omega_s"));
      e.other_roots = doubles(field(f, "other_roots"));
      r.f_star = e;
    }
    if (j.contains("f_star_error")) r.f_star_error = j["f_star_error"].get<std::string>();
    const json& c = field(j, "chord");
    if (!c.is_null()) {
      ChordSolution s;
      s.u = number(field(c, "u"));
      s.t = number(field(c, "T"));
      s.v1 = number(field(c, "v1"));
      s.s_value = number(field(c, "S"));
      s.p1 = number(field(c, "p1"));
      s.p2 = number(field(c, "p2"));
      s.roots = doubles(field(c, "roots"));
      r.chord = s;
    }
    return r;
  });
}

std::string to_json(const HematoModel& m) { return model_json(m).dump(); }

HematoModel hemato_model_from_json(const std::string& text) {
  return guarded("hemato model", [&] { return model_from(parse(text)); });
}

HematoModel HematoConfig::at(const std::string& name) const {
  for (const auto& [n, rh] : points) {
    if (n == name) {
      HematoModel m = model;
      m.r = rh.first;
      m.h = rh.second;
      m.validate();
      return m;
    }
  }
  throw std::invalid_argument("unknown point: " + name);
}

std::string to_json(const HematoConfig& c) {
  json j = model_json(c.model);
  if (!c.points.empty()) {
    json pts = json::object();
    for (const auto& [n, rh] : c.points) pts[n] = {{"r", rh.first}, {"h", rh.second}};
    j["points"] = pts;
  }
  return j.dump();
}

HematoConfig hemato_config_from_json(const std::string& text) {
  return guarded("hemato config", [&] {
    const json j = parse(text);
    HematoConfig c;
    c.model = model_from(j);
    if (j.contains("points")) {
      for (const auto& [name, v] : j["points"].items()) {
        c.points.push_back({name, {number(field(v, "r")), number(field(v, "h"))}});
      }
    }
    return c;
  });
}

std::string to_json(const std::vector<SteadyStateVerdict>& vs) {
  json arr = json::array();
  for (const auto& v : vs) {
    json j;
    j["value"] = v.state.value;
    j["branch"] = to_string(v.state.branch);
    j["linearization"] = v.linearization
                             ? json{{"a", v.linearization->a}, {"b", v.linearization->b}}
                             : json(nullptr);
    j["distributed"] = v.distributed ? verdict_json(*v.distributed) : json(nullptr);
    j["discrete_at_mean"] = v.discrete_at_mean ? verdict_json(*v.discrete_at_mean) : json(nullptr);
    j["stable"] = v.stable ? json(*v.stable) : json(nullptr);
    j["basis"] = v.basis;
    arr.push_back(j);
  }
  return arr.dump();
}

std::vector<SteadyStateVerdict> steady_verdicts_from_json(const std::string& text) {
  return guarded("steady state verdicts", [&] {
    std::vector<SteadyStateVerdict> out;
    for (const auto& j : parse(text)) {
      SteadyStateVerdict v;
      v.state.value = number(field(j, "value"));
      v.state.branch = enum_from(field(j, "branch").get<std::string>(), kBranches, "branch");
      const json& lin = field(j, "linearization");
      if (!lin.is_null()) v.linearization = Linearization{number(field(lin, "a")), number(field(lin, "b"))};
      if (!field(j, "distributed").is_null()) v.distributed = verdict_from(j["distributed"]);
      if (!field(j, "discrete_at_mean").is_null()) v.discrete_at_mean = verdict_from(j["discrete_at_mean"]);
      if (!field(j, "stable").is_null()) v.stable = j["stable"].get<bool>();
      v.basis = field(j, "basis").get<std::string>();
      out.push_back(v);
    }
    return out;
  });
}

std::string to_json(const ChartResult& c) {
  json j;
  j["mean"] = c.mean;
  j["intersection"] = {c.intersection.first, c.intersection.second};
  j["a"] = c.a_values;
  j["b"] = c.b_values;
  j["labels"] = c.labels;
  json lines = json::array();
  for (const auto& p : c.boundaries) lines.push_back({{"name", p.name}, {"points", pairs_json(p.points)}});
  j["boundaries"] = lines;
  return j.dump();
}

ChartResult chart_from_json(const std::string& text) {
  return guarded("chart", [&] {
    const json j = parse(text);
    ChartResult c;
    c.mean = number(field(j, "mean"));
    const json& in = field(j, "intersection");
    c.intersection = {number(in.at(0)), number(in.at(1))};
    c.a_values = doubles(field(j, "a"));
    c.b_values = doubles(field(j, "b"));
    for (const auto& l : field(j, "labels")) c.labels.push_back(integer(l));
    if (c.labels.size() != c.a_values.size() * c.b_values.size()) throw JsonError("chart: label count mismatch");
    for (const auto& p : field(j, "boundaries")) {
      Polyline line;
      line.name = field(p, "name").get<std::string>();
      for (const auto& pt : field(p, "points")) line.points.emplace_back(number(pt.at(0)), number(pt.at(1)));
      c.boundaries.push_back(line);
    }
    return c;
  });
}

}  // namespace ddestab
