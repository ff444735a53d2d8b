#include "gbcurv/cli.hpp"

#include "gbcurv/invariants.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

namespace gbcurv::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kDefaultOrder = 16;
constexpr const char* kOrderEnv = "GBCURV_QUADRATURE_ORDER";

[[noreturn]] void fail(const std::string& msg) { throw SpecError(msg); }

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<int>();
}

std::string as_string(const Json& j, const std::string& what) {
  if (!j.is_string()) fail(what + " must be a string");
  return j.get<std::string>();
}

// Domain bounds may be numbers or constant expressions such as "2*pi".
double as_bound(const Json& j, const std::map<std::string, double>& params) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail("domain bounds must be numbers or expression strings");
  const std::string src = j.get<std::string>();
  try {
    const Expression e = Expression::parse(src, ExpressionScope{{}, params});
    return e(std::span<const double>{});
  } catch (const ParseError& e) {
    fail("domain bound '" + src + "': " + e.what());
  }
}

EntrySource parse_entry(const Json& j, int dim, const std::string& where) {
  if (!j.is_object()) fail(where + " entries must be objects {i, j, expr}");
  EntrySource e{as_int(field(j, "i"), where + ".i"), as_int(field(j, "j"), where + ".j"),
                as_string(field(j, "expr"), where + ".expr")};
  if (e.i < 1 || e.j < 1 || e.i > dim || e.j > dim)
    fail(where + " index out of range 1.." + std::to_string(dim));
  if (e.i > e.j) std::swap(e.i, e.j);
  return e;
}

std::vector<EntrySource> parse_entries(const Json& j, int dim, const std::string& where) {
  if (!j.is_array()) fail(where + " must be a list");
  std::vector<EntrySource> out;
  std::set<std::pair<int, int>> seen;
  for (const Json& e : j) {
    out.push_back(parse_entry(e, dim, where));
    if (!seen.insert({out.back().i, out.back().j}).second)
      fail(where + " has a duplicate entry (" + std::to_string(out.back().i) + "," +
           std::to_string(out.back().j) + ")");
  }
  if (static_cast<int>(out.size()) > dim * (dim + 1) / 2) fail(where + " has too many entries");
  return out;
}

PerturbationSpec parse_perturbation(const Json& j, int dim, const std::string& where) {
  PerturbationSpec p;
  if (j.is_array()) {
    p.entries = parse_entries(j, dim, where);
    return p;
  }
  if (!j.is_object()) fail(where + " must be a list of entries or {map, ambient}");
  const Json& map = field(j, "map");
  const Json& amb = field(j, "ambient");
  if (!map.is_array() || map.empty()) fail(where + ".map must be a non-empty list");
  for (const Json& e : map) p.map.push_back(as_string(e, where + ".map"));
  if (!amb.is_array() || amb.size() != map.size()) fail(where + ".ambient must be square");
  for (const Json& row : amb) {
    if (!row.is_array() || row.size() != map.size()) fail(where + ".ambient must be square");
    std::vector<std::string> r;
    for (const Json& e : row) r.push_back(as_string(e, where + ".ambient"));
    p.ambient.push_back(std::move(r));
  }
  for (std::size_t a = 0; a < p.ambient.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (p.ambient[a][b] != p.ambient[b][a]) fail(where + ".ambient must be symmetric");
  return p;
}

ExpressionScope scope_of(const ManifoldSpec& s) { return {s.coordinates, s.parameters}; }

Expression parse_in(const ManifoldSpec& s, const std::string& src, const std::string& where) {
  try {
    return Expression::parse(src, scope_of(s));
  } catch (const ParseError& e) {
    throw SpecError(where + " '" + src + "': " + e.what());
  }
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

void validate(const ManifoldSpec& s) {
  static const std::set<std::string> reserved = {"sin", "cos", "sinh", "cosh", "exp", "sqrt", "pi"};
  std::set<std::string> names;
  for (const auto& c : s.coordinates) {
    if (!is_identifier(c)) fail("coordinate name '" + c + "' is not an identifier");
    if (reserved.count(c) || !names.insert(c).second) fail("coordinate name '" + c + "' is reserved or repeated");
  }
  for (const auto& [p, v] : s.parameters) {
    if (!is_identifier(p)) fail("parameter name '" + p + "' is not an identifier");
    if (reserved.count(p) || !names.insert(p).second)
      fail("parameter name '" + p + "' is reserved or clashes with a coordinate");
  }
  for (const auto& e : s.metric)
    parse_in(s, e.expr, "metric entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
  for (const auto& [name, p] : s.perturbations) {
    for (const auto& e : p.entries) parse_in(s, e.expr, "perturbation " + name);
    for (const auto& e : p.map) parse_in(s, e, "perturbation " + name + " map");
    for (const auto& row : p.ambient)
      for (const auto& e : row) parse_in(s, e, "perturbation " + name + " ambient");
  }
  if (s.volume_weight) parse_in(s, *s.volume_weight, "volume_weight");
}

Json entries_json(const std::vector<EntrySource>& v) {
  Json a = Json::array();
  for (const auto& e : v) a.push_back({{"i", e.i}, {"j", e.j}, {"expr", e.expr}});
  return a;
}

}  // namespace

ManifoldSpec parse_spec(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("spec must be a JSON object");
  ManifoldSpec s;
  s.name = as_string(field(j, "name"), "name");
  s.dim = as_int(field(j, "dim"), "dim");
  if (s.dim < 1 || s.dim > kMaxChartDim)
    fail("dim must be between 1 and " + std::to_string(kMaxChartDim));

  if (auto it = j.find("parameters"); it != j.end()) {
    if (!it->is_object()) fail("parameters must be an object of numbers");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_number()) fail("parameter '" + k + "' must be a number");
      s.parameters[k] = v.get<double>();
    }
  }

  const Json& sig = field(j, "signature");
  if (!sig.is_array()) fail("signature must be a list of +1/-1");
  for (const Json& v : sig) {
    const int x = as_int(v, "signature entry");
    if (x != 1 && x != -1) fail("signature entries must be +1 or -1");
    s.signature.push_back(x);
  }
  const Json& coords = field(j, "coordinates");
  if (!coords.is_array()) fail("coordinates must be a list of names");
  for (const Json& c : coords) s.coordinates.push_back(as_string(c, "coordinate"));
  const Json& dom = field(j, "domain");
  if (!dom.is_array()) fail("domain must be a list of [lo, hi] pairs");
  for (const Json& iv : dom) {
    if (!iv.is_array() || iv.size() != 2) fail("domain entries must be [lo, hi]");
    Interval r{as_bound(iv[0], s.parameters), as_bound(iv[1], s.parameters)};
    if (!(r.hi > r.lo)) fail("domain interval must have hi > lo");
    s.domain.push_back(r);
  }
  if (static_cast<int>(s.signature.size()) != s.dim ||
      static_cast<int>(s.coordinates.size()) != s.dim ||
      static_cast<int>(s.domain.size()) != s.dim)
    fail("signature, coordinates and domain must all have dim entries");

  s.metric = parse_entries(field(j, "metric"), s.dim, "metric");
  if (auto it = j.find("boundary"); it != j.end()) {
    if (!it->is_boolean()) fail("boundary must be true or false");
    s.boundary = it->get<bool>();
  }
  if (auto it = j.find("perturbation"); it != j.end())
    s.perturbations.emplace_back("default", parse_perturbation(*it, s.dim, "perturbation"));
  if (auto it = j.find("perturbations"); it != j.end()) {
    if (!it->is_object()) fail("perturbations must be an object of named perturbations");
    for (const auto& [k, v] : it->items()) {
      for (const auto& [name, _] : s.perturbations)
        if (name == k) fail("perturbation '" + k + "' defined twice");
      s.perturbations.emplace_back(k, parse_perturbation(v, s.dim, "perturbations." + k));
    }
  }
  if (auto it = j.find("euler_characteristic"); it != j.end() && !it->is_null())
    s.euler_characteristic = as_int(*it, "euler_characteristic");
  if (auto it = j.find("quadrature_order"); it != j.end() && !it->is_null()) {
    s.quadrature_order = as_int(*it, "quadrature_order");
    if (*s.quadrature_order < 1) fail("quadrature_order must be positive");
  }
  if (auto it = j.find("tolerance"); it != j.end() && !it->is_null()) {
    if (!it->is_number() || it->get<double>() <= 0.0) fail("tolerance must be a positive number");
    s.tolerance = it->get<double>();
  }
  if (auto it = j.find("volume_weight"); it != j.end() && !it->is_null())
    s.volume_weight = as_string(*it, "volume_weight");
  validate(s);
  return s;
}

ManifoldSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string spec_to_json(const ManifoldSpec& s) {
  Json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  j["signature"] = s.signature;
  j["coordinates"] = s.coordinates;
  Json dom = Json::array();
  for (const Interval& iv : s.domain) dom.push_back({iv.lo, iv.hi});
  j["domain"] = dom;
  j["metric"] = entries_json(s.metric);
  j["boundary"] = s.boundary;
  if (!s.parameters.empty()) {
    Json p = Json::object();
    for (const auto& [k, v] : s.parameters) p[k] = v;
    j["parameters"] = p;
  }
  if (!s.perturbations.empty()) {
    Json ps = Json::object();
    for (const auto& [name, p] : s.perturbations) {
      if (p.is_pullback())
        ps[name] = {{"map", p.map}, {"ambient", p.ambient}};
      else
        ps[name] = entries_json(p.entries);
    }
    j["perturbations"] = ps;
  }
  if (s.euler_characteristic) j["euler_characteristic"] = *s.euler_characteristic;
  if (s.quadrature_order) j["quadrature_order"] = *s.quadrature_order;
  if (s.tolerance) j["tolerance"] = *s.tolerance;
  if (s.volume_weight) j["volume_weight"] = *s.volume_weight;
  return j.dump(2) + "\n";
}

MetricChart build_chart(const ManifoldSpec& s) {
  std::vector<MetricEntry> entries;
  for (const auto& e : s.metric) entries.push_back({e.i, e.j, parse_in(s, e.expr, "metric")});
  std::optional<Expression> weight;
  if (s.volume_weight) weight = parse_in(s, *s.volume_weight, "volume_weight");
  return MetricChart(s.name, s.coordinates, s.domain, std::move(entries), Signature(s.signature),
                     s.boundary, std::move(weight));
}

std::vector<MetricEntry> build_perturbation(const ManifoldSpec& s, const std::string& name) {
  if (s.perturbations.empty()) fail("spec '" + s.name + "' has no perturbation");
  const PerturbationSpec* p = nullptr;
  if (name.empty()) {
    p = &s.perturbations.front().second;
  } else {
    for (const auto& [k, v] : s.perturbations)
      if (k == name) p = &v;
    if (!p) fail("spec '" + s.name + "' has no perturbation named '" + name + "'");
  }
  if (!p->is_pullback()) {
    std::vector<MetricEntry> out;
    for (const auto& e : p->entries) out.push_back({e.i, e.j, parse_in(s, e.expr, "perturbation")});
    return out;
  }
  std::vector<Expression> map;
  for (const auto& e : p->map) map.push_back(parse_in(s, e, "perturbation map"));
  std::vector<std::vector<Expression>> amb;
  for (const auto& row : p->ambient) {
    amb.emplace_back();
    for (const auto& e : row) amb.back().push_back(parse_in(s, e, "perturbation ambient"));
  }
  return pullback_entries(s.dim, map, amb);
}

double sphere_calibration() {
  const std::vector<std::string> c = {"x1", "x2"};
  const ExpressionScope sc{c, {}};
  const MetricChart s2("unit sphere", c, {{0.0, std::numbers::pi}, {0.0, 2.0 * std::numbers::pi}},
                       {{1, 1, Expression::constant(1.0)},
                        {2, 2, Expression::parse("sin(x1)^2", sc)}},
                       Signature::riemannian(2));
  const std::vector<double> x = {1.0, 0.5};
  return geometry_at(s2, x, false).curvature(1, 2, 2, 1);
}

std::string reports_to_json(const std::string& subcommand,
                            const std::vector<VerificationReport>& reports, bool timing,
                            const std::vector<std::pair<std::string, std::string>>& notes) {
  Json j;
  j["subcommand"] = subcommand;
  j["calibration"] = {{"convention", "R_ijkl = g(R(e_i,e_j)e_k, e_l)"},
                      {"unit_sphere_R1221", sphere_calibration()}};
  bool all = true;
  Json arr = Json::array();
  for (const auto& r : reports) {
    all = all && r.pass;
    Json d = Json::object();
    for (const auto& [k, v] : r.details) d[k] = v;
    arr.push_back({{"test", r.test},
                   {"value", r.value},
                   {"reference", r.reference},
                   {"abs_err", r.abs_err},
                   {"rel_err", r.rel_err},
                   {"tol", r.tol},
                   {"criterion", criterion_name(r.criterion)},
                   {"pass", r.pass},
                   {"seconds", timing ? r.seconds : 0.0},
                   {"details", d}});
  }
  j["pass"] = all;
  j["reports"] = arr;
  if (!notes.empty()) {
    Json n = Json::object();
    for (const auto& [k, v] : notes) n[k] = v;
    j["notes"] = n;
  }
  return j.dump(2) + "\n";
}

void print_reports(std::ostream& out, const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) {
    std::ostringstream line;
    line << (r.pass ? "PASS " : "FAIL ") << r.test << ": value " << std::fixed
         << std::setprecision(6) << r.value;
    line.unsetf(std::ios::floatfield);
    if (r.criterion == Criterion::Witness)
      line << " (witness threshold " << std::setprecision(3) << r.tol << ")";
    else
      line << " vs " << std::setprecision(12) << r.reference << std::setprecision(3) << "  abs "
           << r.abs_err << " rel " << r.rel_err << " tol " << r.tol << " ("
           << criterion_name(r.criterion) << ")";
    line << std::fixed << std::setprecision(2) << "  [" << r.seconds << " s]";
    out << line.str() << "\n";
  }
}

Signature named_signature(const std::string& family, int dim) {
  std::vector<int> s(static_cast<std::size_t>(dim), 1);
  if (family == "euclidean") {
  } else if (family == "negative") {
    std::fill(s.begin(), s.end(), -1);
  } else if (family == "lorentzian") {
    s[0] = -1;
  } else if (family == "split") {
    for (int i = 0; i < dim / 2; ++i) s[static_cast<std::size_t>(i)] = -1;
  } else {
    fail("unknown signature family '" + family + "' (euclidean, negative, lorentzian, split)");
  }
  return Signature(s);
}

int stated_invariant_count(int m) { return m % 2 ? 1 + (m - 1) / 2 : 1 + m / 2; }

int q_basis_count(int m) {
  int c = 0;
  for (int k = 0; k <= m - 1; ++k)
    if ((k - (m - 1)) % 2 == 0) ++c;
  return c;
}

namespace {

struct Common {
  std::string report;
  bool no_timing = false;
};

int resolve_order(std::optional<int> flag, const ManifoldSpec* spec) {
  if (flag) return *flag;
  if (spec && spec->quadrature_order) return *spec->quadrature_order;
  if (const char* env = std::getenv(kOrderEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1000)
      fail(std::string(kOrderEnv) + " must be a positive integer");
    return static_cast<int>(v);
  }
  return kDefaultOrder;
}

Signature parse_sign_string(const std::string& s) {
  std::vector<int> v;
  for (char c : s) {
    if (c == '+') v.push_back(1);
    else if (c == '-') v.push_back(-1);
    else fail("signature must be a string of '+' and '-'");
  }
  if (v.empty()) fail("signature must not be empty");
  return Signature(v);
}

int finish(const std::string& sub, const std::vector<VerificationReport>& reports,
           const Common& c, std::ostream& out,
           const std::vector<std::pair<std::string, std::string>>& notes = {}) {
  print_reports(out, reports);
  const std::string path = c.report.empty() ? sub + ".report.json" : c.report;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write report file '" + path + "'");
  f << reports_to_json(sub, reports, !c.no_timing, notes);
  const bool ok = std::all_of(reports.begin(), reports.end(),
                              [](const VerificationReport& r) { return r.pass; });
  out << (ok ? "all checks passed" : "some checks failed") << "; report written to " << path
      << "\n";
  return ok ? 0 : 1;
}

int cmd_gauss_bonnet(const std::string& spec_path, std::optional<int> order,
                     std::optional<double> tol, const Common& c, std::ostream& out) {
  const ManifoldSpec s = load_spec(spec_path);
  const MetricChart chart = build_chart(s);
  const int o = resolve_order(order, &s);
  const double t = tol.value_or(s.tolerance.value_or(1e-6));
  const VerificationReport r = s.boundary
                                   ? gauss_bonnet_boundary(chart, s.euler_characteristic, o, t)
                                   : gauss_bonnet_closed(chart, s.euler_characteristic, o, t);
  return finish("gauss-bonnet", {r}, c, out);
}

int cmd_euler_lagrange(const std::string& spec_path, int n, double fd_step, bool boundary,
                       std::optional<int> order, std::optional<double> tol,
                       const std::string& pert, bool absolute, const Common& c,
                       std::ostream& out) {
  const ManifoldSpec s = load_spec(spec_path);
  const MetricChart chart = build_chart(s);
  const auto h = build_perturbation(s, pert);
  if (fd_step <= 0.0) fail("--fd-step must be positive");
  if (n < 0) fail("--n must be non-negative");
  VariationalOptions opt;
  opt.fd_step = fd_step;
  opt.order = resolve_order(order, &s);
  // With m = n the total variation is zero, so the comparison is absolute.
  opt.criterion = absolute || n == s.dim ? Criterion::Absolute : Criterion::Relative;
  opt.tol = tol.value_or(opt.criterion == Criterion::Absolute ? 1e-6 : 1e-4);
  if (boundary && !s.boundary) fail("--boundary needs a spec with a boundary face");
  const VerificationReport r = boundary || s.boundary
                                   ? variational_check_boundary(chart, h, n, opt)
                                   : variational_check_interior(chart, h, n, opt);
  return finish("euler-lagrange", {r}, c, out);
}

int cmd_identities(int dim, int samples, std::uint64_t seed, const std::string& sig,
                   std::optional<double> tol, const Common& c, std::ostream& out) {
  if (dim < 1 || dim > 6) fail("--dim must be between 1 and 6");
  if (samples < 1) fail("--samples must be positive");
  std::optional<Signature> signs;
  if (!sig.empty()) {
    signs = parse_sign_string(sig);
    if (signs->dim() != dim) fail("--signature length must equal --dim");
  }
  const double t = tol.value_or(dim % 2 == 0 ? 1e-2 : dim == 5 ? 1e-11 : 1e-12);
  std::vector<VerificationReport> reports = {identity_check(dim, samples, seed, t, signs)};
  std::vector<std::pair<std::string, std::string>> notes;
  if (dim == 5) {
    const auto printed =
        identity_check(dim, samples, seed, t, signs, IdentityCoefficients::Printed);
    std::ostringstream msg;
    msg << "coefficients (1,-12,3,24,16,-24,2,-8) leave a normalized residual of "
        << std::setprecision(4) << printed.value
        << "; the vanishing combination is (1,-12,3,-24,16,-24,-2,8), the restriction of the "
           "degree 6 Euler form";
    notes.emplace_back("dimension_5_coefficients", msg.str());
    out << "NOTE " << msg.str() << "\n";
  }
  return finish("identities", reports, c, out, notes);
}

int cmd_invariant_dims(int max_dim, const std::string& family, const std::string& method,
                       bool exchange, const Common& c, std::ostream& out) {
  if (max_dim < 1 || max_dim > kMaxFormalDim - 1)
    fail("--max-dim must be between 1 and " + std::to_string(kMaxFormalDim - 1));
  KernelMethod km;
  if (method == "certified") km = KernelMethod::Certified;
  else if (method == "rational") km = KernelMethod::Rational;
  else fail("--method must be certified or rational");

  std::vector<VerificationReport> reports;
  std::vector<std::pair<std::string, std::string>> notes;
  out << " m~  signature  monomials  kernel  Q_k  stated\n";
  for (int m = 1; m <= max_dim; ++m) {
    const Signature sig = named_signature(family, m);
    const auto t0 = std::chrono::steady_clock::now();
    const auto mons = enumerate_admissible(m, sig);
    const auto basis = invariant_subspace(m, sig, km);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int qc = q_basis_count(m);
    const int stated = stated_invariant_count(m);

    auto r = VerificationReport::compare("kernel dim m~=" + std::to_string(m) + " " + sig.to_string(),
                                         static_cast<double>(basis.size()), qc, 0.0,
                                         Criterion::Absolute);
    r.details.emplace_back("monomials", static_cast<double>(mons.size()));
    r.details.emplace_back("stated_count", stated);
    r.seconds = secs;
    reports.push_back(r);

    // Q_k invariant and jointly independent.
    const auto tq = std::chrono::steady_clock::now();
    std::vector<FormalPolynomial> qs;
    bool all_invariant = true;
    for (int k = (m - 1) % 2; k <= m - 1; k += 2) {
      qs.push_back(q_polynomial(m, k, sig));
      all_invariant = all_invariant && is_invariant(qs.back(), sig);
    }
    auto rq = VerificationReport::compare("Q_k basis m~=" + std::to_string(m),
                                          all_invariant ? rational_rank(qs) : -1, qc, 0.0,
                                          Criterion::Absolute);
    rq.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - tq).count();
    reports.push_back(rq);

    if (exchange) {
      const auto te = std::chrono::steady_clock::now();
      std::size_t violations = 0;
      for (const auto& p : basis)
        for (int a = 1; a <= m; ++a)
          for (int b = 1; b <= m; ++b)
            if (a != b) violations += exchange_check(p, a, b, sig).size();
      auto re = VerificationReport::compare("exchange m~=" + std::to_string(m),
                                            static_cast<double>(violations), 0.0, 0.0,
                                            Criterion::Absolute);
      re.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - te).count();
      reports.push_back(re);
    }

    out << std::setw(3) << m << "  " << std::setw(9) << sig.to_string() << "  " << std::setw(9)
        << mons.size() << "  " << std::setw(6) << basis.size() << "  " << std::setw(3) << qc
        << "  " << std::setw(6) << stated
        << (stated != static_cast<int>(basis.size()) ? "  MISMATCH" : "") << "\n";
    if (stated != static_cast<int>(basis.size()))
      notes.emplace_back("stated_count_m" + std::to_string(m),
                         "formula 1 + m~/2 for even m~ gives " + std::to_string(stated) +
                             " but the exact kernel has dimension " +
                             std::to_string(basis.size()));
  }
  return finish("invariant-dims", reports, c, out, notes);
}

int cmd_restriction(const std::string& spec_path, const std::string& sign_str,
                    std::optional<int> n, std::optional<int> order, std::optional<double> tol,
                    const Common& c, std::ostream& out) {
  const ManifoldSpec s = load_spec(spec_path);
  if (!s.boundary) fail("restriction-check needs a spec with a boundary face");
  if (s.dim + 1 > kMaxChartDim) fail("N x S^1 would exceed the maximal chart dimension");
  int sign = 0;
  if (sign_str == "+") sign = 1;
  else if (sign_str == "-") sign = -1;
  else fail("--sign must be + or -");
  const MetricChart chart = build_chart(s);
  const int o = order.value_or(8);
  const VerificationReport r = restriction_product_check(chart, n, sign, o, tol.value_or(1e-8));
  return finish("restriction-check", {r}, c, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature functional verification"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--report", common.report, "report file (default <subcommand>.report.json)");
  app.add_flag("--no-timing", common.no_timing, "write zero runtimes for reproducible reports");

  std::string spec;
  std::optional<int> order;
  std::optional<double> tol;

  auto* gb = app.add_subcommand("gauss-bonnet", "integrate the Euler form and compare with chi");
  gb->add_option("--spec", spec, "manifold spec file")->required();
  gb->add_option("--order", order, "quadrature order per coordinate");
  gb->add_option("--tol", tol, "absolute tolerance");

  int n = 0;
  double fd_step = 1e-3;
  bool boundary = false, absolute = false;
  std::string pert;
  auto* el = app.add_subcommand("euler-lagrange", "finite-difference first variation check");
  el->add_option("--spec", spec, "manifold spec file")->required();
  el->add_option("--n", n, "degree of the functional")->required();
  el->add_option("--fd-step", fd_step, "base step in t");
  el->add_flag("--boundary", boundary, "include the boundary terms");
  el->add_option("--order", order, "quadrature order per coordinate");
  el->add_option("--tol", tol, "tolerance");
  el->add_option("--perturbation", pert, "named perturbation from the spec file");
  el->add_flag("--absolute", absolute, "compare absolute instead of relative error");

  int dim = 3, samples = 1000;
  std::uint64_t seed = 1;
  std::string sig;
  auto* id = app.add_subcommand("identities", "randomized universal curvature identities");
  id->add_option("--dim", dim, "dimension 1..6")->required();
  id->add_option("--samples", samples, "number of random curvature tensors");
  id->add_option("--seed", seed, "random seed");
  id->add_option("--signature", sig, "sign string such as -++");
  id->add_option("--tol", tol, "tolerance");

  int max_dim = 4;
  std::string family = "euclidean", method = "certified";
  bool exchange = false;
  auto* inv = app.add_subcommand("invariant-dims", "exact dimensions of invariant polynomials");
  inv->add_option("--max-dim", max_dim, "largest boundary dimension")->required();
  inv->add_option("--signature", family, "euclidean, negative, lorentzian or split");
  inv->add_option("--method", method, "certified or rational");
  inv->add_flag("--exchange", exchange, "also run the exchange property on every basis vector");

  std::string sign = "+";
  std::optional<int> rn;
  auto* rc = app.add_subcommand("restriction-check", "circle-product restriction property");
  rc->add_option("--spec", spec, "manifold spec file with boundary")->required();
  rc->add_option("--sign", sign, "+ or -");
  rc->add_option("--n", rn, "degree (default dim N)");
  rc->add_option("--order", order, "boundary quadrature order");
  rc->add_option("--tol", tol, "absolute tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gb->parsed()) return cmd_gauss_bonnet(spec, order, tol, common, out);
    if (el->parsed())
      return cmd_euler_lagrange(spec, n, fd_step, boundary, order, tol, pert, absolute, common, out);
    if (id->parsed()) return cmd_identities(dim, samples, seed, sig, tol, common, out);
    if (inv->parsed()) return cmd_invariant_dims(max_dim, family, method, exchange, common, out);
    if (rc->parsed()) return cmd_restriction(spec, sign, rn, order, tol, common, out);
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}

}  // namespace gbcurv::cli
