#include "qadd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace qadd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  fail(ErrorCode::ValidationError, path + ": " + what);
}

void check_fields(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) invalid(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) invalid(path + "." + it.key(), "unknown field");
}

double get_number(const json& j, const std::string& path, bool allow_inf = false) {
  if (j.is_number()) return j.get<double>();
  if (allow_inf && j.is_string() && (j == "inf" || j == "infinity")) return kInf;
  invalid(path, allow_inf ? "expected a number or \"inf\"" : "expected a number");
}

long get_integer(const json& j, const std::string& path) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long>();
  if (j.is_number_float()) {
    double x = j.get<double>();
    if (x == std::round(x) && std::abs(x) < 1e15) return static_cast<long>(x);
  }
  invalid(path, "expected an integer");
}

const json& required(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) invalid(path + "." + key, "missing field");
  return *it;
}

// rethrow errors from domain constructors with the field path in front
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::NonHermitian ||
        e.code() == ErrorCode::InvalidArgument)
      invalid(path, e.what());
    throw;
  }
}

HermitianOperator parse_psd(const json& j, const std::string& path) {
  HermitianOperator h = parse_hermitian(j, path);
  if (!is_psd(h)) invalid(path, "matrix is not positive semidefinite");
  return h;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

}  // namespace

Mat parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) invalid(path, "expected a non-empty array of rows");
  const int d = static_cast<int>(j.size());
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != d)
      invalid(rp, "expected a row of length " + std::to_string(d));
    for (int c = 0; c < d; ++c) {
      const json& e = j[r][c];
      const std::string ep = rp + "[" + std::to_string(c) + "]";
      if (e.is_number()) {
        m(r, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        invalid(ep, "expected a number or [re, im]");
      }
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) invalid(ep, "entry is not finite");
    }
  }
  return m;
}

HermitianOperator parse_hermitian(const json& j, const std::string& path) {
  Mat m = parse_matrix(j, path);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r; c < m.cols(); ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > kHermTol * scale)
        invalid(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                "not Hermitian (entry [" + std::to_string(c) + "][" + std::to_string(r) + "] is not its conjugate)");
  return HermitianOperator(m);
}

DensityState parse_state(const json& j, const std::string& path) {
  if (j.is_array()) {
    HermitianOperator h = parse_hermitian(j, path);
    return at_path(path, [&] { return DensityState(h); });
  }
  if (j.is_object()) {
    check_fields(j, path, {"matrix"});
    return parse_state(required(j, "matrix", path), path + ".matrix");
  }
  if (!j.is_string()) invalid(path, "expected a matrix, a builtin name or a file path");
  const std::string s = trim(j.get<std::string>());
  static const std::regex werner_re(R"(werner\(\s*([^,\s]+)\s*,\s*([0-9]+)\s*\))");
  static const std::regex strange_re(R"(strange\(\s*([^)\s]+)\s*\))");
  std::smatch mt;
  if (s == "plus" || s == "plus_state") return plus_state();
  if (std::regex_match(s, mt, werner_re)) {
    double p = 0.0;
    try {
      p = std::stod(mt[1]);
    } catch (const std::exception&) {
      invalid(path, "bad werner parameter '" + mt[1].str() + "'");
    }
    const int d = std::stoi(mt[2]);
    if (d < 2 || d > 8) invalid(path, "werner dimension must lie in [2, 8]");
    return at_path(path, [&] { return werner_state(p, d); });
  }
  if (std::regex_match(s, mt, strange_re)) {
    double p = 0.0;
    try {
      p = std::stod(mt[1]);
    } catch (const std::exception&) {
      invalid(path, "bad strange parameter '" + mt[1].str() + "'");
    }
    return at_path(path, [&] { return strange_state(p); });
  }
  if (s.find('(') != std::string::npos) invalid(path, "unknown builtin state '" + s + "'");
  json file = read_file(s);
  return parse_state(file, path + "<" + s + ">");
}

ConvexSetSpec parse_set(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  const json& t = required(j, "type", path);
  if (!t.is_string()) invalid(path + ".type", "expected a string");
  const std::string type = t.get<std::string>();
  if (type == "hull") {
    check_fields(j, path, {"type", "extremes"});
    const json& ex = required(j, "extremes", path);
    if (!ex.is_array() || ex.empty()) invalid(path + ".extremes", "expected a non-empty array of matrices");
    std::vector<HermitianOperator> v;
    for (size_t i = 0; i < ex.size(); ++i) {
      const std::string ep = path + ".extremes[" + std::to_string(i) + "]";
      v.push_back(parse_psd(ex[i], ep));
      if (v.back().dim() != v.front().dim()) invalid(ep, "dimension differs from the first extreme");
    }
    return at_path(path, [&] { return ConvexSetSpec::hull(std::move(v)); });
  }
  if (type == "av_qubit") {
    check_fields(j, path, {"type", "lambda"});
    const double l = get_number(required(j, "lambda", path), path + ".lambda");
    return at_path(path + ".lambda", [&] { return ConvexSetSpec::av_qubit(l); });
  }
  if (type == "werner_rains") {
    check_fields(j, path, {"type", "d"});
    long d = 2;
    if (j.contains("d")) d = get_integer(j["d"], path + ".d");
    if (d < 2 || d > 8) invalid(path + ".d", "must lie in [2, 8]");
    return ConvexSetSpec::werner_rains(static_cast<int>(d));
  }
  if (type == "mana_strange") {
    check_fields(j, path, {"type"});
    return ConvexSetSpec::mana_strange();
  }
  if (type == "single") {
    check_fields(j, path, {"type", "state"});
    return ConvexSetSpec::single(parse_psd(required(j, "state", path), path + ".state"));
  }
  if (type == "product_marginal") {
    check_fields(j, path, {"type", "dim_a", "dim_b"});
    const long a = get_integer(required(j, "dim_a", path), path + ".dim_a");
    const long b = get_integer(required(j, "dim_b", path), path + ".dim_b");
    if (a < 1 || b < 1 || a * b > kDefaultSizeCap) invalid(path, "bad product dimensions");
    return ConvexSetSpec::product_marginal(static_cast<int>(a), static_cast<int>(b));
  }
  invalid(path + ".type", "unknown set type '" + type + "'");
}

DivergenceSpec parse_divergence(const json& j, const std::string& path) {
  check_fields(j, path, {"alpha", "z", "preset"});
  std::optional<double> alpha, z;
  if (j.contains("alpha")) alpha = get_number(j["alpha"], path + ".alpha", true);
  if (j.contains("z")) z = get_number(j["z"], path + ".z");
  if (alpha && !(*alpha > 0.0)) invalid(path + ".alpha", "must be positive");
  if (z && !(*z > 0.0 && std::isfinite(*z))) invalid(path + ".z", "must be positive and finite");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) invalid(path + ".preset", "expected a string");
    if (z) invalid(path + ".z", "cannot be combined with a preset");
    const std::string p = j["preset"].get<std::string>();
    if (p == "umegaki") {
      if (alpha && *alpha != 1.0) invalid(path + ".alpha", "umegaki preset needs alpha = 1");
      return DivergenceSpec::umegaki();
    }
    if (p == "max") {
      if (alpha && *alpha != kInf) invalid(path + ".alpha", "max preset needs alpha = inf");
      return DivergenceSpec::sandwiched(kInf);
    }
    if (!alpha) invalid(path + ".alpha", "missing field");
    if (p == "sandwiched") return DivergenceSpec::sandwiched(*alpha);
    if (*alpha == kInf) invalid(path + ".alpha", "only the sandwiched family allows alpha = inf");
    if (p == "petz") return DivergenceSpec::petz(*alpha);
    if (p == "reversed") {
      if (*alpha == 1.0) invalid(path + ".alpha", "reversed line needs alpha != 1");
      return DivergenceSpec::reversed(*alpha);
    }
    invalid(path + ".preset", "unknown preset '" + p + "'");
  }
  if (!alpha) invalid(path + ".alpha", "missing field");
  if (*alpha == kInf) {
    if (z) invalid(path + ".z", "alpha = inf takes no z");
    return DivergenceSpec::sandwiched(kInf);
  }
  if (!z) {
    if (*alpha == 1.0) return DivergenceSpec::umegaki();
    invalid(path + ".z", "missing field (give z or a preset)");
  }
  if (*alpha == 1.0) return DivergenceSpec::umegaki();
  return DivergenceSpec::alpha_z(*alpha, *z);
}

ProblemOptions parse_options(const json& j, const std::string& path) {
  check_fields(j, path, {"tol", "t_window_K", "grid", "n_cap", "seed"});
  ProblemOptions o;
  if (j.contains("tol")) {
    o.tol = get_number(j["tol"], path + ".tol");
    if (!(*o.tol > 0.0 && *o.tol < 1.0)) invalid(path + ".tol", "must lie in (0, 1)");
  }
  if (j.contains("t_window_K")) {
    o.t_window_k = get_number(j["t_window_K"], path + ".t_window_K");
    if (!(*o.t_window_k > 0.0 && *o.t_window_k <= 1e4)) invalid(path + ".t_window_K", "must lie in (0, 1e4]");
  }
  if (j.contains("grid")) {
    long g = get_integer(j["grid"], path + ".grid");
    if (g < 16 || g > (1 << 22)) invalid(path + ".grid", "must lie in [16, 4194304]");
    o.grid = static_cast<int>(g);
  }
  if (j.contains("n_cap")) {
    o.n_cap = get_integer(j["n_cap"], path + ".n_cap");
    if (*o.n_cap < 1) invalid(path + ".n_cap", "must be positive");
  }
  if (j.contains("seed")) {
    long s = get_integer(j["seed"], path + ".seed");
    if (s < 0) invalid(path + ".seed", "must be non-negative");
    o.seed = static_cast<std::uint64_t>(s);
  }
  return o;
}

json read_json_arg(const std::string& text_or_path) {
  const std::string t = trim(text_or_path);
  if (!t.empty() && (t[0] == '{' || t[0] == '[' || t[0] == '"')) return parse_text(t, "inline JSON");
  return read_file(t);
}

ProblemSpec load_problem(const std::string& text_or_path) { return parse_problem(read_json_arg(text_or_path)); }

ProblemSpec parse_problem(const json& j) {
  check_fields(j, "problem", {"state", "set", "divergence", "options"});
  ProblemSpec p;
  p.state_source = required(j, "state", "problem");
  p.state = parse_state(p.state_source, "state");
  p.set_source = required(j, "set", "problem");
  p.set = parse_set(p.set_source, "set");
  if (j.contains("divergence")) p.divergence = parse_divergence(j["divergence"], "divergence");
  if (j.contains("options")) p.options = parse_options(j["options"], "options");
  if (p.set.base_dim() != p.state.dim())
    invalid("set", "dimension " + std::to_string(p.set.base_dim()) + " does not match the state dimension " +
                       std::to_string(p.state.dim()));
  return p;
}

CertifyOptions apply_options(const ProblemOptions& o, CertifyOptions c) {
  if (o.tol) c.rel_tol = *o.tol;
  if (o.t_window_k) c.t_window_k = *o.t_window_k;
  if (o.grid) c.grid = *o.grid;
  return c;
}

ExponentOptions apply_options(const ProblemOptions& o, ExponentOptions e) {
  e.certify = apply_options(o, e.certify);
  if (o.n_cap) e.size_cap = *o.n_cap;
  return e;
}

json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(json::array({num(m(r, c).real()), num(m(r, c).imag())}));
    rows.push_back(row);
  }
  return rows;
}

namespace {

json weights_json(const std::vector<double>& w) {
  json a = json::array();
  for (double x : w) a.push_back(num(x));
  return a;
}

struct SetEmitter {
  json operator()(const FiniteHull& h) const {
    json ex = json::array();
    for (const auto& e : h.extremes) ex.push_back(matrix_to_json(e.matrix()));
    return {{"type", "hull"}, {"extremes", ex}};
  }
  json operator()(const AVQubit& a) const { return {{"type", "av_qubit"}, {"lambda", num(a.lambda)}}; }
  json operator()(const WernerRainsSlice& w) const { return {{"type", "werner_rains"}, {"d", w.d}}; }
  json operator()(const ManaStrangeSlice&) const { return {{"type", "mana_strange"}}; }
  json operator()(const SingleState& s) const {
    return {{"type", "single"}, {"state", matrix_to_json(s.sigma.matrix())}};
  }
  json operator()(const ProductMarginal& p) const {
    return {{"type", "product_marginal"}, {"dim_a", p.dim_a}, {"dim_b", p.dim_b}};
  }
};

}  // namespace

json set_to_json(const ConvexSetSpec& s) { return std::visit(SetEmitter{}, s.variant()); }

json divergence_to_json(const DivergenceSpec& d) {
  if (d.is_umegaki()) return {{"preset", "umegaki"}};
  switch (d.kind) {
    case ZKind::Explicit: return {{"alpha", num(d.alpha)}, {"z", num(d.z_explicit)}};
    case ZKind::AlphaLinked: return {{"alpha", num(d.alpha)}, {"preset", "sandwiched"}};
    case ZKind::PetzOne: return {{"alpha", num(d.alpha)}, {"preset", "petz"}};
    case ZKind::ReversedLine: return {{"alpha", num(d.alpha)}, {"preset", "reversed"}};
  }
  return {};
}

json options_to_json(const ProblemOptions& o) {
  json j = json::object();
  if (o.tol) j["tol"] = num(*o.tol);
  if (o.t_window_k) j["t_window_K"] = num(*o.t_window_k);
  if (o.grid) j["grid"] = *o.grid;
  if (o.n_cap) j["n_cap"] = *o.n_cap;
  if (o.seed) j["seed"] = *o.seed;
  return j;
}

json problem_to_json(const ProblemSpec& p) {
  json j = {{"state", p.state_source}, {"set", set_to_json(p.set)}, {"divergence", divergence_to_json(p.divergence)}};
  json o = options_to_json(p.options);
  if (!o.empty()) j["options"] = o;
  return j;
}

json extended_to_json(const ExtendedValue& v) { return v.finite() ? num(v.value) : json("inf"); }

json minimization_to_json(const MinimizationResult& m) {
  return {{"value", extended_to_json(m.value)},
          {"q_value", num(m.q_value)},
          {"weights", weights_json(m.weights)},
          {"certificate_gap", num(m.certificate_gap)},
          {"fw_gap", num(m.fw_gap)},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"sigma", matrix_to_json(m.sigma_opt.matrix())}};
}

json certificate_to_json(const AdditivityCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"sup_value", num(c.sup_value)},
          {"q_value", num(c.q_value)},
          {"margin", num(c.margin)},
          {"witness", {{"t", num(c.witness_t)}, {"tau_index", c.witness_tau}}},
          {"search",
           {{"window", num(c.search.t_window)},
            {"samples", c.search.samples},
            {"refinements", c.search.refinements},
            {"method", c.search.method},
            {"exhaustive", c.search.exhaustive}}},
          {"upper_bound", num(c.upper_bound)},
          {"commuting", c.commuting},
          {"sigma0_weights", weights_json(c.weights)},
          {"optimizer_gap", num(c.optimizer_gap)}};
}

json saddle_to_json(const SaddleReport& s) {
  return {{"alpha0", num(s.alpha0)},
          {"value", num(s.value)},
          {"weights", weights_json(s.weights)},
          {"residual_alpha", num(s.residual_alpha)},
          {"residual_sigma", num(s.residual_sigma)},
          {"minimax_gap", num(s.minimax_gap)},
          {"bracket_width", num(s.bracket_width)},
          {"converged", s.converged}};
}

json report_to_json(const ExponentReport& r) {
  json j = {{"kind", to_string(r.kind)}};
  if (r.rate) j["rate"] = num(*r.rate);
  if (r.value) j["value"] = num(*r.value);
  j["lower"] = num(r.lower);
  j["upper"] = num(r.upper);
  j["certified"] = r.certified;
  json d = json::object();
  if (r.alpha0) d["alpha0"] = num(*r.alpha0);
  if (!r.sigma0_weights.empty()) d["sigma0_weights"] = weights_json(r.sigma0_weights);
  if (r.certificate) d["certificate"] = certificate_to_json(*r.certificate);
  if (r.saddle) d["saddle"] = saddle_to_json(*r.saddle);
  if (!r.n_used.empty()) {
    d["n_used"] = r.n_used;
    d["upper_by_n"] = weights_json(r.upper_by_n);
  }
  if (r.d_min) d["d_min"] = num(*r.d_min);
  if (r.dmax_min) d["dmax_min"] = num(*r.dmax_min);
  if (r.r_inf) d["r_inf"] = num(*r.r_inf);
  if (r.window_approximate) d["window_approximate"] = true;
  if (!r.notes.empty()) d["notes"] = r.notes;
  j["details"] = d;
  return j;
}

json conditional_to_json(const ConditionalResult& c) {
  return {{"value", num(c.value)},
          {"raw_divergence", num(c.raw_divergence)},
          {"fixpoint_residual", num(c.fixpoint_residual)},
          {"certificate_gap", num(c.certificate_gap)},
          {"iterations", c.iterations},
          {"sigma_b", matrix_to_json(c.sigma_b.matrix())}};
}

json error_to_json(const Error& e) { return {{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}; }

void emit_json(const json& j, std::ostream& os) {
  os << j.dump() << '\n';
  if (!os) fail(ErrorCode::IoError, "write failed");
}

void emit_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  emit_json(j, out);
}

void emit_report_csv(const ExponentReport& r, std::ostream& os) {
  auto opt = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };
  os << "kind,rate,value,lower,upper,certified\n";
  os << to_string(r.kind) << ',' << opt(r.rate) << ',' << opt(r.value) << ',' << format_number(r.lower) << ','
     << format_number(r.upper) << ',' << (r.certified ? "true" : "false") << '\n';
  if (!os) fail(ErrorCode::IoError, "write failed");
}

}  // namespace qadd
