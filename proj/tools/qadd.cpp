#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "qadd/io.hpp"

using namespace qadd;

namespace {

struct ProblemFlags {
  std::string problem, state, set, alpha, preset;
  std::optional<double> z, tol, t_window_k;
  std::optional<int> grid;
  std::optional<long> n_cap;
  std::string out;
};

void add_problem_flags(CLI::App* sub, ProblemFlags& f, bool divergence) {
  sub->add_option("--problem", f.problem, "problem JSON (inline or file path); other flags override its fields");
  sub->add_option("--state", f.state, "state: plus | werner(p,d) | strange(p) | matrix JSON | file path");
  sub->add_option("--set", f.set, "set descriptor JSON (inline or file path)");
  if (divergence) {
    sub->add_option("--alpha", f.alpha, "alpha (a number or inf)");
    sub->add_option("--z", f.z, "z");
    sub->add_option("--preset", f.preset, "umegaki | petz | sandwiched | reversed | max");
  }
  sub->add_option("--tol", f.tol, "relative tolerance of the additivity certificate");
  sub->add_option("--t-window-K", f.t_window_k, "t-window half-width in units of 2 pi / g_min");
  sub->add_option("--grid", f.grid, "samples per block of the t-window scan");
  sub->add_option("--n-cap", f.n_cap, "size cap on dim^n for n-copy brute force");
  sub->add_option("--out", f.out, "write the JSON result to this path instead of stdout");
}

json state_arg(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b != std::string::npos && (s[b] == '[' || s[b] == '{')) return read_json_arg(s);
  return s;
}

ProblemSpec build_problem(const ProblemFlags& f) {
  json j = f.problem.empty() ? json::object() : read_json_arg(f.problem);
  if (!j.is_object()) fail(ErrorCode::ValidationError, "problem: expected an object");
  if (!f.state.empty()) j["state"] = state_arg(f.state);
  if (!f.set.empty()) j["set"] = read_json_arg(f.set);
  if (!f.alpha.empty() || f.z || !f.preset.empty()) {
    json d = json::object();
    if (!f.alpha.empty()) {
      if (f.alpha == "inf") {
        d["alpha"] = "inf";
      } else {
        try {
          size_t pos = 0;
          d["alpha"] = std::stod(f.alpha, &pos);
          if (pos != f.alpha.size()) throw std::invalid_argument(f.alpha);
        } catch (const std::exception&) {
          fail(ErrorCode::ValidationError, "--alpha: expected a number or inf");
        }
      }
    }
    if (f.z) d["z"] = *f.z;
    if (!f.preset.empty()) d["preset"] = f.preset;
    j["divergence"] = d;
  }
  json& o = j["options"];
  if (o.is_null()) o = json::object();
  if (f.tol) o["tol"] = *f.tol;
  if (f.t_window_k) o["t_window_K"] = *f.t_window_k;
  if (f.grid) o["grid"] = *f.grid;
  if (f.n_cap) o["n_cap"] = *f.n_cap;
  if (o.empty()) j.erase("options");
  return parse_problem(j);
}

void write(const json& j, const std::string& out) {
  if (out.empty())
    emit_json(j, std::cout);
  else
    emit_json(j, out);
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotConverged:
    case ErrorCode::QuadratureNonConvergent:
    case ErrorCode::FixpointDiverged:
    case ErrorCode::OptimizerNotCertified: return 3;
    default: return 2;
  }
}

unsigned worker_count() {
  if (const char* env = std::getenv("QADD_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void sweep_fpn(const std::vector<double>& ps, int n_max, const std::string& out) {
  require(n_max >= 1 && n_max <= 200, ErrorCode::ValidationError, "--n-max must lie in [1, 200]");
  for (double p : ps)
    require(p >= 0.5 && p < 1.0, ErrorCode::ValidationError, "--p must lie in [0.5, 1)");
  const size_t total = ps.size() * n_max;
  std::vector<ViolationValue> rows(total);
  std::vector<std::exception_ptr> errs(total);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < total; i = next++) {
      try {
        rows[i] = violation_integral(ps[i / n_max], static_cast<int>(i % n_max) + 1);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned nt = std::min<size_t>(worker_count(), total);
  for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) fail(ErrorCode::IoError, "cannot open " + out + " for writing");
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "n,p,f_closed,f_quad\n";
  for (size_t i = 0; i < total; ++i)
    os << (i % n_max) + 1 << ',' << format_number(ps[i / n_max]) << ',' << format_number(rows[i].closed) << ','
       << format_number(rows[i].quadrature) << '\n';
  if (!os) fail(ErrorCode::IoError, "write failed");
}

// Haar-ish random two-qubit mixed state from a Ginibre matrix
DensityState random_two_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat g(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = cplx(u(rng), u(rng));
  Mat m = g * g.adjoint();
  m /= m.trace().real();
  return DensityState(HermitianOperator::from_raw(m));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qadd: additivity of minimized quantum divergences and error exponents"};
  app.require_subcommand(1);

  ProblemFlags mf, cf, ef;
  auto* minimize = app.add_subcommand("minimize", "minimize D(rho || sigma) over the set; prints the minimizer");
  add_problem_flags(minimize, mf, true);

  auto* certify = app.add_subcommand("certify", "minimize, then check the additivity condition at the minimizer");
  add_problem_flags(certify, cf, true);

  auto* exponent = app.add_subcommand(
      "exponent",
      "error-exponent report; --format csv prints the columns kind,rate,value,lower,upper,certified");
  std::string kind, format = "json";
  std::optional<double> rate;
  int n_max = 3;
  exponent->add_option("kind", kind, "stein | chernoff | hoeffding | sc")
      ->required()
      ->check(CLI::IsMember({"stein", "chernoff", "hoeffding", "sc"}));
  exponent->add_option("--rate", rate, "rate r (hoeffding and sc)");
  exponent->add_option("--n-max", n_max, "largest n for the finite-copy Stein bounds")->check(CLI::Range(1, 8));
  exponent->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  add_problem_flags(exponent, ef, false);

  auto* sweep = app.add_subcommand(
      "sweep-fpn", "tabulate f_p(n) for n = 1..n-max; CSV columns n,p,f_closed,f_quad (QADD_THREADS caps workers)");
  std::vector<double> ps;
  int sweep_n = 100;
  std::string sweep_out;
  sweep->add_option("--p", ps, "p in [1/2, 1); repeatable")->required();
  sweep->add_option("--n-max", sweep_n, "largest n");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  auto* example = app.add_subcommand("example", "shipped scenarios");
  std::string ex_name, what = "minimize", ex_out;
  double lambda = 0.4, wp = 0.0, sp = 1.0, ex_alpha = 2.0, ex_z = 2.0;
  int wd = 2;
  std::uint64_t seed = 1;
  std::optional<double> ex_rate;
  example->add_option("name", ex_name, "qubit-av | werner | strange | conditional")
      ->required()
      ->check(CLI::IsMember({"qubit-av", "werner", "strange", "conditional"}));
  example->add_option("--what", what, "minimize | ddown | certify | stein | chernoff | hoeffding | sc")
      ->check(CLI::IsMember({"minimize", "ddown", "certify", "stein", "chernoff", "hoeffding", "sc"}));
  example->add_option("--lambda", lambda, "qubit-av: set parameter");
  example->add_option("--p", wp, "werner: state parameter");
  example->add_option("--d", wd, "werner: local dimension");
  example->add_option("--strange-p", sp, "strange: state parameter");
  example->add_option("--rate", ex_rate, "rate for hoeffding and sc");
  example->add_option("--alpha", ex_alpha, "conditional: alpha");
  example->add_option("--z", ex_z, "conditional: z");
  example->add_option("--seed", seed, "conditional: seed of the random state");
  example->add_option("--out", ex_out, "write the JSON result to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_json(error_to_json(Error(ErrorCode::ValidationError, e.what())), std::cerr);
    return 2;
  }

  try {
    auto run_exponent = [&](const ProblemSpec& p, const std::string& k, std::optional<double> r, int nmax,
                            const std::string& fmt, const std::string& out) {
      ExponentOptions eo = apply_options(p.options, ExponentOptions{});
      eo.n_max = nmax;
      ExponentReport rep;
      if (k == "stein") {
        rep = stein_report(p.state, p.set, eo);
      } else if (k == "chernoff") {
        rep = chernoff_report(p.state, p.set, eo);
      } else {
        require(r.has_value(), ErrorCode::ValidationError, "--rate is required for " + k);
        rep = k == "hoeffding" ? hoeffding_report(p.state, p.set, *r, eo)
                               : strong_converse_report(p.state, p.set, *r, eo);
      }
      if (fmt == "csv") {
        if (out.empty()) {
          emit_report_csv(rep, std::cout);
        } else {
          std::ofstream f(out);
          if (!f) fail(ErrorCode::IoError, "cannot open " + out + " for writing");
          emit_report_csv(rep, f);
        }
      } else {
        write(report_to_json(rep), out);
      }
      return 0;
    };
    auto run_minimize = [&](const ProblemSpec& p, const std::string& out) {
      MinimizationResult m = minimize_divergence(p.state, p.set, p.divergence);
      write(minimization_to_json(m), out);
      return m.converged ? 0 : 3;
    };
    auto run_certify = [&](const ProblemSpec& p, const std::string& out) {
      AdditivityCertificate c = additivity_check(p.state, p.set, p.divergence, apply_options(p.options, CertifyOptions{}));
      write(certificate_to_json(c), out);
      return 0;
    };

    if (*minimize) return run_minimize(build_problem(mf), mf.out);
    if (*certify) return run_certify(build_problem(cf), cf.out);
    if (*exponent) return run_exponent(build_problem(ef), kind, rate, n_max, format, ef.out);
    if (*sweep) {
      sweep_fpn(ps, sweep_n, sweep_out);
      return 0;
    }
    if (*example) {
      if (ex_name == "conditional") {
        std::mt19937_64 rng(seed);
        DensityState rho = random_two_qubit(rng);
        const DivergenceSpec spec = ex_alpha == 1.0 ? DivergenceSpec::umegaki() : DivergenceSpec::alpha_z(ex_alpha, ex_z);
        ConditionalResult one = conditional_entropy(rho, SystemShape{{2, 2}}, spec);
        HermitianOperator two = permute_systems(tensor_power(rho.op(), 2), SystemShape{{2, 2, 2, 2}}, {0, 2, 1, 3});
        ConditionalResult both = conditional_entropy(DensityState(two), SystemShape{{4, 4}}, spec);
        json j = {{"divergence", divergence_to_json(spec)},
                  {"state", matrix_to_json(rho.op().matrix())},
                  {"one_copy", conditional_to_json(one)},
                  {"two_copy", conditional_to_json(both)},
                  {"additivity_gap", num(both.value - 2.0 * one.value)}};
        write(j, ex_out);
        return 0;
      }
      json pj;
      if (ex_name == "qubit-av") {
        pj = {{"state", "plus"}, {"set", {{"type", "av_qubit"}, {"lambda", lambda}}}};
      } else if (ex_name == "werner") {
        std::ostringstream s;
        s << "werner(" << format_number(wp) << "," << wd << ")";
        pj = {{"state", s.str()}, {"set", {{"type", "werner_rains"}, {"d", wd}}}};
      } else {
        pj = {{"state", "strange(" + format_number(sp) + ")"}, {"set", {{"type", "mana_strange"}}}};
      }
      ProblemSpec p = parse_problem(pj);
      if (what == "minimize") return run_minimize(p, ex_out);
      if (what == "certify") return run_certify(p, ex_out);
      if (what == "ddown") {
        MinimizationResult m = minimize_d_down(p.state, extreme_points(p.set));
        write(minimization_to_json(m), ex_out);
        return m.converged ? 0 : 3;
      }
      return run_exponent(p, what, ex_rate, 3, "json", ex_out);
    }
  } catch (const Error& e) {
    emit_json(error_to_json(e), std::cerr);
    return exit_code(e.code());
  } catch (const std::exception& e) {
    emit_json(error_to_json(Error(ErrorCode::InvalidArgument, e.what())), std::cerr);
    return 2;
  }
  return 0;
}
