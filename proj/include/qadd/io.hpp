#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qadd/exponents.hpp"

namespace qadd {

using json = nlohmann::ordered_json;

struct ProblemOptions {
  std::optional<double> tol;
  std::optional<double> t_window_k;
  std::optional<int> grid;
  std::optional<long> n_cap;
  std::optional<std::uint64_t> seed;
};

struct ProblemSpec {
  json state_source;  // builtin name, file path, or matrix, as given
  DensityState state;
  ConvexSetSpec set;
  json set_source;
  DivergenceSpec divergence = DivergenceSpec::umegaki();
  ProblemOptions options;
};

// [[ [re, im], ... ], ...] (plain numbers accepted for real entries)
Mat parse_matrix(const json& j, const std::string& path);
HermitianOperator parse_hermitian(const json& j, const std::string& path);
DensityState parse_state(const json& j, const std::string& path = "state");
ConvexSetSpec parse_set(const json& j, const std::string& path = "set");
DivergenceSpec parse_divergence(const json& j, const std::string& path = "divergence");
ProblemOptions parse_options(const json& j, const std::string& path = "options");

// inline JSON text, or the path of a file holding it
json read_json_arg(const std::string& text_or_path);
ProblemSpec load_problem(const std::string& text_or_path);
ProblemSpec parse_problem(const json& j);

CertifyOptions apply_options(const ProblemOptions& o, CertifyOptions c);
ExponentOptions apply_options(const ProblemOptions& o, ExponentOptions e);

// doubles rounded to 12 significant digits; +-inf as "inf" / "-inf"
json num(double x);
json matrix_to_json(const Mat& m);
json set_to_json(const ConvexSetSpec& s);
json divergence_to_json(const DivergenceSpec& d);
json options_to_json(const ProblemOptions& o);
json problem_to_json(const ProblemSpec& p);
json extended_to_json(const ExtendedValue& v);
json minimization_to_json(const MinimizationResult& m);
json certificate_to_json(const AdditivityCertificate& c);
json saddle_to_json(const SaddleReport& s);
json report_to_json(const ExponentReport& r);
json conditional_to_json(const ConditionalResult& c);
json error_to_json(const Error& e);

// single-line JSON followed by a newline
void emit_json(const json& j, std::ostream& os);
void emit_json(const json& j, const std::string& path);
// kind,rate,value,lower,upper,certified
void emit_report_csv(const ExponentReport& r, std::ostream& os);
std::string format_number(double x);

}  // namespace qadd
