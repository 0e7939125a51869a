#include <doctest.h>

#include <sstream>

#include "qadd/io.hpp"

using namespace qadd;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("inline av_qubit problem") {
  ProblemSpec p = load_problem(R"J({"state":"plus","set":{"type":"av_qubit","lambda":0.4},"divergence":{"alpha":1}})J");
  CHECK(p.state.dim() == 2);
  CHECK(p.set.type_name() == "av_qubit");
  CHECK(p.divergence.is_umegaki());
}

TEST_CASE("matrix entries as pairs or plain numbers") {
  Mat m = parse_matrix(json::parse("[[[0.5,0],[0,0.5]],[[0,-0.5],0.5]]"), "m");
  CHECK(m(0, 1) == cplx(0.0, 0.5));
  CHECK(m(1, 0) == cplx(0.0, -0.5));
  CHECK(m(1, 1) == cplx(0.5, 0.0));
}

TEST_CASE("non-Hermitian matrices are rejected with the entry named") {
  const std::string text = R"J({"state":[[0.5,[0.1,0.2]],[[0.1,0.2],0.5]],"set":{"type":"av_qubit","lambda":0}})J";
  CHECK(code_of([&] { load_problem(text); }) == ErrorCode::ValidationError);
  CHECK(message_of([&] { load_problem(text); }).find("state[0][1]") != std::string::npos);
  const std::string hull = R"J({"state":"plus","set":{"type":"hull","extremes":[[[1,0],[0,0]],[[0.5,1],[0,0.5]]]}})J";
  CHECK(message_of([&] { load_problem(hull); }).find("set.extremes[1][0][1]") != std::string::npos);
}

TEST_CASE("unknown fields are rejected") {
  CHECK(message_of([] { load_problem(R"J({"state":"plus","set":{"type":"av_qubit","lambda":0},"extra":1})J"); })
            .find("problem.extra") != std::string::npos);
  CHECK(message_of([] { load_problem(R"J({"state":"plus","set":{"type":"av_qubit","lambda":0,"mu":1}})J"); })
            .find("set.mu") != std::string::npos);
  CHECK(message_of([] {
          load_problem(R"J({"state":"plus","set":{"type":"av_qubit","lambda":0},"options":{"grids":5}})J");
        }).find("options.grids") != std::string::npos);
}

TEST_CASE("malformed JSON and bad values") {
  CHECK(code_of([] { load_problem("{\"state\": "); }) == ErrorCode::ParseError);
  CHECK(code_of([] { load_problem(R"J({"state":"plus","set":{"type":"av_qubit","lambda":1.5}})J"); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([] { load_problem(R"J({"state":"plus","set":{"type":"cube"}})J"); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { load_problem(R"J({"state":"werner(2,2)","set":{"type":"werner_rains"}})J"); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([] { load_problem(R"J({"state":"plus","set":{"type":"werner_rains","d":2}})J"); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([] { load_problem(R"J({"state":[[1,0],[0,1]],"set":{"type":"av_qubit","lambda":0}})J"); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([] { parse_divergence(json::parse(R"J({"alpha":0.5})J")); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { load_problem("/nonexistent/problem.json"); }) == ErrorCode::IoError);
}

TEST_CASE("werner(0,2) is the normalized antisymmetric projector") {
  DensityState w = parse_state(json("werner(0,2)"));
  CHECK((w.op().matrix() - asym_state(2).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  DensityState s = parse_state(json("strange(0.5)"));
  CHECK(s.dim() == 3);
}

TEST_CASE("divergence descriptors") {
  CHECK(parse_divergence(json::parse(R"J({"preset":"umegaki"})J")).is_umegaki());
  DivergenceSpec s = parse_divergence(json::parse(R"J({"alpha":2,"preset":"sandwiched"})J"));
  CHECK(s.z() == 2.0);
  CHECK(parse_divergence(json::parse(R"J({"alpha":"inf"})J")).is_max());
  DivergenceSpec e = parse_divergence(json::parse(R"J({"alpha":0.5,"z":0.5})J"));
  CHECK(e.kind == ZKind::Explicit);
  CHECK(parse_divergence(json::parse(R"J({"alpha":0.5,"preset":"petz"})J")).z() == 1.0);
}

TEST_CASE("round trip of the builtin examples") {
  const char* texts[] = {
      R"J({"state":"plus","set":{"type":"av_qubit","lambda":0.4},"divergence":{"preset":"umegaki"}})J",
      R"J({"state":"werner(0,2)","set":{"type":"werner_rains","d":2},"divergence":{"alpha":2,"preset":"sandwiched"}})J",
      R"J({"state":"strange(1)","set":{"type":"mana_strange"},"divergence":{"alpha":0.5,"z":0.5},"options":{"tol":1e-08,"grid":2048}})J",
      R"J({"state":"plus","set":{"type":"single","state":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}})J",
  };
  for (const char* t : texts) {
    ProblemSpec a = load_problem(t);
    const std::string once = problem_to_json(a).dump();
    ProblemSpec b = load_problem(once);
    CHECK(problem_to_json(b).dump() == once);
    CHECK(b.divergence.alpha == a.divergence.alpha);
    CHECK(b.divergence.z() == a.divergence.z());
    CHECK((b.state.op().matrix() - a.state.op().matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(set_to_json(b.set) == set_to_json(a.set));
  }
}

TEST_CASE("number formatting") {
  CHECK(num(0.1 + 0.2).dump() == "0.3");
  CHECK(num(std::numeric_limits<double>::infinity()).dump() == "\"inf\"");
  CHECK(num(-0.0).dump() == "0.0");
  CHECK(num(1.0 / 3.0).dump() == "0.333333333333");
  CHECK(format_number(2.28156564) == "2.28156564");
}

TEST_CASE("certificate JSON is one line with a fixed field order") {
  AdditivityCertificate c = additivity_check(plus_state(), ConvexSetSpec::av_qubit(0.4), DivergenceSpec::umegaki());
  std::ostringstream os;
  emit_json(certificate_to_json(c), os);
  const std::string s = os.str();
  CHECK(s.find('\n') == s.size() - 1);
  CHECK(s.rfind(R"J({"verdict":"NonAdditive","sup_value":)J", 0) == 0);
  const size_t w = s.find("\"witness\":{\"t\":"), se = s.find("\"search\":{\"window\":");
  CHECK(w != std::string::npos);
  CHECK(se > w);
}

TEST_CASE("report JSON and CSV") {
  ExponentReport r = stein_report(plus_state(), ConvexSetSpec::av_qubit(0.4));
  json j = report_to_json(r);
  CHECK(j["kind"] == "stein");
  CHECK(j.contains("lower"));
  CHECK(j.contains("upper"));
  CHECK(j.contains("details"));
  std::ostringstream os;
  emit_report_csv(r, os);
  CHECK(os.str().rfind("kind,rate,value,lower,upper,certified\nstein,,,", 0) == 0);
}

TEST_CASE("options feed the certifier") {
  ProblemSpec p = load_problem(
      R"J({"state":"plus","set":{"type":"av_qubit","lambda":0.4},"options":{"tol":1e-6,"t_window_K":2,"grid":1024,"n_cap":64}})J");
  CertifyOptions c = apply_options(p.options, CertifyOptions{});
  CHECK(c.rel_tol == 1e-6);
  CHECK(c.t_window_k == 2.0);
  CHECK(c.grid == 1024);
  CHECK(apply_options(p.options, ExponentOptions{}).size_cap == 64);
}
