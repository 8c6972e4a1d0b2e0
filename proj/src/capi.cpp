#include "sumsq.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumsq/certify.hpp"
#include "sumsq/compile.hpp"
#include "sumsq/demos.hpp"
#include "sumsq/error.hpp"
#include "sumsq/json_io.hpp"
#include "sumsq/sdpa.hpp"

struct sumsq_program {
  sumsq::SosProgram prog;
};

namespace {

using namespace sumsq;
using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

thread_local std::string t_error;

char* dup_text(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

int emit(char** out, const Json& doc, int rc) {
  if (out) *out = dup_text(doc.dump(2) + "\n");
  return rc;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    t_error = e.what();
  } catch (const std::exception& e) {
    t_error = e.what();
  } catch (...) {
    t_error = "unexpected failure";
  }
  return SUMSQ_ERROR;
}

std::string require_text(const char* text, const char* what) {
  if (!text) fail(ErrorKind::invalid_argument, std::string(what) + " is null");
  return text;
}

Json parse_request(const char* text, const char* what) {
  if (!text || !*text) return Json::object();
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::parse, std::string(what) + ": " + e.what());
  }
  if (!doc.is_object())
    fail(ErrorKind::parse, std::string(what) + ": expected a JSON object");
  return doc;
}

double number_field(const Json& o, const char* key, double dflt) {
  auto it = o.find(key);
  if (it == o.end() || it->is_null()) return dflt;
  if (!it->is_number())
    fail(ErrorKind::parse, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

int int_field(const Json& o, const char* key, int dflt) {
  auto it = o.find(key);
  if (it == o.end() || it->is_null()) return dflt;
  if (!it->is_number_integer() && !it->is_number_unsigned())
    fail(ErrorKind::parse, std::string("field '") + key + "' must be an integer");
  return it->get<int>();
}

bool bool_field(const Json& o, const char* key, bool dflt) {
  auto it = o.find(key);
  if (it == o.end() || it->is_null()) return dflt;
  if (!it->is_boolean())
    fail(ErrorKind::parse, std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

std::string string_field(const Json& o, const char* key) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_string())
    fail(ErrorKind::parse, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list_field(const Json& o, const char* key,
                                           bool required) {
  auto it = o.find(key);
  if (it == o.end() || it->is_null()) {
    if (required)
      fail(ErrorKind::parse, std::string("field '") + key + "' is required");
    return {};
  }
  if (!it->is_array())
    fail(ErrorKind::parse,
         std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const Json& v : *it) {
    if (!v.is_string())
      fail(ErrorKind::parse,
           std::string("field '") + key + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

SolveOptions solve_options(const Json& o) {
  SolveOptions s;
  s.tol = number_field(o, "tol", s.tol);
  s.feas_tol = number_field(o, "feas_tol", s.tol);
  s.max_iter = int_field(o, "max_iter", s.max_iter);
  if (s.tol <= 0 || s.feas_tol <= 0)
    fail(ErrorKind::invalid_argument, "tolerances must be positive");
  if (s.max_iter < 1) fail(ErrorKind::invalid_argument, "max_iter must be positive");
  return s;
}

int clamp_digits(int digits) {
  if (digits < 1 || digits > 17)
    fail(ErrorKind::invalid_argument, "digits must lie in [1, 17]");
  return digits;
}

double max_coeff_gap(const Polynomial& a, const Polynomial& b) {
  auto [aa, bb] = align(a, b);
  Polynomial d = aa - bb;
  double worst = 0.0;
  for (const Rational& c : d.coeffs())
    worst = std::max(worst, std::fabs(rat_to_double(c)));
  return worst;
}

Json certificate_json(const SosCertificate& cert, const Polynomial& p, int digits) {
  Json out;
  switch (cert.status) {
    case CertStatus::found: out["status"] = "found"; break;
    case CertStatus::infeasible: out["status"] = "infeasible"; break;
    case CertStatus::rounding_failed: out["status"] = "rounding_failed"; break;
  }
  if (cert.status != CertStatus::found) return out;

  Json factors = Json::array();
  Polynomial rec = Polynomial::zero(cert.gram.vars);
  for (const Polynomial& f : cert.gram.factors) {
    factors.push_back(pretty(f, digits));
    rec += f * f;
  }
  out["factors"] = std::move(factors);
  out["residual"] = max_coeff_gap(rec, p);
  if (cert.exact) {
    out["denominator"] = cert.exact->D.get_str();
    Json basis = Json::array();
    for (const Exponents& z : cert.exact->Z)
      basis.push_back(Polynomial::monomial(cert.exact->vars, z).str());
    out["basis"] = std::move(basis);
    Json rows = Json::array();
    for (const auto& row : cert.exact->Qnum) {
      Json r = Json::array();
      for (const Integer& v : row) r.push_back(v.get_str());
      rows.push_back(std::move(r));
    }
    out["Q_numerator"] = std::move(rows);
  }
  return out;
}

// Shared verdict for solve entry points. Returns the status code and
// fills `res`; numerical breakdowns raise instead.
int solve_into(const SosProgram& prog, const Json& options, Json& res) {
  SolveOptions opts = solve_options(options);
  SdpProblem sdp = assemble(prog);
  SdpSolution sol = sdp_solve(sdp, opts);
  const SolveReport& rep = sol.report;
  if (rep.numerr >= 2) fail(ErrorKind::numeric, "SDP solver failed numerically");
  if (rep.numerr == 1 && rep.pinf == 0 && rep.dinf == 0 && rep.feasratio != 1.0)
    fail(ErrorKind::numeric,
         "SDP solver stopped at the iteration limit without converging");

  std::string status = "feasible";
  int rc = SUMSQ_OK;
  if (rep.pinf != 0) {
    status = "infeasible";
    rc = SUMSQ_NONE;
  } else if (rep.dinf != 0) {
    status = "unbounded";
  }
  res["status"] = status;
  res["feasible"] = status != "infeasible";

  if (status == "feasible") {
    std::vector<double> d = decl_values(sdp, sol.x);
    if (sdp.has_objective) {
      double obj = rat_to_double(sdp.obj_offset);
      for (size_t k = 0; k < sdp.c.size() && k < d.size(); ++k)
        obj += rat_to_double(sdp.c[k]) * d[k];
      res["objective"] = obj;
    } else {
      res["objective"] = nullptr;
    }
    Json dec = Json::object();
    const std::vector<std::string>& names = prog.decvar_names();
    for (size_t k = 0; k < names.size() && k < d.size(); ++k) dec[names[k]] = d[k];
    res["decision"] = std::move(dec);
  } else {
    res["objective"] = nullptr;
    res["decision"] = Json::object();
  }
  res["iterations"] = rep.iterations;
  res["gap"] = rep.gap;
  res["residual"] = rep.residual_norm;
  res["feasratio"] = rep.feasratio;
  res["warnings"] = rep.warnings;
  return rc;
}

}  // namespace

extern "C" {

const char* sumsq_version(void) { return kVersion; }

const char* sumsq_last_error(void) { return t_error.c_str(); }

void sumsq_free(char* text) { std::free(text); }

int sumsq_findsos(const char* request_json, char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    Json req = parse_request(request_json, "findsos request");
    VarTablePtr t = VarTable::make(string_list_field(req, "variables", true));
    Polynomial p = poly_parse(string_field(req, "polynomial"), t);
    CertMode mode =
        bool_field(req, "rational", false) ? CertMode::rational : CertMode::floating;
    int digits = clamp_digits(int_field(req, "digits", 5));
    SosCertificate cert = findsos(p, mode, solve_options(req));
    return emit(result_json, certificate_json(cert, p, digits),
                cert.status == CertStatus::found ? SUMSQ_OK : SUMSQ_NONE);
  });
}

int sumsq_findlyap(const char* request_json, char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    Json req = parse_request(request_json, "findlyap request");
    VarTablePtr states = VarTable::make(string_list_field(req, "states", true));
    std::vector<std::string> field = string_list_field(req, "field", true);
    if (field.size() != states->size())
      fail(ErrorKind::invalid_argument,
           "the vector field needs one polynomial per state");
    std::vector<Polynomial> f;
    for (const std::string& s : field) f.push_back(poly_parse(s, states));
    int degree = int_field(req, "degree", 2);
    double eps = number_field(req, "eps", 1e-6);
    int digits = clamp_digits(int_field(req, "digits", 5));
    std::optional<Polynomial> V = findlyap(f, states, degree, eps, solve_options(req));
    Json out;
    out["found"] = V.has_value();
    if (V) out["lyapunov"] = pretty(*V, digits);
    return emit(result_json, out, V ? SUMSQ_OK : SUMSQ_NONE);
  });
}

int sumsq_findbound(const char* request_json, char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    Json req = parse_request(request_json, "findbound request");
    VarTablePtr t = VarTable::make(string_list_field(req, "variables", true));
    Polynomial obj = poly_parse(string_field(req, "objective"), t);
    std::vector<Polynomial> ineqs, eqs;
    for (const std::string& s : string_list_field(req, "inequalities", false))
      ineqs.push_back(poly_parse(s, t));
    for (const std::string& s : string_list_field(req, "equalities", false))
      eqs.push_back(poly_parse(s, t));
    SolveOptions opts = solve_options(req);
    BoundResult r;
    if (ineqs.empty() && eqs.empty()) {
      r = findbound(obj, opts);
    } else {
      int degree = int_field(req, "degree", 2);
      r = findbound_constrained(obj, ineqs, eqs, degree, opts);
    }
    Json out;
    if (std::isfinite(r.bound)) {
      out["bound"] = r.bound;
    } else {
      out["bound"] = nullptr;
      out["status"] = "unbounded";
    }
    if (r.minimizer && r.vars) {
      Json m = Json::object();
      for (size_t k = 0; k < r.vars->size() && k < r.minimizer->size(); ++k)
        m[r.vars->name(k)] = (*r.minimizer)[k];
      out["minimizer"] = std::move(m);
    } else {
      out["minimizer"] = nullptr;
    }
    return emit(result_json, out, std::isfinite(r.bound) ? SUMSQ_OK : SUMSQ_NONE);
  });
}

int sumsq_run_demo(int id, const char* options_json, char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    Json o = parse_request(options_json, "demo options");
    DemoOptions d;
    d.solve = solve_options(o);
    d.digits = clamp_digits(int_field(o, "digits", d.digits));
    d.demo4_m = int_field(o, "m", d.demo4_m);
    if (id == 5) d.demo5_gamma = number_field(o, "gamma", d.demo5_gamma);
    if (id == 6) d.demo6_gamma = number_field(o, "gamma", d.demo6_gamma);
    d.demo5_bisect = bool_field(o, "bisect", d.demo5_bisect);
    d.demo7_n = int_field(o, "n", d.demo7_n);
    d.demo7_allow_large = bool_field(o, "allow_large_n", d.demo7_allow_large);

    DemoResult r = run_demo(id, d);
    Json out;
    out["id"] = r.id;
    out["feasible"] = r.feasible;
    out["verified"] = r.verified;
    out["lines"] = r.lines;
    Json values = Json::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    out["values"] = std::move(values);
    Json polys = Json::object();
    for (const auto& [k, v] : r.polys) polys[k] = v;
    out["polys"] = std::move(polys);
    return emit(result_json, out, r.verified ? SUMSQ_OK : SUMSQ_NONE);
  });
}

int sumsq_solve_json(const char* program_json, const char* options_json,
                     char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    SosProgram prog = parse_program(require_text(program_json, "program document"));
    Json res;
    int rc = solve_into(prog, parse_request(options_json, "solve options"), res);
    return emit(result_json, res, rc);
  });
}

int sumsq_export_sdpa(const char* program_json, char** sdpa_text) {
  if (sdpa_text) *sdpa_text = nullptr;
  return guarded([&] {
    SosProgram prog = parse_program(require_text(program_json, "program document"));
    if (sdpa_text) *sdpa_text = dup_text(sdpa_export(assemble(prog)));
    return SUMSQ_OK;
  });
}

sumsq_program* sumsq_program_parse(const char* program_json) {
  sumsq_program* handle = nullptr;
  guarded([&] {
    handle = new sumsq_program{parse_program(require_text(program_json, "program document"))};
    return SUMSQ_OK;
  });
  return handle;
}

void sumsq_program_free(sumsq_program* prog) { delete prog; }

int sumsq_program_solve(sumsq_program* prog, const char* options_json,
                        char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded([&] {
    if (!prog) fail(ErrorKind::invalid_argument, "null program handle");
    Json res;
    int rc = solve_into(prog->prog, parse_request(options_json, "solve options"), res);
    return emit(result_json, res, rc);
  });
}

int sumsq_program_serialize(const sumsq_program* prog, char** program_json) {
  if (program_json) *program_json = nullptr;
  return guarded([&] {
    if (!prog) fail(ErrorKind::invalid_argument, "null program handle");
    if (program_json) *program_json = dup_text(serialize_program(prog->prog));
    return SUMSQ_OK;
  });
}

int sumsq_program_export_sdpa(const sumsq_program* prog, char** sdpa_text) {
  if (sdpa_text) *sdpa_text = nullptr;
  return guarded([&] {
    if (!prog) fail(ErrorKind::invalid_argument, "null program handle");
    if (sdpa_text) *sdpa_text = dup_text(sdpa_export(assemble(prog->prog)));
    return SUMSQ_OK;
  });
}

}  // extern "C"
