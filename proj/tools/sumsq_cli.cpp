#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sumsq.h"

using Json = nlohmann::ordered_json;

namespace {

// Shared solver and output settings; subcommands with fallthrough
// accept these flags in any position.
struct Global {
  double tol = 1e-8;
  int max_iter = 100;
  bool json = false;
};

struct Owned {
  char* p = nullptr;
  ~Owned() { sumsq_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int report_error() {
  std::cerr << "error: " << sumsq_last_error() << "\n";
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

Json base_request(const Global& g) {
  Json o;
  o["tol"] = g.tol;
  o["max_iter"] = g.max_iter;
  return o;
}

int run_findsos(const Global& g, const std::vector<std::string>& vars,
                const std::string& poly, bool rational, int digits) {
  Json req = base_request(g);
  req["variables"] = vars;
  req["polynomial"] = poly;
  req["rational"] = rational;
  req["digits"] = digits;
  Owned out;
  int rc = sumsq_findsos(req.dump().c_str(), &out.p);
  if (rc == SUMSQ_ERROR) return report_error();
  if (g.json) {
    std::cout << out.str();
    return rc;
  }
  Json r = Json::parse(out.str());
  if (r["status"] == "found") {
    std::cout << "sum of squares: yes\n";
    int i = 0;
    for (const auto& f : r["factors"])
      std::cout << "  f" << ++i << " = " << f.get<std::string>() << "\n";
    std::cout << "max coefficient residual: " << r["residual"].get<double>() << "\n";
    if (r.contains("denominator"))
      std::cout << "exact certificate, denominator "
                << r["denominator"].get<std::string>() << "\n";
  } else if (r["status"] == "rounding_failed") {
    std::cout << "sum of squares in floating point, but no exact certificate "
                 "was found\n";
  } else {
    std::cout << "sum of squares: no\n";
  }
  return rc;
}

int run_findlyap(const Global& g, const std::vector<std::string>& states,
                 const std::vector<std::string>& field, int degree, double eps,
                 int digits) {
  Json req = base_request(g);
  req["states"] = states;
  req["field"] = field;
  req["degree"] = degree;
  req["eps"] = eps;
  req["digits"] = digits;
  Owned out;
  int rc = sumsq_findlyap(req.dump().c_str(), &out.p);
  if (rc == SUMSQ_ERROR) return report_error();
  if (g.json) {
    std::cout << out.str();
    return rc;
  }
  Json r = Json::parse(out.str());
  if (r["found"] == true)
    std::cout << "V = " << r["lyapunov"].get<std::string>() << "\n";
  else
    std::cout << "no Lyapunov function of degree " << degree << " found\n";
  return rc;
}

int run_findbound(const Global& g, const std::vector<std::string>& vars,
                  const std::string& objective, const std::vector<std::string>& ineqs,
                  const std::vector<std::string>& eqs, int degree) {
  Json req = base_request(g);
  req["variables"] = vars;
  req["objective"] = objective;
  req["inequalities"] = ineqs;
  req["equalities"] = eqs;
  req["degree"] = degree;
  Owned out;
  int rc = sumsq_findbound(req.dump().c_str(), &out.p);
  if (rc == SUMSQ_ERROR) return report_error();
  if (g.json) {
    std::cout << out.str();
    return rc;
  }
  Json r = Json::parse(out.str());
  if (r["bound"].is_null()) {
    std::cout << "the relaxation is unbounded below\n";
  } else {
    std::cout << "bound: " << r["bound"].get<double>() << "\n";
    if (!r["minimizer"].is_null()) {
      std::cout << "minimizer:";
      for (const auto& [k, v] : r["minimizer"].items())
        std::cout << " " << k << " = " << v.get<double>();
      std::cout << "\n";
    }
  }
  return rc;
}

int run_one_demo(const Global& g, int id, const Json& options, bool label) {
  Owned out;
  int rc = sumsq_run_demo(id, options.dump().c_str(), &out.p);
  if (rc == SUMSQ_ERROR) {
    std::cerr << "example " << id << " error: " << sumsq_last_error() << "\n";
    return 1;
  }
  if (g.json) {
    std::cout << out.str();
    return rc;
  }
  if (label) std::cout << "== example " << id << " ==\n";
  Json r = Json::parse(out.str());
  for (const auto& line : r["lines"]) std::cout << line.get<std::string>() << "\n";
  if (r["verified"] == false) std::cout << "check FAILED\n";
  return rc;
}

int run_demo_cmd(const Global& g, const std::string& which, const Json& options) {
  if (which == "all") {
    int worst = 0;
    for (int id = 1; id <= 10; ++id) {
      int rc = run_one_demo(g, id, options, true);
      if (rc == 1) return 1;
      worst = std::max(worst, rc);
    }
    return worst;
  }
  int id = 0;
  try {
    id = std::stoi(which);
  } catch (...) {
    std::cerr << "error: demo id must be 1..10 or 'all'\n";
    return 1;
  }
  return run_one_demo(g, id, options, false);
}

int run_solve(const Global& g, const std::string& path, const std::string& sdpa_path) {
  std::string doc = read_file(path);
  if (doc.empty()) return 1;
  Owned out;
  int rc = sumsq_solve_json(doc.c_str(), base_request(g).dump().c_str(), &out.p);
  if (rc == SUMSQ_ERROR) return report_error();
  if (!sdpa_path.empty()) {
    Owned sdpa;
    if (sumsq_export_sdpa(doc.c_str(), &sdpa.p) != SUMSQ_OK) return report_error();
    if (!write_file(sdpa_path, sdpa.str())) return 1;
  }
  if (g.json) {
    std::cout << out.str();
    return rc;
  }
  Json r = Json::parse(out.str());
  std::cout << "status: " << r["status"].get<std::string>() << "\n";
  if (!r["objective"].is_null())
    std::cout << "objective: " << r["objective"].get<double>() << "\n";
  for (const auto& [k, v] : r["decision"].items())
    std::cout << "  " << k << " = " << v.get<double>() << "\n";
  std::cout << "iterations: " << r["iterations"].get<int>()
            << ", gap: " << r["gap"].get<double>()
            << ", residual: " << r["residual"].get<double>() << "\n";
  for (const auto& w : r["warnings"])
    std::cout << "warning: " << w.get<std::string>() << "\n";
  return rc;
}

int run_export(const std::string& path, const std::string& out_path) {
  std::string doc = read_file(path);
  if (doc.empty()) return 1;
  Owned sdpa;
  if (sumsq_export_sdpa(doc.c_str(), &sdpa.p) != SUMSQ_OK) return report_error();
  return write_file(out_path, sdpa.str()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  CLI::App app{"sum-of-squares optimization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol", g.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", g.max_iter, "iteration limit")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "print machine-readable JSON");

  int exit_code = 0;

  // demo
  auto* demo = app.add_subcommand("demo", "run a worked example (1..10, or 'all')");
  demo->fallthrough();
  std::string demo_id;
  int demo_m = 1, demo_n = 3, demo_digits = 5;
  double demo_gamma = 0;
  bool demo_bisect = false, demo_large = false;
  demo->add_option("id", demo_id, "example number or 'all'")->required();
  auto* opt_m = demo->add_option("--m", demo_m, "multiplier degree (example 4)");
  auto* opt_gamma =
      demo->add_option("--gamma", demo_gamma, "level to test (examples 5 and 6)");
  auto* opt_n = demo->add_option("--n", demo_n, "chain length (example 7)");
  demo->add_flag("--bisect", demo_bisect, "bisect for the optimal level (example 5)");
  demo->add_flag("--allow-large-n", demo_large, "lift the n <= 13 guard (example 7)");
  demo->add_option("--digits", demo_digits, "printed significant digits");
  demo->callback([&] {
    Json o = base_request(g);
    o["digits"] = demo_digits;
    if (*opt_m) o["m"] = demo_m;
    if (*opt_gamma) o["gamma"] = demo_gamma;
    if (*opt_n) o["n"] = demo_n;
    if (demo_bisect) o["bisect"] = true;
    if (demo_large) o["allow_large_n"] = true;
    exit_code = run_demo_cmd(g, demo_id, o);
  });

  // findsos
  auto* fs = app.add_subcommand("findsos", "decide whether a polynomial is SOS");
  fs->fallthrough();
  std::string fs_poly;
  std::vector<std::string> fs_vars;
  bool fs_rational = false;
  int fs_digits = 5;
  fs->add_option("polynomial", fs_poly, "polynomial text, e.g. \"2*x^4 + y^2\"")
      ->required();
  fs->add_option("--vars", fs_vars, "variable names, comma separated")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->required();
  fs->add_flag("--rational", fs_rational, "round to an exact certificate");
  fs->add_option("--digits", fs_digits, "printed significant digits");
  fs->callback(
      [&] { exit_code = run_findsos(g, fs_vars, fs_poly, fs_rational, fs_digits); });

  // findlyap
  auto* fl = app.add_subcommand("findlyap", "search for a Lyapunov function");
  fl->fallthrough();
  std::vector<std::string> fl_states, fl_field;
  int fl_degree = 2, fl_digits = 5;
  double fl_eps = 1e-6;
  fl->add_option("--states", fl_states, "state variable names, comma separated")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->required();
  fl->add_option("--field", fl_field, "one polynomial per state (repeat the flag)")
      ->allow_extra_args(false)
      ->required();
  fl->add_option("--degree", fl_degree, "highest monomial degree of V");
  fl->add_option("--eps", fl_eps, "positivity margin");
  fl->add_option("--digits", fl_digits, "printed significant digits");
  fl->callback([&] {
    exit_code = run_findlyap(g, fl_states, fl_field, fl_degree, fl_eps, fl_digits);
  });

  // findbound
  auto* fb = app.add_subcommand("findbound", "lower-bound a polynomial");
  fb->fallthrough();
  std::string fb_obj;
  std::vector<std::string> fb_vars, fb_ineq, fb_eq;
  int fb_degree = 2;
  fb->add_option("objective", fb_obj, "polynomial to bound")->required();
  fb->add_option("--vars", fb_vars, "variable names, comma separated")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->required();
  fb->add_option("--ineq", fb_ineq, "constraint g >= 0 (repeat the flag)")
      ->allow_extra_args(false);
  fb->add_option("--eq", fb_eq, "constraint h = 0 (repeat the flag)")
      ->allow_extra_args(false);
  fb->add_option("--degree", fb_degree, "relaxation degree for constrained bounds");
  fb->callback([&] {
    exit_code = run_findbound(g, fb_vars, fb_obj, fb_ineq, fb_eq, fb_degree);
  });

  // solve
  auto* sv = app.add_subcommand("solve", "solve a serialized program document");
  sv->fallthrough();
  std::string sv_path, sv_sdpa;
  sv->add_option("file", sv_path, "program JSON file")->required();
  sv->add_option("--export-sdpa", sv_sdpa, "also write the SDP in SDPA format");
  sv->callback([&] { exit_code = run_solve(g, sv_path, sv_sdpa); });

  // export-sdpa
  auto* ex = app.add_subcommand("export-sdpa", "compile a program to SDPA format");
  ex->fallthrough();
  std::string ex_in, ex_out = "-";
  ex->add_option("file", ex_in, "program JSON file")->required();
  ex->add_option("output", ex_out, "output path, '-' for stdout");
  ex->callback([&] { exit_code = run_export(ex_in, ex_out); });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
