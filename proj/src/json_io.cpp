#include "sumsq/json_io.hpp"

#include <initializer_list>
#include <map>
#include <string>
#include <utility>

#include "json.hpp"
#include "sumsq/error.hpp"
#include "sumsq/rational.hpp"

namespace sumsq {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::parse, "program JSON at " + where + ": " + what);
}

const Json& field(const Json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

void expect_object(const Json& v, const std::string& where) {
  if (!v.is_object()) bad(where, "expected an object");
}

const Json& array_at(const Json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array");
  return v;
}

std::string string_at(const Json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "expected a string");
  return v.get<std::string>();
}

size_t count_at(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<size_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<size_t>(v.get<long long>());
  bad(where, "expected a nonnegative integer");
}

bool bool_at(const Json& v, const std::string& where) {
  if (!v.is_boolean()) bad(where, "expected a boolean");
  return v.get<bool>();
}

Rational rat_at(const Json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "expected a rational encoded as a string");
  try {
    return rat_from_string(v.get<std::string>());
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

std::vector<std::string> string_list(const Json& v, const std::string& where) {
  array_at(v, where);
  std::vector<std::string> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(string_at(v[i], where + "/" + std::to_string(i)));
  return out;
}

Exponents exponent_row(const Json& v, const std::string& where) {
  array_at(v, where);
  Exponents out;
  for (size_t i = 0; i < v.size(); ++i) {
    const Json& e = v[i];
    std::string at = where + "/" + std::to_string(i);
    if (!e.is_number_integer() && !e.is_number_unsigned())
      bad(at, "expected an integer exponent");
    long long x = e.get<long long>();
    if (x < 0 || x > 1000000) bad(at, "exponent out of range");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<Exponents> exponent_rows(const Json& v, const std::string& where) {
  array_at(v, where);
  std::vector<Exponents> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(exponent_row(v[i], where + "/" + std::to_string(i)));
  return out;
}

void warn_unknown(const Json& obj, const std::string& where,
                  std::initializer_list<const char*> known,
                  std::vector<std::string>* warnings) {
  if (!warnings) return;
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      warnings->push_back("program JSON at " + where + ": unknown field '" +
                          item.key() + "' ignored");
  }
}

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::poly: return "poly";
    case VarKind::sos: return "sos";
    case VarKind::polymatrix: return "polymatrix";
    case VarKind::sosmatrix: return "sosmatrix";
  }
  return "poly";
}

VarKind kind_from(const std::string& s, const std::string& where) {
  if (s == "poly") return VarKind::poly;
  if (s == "sos") return VarKind::sos;
  if (s == "polymatrix") return VarKind::polymatrix;
  if (s == "sosmatrix") return VarKind::sosmatrix;
  bad(where, "unknown variable kind '" + s + "'");
}

const char* constraint_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::eq: return "eq";
    case ConstraintKind::ineq: return "ineq";
    case ConstraintKind::matrixineq: return "matrixineq";
  }
  return "eq";
}

ConstraintKind constraint_from(const std::string& s, const std::string& where) {
  if (s == "eq") return ConstraintKind::eq;
  if (s == "ineq") return ConstraintKind::ineq;
  if (s == "matrixineq") return ConstraintKind::matrixineq;
  bad(where, "unknown constraint kind '" + s + "'");
}

const char* option_name(BasisOption o) {
  switch (o) {
    case BasisOption::none: return "none";
    case BasisOption::sparse: return "sparse";
    case BasisOption::sparsemultipartite: return "sparsemultipartite";
  }
  return "none";
}

BasisOption option_from(const std::string& s, const std::string& where) {
  if (s == "none") return BasisOption::none;
  if (s == "sparse") return BasisOption::sparse;
  if (s == "sparsemultipartite") return BasisOption::sparsemultipartite;
  bad(where, "unknown basis option '" + s + "'");
}

const char* mode_name(MatrixIneqMode m) {
  return m == MatrixIneqMode::Mineq ? "Mineq" : "quadraticMineq";
}

MatrixIneqMode mode_from(const std::string& s, const std::string& where) {
  if (s == "quadraticMineq") return MatrixIneqMode::quadraticMineq;
  if (s == "Mineq") return MatrixIneqMode::Mineq;
  bad(where, "unknown matrix inequality mode '" + s + "'");
}

Json rows_json(const std::vector<Exponents>& Z) {
  Json rows = Json::array();
  for (const Exponents& z : Z) rows.push_back(z);
  return rows;
}

}  // namespace

std::string serialize_program(const SosProgram& prog) {
  Json doc;
  doc["format"] = "sumsq-program";
  doc["version"] = 1;
  size_t user_n = prog.indep_count() - prog.mvar_count();
  Json indep = Json::array();
  for (size_t i = 0; i < user_n; ++i) indep.push_back(prog.indep_names()[i]);
  doc["independent"] = std::move(indep);
  doc["mvars"] = prog.mvar_count();
  doc["decision"] = prog.decvar_names();
  doc["next_coeff"] = prog.next_coeff();

  Json vars = Json::array();
  for (const ProgramVar& v : prog.program_vars()) {
    Json o;
    o["name"] = v.name;
    o["kind"] = kind_name(v.kind);
    o["basis"] = rows_json(v.Z);
    o["rows"] = v.rows;
    o["cols"] = v.cols;
    o["symmetric"] = v.symmetric;
    o["wscoeff"] = v.wscoeff;
    o["coeffs"] = Json::array({v.idx_lo, v.idx_hi});
    vars.push_back(std::move(o));
  }
  doc["variables"] = std::move(vars);

  Json cons = Json::array();
  for (const Constraint& c : prog.constraints()) {
    Json o;
    o["kind"] = constraint_name(c.kind);
    o["basis_option"] = option_name(c.option);
    if (!c.partitions.empty()) o["partitions"] = c.partitions;
    if (c.kind == ConstraintKind::matrixineq) {
      o["matrix_mode"] = mode_name(c.mmode);
      o["matrix_rows"] = c.mrows;
    }
    o["support"] = rows_json(c.Z);
    Json rows = Json::array();
    for (const auto& col : c.cols) {
      Json row = Json::array();
      for (const auto& [k, coef] : col)
        row.push_back(Json::array({k, rat_to_string(coef)}));
      rows.push_back(std::move(row));
    }
    o["coeffs"] = std::move(rows);
    Json rhs = Json::array();
    for (const Rational& r : c.b) rhs.push_back(rat_to_string(r));
    o["rhs"] = std::move(rhs);
    cons.push_back(std::move(o));
  }
  doc["constraints"] = std::move(cons);

  if (prog.has_objective()) {
    Json o;
    Json co = Json::array();
    for (const Rational& r : prog.objective()) co.push_back(rat_to_string(r));
    o["coeffs"] = std::move(co);
    o["offset"] = rat_to_string(prog.objective_offset());
    doc["objective"] = std::move(o);
  } else {
    doc["objective"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

SosProgram parse_program(const std::string& text, std::vector<std::string>* warnings) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::parse, std::string("program JSON: ") + e.what());
  }
  expect_object(doc, "/");
  warn_unknown(doc, "/",
               {"format", "version", "independent", "mvars", "decision", "next_coeff",
                "variables", "constraints", "objective"},
               warnings);
  if (string_at(field(doc, "/", "format"), "/format") != "sumsq-program")
    bad("/format", "expected \"sumsq-program\"");
  if (count_at(field(doc, "/", "version"), "/version") != 1)
    bad("/version", "unsupported version");

  std::vector<std::string> indep =
      string_list(field(doc, "/", "independent"), "/independent");
  size_t mvars = count_at(field(doc, "/", "mvars"), "/mvars");
  for (size_t i = 0; i < mvars; ++i) indep.push_back("Mvar_" + std::to_string(i + 1));
  std::vector<std::string> dec = string_list(field(doc, "/", "decision"), "/decision");
  size_t next_coeff = count_at(field(doc, "/", "next_coeff"), "/next_coeff");

  const Json& jvars = array_at(field(doc, "/", "variables"), "/variables");
  std::vector<ProgramVar> vars;
  for (size_t i = 0; i < jvars.size(); ++i) {
    std::string where = "/variables/" + std::to_string(i);
    const Json& o = jvars[i];
    expect_object(o, where);
    warn_unknown(o, where,
                 {"name", "kind", "basis", "rows", "cols", "symmetric", "wscoeff",
                  "coeffs"},
                 warnings);
    ProgramVar v;
    v.name = string_at(field(o, where, "name"), where + "/name");
    v.kind = kind_from(string_at(field(o, where, "kind"), where + "/kind"),
                       where + "/kind");
    v.Z = exponent_rows(field(o, where, "basis"), where + "/basis");
    v.rows = count_at(field(o, where, "rows"), where + "/rows");
    v.cols = count_at(field(o, where, "cols"), where + "/cols");
    v.symmetric = bool_at(field(o, where, "symmetric"), where + "/symmetric");
    v.wscoeff = bool_at(field(o, where, "wscoeff"), where + "/wscoeff");
    const Json& rng = array_at(field(o, where, "coeffs"), where + "/coeffs");
    if (rng.size() != 2) bad(where + "/coeffs", "expected [lo, hi]");
    v.idx_lo = count_at(rng[0], where + "/coeffs/0");
    v.idx_hi = count_at(rng[1], where + "/coeffs/1");
    vars.push_back(std::move(v));
  }

  const Json& jcons = array_at(field(doc, "/", "constraints"), "/constraints");
  std::vector<Constraint> cons;
  for (size_t i = 0; i < jcons.size(); ++i) {
    std::string where = "/constraints/" + std::to_string(i);
    const Json& o = jcons[i];
    expect_object(o, where);
    warn_unknown(o, where,
                 {"kind", "basis_option", "partitions", "matrix_mode", "matrix_rows",
                  "support", "coeffs", "rhs"},
                 warnings);
    Constraint c;
    c.kind = constraint_from(string_at(field(o, where, "kind"), where + "/kind"),
                             where + "/kind");
    c.option = option_from(
        string_at(field(o, where, "basis_option"), where + "/basis_option"),
        where + "/basis_option");
    if (o.contains("partitions")) {
      const Json& parts = array_at(o["partitions"], where + "/partitions");
      for (size_t g = 0; g < parts.size(); ++g) {
        std::string gw = where + "/partitions/" + std::to_string(g);
        const Json& grp = array_at(parts[g], gw);
        std::vector<size_t> idxs;
        for (size_t k = 0; k < grp.size(); ++k)
          idxs.push_back(count_at(grp[k], gw + "/" + std::to_string(k)));
        c.partitions.push_back(std::move(idxs));
      }
    }
    if (o.contains("matrix_mode"))
      c.mmode = mode_from(string_at(o["matrix_mode"], where + "/matrix_mode"),
                          where + "/matrix_mode");
    if (o.contains("matrix_rows"))
      c.mrows = count_at(o["matrix_rows"], where + "/matrix_rows");
    c.Z = exponent_rows(field(o, where, "support"), where + "/support");
    const Json& rows = array_at(field(o, where, "coeffs"), where + "/coeffs");
    for (size_t r = 0; r < rows.size(); ++r) {
      std::string rw = where + "/coeffs/" + std::to_string(r);
      const Json& row = array_at(rows[r], rw);
      std::map<size_t, Rational> col;
      for (size_t k = 0; k < row.size(); ++k) {
        std::string pw = rw + "/" + std::to_string(k);
        const Json& pair = array_at(row[k], pw);
        if (pair.size() != 2) bad(pw, "expected [index, rational]");
        size_t idx = count_at(pair[0], pw + "/0");
        if (!col.emplace(idx, rat_at(pair[1], pw + "/1")).second)
          bad(pw, "repeated decision index " + std::to_string(idx));
      }
      c.cols.push_back(std::move(col));
    }
    const Json& rhs = array_at(field(o, where, "rhs"), where + "/rhs");
    for (size_t r = 0; r < rhs.size(); ++r)
      c.b.push_back(rat_at(rhs[r], where + "/rhs/" + std::to_string(r)));
    cons.push_back(std::move(c));
  }

  const Json& jobj = field(doc, "/", "objective");
  std::vector<Rational> objective;
  Rational offset = 0;
  bool has_obj = false;
  if (!jobj.is_null()) {
    expect_object(jobj, "/objective");
    warn_unknown(jobj, "/objective", {"coeffs", "offset"}, warnings);
    const Json& co = array_at(field(jobj, "/objective", "coeffs"), "/objective/coeffs");
    for (size_t i = 0; i < co.size(); ++i)
      objective.push_back(rat_at(co[i], "/objective/coeffs/" + std::to_string(i)));
    offset = rat_at(field(jobj, "/objective", "offset"), "/objective/offset");
    has_obj = true;
  }

  return SosProgram::from_parts(std::move(indep), mvars, std::move(dec),
                                std::move(vars), std::move(cons), std::move(objective),
                                std::move(offset), has_obj, next_coeff);
}

}  // namespace sumsq
