#include "sumsq/sdpa.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "sumsq/error.hpp"
#include "sumsq/rational.hpp"

namespace sumsq {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// decl coordinate -> (block number, i, j) in file numbering, plus the
// factor turning a row weight into the stored matrix entry.
struct FileLoc {
  size_t blkno = 0, i = 0, j = 0;
  double factor = 1.0;  // 0.5 on off-diagonal PSD entries
};

std::vector<FileLoc> file_layout(const SdpProblem& p, bool& has_free) {
  std::vector<FileLoc> loc(p.n_decl);
  has_free = p.n_free > 0;
  size_t psd_base = has_free ? 2 : 1;
  std::vector<char> placed(p.n_decl, 0);
  for (size_t k = 0; k < p.blocks.size(); ++k) {
    auto pairs = tri_pairs(p.blocks[k].size);
    for (size_t q = 0; q < pairs.size(); ++q) {
      FileLoc& L = loc[p.blocks[k].decl_lo + q];
      L.blkno = psd_base + k;
      L.i = pairs[q].first + 1;
      L.j = pairs[q].second + 1;
      L.factor = L.i == L.j ? 1.0 : 0.5;
      placed[p.blocks[k].decl_lo + q] = 1;
    }
  }
  size_t fidx = 0;
  for (size_t d = 0; d < p.n_decl; ++d)
    if (!placed[d]) {
      loc[d] = {1, fidx + 1, fidx + 1, 1.0};
      ++fidx;
    }
  return loc;
}

struct Tok {
  std::string text;
  size_t line;
};

[[noreturn]] void parse_fail(size_t line, const std::string& msg) {
  fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

std::vector<Tok> tokenize(const std::string& text, size_t& first_data_line) {
  std::vector<Tok> toks;
  size_t lineno = 0;
  size_t pos = 0;
  bool past_comments = false;
  first_data_line = 1;
  while (pos < text.size()) {
    ++lineno;
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    size_t ws = line.find_first_not_of(" \t\r");
    if (!past_comments) {
      if (ws == std::string::npos || line[ws] == '"' || line[ws] == '*')
        continue;
      past_comments = true;
      first_data_line = lineno;
    }
    std::string cur;
    size_t cur_line = lineno;
    auto flush = [&] {
      if (!cur.empty()) {
        toks.push_back({cur, cur_line});
        cur.clear();
      }
    };
    for (char ch : line) {
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' ||
          ch == '(' || ch == ')' || ch == '{' || ch == '}')
        flush();
      else
        cur.push_back(ch);
    }
    flush();
  }
  return toks;
}

long to_long(const Tok& t, const char* what) {
  char* end = nullptr;
  long v = std::strtol(t.text.c_str(), &end, 10);
  if (end == nullptr || *end != '\0')
    parse_fail(t.line, std::string("expected ") + what + ", got '" + t.text + "'");
  return v;
}

double to_double(const Tok& t, const char* what) {
  char* end = nullptr;
  double v = std::strtod(t.text.c_str(), &end);
  if (end == nullptr || *end != '\0')
    parse_fail(t.line, std::string("expected ") + what + ", got '" + t.text + "'");
  return v;
}

}  // namespace

std::string sdpa_export(const SdpProblem& p) {
  bool has_free = false;
  std::vector<FileLoc> loc = file_layout(p, has_free);
  std::string out = "\"SDP in SDPA sparse format\"\n";
  out += std::to_string(p.n_rows()) + "\n";
  size_t nblocks = p.blocks.size() + (has_free ? 1 : 0);
  out += std::to_string(nblocks) + "\n";
  {
    std::string sizes;
    if (has_free) sizes += "-" + std::to_string(p.n_free);
    for (const BlockInfo& blk : p.blocks) {
      if (!sizes.empty()) sizes += " ";
      sizes += std::to_string(blk.size);
    }
    out += sizes + "\n";
  }
  {
    std::string bline;
    for (size_t j = 0; j < p.n_rows(); ++j) {
      if (j) bline += " ";
      bline += fmt(rat_to_double(p.b[j]));
    }
    out += bline + "\n";
  }
  std::vector<SdpaEntry> entries;
  auto emit = [&](size_t matno, size_t decl, const Rational& w) {
    double v = rat_to_double(w) * loc[decl].factor;
    if (v != 0.0)
      entries.push_back({matno, loc[decl].blkno, loc[decl].i, loc[decl].j, v});
  };
  for (size_t d = 0; d < p.n_decl; ++d)
    if (p.c[d] != 0) emit(0, d, p.c[d]);
  for (size_t j = 0; j < p.n_rows(); ++j)
    for (const auto& [d, w] : p.rows[j]) emit(j + 1, d, w);
  std::sort(entries.begin(), entries.end(), [](const SdpaEntry& a,
                                               const SdpaEntry& b) {
    return std::tie(a.matno, a.blkno, a.i, a.j) <
           std::tie(b.matno, b.blkno, b.i, b.j);
  });
  for (const SdpaEntry& e : entries)
    out += std::to_string(e.matno) + " " + std::to_string(e.blkno) + " " +
           std::to_string(e.i) + " " + std::to_string(e.j) + " " +
           fmt(e.value) + "\n";
  return out;
}

SdpaData sdpa_parse(const std::string& text) {
  size_t first_line = 1;
  std::vector<Tok> toks = tokenize(text, first_line);
  size_t at = 0;
  auto next = [&](const char* what) -> const Tok& {
    if (at >= toks.size())
      parse_fail(toks.empty() ? first_line : toks.back().line,
                 std::string("unexpected end of file, expected ") + what);
    return toks[at++];
  };
  SdpaData d;
  long m = to_long(next("constraint count"), "constraint count");
  if (m < 0) parse_fail(toks[at - 1].line, "negative constraint count");
  d.m = static_cast<size_t>(m);
  long nb = to_long(next("block count"), "block count");
  if (nb < 0) parse_fail(toks[at - 1].line, "negative block count");
  for (long k = 0; k < nb; ++k) {
    long s = to_long(next("block size"), "block size");
    if (s == 0) parse_fail(toks[at - 1].line, "zero block size");
    d.block_sizes.push_back(s);
  }
  for (size_t j = 0; j < d.m; ++j)
    d.b.push_back(to_double(next("right-hand-side value"),
                            "right-hand-side value"));
  while (at < toks.size()) {
    SdpaEntry e;
    size_t line = toks[at].line;
    long matno = to_long(next("matrix number"), "matrix number");
    long blkno = to_long(next("block number"), "block number");
    long i = to_long(next("row index"), "row index");
    long j = to_long(next("column index"), "column index");
    e.value = to_double(next("entry value"), "entry value");
    if (matno < 0 || static_cast<size_t>(matno) > d.m)
      parse_fail(line, "matrix number out of range");
    if (blkno < 1 || static_cast<size_t>(blkno) > d.block_sizes.size())
      parse_fail(line, "block number out of range");
    long size = std::labs(d.block_sizes[blkno - 1]);
    if (i < 1 || j < 1 || i > size || j > size)
      parse_fail(line, "entry index outside its block");
    if (j < i) parse_fail(line, "lower-triangle entry (j < i)");
    if (d.block_sizes[blkno - 1] < 0 && i != j)
      parse_fail(line, "off-diagonal entry in a diagonal block");
    e.matno = static_cast<size_t>(matno);
    e.blkno = static_cast<size_t>(blkno);
    e.i = static_cast<size_t>(i);
    e.j = static_cast<size_t>(j);
    d.entries.push_back(e);
  }
  return d;
}

SdpProblem sdpa_to_problem(const SdpaData& d) {
  SdpProblem P;
  std::vector<size_t> decl_base(d.block_sizes.size(), 0);
  size_t nf = 0;
  for (long s : d.block_sizes)
    if (s < 0) nf += static_cast<size_t>(-s);
  P.n_free = nf;
  size_t decl = 0;
  size_t free_at = 0;
  for (size_t k = 0; k < d.block_sizes.size(); ++k) {
    if (d.block_sizes[k] < 0) {
      decl_base[k] = free_at;
      free_at += static_cast<size_t>(-d.block_sizes[k]);
    }
  }
  decl = nf;
  for (size_t k = 0; k < d.block_sizes.size(); ++k) {
    if (d.block_sizes[k] < 0) continue;
    size_t s = static_cast<size_t>(d.block_sizes[k]);
    BlockInfo blk;
    blk.from_constraint = false;
    blk.index = P.blocks.size();
    blk.size = s;
    blk.mrows = 1;
    blk.decl_lo = decl;
    blk.method = ReductionMethod::full;
    decl_base[k] = decl;
    decl += tri_size(s);
    P.psd_sizes.push_back(s);
    P.blocks.push_back(blk);
  }
  P.n_decl = decl;
  P.n_user_dec = nf;
  P.rows.assign(d.m, {});
  P.b.assign(d.m, Rational(0));
  for (size_t j = 0; j < d.m; ++j) P.b[j] = rat_from_double(d.b[j]);
  P.c.assign(P.n_decl, Rational(0));
  P.has_objective = true;
  P.rr.resize(P.n_decl);
  for (size_t i = 0; i < P.n_decl; ++i) P.rr[i] = i;
  for (const SdpaEntry& e : d.entries) {
    size_t dcl;
    Rational w;
    if (d.block_sizes[e.blkno - 1] < 0) {
      dcl = decl_base[e.blkno - 1] + (e.i - 1);
      w = rat_from_double(e.value);
    } else {
      size_t s = static_cast<size_t>(d.block_sizes[e.blkno - 1]);
      size_t a = e.i - 1, b = e.j - 1;
      dcl = decl_base[e.blkno - 1] + (a * s - a * (a - 1) / 2 + (b - a));
      w = rat_from_double(e.value);
      if (a != b) w *= 2;
    }
    if (e.matno == 0)
      P.c[dcl] += w;
    else
      P.rows[e.matno - 1][dcl] += w;
  }
  for (auto& row : P.rows)
    for (auto it = row.begin(); it != row.end();)
      it = (it->second == 0) ? row.erase(it) : std::next(it);
  return P;
}

std::string sdpa_format_solution(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  std::string out = "xVec = {";
  for (size_t i = 0; i < x.size(); ++i)
    out += (i ? ", " : "") + fmt(x[i]);
  out += "}\nyVec = {";
  for (size_t i = 0; i < y.size(); ++i)
    out += (i ? ", " : "") + fmt(y[i]);
  out += "}\n";
  return out;
}

std::pair<std::vector<double>, std::vector<double>> sdpa_import_solution(
    const std::string& text) {
  std::vector<double> xv, yv;
  bool have_x = false, have_y = false;
  size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    ++lineno;
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string label = line.substr(0, eq);
    label.erase(0, label.find_first_not_of(" \t"));
    label.erase(label.find_last_not_of(" \t") + 1);
    bool is_x = label == "x" || label == "xVec";
    bool is_y = label == "y" || label == "yVec";
    if (!is_x && !is_y) continue;
    size_t open = line.find('{', eq);
    if (open == std::string::npos)
      parse_fail(lineno, "expected '{' after '" + label + " ='");
    std::string body = line.substr(open + 1);
    while (body.find('}') == std::string::npos) {
      if (pos >= text.size()) parse_fail(lineno, "unterminated vector");
      ++lineno;
      size_t e2 = text.find('\n', pos);
      if (e2 == std::string::npos) e2 = text.size();
      body += " " + text.substr(pos, e2 - pos);
      pos = e2 + 1;
    }
    body = body.substr(0, body.find('}'));
    std::vector<double> vals;
    std::string cur;
    auto flush = [&] {
      if (cur.empty()) return;
      char* end = nullptr;
      double v = std::strtod(cur.c_str(), &end);
      if (end == nullptr || *end != '\0')
        parse_fail(lineno, "bad number '" + cur + "'");
      vals.push_back(v);
      cur.clear();
    };
    for (char ch : body) {
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',')
        flush();
      else
        cur.push_back(ch);
    }
    flush();
    if (is_x) {
      xv = vals;
      have_x = true;
    } else {
      yv = vals;
      have_y = true;
    }
  }
  if (!have_x || !have_y)
    fail(ErrorKind::parse, "solution text lacks an x or y vector");
  return {xv, yv};
}

}  // namespace sumsq
