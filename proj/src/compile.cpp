#include "sumsq/compile.hpp"

#include <algorithm>
#include <set>

#include "sumsq/error.hpp"
#include "sumsq/simplex.hpp"

namespace sumsq {

namespace {

constexpr size_t kCandidateCap = 200000;

// Enumerates exponent rows with per-variable caps and total degree in
// [lo, hi], guarding against combinatorial blowup.
void enumerate_box(const std::vector<int>& caps, int lo, int hi, size_t var,
                   Exponents& cur, int total, std::vector<Exponents>& out) {
  if (var == caps.size()) {
    if (total >= lo) {
      out.push_back(cur);
      if (out.size() > kCandidateCap)
        fail(ErrorKind::domain, "monomial candidate enumeration exceeded 200000");
    }
    return;
  }
  for (int d = 0; d <= std::min(caps[var], hi - total); ++d) {
    cur[var] = d;
    enumerate_box(caps, lo, hi, var + 1, cur, total + d, out);
  }
  cur[var] = 0;
}

struct SupportStats {
  int mindeg = 0, maxdeg = 0;
  std::vector<int> maxvar;
};

SupportStats stats_of(const std::vector<Exponents>& support) {
  SupportStats s;
  s.maxvar.assign(support[0].size(), 0);
  s.mindeg = total_degree(support[0]);
  for (const Exponents& e : support) {
    int d = total_degree(e);
    s.mindeg = std::min(s.mindeg, d);
    s.maxdeg = std::max(s.maxdeg, d);
    for (size_t v = 0; v < e.size(); ++v) s.maxvar[v] = std::max(s.maxvar[v], e[v]);
  }
  return s;
}

// Row-reduced rational basis of span{rows}; used to test membership in
// the affine hull of the support.
class RationalSpan {
 public:
  void add(std::vector<Rational> v) {
    reduce(v);
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0) {
        Rational piv = v[i];
        for (Rational& x : v) x /= piv;
        rows_.push_back({i, std::move(v)});
        std::sort(rows_.begin(), rows_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return;
      }
    }
  }

  bool contains(std::vector<Rational> v) const {
    reduce(v);
    for (const Rational& x : v)
      if (x != 0) return false;
    return true;
  }

 private:
  std::vector<std::pair<size_t, std::vector<Rational>>> rows_;

  void reduce(std::vector<Rational>& v) const {
    for (const auto& [lead, row] : rows_) {
      if (v[lead] == 0) continue;
      Rational f = v[lead];
      for (size_t i = 0; i < v.size(); ++i) v[i] -= f * row[i];
    }
  }
};

}  // namespace

ZZInfo build_zz(const std::vector<Exponents>& Z) {
  ZZInfo info;
  auto pairs = tri_pairs(Z.size());
  std::vector<Exponents> sums;
  sums.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    Exponents e = Z[a];
    for (size_t v = 0; v < e.size(); ++v) e[v] += Z[b][v];
    sums.push_back(std::move(e));
  }
  std::vector<Exponents> uniq = sums;
  std::sort(uniq.begin(), uniq.end(), monomial_before);
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  info.ZZ = uniq;
  info.row_of_pair.resize(pairs.size());
  info.weight_of_pair.resize(pairs.size());
  for (size_t p = 0; p < pairs.size(); ++p) {
    auto it = std::lower_bound(uniq.begin(), uniq.end(), sums[p], monomial_before);
    info.row_of_pair[p] = static_cast<size_t>(it - uniq.begin());
    info.weight_of_pair[p] = (pairs[p].first == pairs[p].second) ? 1 : 2;
  }
  return info;
}

std::vector<Exponents> full_basis(const std::vector<Exponents>& support) {
  if (support.empty()) return {};
  SupportStats s = stats_of(support);
  std::vector<int> degrees;
  for (int d = 0; d <= s.maxdeg / 2; ++d) degrees.push_back(d);
  return monomial_exponents(support[0].size(), degrees);
}

std::vector<Exponents> heuristic_reduce(const std::vector<Exponents>& support) {
  if (support.empty()) return {};
  SupportStats s = stats_of(support);
  int lo = (s.mindeg + 1) / 2;
  int hi = s.maxdeg / 2;
  std::vector<int> caps(s.maxvar.size());
  for (size_t v = 0; v < caps.size(); ++v) caps[v] = (s.maxvar[v] + 1) / 2;
  std::vector<Exponents> out;
  Exponents cur(caps.size(), 0);
  enumerate_box(caps, lo, hi, 0, cur, 0, out);
  std::sort(out.begin(), out.end(), monomial_before);
  return out;
}

std::vector<Exponents> newton_reduce(const std::vector<Exponents>& support) {
  if (support.empty()) return {};
  size_t nv = support[0].size();
  std::vector<Exponents> candidates = heuristic_reduce(support);

  // Affine-hull prefilter: 2*beta - s0 must lie in span{s_i - s0}.
  RationalSpan span;
  const Exponents& s0 = support[0];
  for (size_t i = 1; i < support.size(); ++i) {
    std::vector<Rational> d(nv);
    for (size_t v = 0; v < nv; ++v) d[v] = support[i][v] - s0[v];
    span.add(std::move(d));
  }

  // LP data: columns are the support points plus a convexity row.
  std::vector<std::vector<Rational>> cols(support.size(),
                                          std::vector<Rational>(nv + 1));
  for (size_t i = 0; i < support.size(); ++i) {
    for (size_t v = 0; v < nv; ++v) cols[i][v] = support[i][v];
    cols[i][nv] = 1;
  }

  std::vector<Exponents> out;
  for (const Exponents& beta : candidates) {
    std::vector<Rational> shifted(nv);
    for (size_t v = 0; v < nv; ++v) shifted[v] = 2 * beta[v] - s0[v];
    if (!span.contains(shifted)) continue;
    std::vector<Rational> rhs(nv + 1);
    for (size_t v = 0; v < nv; ++v) rhs[v] = 2 * beta[v];
    rhs[nv] = 1;
    if (lp_feasible(cols, rhs)) out.push_back(beta);
  }
  return out;
}

std::vector<Exponents> multipartite_reduce(
    const std::vector<Exponents>& support,
    const std::vector<std::vector<size_t>>& partitions) {
  if (support.empty()) return {};
  size_t nv = support[0].size();
  if (partitions.empty()) fail(ErrorKind::invalid_argument, "empty partition list");
  std::vector<char> covered(nv, 0);
  for (const auto& part : partitions)
    for (size_t v : part) {
      if (v >= nv) fail(ErrorKind::invalid_argument, "partition index out of range");
      covered[v] = 1;
    }
  for (const Exponents& e : support)
    for (size_t v = 0; v < nv; ++v)
      if (e[v] != 0 && !covered[v])
        fail(ErrorKind::invalid_argument,
             "support variable not covered by the partition");

  // Per-block projections; blocks after the first must be homogeneous.
  std::vector<std::vector<Exponents>> bases(partitions.size());
  for (size_t p = 0; p < partitions.size(); ++p) {
    std::vector<Exponents> proj;
    for (const Exponents& e : support) {
      Exponents pe(partitions[p].size());
      for (size_t k = 0; k < partitions[p].size(); ++k) pe[k] = e[partitions[p][k]];
      proj.push_back(std::move(pe));
    }
    std::sort(proj.begin(), proj.end(), monomial_before);
    proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
    if (p > 0) {
      int d = total_degree(proj[0]);
      for (const Exponents& e : proj)
        if (total_degree(e) != d)
          fail(ErrorKind::domain,
               "support is not multipartite: block " + std::to_string(p + 1) +
                   " is not homogeneous");
    }
    bases[p] = newton_reduce(proj);
    if (bases[p].empty()) return {};
  }

  // Cartesian product, first partition fastest.
  std::vector<Exponents> out;
  std::vector<size_t> pick(partitions.size(), 0);
  while (true) {
    Exponents e(nv, 0);
    for (size_t p = 0; p < partitions.size(); ++p)
      for (size_t k = 0; k < partitions[p].size(); ++k)
        e[partitions[p][k]] += bases[p][pick[p]][k];
    out.push_back(std::move(e));
    size_t p = 0;
    while (p < partitions.size()) {
      if (++pick[p] < bases[p].size()) break;
      pick[p] = 0;
      ++p;
    }
    if (p == partitions.size()) break;
  }
  return out;
}

namespace {

const char* method_name(ReductionMethod m) {
  switch (m) {
    case ReductionMethod::full: return "full";
    case ReductionMethod::newton: return "newton";
    case ReductionMethod::multipartite: return "multipartite";
    case ReductionMethod::heuristic: return "heuristic";
  }
  return "?";
}

// Embeds a block-local exponent row into full variable width.
Exponents embed(const Exponents& local, const std::vector<size_t>& where, size_t nv) {
  Exponents e(nv, 0);
  for (size_t k = 0; k < where.size(); ++k) e[where[k]] = local[k];
  return e;
}

}  // namespace

SdpProblem assemble(const SosProgram& prog) {
  if (prog.constraints().empty())
    fail(ErrorKind::domain, "cannot assemble an empty program (no constraints)");
  SdpProblem P;
  P.n_user_dec = prog.decvar_count();
  P.n_decl = P.n_user_dec;
  size_t nv = prog.indep_count();

  std::vector<char> in_block(P.n_user_dec, 0);
  for (size_t vi = 0; vi < prog.program_vars().size(); ++vi) {
    const ProgramVar& v = prog.program_vars()[vi];
    if (v.kind != VarKind::sos && v.kind != VarKind::sosmatrix) continue;
    BlockInfo blk;
    blk.from_constraint = false;
    blk.index = vi;
    blk.Z = v.Z;
    blk.mrows = (v.kind == VarKind::sosmatrix) ? v.rows : 1;
    blk.size = blk.mrows * v.Z.size();
    blk.decl_lo = v.idx_lo;
    P.blocks.push_back(blk);
    for (size_t k = v.idx_lo; k < v.idx_hi; ++k) in_block[k] = 1;
  }

  for (size_t ci = 0; ci < prog.constraints().size(); ++ci) {
    const Constraint& con = prog.constraints()[ci];
    if (con.kind == ConstraintKind::eq) {
      for (size_t j = 0; j < con.Z.size(); ++j) {
        std::map<size_t, Rational> row;
        for (const auto& [k, coef] : con.cols[j]) row[k] = coef;
        P.rows.push_back(std::move(row));
        P.b.push_back(con.b[j]);
      }
      continue;
    }

    // Gram basis selection for the inequality.
    std::vector<Exponents> product;  // full-width basis rows
    BlockInfo blk;
    blk.from_constraint = true;
    blk.index = ci;
    if (con.kind == ConstraintKind::matrixineq) {
      const std::vector<size_t>& yblock = con.partitions.back();
      std::vector<size_t> xblock;
      for (size_t p = 0; p + 1 < con.partitions.size(); ++p)
        xblock.insert(xblock.end(), con.partitions[p].begin(), con.partitions[p].end());
      // Project the support onto the x variables.
      std::vector<Exponents> xproj;
      for (const Exponents& e : con.Z) {
        Exponents pe(xblock.size());
        for (size_t k = 0; k < xblock.size(); ++k) pe[k] = e[xblock[k]];
        xproj.push_back(std::move(pe));
      }
      std::sort(xproj.begin(), xproj.end(), monomial_before);
      xproj.erase(std::unique(xproj.begin(), xproj.end()), xproj.end());
      std::vector<Exponents> xbasis;
      if (con.mmode == MatrixIneqMode::Mineq) {
        blk.method = ReductionMethod::heuristic;
        xbasis = heuristic_reduce(xproj);
      } else {
        blk.method = ReductionMethod::multipartite;
        xbasis = newton_reduce(xproj);
      }
      blk.mrows = con.mrows;
      for (const Exponents& xb : xbasis) blk.Z.push_back(embed(xb, xblock, nv));
      // y-major product: all x monomials for Mvar_1, then Mvar_2, ...
      for (size_t i = 0; i < con.mrows; ++i) {
        for (const Exponents& xb : blk.Z) {
          Exponents e = xb;
          e[yblock[i]] += 1;
          product.push_back(std::move(e));
        }
      }
    } else if (con.option == BasisOption::sparsemultipartite) {
      blk.method = ReductionMethod::multipartite;
      product = multipartite_reduce(con.Z, con.partitions);
      blk.Z = product;
      blk.mrows = 1;
    } else if (con.option == BasisOption::sparse) {
      blk.method = ReductionMethod::newton;
      product = newton_reduce(con.Z);
      blk.Z = product;
      blk.mrows = 1;
    } else {
      blk.method = ReductionMethod::heuristic;
      product = heuristic_reduce(con.Z);
      blk.Z = product;
      blk.mrows = 1;
    }

    blk.size = product.size();
    blk.decl_lo = P.n_decl;
    P.notes.push_back("constraint " + std::to_string(ci + 1) + ": " +
                      method_name(blk.method) + " basis of " +
                      std::to_string(product.size()) + " monomials");
    if (blk.size > 0) {
      P.n_decl += tri_size(blk.size);
      P.blocks.push_back(blk);
    }

    ZZInfo zz = build_zz(product);
    // One equality row per distinct monomial in ZZ union support.
    std::vector<Exponents> all = zz.ZZ;
    all.insert(all.end(), con.Z.begin(), con.Z.end());
    std::sort(all.begin(), all.end(), monomial_before);
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<std::map<size_t, Rational>> rows(all.size());
    std::vector<Rational> bvec(all.size(), Rational(0));
    for (size_t j = 0; j < con.Z.size(); ++j) {
      auto it = std::lower_bound(all.begin(), all.end(), con.Z[j], monomial_before);
      size_t r = static_cast<size_t>(it - all.begin());
      for (const auto& [k, coef] : con.cols[j]) rows[r][k] = coef;
      bvec[r] = con.b[j];
    }
    for (size_t p = 0; p < zz.row_of_pair.size(); ++p) {
      const Exponents& mono = zz.ZZ[zz.row_of_pair[p]];
      auto it = std::lower_bound(all.begin(), all.end(), mono, monomial_before);
      size_t r = static_cast<size_t>(it - all.begin());
      rows[r][blk.decl_lo + p] = -zz.weight_of_pair[p];
    }
    for (size_t r = 0; r < all.size(); ++r) {
      P.rows.push_back(std::move(rows[r]));
      P.b.push_back(bvec[r]);
    }
  }

  // Objective, padded across later declarations and Gram slack entries.
  P.has_objective = prog.has_objective();
  P.obj_offset = prog.objective_offset();
  P.c.assign(P.n_decl, Rational(0));
  for (size_t k = 0; k < prog.objective().size() && k < P.n_user_dec; ++k)
    P.c[k] = prog.objective()[k];

  // Solver layout: free variables first, then the PSD blocks.
  P.rr.assign(P.n_decl, 0);
  std::vector<char> placed(P.n_decl, 0);
  for (const BlockInfo& blk : P.blocks)
    for (size_t k = 0; k < tri_size(blk.size); ++k) placed[blk.decl_lo + k] = 1;
  size_t pos = 0;
  for (size_t k = 0; k < P.n_decl; ++k)
    if (!placed[k]) P.rr[k] = pos++;
  P.n_free = pos;
  for (const BlockInfo& blk : P.blocks) {
    P.psd_sizes.push_back(blk.size);
    for (size_t k = 0; k < tri_size(blk.size); ++k) P.rr[blk.decl_lo + k] = pos++;
  }
  return P;
}

}  // namespace sumsq
