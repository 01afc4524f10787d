#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "negprob/errors.hpp"
#include "negprob/linalg.hpp"
#include "negprob/measure.hpp"
#include "negprob/scenario.hpp"

namespace negprob {

enum class RowKind { normalization, context_event, hidden };

struct RowLabel {
  RowKind kind = RowKind::context_event;
  std::string context;  // context id, or product description for hidden rows
  std::string event;    // cylinder assignment, empty otherwise
};

// Dense linear system A*mu = b over the atoms of the global outcome space.
struct ConstraintSystem {
  OutcomeSpacePtr space;
  Mat matrix;               // rows x atom_count
  std::vector<double> rhs;
  std::vector<RowLabel> labels;

  std::size_t rows() const { return matrix.rows(); }
  std::size_t unknowns() const { return matrix.cols(); }
};

// Assembles the system: normalization first, then one indicator row per
// cylinder event of each context (rhs = the table probability), then one
// value-weighted row per hidden constraint. Identical rows from overlapping
// contexts are kept once; a duplicate row with a different rhs means the
// model signals and is rejected.
inline ConstraintSystem build(const EmpiricalModel& model, double tol = 1e-9) {
  validate(model, tol);
  ConstraintSystem sys;
  sys.space = outcome_space(model);
  const std::size_t n = sys.space->atom_count();

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<RowLabel> labels;

  auto push_row = [&](std::vector<double> row, double b, RowLabel label) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] == row) {
        if (std::abs(rhs[i] - b) > tol)
          throw signaling_error(
              "conflicting constraints: event '" + label.event + "' is pinned to " +
              std::to_string(rhs[i]) + " by context '" + labels[i].context +
              "' and to " + std::to_string(b) + " by context '" + label.context + "'");
        return;  // duplicate, consistent
      }
    }
    rows.push_back(std::move(row));
    rhs.push_back(b);
    labels.push_back(std::move(label));
  };

  push_row(std::vector<double>(n, 1.0), 1.0, {RowKind::normalization, "", ""});

  for (const auto& ctx : model.contexts) {
    ContextAlgebra alg(sys.space, ctx.members);
    // Cell indexing of ContextAlgebra::cylinder_of uses members in space
    // order; re-map to the context's declared member order to match table.
    std::vector<std::size_t> member_idx;
    for (const auto& id : ctx.members) member_idx.push_back(sys.space->variable_index(id));
    for (std::size_t cell = 0; cell < ctx.table.size(); ++cell) {
      std::vector<std::size_t> digits(member_idx.size());
      std::size_t rem = cell;
      for (std::size_t i = member_idx.size(); i-- > 0;) {
        std::size_t sz = sys.space->variable(member_idx[i]).outcomes.size();
        digits[i] = rem % sz;
        rem /= sz;
      }
      std::vector<double> row(n, 0.0);
      for (std::size_t atom = 0; atom < n; ++atom) {
        bool match = true;
        for (std::size_t i = 0; i < member_idx.size(); ++i)
          if (sys.space->digit(atom, member_idx[i]) != digits[i]) {
            match = false;
            break;
          }
        if (match) row[atom] = 1.0;
      }
      std::string event;
      for (std::size_t i = 0; i < member_idx.size(); ++i) {
        const auto& v = sys.space->variable(member_idx[i]);
        if (i) event += ",";
        event += v.id + "=" + v.outcomes[digits[i]].label;
      }
      push_row(std::move(row), ctx.table[cell], {RowKind::context_event, ctx.id, event});
    }
  }

  for (const auto& h : model.hidden_constraints) {
    std::vector<std::size_t> member_idx;
    std::string desc;
    for (const auto& id : h.members) {
      member_idx.push_back(sys.space->variable_index(id));
      desc += id;
    }
    std::vector<double> row(n, 0.0);
    for (std::size_t atom = 0; atom < n; ++atom) {
      double prod = 1.0;
      for (auto k : member_idx)
        prod *= sys.space->variable(k).outcomes[sys.space->digit(atom, k)].value;
      row[atom] = prod;
    }
    push_row(std::move(row), h.expectation, {RowKind::hidden, "<" + desc + ">", ""});
  }

  sys.matrix = Mat(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) sys.matrix(i, j) = rows[i][j];
  sys.rhs = std::move(rhs);
  sys.labels = std::move(labels);
  return sys;
}

struct RankReport {
  std::size_t rank = 0;
  std::size_t unknowns = 0;
  bool underdetermined = false;
};

inline RankReport rank_report(const ConstraintSystem& sys, double pivot_tol = 1e-10) {
  RankReport rep;
  rep.rank = numeric_rank(sys.matrix, pivot_tol);
  rep.unknowns = sys.unknowns();
  rep.underdetermined = rep.rank < rep.unknowns;
  return rep;
}

// CSV dump of (matrix | rhs) for external solvers. One header row with atom
// labels, then one line per constraint.
inline void dump_csv(const ConstraintSystem& sys, std::ostream& os) {
  for (std::size_t j = 0; j < sys.unknowns(); ++j)
    os << "\"" << sys.space->atom_label(j) << "\",";
  os << "rhs\n";
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    for (std::size_t j = 0; j < sys.unknowns(); ++j) os << sys.matrix(i, j) << ",";
    os << sys.rhs[i] << "\n";
  }
}

}  // namespace negprob
