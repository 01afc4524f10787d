#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "negprob/errors.hpp"
#include "negprob/measure.hpp"

namespace negprob {

// One measurement context: jointly measured variables and their observed
// joint probability table, row-major over `members`, last member fastest.
struct ContextSpec {
  std::string id;
  std::vector<std::string> members;
  std::vector<double> table;
};

// Target expectation for an empirically inaccessible product of variables,
// e.g. <XYZ> in the three-dichotomic-variable scenario.
struct HiddenConstraint {
  std::vector<std::string> members;
  double expectation = 0.0;
};

struct EmpiricalModel {
  std::vector<Variable> variables;
  std::vector<ContextSpec> contexts;
  std::vector<HiddenConstraint> hidden_constraints;

  const Variable& variable(const std::string& id) const {
    for (const auto& v : variables)
      if (v.id == id) return v;
    throw input_error("unknown variable '" + id + "'");
  }
};

inline OutcomeSpacePtr outcome_space(const EmpiricalModel& model) {
  return std::make_shared<OutcomeSpace>(model.variables);
}

inline void validate(const EmpiricalModel& model, double tol = 1e-9) {
  if (model.variables.empty()) throw input_error("model declares no variables");
  std::set<std::string> declared;
  for (const auto& v : model.variables) {
    if (v.outcomes.size() < 2)
      throw input_error("variable '" + v.id + "' needs at least 2 outcomes");
    if (!declared.insert(v.id).second)
      throw input_error("duplicate variable '" + v.id + "'");
  }
  if (model.contexts.empty()) throw input_error("model declares no contexts");
  std::set<std::string> covered;
  for (const auto& c : model.contexts) {
    if (c.members.empty())
      throw input_error("context '" + c.id + "' has no members");
    std::size_t cells = 1;
    std::set<std::string> mem;
    for (const auto& m : c.members) {
      if (!declared.count(m))
        throw input_error("context '" + c.id + "' references undeclared variable '" + m + "'");
      if (!mem.insert(m).second)
        throw input_error("context '" + c.id + "' repeats member '" + m + "'");
      covered.insert(m);
      cells *= model.variable(m).outcomes.size();
    }
    if (c.table.size() != cells)
      throw input_error("context '" + c.id + "' table has " +
                        std::to_string(c.table.size()) + " cells, expected " +
                        std::to_string(cells));
    double total = 0.0;
    for (double p : c.table) {
      if (p < -tol)
        throw input_error("context '" + c.id + "' table has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > tol)
      throw input_error("context '" + c.id + "' table sums to " +
                        std::to_string(total) + ", expected 1");
  }
  for (const auto& v : model.variables)
    if (!covered.count(v.id))
      throw input_error("variable '" + v.id + "' appears in no context");
  for (const auto& h : model.hidden_constraints) {
    if (h.members.empty()) throw input_error("hidden constraint has no members");
    for (const auto& m : h.members)
      if (!declared.count(m))
        throw input_error("hidden constraint references undeclared variable '" + m + "'");
  }
}

// ---------------------------------------------------------------------------
// No-signal check: marginals over shared variables must agree across contexts.

struct NoSignalViolation {
  std::string context_a;
  std::string context_b;
  std::string event;  // assignment to the shared variables
  double gap = 0.0;
};

struct NoSignalReport {
  bool consistent = true;
  std::vector<NoSignalViolation> violations;
};

namespace detail {

// Marginal of a context table onto `shared` (ids in a fixed order), indexed
// row-major over shared, last fastest.
inline std::vector<double> shared_marginal(const EmpiricalModel& model,
                                           const ContextSpec& ctx,
                                           const std::vector<std::string>& shared) {
  std::vector<std::size_t> sizes, shared_pos;
  for (const auto& m : ctx.members) sizes.push_back(model.variable(m).outcomes.size());
  for (const auto& s : shared) {
    auto it = std::find(ctx.members.begin(), ctx.members.end(), s);
    shared_pos.push_back(static_cast<std::size_t>(it - ctx.members.begin()));
  }
  std::size_t cells = 1;
  for (const auto& s : shared) cells *= model.variable(s).outcomes.size();
  std::vector<double> marg(cells, 0.0);
  std::vector<std::size_t> digits(ctx.members.size(), 0);
  for (std::size_t cell = 0; cell < ctx.table.size(); ++cell) {
    std::size_t rem = cell;
    for (std::size_t i = ctx.members.size(); i-- > 0;) {
      digits[i] = rem % sizes[i];
      rem /= sizes[i];
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < shared.size(); ++i)
      idx = idx * model.variable(shared[i]).outcomes.size() + digits[shared_pos[i]];
    marg[idx] += ctx.table[cell];
  }
  return marg;
}

inline std::string shared_event_label(const EmpiricalModel& model,
                                      const std::vector<std::string>& shared,
                                      std::size_t idx) {
  std::vector<std::size_t> digits(shared.size());
  for (std::size_t i = shared.size(); i-- > 0;) {
    std::size_t n = model.variable(shared[i]).outcomes.size();
    digits[i] = idx % n;
    idx /= n;
  }
  std::string s;
  for (std::size_t i = 0; i < shared.size(); ++i) {
    if (i) s += ",";
    s += shared[i] + "=" + model.variable(shared[i]).outcomes[digits[i]].label;
  }
  return s;
}

}  // namespace detail

inline NoSignalReport check_no_signal(const EmpiricalModel& model, double tol = 1e-9) {
  NoSignalReport rep;
  for (std::size_t a = 0; a < model.contexts.size(); ++a) {
    for (std::size_t b = a + 1; b < model.contexts.size(); ++b) {
      const auto& ca = model.contexts[a];
      const auto& cb = model.contexts[b];
      std::vector<std::string> shared;
      for (const auto& m : ca.members)
        if (std::find(cb.members.begin(), cb.members.end(), m) != cb.members.end())
          shared.push_back(m);
      if (shared.empty()) continue;
      auto pa = detail::shared_marginal(model, ca, shared);
      auto pb = detail::shared_marginal(model, cb, shared);
      for (std::size_t i = 0; i < pa.size(); ++i) {
        double gap = std::abs(pa[i] - pb[i]);
        if (gap > tol) {
          rep.consistent = false;
          rep.violations.push_back({ca.id, cb.id,
                                    detail::shared_event_label(model, shared, i), gap});
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Builtin reference scenarios.

namespace detail {

inline EmpiricalModel two_party_grid(const std::vector<std::string>& party_a,
                                     const std::vector<std::string>& party_b,
                                     const std::map<std::pair<std::string, std::string>,
                                                    std::array<double, 4>>& blocks) {
  EmpiricalModel m;
  for (const auto& id : party_a) m.variables.push_back(dichotomic_variable(id));
  for (const auto& id : party_b) m.variables.push_back(dichotomic_variable(id));
  for (const auto& x : party_a) {
    for (const auto& y : party_b) {
      const auto& t = blocks.at({x, y});
      m.contexts.push_back({x + ";" + y, {x, y}, {t[0], t[1], t[2], t[3]}});
    }
  }
  return m;
}

}  // namespace detail

// Bell-type scenario table (rows a,b; columns a',b'). Contextuality 1/4.
inline EmpiricalModel builtin_bell() {
  const double h = 0.5, t = 3.0 / 8.0, e = 1.0 / 8.0;
  return detail::two_party_grid(
      {"a", "b"}, {"a'", "b'"},
      {{{"a", "a'"}, {h, 0, 0, h}},
       {{"a", "b'"}, {t, e, e, t}},
       {{"b", "a'"}, {t, e, e, t}},
       {{"b", "b'"}, {e, t, t, e}}});
}

// Popescu-Rohrlich box: algebraic CHSH maximum, contextuality 1.
inline EmpiricalModel builtin_pr_box() {
  const double h = 0.5;
  return detail::two_party_grid(
      {"a", "b"}, {"a'", "b'"},
      {{{"a", "a'"}, {h, 0, 0, h}},
       {{"a", "b'"}, {h, 0, 0, h}},
       {{"b", "a'"}, {h, 0, 0, h}},
       {{"b", "b'"}, {0, h, h, 0}}});
}

// Mermin square correlations on the 3x3 bipartite setting grid.
inline EmpiricalModel builtin_mermin() {
  const double h = 0.5, t = 3.0 / 8.0, e = 1.0 / 8.0;
  std::map<std::pair<std::string, std::string>, std::array<double, 4>> blocks;
  const std::vector<std::string> rows = {"a", "b", "c"}, cols = {"a'", "b'", "c'"};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      blocks[{rows[i], cols[j]}] =
          (i == j) ? std::array<double, 4>{0, h, h, 0} : std::array<double, 4>{t, e, e, t};
  return detail::two_party_grid(rows, cols, blocks);
}

// Cyclic scenario of three pairwise-measurable dichotomic variables, built
// from first and second moments: p(i,j) = (1 + i<X> + j<Y> + ij<XY>)/4.
struct ThreeDichotomicMoments {
  double x = 0, y = 0, z = 0, xy = 0, xz = 0, yz = 0;
};

inline EmpiricalModel three_dichotomic(const ThreeDichotomicMoments& m) {
  EmpiricalModel em;
  em.variables = {dichotomic_variable("X"), dichotomic_variable("Y"),
                  dichotomic_variable("Z")};
  auto pair_table = [](double mx, double my, double mxy) {
    std::vector<double> t(4);
    const double sign[2] = {1.0, -1.0};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        t[2 * i + j] = (1.0 + sign[i] * mx + sign[j] * my + sign[i] * sign[j] * mxy) / 4.0;
    return t;
  };
  em.contexts.push_back({"X;Y", {"X", "Y"}, pair_table(m.x, m.y, m.xy)});
  em.contexts.push_back({"X;Z", {"X", "Z"}, pair_table(m.x, m.z, m.xz)});
  em.contexts.push_back({"Y;Z", {"Y", "Z"}, pair_table(m.y, m.z, m.yz)});
  validate(em);
  return em;
}

inline EmpiricalModel builtin(const std::string& name) {
  if (name == "bell") return builtin_bell();
  if (name == "pr_box") return builtin_pr_box();
  if (name == "mermin") return builtin_mermin();
  if (name == "three_dichotomic") return three_dichotomic({});
  throw input_error("unknown builtin scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// Scenario file format (JSON), see docs/scenario-format.md.

inline EmpiricalModel load(const nlohmann::json& doc) {
  EmpiricalModel m;
  if (!doc.is_object()) throw input_error("$: document must be a JSON object");
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw input_error("$.variables: missing or not an array");
  if (!doc.contains("contexts") || !doc["contexts"].is_array())
    throw input_error("$.contexts: missing or not an array");

  std::size_t vi = 0;
  for (const auto& jv : doc["variables"]) {
    std::string path = "$.variables[" + std::to_string(vi++) + "]";
    if (!jv.is_object() || !jv.contains("id") || !jv.contains("outcomes"))
      throw input_error(path + ": needs 'id' and 'outcomes'");
    Variable v;
    v.id = jv["id"].get<std::string>();
    for (const auto& jo : jv["outcomes"]) {
      if (!jo.contains("label") || !jo.contains("value"))
        throw input_error(path + ".outcomes: each needs 'label' and 'value'");
      v.outcomes.push_back({jo["label"].get<std::string>(), jo["value"].get<double>()});
    }
    m.variables.push_back(std::move(v));
  }

  std::size_t ci = 0;
  for (const auto& jc : doc["contexts"]) {
    std::string path = "$.contexts[" + std::to_string(ci++) + "]";
    if (!jc.is_object() || !jc.contains("id") || !jc.contains("members") ||
        !jc.contains("table"))
      throw input_error(path + ": needs 'id', 'members' and 'table'");
    ContextSpec c;
    c.id = jc["id"].get<std::string>();
    for (const auto& jm : jc["members"]) c.members.push_back(jm.get<std::string>());
    const auto& jt = jc["table"];
    if (!jt.contains("order") || !jt.contains("probs"))
      throw input_error(path + ".table: needs 'order' and 'probs'");
    std::vector<std::string> order;
    for (const auto& jo : jt["order"]) order.push_back(jo.get<std::string>());
    std::vector<double> probs;
    for (const auto& jp : jt["probs"]) probs.push_back(jp.get<double>());
    if (order.size() != c.members.size() ||
        !std::is_permutation(order.begin(), order.end(), c.members.begin()))
      throw input_error(path + ".table.order: must be a permutation of members");

    // Re-index the row-major table from 'order' to 'members' order.
    std::vector<std::size_t> sizes_order, pos_in_order;
    std::size_t cells = 1;
    for (const auto& id : order) {
      std::size_t n = 0;
      for (const auto& v : m.variables)
        if (v.id == id) n = v.outcomes.size();
      if (n == 0) throw input_error(path + ": undeclared variable '" + id + "'");
      sizes_order.push_back(n);
      cells *= n;
    }
    if (probs.size() != cells)
      throw input_error(path + ".table.probs: expected " + std::to_string(cells) +
                        " entries, got " + std::to_string(probs.size()));
    for (const auto& mem : c.members) {
      auto it = std::find(order.begin(), order.end(), mem);
      pos_in_order.push_back(static_cast<std::size_t>(it - order.begin()));
    }
    c.table.assign(cells, 0.0);
    std::vector<std::size_t> digits(order.size());
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rem = cell;
      for (std::size_t i = order.size(); i-- > 0;) {
        digits[i] = rem % sizes_order[i];
        rem /= sizes_order[i];
      }
      std::size_t idx = 0;
      for (std::size_t i = 0; i < c.members.size(); ++i)
        idx = idx * sizes_order[pos_in_order[i]] + digits[pos_in_order[i]];
      c.table[idx] = probs[cell];
    }
    m.contexts.push_back(std::move(c));
  }

  if (doc.contains("hidden_constraints")) {
    std::size_t hi = 0;
    for (const auto& jh : doc["hidden_constraints"]) {
      std::string path = "$.hidden_constraints[" + std::to_string(hi++) + "]";
      if (!jh.contains("members") || !jh.contains("expectation"))
        throw input_error(path + ": needs 'members' and 'expectation'");
      HiddenConstraint h;
      for (const auto& jm : jh["members"]) h.members.push_back(jm.get<std::string>());
      h.expectation = jh["expectation"].get<double>();
      m.hidden_constraints.push_back(std::move(h));
    }
  }

  validate(m);
  return m;
}

inline nlohmann::ordered_json emit(const EmpiricalModel& model) {
  nlohmann::ordered_json doc;
  doc["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : model.variables) {
    nlohmann::ordered_json jv;
    jv["id"] = v.id;
    jv["outcomes"] = nlohmann::ordered_json::array();
    for (const auto& o : v.outcomes)
      jv["outcomes"].push_back({{"label", o.label}, {"value", o.value}});
    doc["variables"].push_back(jv);
  }
  doc["contexts"] = nlohmann::ordered_json::array();
  for (const auto& c : model.contexts) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["members"] = c.members;
    jc["table"] = {{"order", c.members}, {"probs", c.table}};
    doc["contexts"].push_back(jc);
  }
  if (!model.hidden_constraints.empty()) {
    doc["hidden_constraints"] = nlohmann::ordered_json::array();
    for (const auto& h : model.hidden_constraints)
      doc["hidden_constraints"].push_back(
          {{"members", h.members}, {"expectation", h.expectation}});
  }
  return doc;
}

}  // namespace negprob
