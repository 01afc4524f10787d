#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "negprob/errors.hpp"

namespace negprob {

struct Outcome {
  std::string label;
  double value = 0.0;  // numeric encoding, e.g. +1/-1 for dichotomic variables
};

struct Variable {
  std::string id;
  std::vector<Outcome> outcomes;
};

// Returns the two-outcome +1/-1 variable used throughout the Bell-type builtins.
inline Variable dichotomic_variable(std::string id) {
  return Variable{std::move(id), {{"+", 1.0}, {"-", -1.0}}};
}

// Product outcome set over an ordered list of variables. Atoms are indexed
// lexicographically, the last variable's outcome running fastest.
class OutcomeSpace {
 public:
  explicit OutcomeSpace(std::vector<Variable> variables)
      : vars_(std::move(variables)) {
    if (vars_.empty()) throw input_error("outcome space needs at least one variable");
    std::set<std::string> seen;
    for (const auto& v : vars_) {
      if (v.outcomes.size() < 2)
        throw input_error("variable '" + v.id + "' needs at least 2 outcomes");
      if (!seen.insert(v.id).second)
        throw input_error("duplicate variable id '" + v.id + "'");
    }
    strides_.resize(vars_.size());
    std::size_t stride = 1;
    for (std::size_t k = vars_.size(); k-- > 0;) {
      strides_[k] = stride;
      stride *= vars_[k].outcomes.size();
    }
    atom_count_ = stride;
  }

  std::size_t variable_count() const { return vars_.size(); }
  std::size_t atom_count() const { return atom_count_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(std::size_t k) const { return vars_[k]; }

  std::size_t variable_index(const std::string& id) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k].id == id) return k;
    throw input_error("unknown variable id '" + id + "'");
  }

  // Outcome index of variable k within atom `atom`.
  std::size_t digit(std::size_t atom, std::size_t k) const {
    return (atom / strides_[k]) % vars_[k].outcomes.size();
  }

  std::size_t atom_index(const std::vector<std::size_t>& digits) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < vars_.size(); ++k) idx += digits[k] * strides_[k];
    return idx;
  }

  std::string atom_label(std::size_t atom) const {
    std::ostringstream os;
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if (k) os << ",";
      os << vars_[k].id << "=" << vars_[k].outcomes[digit(atom, k)].label;
    }
    return os.str();
  }

 private:
  std::vector<Variable> vars_;
  std::vector<std::size_t> strides_;
  std::size_t atom_count_ = 0;
};

using OutcomeSpacePtr = std::shared_ptr<const OutcomeSpace>;

// Finite signed measure given by one real weight per atom.
class SignedMeasure {
 public:
  SignedMeasure(OutcomeSpacePtr space, std::vector<double> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_) throw input_error("signed measure needs an outcome space");
    if (weights_.size() != space_->atom_count())
      throw input_error("weight count does not match atom count");
  }

  const OutcomeSpace& space() const { return *space_; }
  const OutcomeSpacePtr& space_ptr() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t atom) const { return weights_[atom]; }

  double total_mass() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }
  bool is_normalized(double tol = 1e-9) const {
    return std::abs(total_mass() - 1.0) <= tol;
  }

 private:
  OutcomeSpacePtr space_;
  std::vector<double> weights_;
};

// Sub-algebra generated by a subset of variables: its events are the cylinder
// sets fixing outcomes of the member variables. The algebra itself is never
// materialized; cylinder atoms are enumerated on demand.
class ContextAlgebra {
 public:
  ContextAlgebra(OutcomeSpacePtr space, const std::vector<std::string>& member_ids)
      : space_(std::move(space)) {
    if (member_ids.empty()) throw input_error("context needs at least one member");
    std::set<std::size_t> idx;
    for (const auto& id : member_ids) {
      if (!idx.insert(space_->variable_index(id)).second)
        throw input_error("duplicate member '" + id + "' in context");
    }
    members_.assign(idx.begin(), idx.end());  // space order
  }

  const OutcomeSpace& space() const { return *space_; }
  const std::vector<std::size_t>& member_indices() const { return members_; }

  std::string describe() const {
    std::string s = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) s += ",";
      s += space_->variable(members_[i]).id;
    }
    return s + "}";
  }

  // Number of cylinder atoms (full assignments to the member variables).
  std::size_t cylinder_count() const {
    std::size_t n = 1;
    for (auto k : members_) n *= space_->variable(k).outcomes.size();
    return n;
  }

  // Index of the cylinder event containing `atom` (row-major over members,
  // last member fastest).
  std::size_t cylinder_of(std::size_t atom) const {
    std::size_t idx = 0;
    for (auto k : members_)
      idx = idx * space_->variable(k).outcomes.size() + space_->digit(atom, k);
    return idx;
  }

  std::string cylinder_label(std::size_t cyl) const {
    std::vector<std::size_t> digits(members_.size());
    for (std::size_t i = members_.size(); i-- > 0;) {
      std::size_t n = space_->variable(members_[i]).outcomes.size();
      digits[i] = cyl % n;
      cyl /= n;
    }
    std::string s;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const auto& v = space_->variable(members_[i]);
      if (i) s += ",";
      s += v.id + "=" + v.outcomes[digits[i]].label;
    }
    return s;
  }

 private:
  OutcomeSpacePtr space_;
  std::vector<std::size_t> members_;
};

// mu(E) for a finite event: the sum of atom weights, which realizes
// countable additivity on a finite discrete space.
inline double evaluate(const SignedMeasure& mu, const std::vector<std::size_t>& event) {
  double s = 0.0;
  for (auto atom : event) {
    if (atom >= mu.space().atom_count())
      throw input_error("event contains an atom outside the measure's space");
    s += mu.weight(atom);
  }
  return s;
}

// Total variation of a finite signed measure. On a finite discrete space the
// sup formulation sup{mu(A)-mu(B)} is attained by A = {w : mu(w) > 0} and
// B = {w : mu(w) < 0}, so it equals the sum of absolute atom weights.
inline double total_variation(const SignedMeasure& mu) {
  double s = 0.0;
  for (double w : mu.weights()) s += std::abs(w);
  return s;
}

// Probabilities of the context's cylinder events under mu.
inline std::vector<double> context_distribution(const SignedMeasure& mu,
                                                const ContextAlgebra& ctx) {
  std::vector<double> p(ctx.cylinder_count(), 0.0);
  for (std::size_t atom = 0; atom < mu.space().atom_count(); ++atom)
    p[ctx.cylinder_of(atom)] += mu.weight(atom);
  return p;
}

struct KolmogorovReport {
  bool ok = true;
  std::vector<std::string> violations;  // offending cylinder events
};

// True iff the restriction of mu to the context algebra is a genuine
// probability: every cylinder event nonnegative, total equal to 1.
inline KolmogorovReport restrict_is_kolmogorovian(const SignedMeasure& mu,
                                                  const ContextAlgebra& ctx,
                                                  double tol = 1e-9) {
  KolmogorovReport rep;
  auto p = context_distribution(mu, ctx);
  double total = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    total += p[c];
    if (p[c] < -tol) {
      rep.ok = false;
      rep.violations.push_back("negative event {" + ctx.cylinder_label(c) + "}: " +
                               std::to_string(p[c]));
    }
  }
  if (std::abs(total - 1.0) > tol) {
    rep.ok = false;
    rep.violations.push_back("context total " + std::to_string(total) + " != 1");
  }
  return rep;
}

// Push-forward of mu under the coordinate projection onto `keep_ids`;
// weights of dropped coordinates are summed into the reduced atoms.
inline SignedMeasure marginalize(const SignedMeasure& mu,
                                 const std::vector<std::string>& keep_ids) {
  if (keep_ids.empty()) throw input_error("marginalize needs a non-empty keep set");
  const auto& sp = mu.space();
  std::set<std::size_t> keep;
  for (const auto& id : keep_ids) keep.insert(sp.variable_index(id));

  std::vector<Variable> reduced_vars;
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  for (auto k : kept) reduced_vars.push_back(sp.variable(k));
  auto reduced = std::make_shared<OutcomeSpace>(std::move(reduced_vars));

  std::vector<double> w(reduced->atom_count(), 0.0);
  std::vector<std::size_t> digits(kept.size());
  for (std::size_t atom = 0; atom < sp.atom_count(); ++atom) {
    for (std::size_t i = 0; i < kept.size(); ++i) digits[i] = sp.digit(atom, kept[i]);
    w[reduced->atom_index(digits)] += mu.weight(atom);
  }
  return SignedMeasure(reduced, std::move(w));
}

inline double shannon_entropy_nats(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0.0) s -= x * std::log(x);
  return s;
}

// S_B(mu): minimum over contexts of the Shannon entropy (natural log) of the
// context's cylinder distribution. Each restriction must be Kolmogorovian.
inline double context_entropy(const SignedMeasure& mu,
                              const std::vector<ContextAlgebra>& contexts,
                              double tol = 1e-9) {
  if (contexts.empty()) throw input_error("context_entropy needs at least one context");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ctx : contexts) {
    auto rep = restrict_is_kolmogorovian(mu, ctx, tol);
    if (!rep.ok)
      throw std::domain_error("restriction to context " + ctx.describe() +
                              " is not Kolmogorovian");
    auto p = context_distribution(mu, ctx);
    for (double& x : p) x = std::max(x, 0.0);  // clip the sub-tol noise
    best = std::min(best, shannon_entropy_nats(p));
  }
  return best;
}

}  // namespace negprob
