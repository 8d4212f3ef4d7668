#include "histlab/history.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace histlab {

std::string chain_name(const Chain& c) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

HistoryLabel HistoryLabel::of_chain(Chain c) {
  HistoryLabel l;
  l.kind = Kind::chain;
  l.name = chain_name(c);
  l.chains.push_back(std::move(c));
  return l;
}

HistoryLabel HistoryLabel::of_sum(std::vector<Chain> chains) {
  if (chains.empty()) throw ValidationError("sum history has no chains", 0.0);
  std::sort(chains.begin(), chains.end());
  if (std::adjacent_find(chains.begin(), chains.end()) != chains.end())
    throw ValidationError("sum history has duplicate chains", 0.0);
  HistoryLabel l;
  l.kind = Kind::sum;
  for (std::size_t i = 0; i < chains.size(); ++i) l.name += (i ? "+" : "") + chain_name(chains[i]);
  l.chains = std::move(chains);
  return l;
}

std::optional<int> HistoryLabel::common_outcome(std::size_t slot) const {
  std::optional<int> out;
  for (const auto& c : chains) {
    if (slot >= c.size()) return std::nullopt;
    if (out && *out != c[slot]) return std::nullopt;
    out = c[slot];
  }
  return out;
}

HistorySet::HistorySet(std::vector<ClassOperator> members, std::shared_ptr<const Schedule> schedule)
    : members_(std::move(members)), schedule_(std::move(schedule)) {
  if (members_.empty()) throw ValidationError("history set is empty", 0.0);
  const auto d = members_.front().matrix.rows();
  Matrix sum = Matrix::Zero(d, d);
  Matrix gram = Matrix::Zero(d, d);
  for (const auto& c : members_) {
    if (c.matrix.rows() != d || c.matrix.cols() != d) throw ValidationError("dimension mismatch", 0.0);
    sum += c.matrix;
    gram += c.matrix.adjoint() * c.matrix;
  }
  sum_residual_ = max_abs(Matrix(sum - identity(static_cast<int>(d))));
  gram_residual_ = max_abs(Matrix(gram - identity(static_cast<int>(d))));
}

bool HistorySet::all_homogeneous() const {
  return std::all_of(members_.begin(), members_.end(), [](const ClassOperator& c) { return c.homogeneous(); });
}

bool HistorySet::is_fine_grained() const {
  if (!all_homogeneous()) return false;
  std::size_t total = 1;
  for (const auto& f : schedule_->families()) total *= f.size();
  if (members_.size() != total) return false;
  std::set<Chain> seen;
  for (const auto& c : members_) seen.insert(c.label.chains.front());
  return seen.size() == total;
}

std::optional<std::size_t> HistorySet::find(const HistoryLabel& label) const {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i].label == label) return i;
  return std::nullopt;
}

ClassOperator chain_class_operator(const Schedule& s, const Chain& outcomes) {
  if (outcomes.size() != s.slots()) throw ValidationError("chain length does not match slot count", 0.0);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k] < 0 || static_cast<std::size_t>(outcomes[k]) >= s.families()[k].size())
      throw ValidationError("outcome index out of range at slot " + std::to_string(k), outcomes[k]);
  }
  // Latest slot leftmost: accumulate left to right from t_n down to t_1.
  Matrix m = s.projector(s.slots() - 1, outcomes.back());
  for (std::size_t k = s.slots() - 1; k-- > 0;) m = m * s.projector(k, outcomes[k]);
  return {std::move(m), HistoryLabel::of_chain(outcomes)};
}

HistorySet fine_grained_set(std::shared_ptr<const Schedule> s) {
  std::vector<ClassOperator> members;
  Chain c(s->slots(), 0);
  while (true) {
    members.push_back(chain_class_operator(*s, c));
    // Odometer with the last slot varying fastest gives lexicographic order.
    std::size_t k = c.size();
    while (k > 0) {
      --k;
      if (static_cast<std::size_t>(++c[k]) < s->families()[k].size()) break;
      c[k] = 0;
      if (k == 0) return HistorySet(std::move(members), std::move(s));
    }
  }
}

HistorySet history_set_from_labels(std::shared_ptr<const Schedule> s, const std::vector<HistoryLabel>& labels,
                                   double tol) {
  std::vector<ClassOperator> members;
  std::set<Chain> seen;
  for (const auto& l : labels) {
    Matrix m = Matrix::Zero(s->dim(), s->dim());
    for (const auto& c : l.chains) {
      if (!seen.insert(c).second) throw ValidationError("chain " + chain_name(c) + " appears in two histories", 0.0);
      m += chain_class_operator(*s, c).matrix;
    }
    members.push_back({std::move(m), l});
  }
  HistorySet h(std::move(members), std::move(s));
  if (h.sum_residual() > tol) throw ValidationError("histories not exhaustive (sum of class operators ≠ 1)", h.sum_residual());
  return h;
}

HistorySet coarse_grain(const HistorySet& h, const std::vector<std::vector<std::size_t>>& partition) {
  std::vector<int> hits(h.size(), 0);
  for (const auto& g : partition) {
    if (g.empty()) throw ValidationError("empty group in partition", 0.0);
    for (auto i : g) {
      if (i >= h.size()) throw ValidationError("partition index out of range", static_cast<double>(i));
      ++hits[i];
    }
  }
  for (int n : hits) {
    if (n == 0) throw ValidationError("partition not exhaustive", 0.0);
    if (n > 1) throw ValidationError("partition groups overlap", 0.0);
  }
  std::vector<ClassOperator> members;
  for (const auto& g : partition) {
    if (g.size() == 1) {
      members.push_back(h[g.front()]);
      continue;
    }
    Matrix m = Matrix::Zero(h.dim(), h.dim());
    std::vector<Chain> chains;
    for (auto i : g) {
      m += h[i].matrix;
      chains.insert(chains.end(), h[i].label.chains.begin(), h[i].label.chains.end());
    }
    members.push_back({std::move(m), HistoryLabel::of_sum(std::move(chains))});
  }
  return HistorySet(std::move(members), h.schedule_ptr());
}

ClassOperator negation(const HistorySet& h, std::size_t index) {
  if (index >= h.size()) throw ValidationError("history not a member of the set", static_cast<double>(index));
  std::vector<Chain> rest;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i == index) continue;
    rest.insert(rest.end(), h[i].label.chains.begin(), h[i].label.chains.end());
  }
  Matrix m = identity(h.dim()) - h[index].matrix;
  if (rest.empty()) {
    HistoryLabel empty;
    empty.kind = HistoryLabel::Kind::sum;
    empty.name = "∅";
    return {std::move(m), std::move(empty)};
  }
  return {std::move(m), HistoryLabel::of_sum(std::move(rest))};
}

ClassOperator negation(const ClassOperator& c, const HistorySet& h) {
  const auto i = h.find(c.label);
  if (!i) throw ValidationError("history not a member of the set", 0.0);
  return negation(h, *i);
}

PhasePerturbation PhasePerturbation::at_slot(std::size_t slot, std::vector<double> phases, Unitary u) {
  return {Indexing::slot_outcome, slot, std::move(phases), std::move(u)};
}

PhasePerturbation PhasePerturbation::per_history(std::vector<double> phases, Unitary u) {
  return {Indexing::history, 0, std::move(phases), std::move(u)};
}

std::vector<double> perturbation_phases(const HistorySet& h, const PhasePerturbation& pert) {
  if (pert.indexing == PhasePerturbation::Indexing::history) {
    if (pert.phases.size() != h.size())
      throw ValidationError("phase count does not match history count", static_cast<double>(pert.phases.size()));
    return pert.phases;
  }
  const Schedule& s = h.schedule();
  if (pert.slot >= s.slots()) throw ValidationError("perturbation slot out of range", static_cast<double>(pert.slot));
  if (pert.phases.size() != s.families()[pert.slot].size())
    throw ValidationError("phase count does not match family size at slot", static_cast<double>(pert.phases.size()));
  std::vector<double> out;
  for (const auto& c : h.members()) {
    const auto outcome = c.label.common_outcome(pert.slot);
    if (!outcome) throw ValidationError("phase-ambiguous inhomogeneous history " + c.label.name, 0.0);
    out.push_back(pert.phases[*outcome]);
  }
  return out;
}

HistorySet phase_perturb(const HistorySet& h, const PhasePerturbation& pert) {
  if (pert.u.dim() != h.dim()) throw ValidationError("dimension mismatch", 0.0);
  const auto lambda = perturbation_phases(h, pert);
  const Matrix u_dag = pert.u.matrix().adjoint();
  std::vector<ClassOperator> members;
  for (std::size_t a = 0; a < h.size(); ++a)
    members.push_back({std::polar(1.0, lambda[a]) * (u_dag * h[a].matrix), h[a].label});
  return HistorySet(std::move(members), h.schedule_ptr());
}

}  // namespace histlab
