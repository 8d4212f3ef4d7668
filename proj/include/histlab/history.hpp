#pragma once

// Class operators for homogeneous (chain) and inhomogeneous (sum) histories,
// exhaustive history sets, coarse graining, negation and the single-slot
// phase perturbation.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "histlab/hilbert.hpp"

namespace histlab {

/// One outcome index per slot, earliest slot first.
using Chain = std::vector<int>;

std::string chain_name(const Chain& c);

struct HistoryLabel {
  enum class Kind { chain, sum };

  Kind kind = Kind::chain;
  std::vector<Chain> chains;
  std::string name;

  static HistoryLabel of_chain(Chain c);
  /// Chains are sorted; a singleton still yields a sum label.
  static HistoryLabel of_sum(std::vector<Chain> chains);

  /// Outcome at `slot` shared by every chain, if there is one.
  std::optional<int> common_outcome(std::size_t slot) const;
  bool operator==(const HistoryLabel& o) const { return kind == o.kind && chains == o.chains; }
};

struct ClassOperator {
  Matrix matrix;
  HistoryLabel label;

  bool homogeneous() const { return label.kind == HistoryLabel::Kind::chain; }
};

class HistorySet {
 public:
  HistorySet(std::vector<ClassOperator> members, std::shared_ptr<const Schedule> schedule);

  const std::vector<ClassOperator>& members() const { return members_; }
  const ClassOperator& operator[](std::size_t i) const { return members_[i]; }
  std::size_t size() const { return members_.size(); }
  int dim() const { return static_cast<int>(members_.front().matrix.rows()); }
  const Schedule& schedule() const { return *schedule_; }
  const std::shared_ptr<const Schedule>& schedule_ptr() const { return schedule_; }

  bool all_homogeneous() const;
  /// Every chain of the schedule appears exactly once as a homogeneous member.
  bool is_fine_grained() const;
  /// ‖Σ C_α − 1‖∞.
  double sum_residual() const { return sum_residual_; }
  /// ‖Σ C_α† C_α − 1‖∞; only guaranteed small for fine-grained sets.
  double gram_residual() const { return gram_residual_; }
  std::optional<std::size_t> find(const HistoryLabel& label) const;

 private:
  std::vector<ClassOperator> members_;
  std::shared_ptr<const Schedule> schedule_;
  double sum_residual_ = 0.0;
  double gram_residual_ = 0.0;
};

/// P_{a_n}(t_n) ··· P_{a_1}(t_1), latest time leftmost.
ClassOperator chain_class_operator(const Schedule& s, const Chain& outcomes);

/// All chains in lexicographic outcome order (zero chains included).
HistorySet fine_grained_set(std::shared_ptr<const Schedule> s);

/// Builds members from explicit labels and validates exclusivity and Σ C = 1.
HistorySet history_set_from_labels(std::shared_ptr<const Schedule> s, const std::vector<HistoryLabel>& labels,
                                   double tol = kConstructionTol);

/// Each group of member indices becomes one summed member. Singleton groups
/// keep their label.
HistorySet coarse_grain(const HistorySet& h, const std::vector<std::vector<std::size_t>>& partition);

/// 1 − C, labelled by the complement's chains.
ClassOperator negation(const ClassOperator& c, const HistorySet& h);
ClassOperator negation(const HistorySet& h, std::size_t index);

struct PhasePerturbation {
  enum class Indexing { slot_outcome, history };

  Indexing indexing = Indexing::slot_outcome;
  std::size_t slot = 0;
  /// Radians; one per outcome of the slot's family, or one per history.
  std::vector<double> phases;
  Unitary u;

  static PhasePerturbation at_slot(std::size_t slot, std::vector<double> phases, Unitary u);
  static PhasePerturbation per_history(std::vector<double> phases, Unitary u);
};

/// λ for each member. Throws for sums that mix slot-k outcomes.
std::vector<double> perturbation_phases(const HistorySet& h, const PhasePerturbation& pert);

/// C_α -> e^{iλ_α} U_k† C_α. The result is generally not exhaustive; check
/// sum_residual().
HistorySet phase_perturb(const HistorySet& h, const PhasePerturbation& pert);

}  // namespace histlab
