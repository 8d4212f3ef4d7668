#include "histlab/diosi.hpp"

#include <algorithm>
#include <cmath>

namespace histlab {

Scenario make_scenario(std::string name, HistorySet histories, State state) {
  if (histories.dim() != state.dim())
    throw ValidationError("dimension mismatch between histories and state",
                          static_cast<double>(histories.dim() - state.dim()));
  return Scenario{std::move(name), std::move(histories), std::move(state)};
}

namespace {

std::shared_ptr<const Schedule> lift_schedules(const Schedule& a, const Schedule& b) {
  const Matrix id_a = identity(a.dim());
  const Matrix id_b = identity(b.dim());
  std::vector<double> times;
  std::vector<Unitary> evolutions;
  std::vector<ProjectorFamily> families;
  for (std::size_t k = 0; k < a.slots(); ++k) {
    times.push_back(a.times()[k]);
    evolutions.push_back(Unitary::from_matrix(tensor(a.evolutions()[k].matrix(), id_b)));
    std::vector<Matrix> mats;
    for (const auto& p : a.families()[k].members()) mats.push_back(tensor(p, id_b));
    families.push_back(validate_projector_family(std::move(mats), a.families()[k].labels()));
  }
  // B's slots follow A's; the operators commute so only the labels move.
  const double shift = b.times().front() <= a.times().back() ? a.times().back() - b.times().front() + 1.0 : 0.0;
  for (std::size_t k = 0; k < b.slots(); ++k) {
    times.push_back(b.times()[k] + shift);
    evolutions.push_back(Unitary::from_matrix(tensor(id_a, b.evolutions()[k].matrix())));
    std::vector<Matrix> mats;
    for (const auto& p : b.families()[k].members()) mats.push_back(tensor(id_a, p));
    families.push_back(validate_projector_family(std::move(mats), b.families()[k].labels()));
  }
  return std::make_shared<const Schedule>(std::move(times), std::move(evolutions), std::move(families));
}

HistoryLabel product_label(const HistoryLabel& a, const HistoryLabel& b) {
  std::vector<Chain> chains;
  for (const auto& ca : a.chains)
    for (const auto& cb : b.chains) {
      Chain c = ca;
      c.insert(c.end(), cb.begin(), cb.end());
      chains.push_back(std::move(c));
    }
  if (a.kind == HistoryLabel::Kind::chain && b.kind == HistoryLabel::Kind::chain)
    return HistoryLabel::of_chain(std::move(chains.front()));
  return HistoryLabel::of_sum(std::move(chains));
}

State product_state(const State& a, const State& b) {
  if (a.is_pure() && b.is_pure()) return make_state_pure(tensor(*a.vector(), *b.vector()));
  return make_state_mixed(tensor(a.rho(), b.rho()));
}

struct Entry {
  std::vector<std::size_t> indices;
  Complex value;
};

// The entry of df responsible for the condition's residual.
Entry offending_entry(const DecoherenceFunctional& df, Condition c) {
  const auto n = df.size();
  Entry best{{0, 0}, Complex(0.0)};
  double score = -1.0;
  switch (c) {
    case Condition::decoherence:
    case Condition::consistency:
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) continue;
          const Complex v = df.d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          const double s = c == Condition::decoherence ? std::abs(v) : std::abs(v.real());
          if (s > score) score = s, best = {{a, b}, v};
        }
      break;
    case Condition::partial_decoherence:
      for (std::size_t a = 0; a < n; ++a) {
        const Complex v = df.offdiagonal_row_sum(a);
        if (std::abs(v) > score) score = std::abs(v), best = {{a}, v};
      }
      break;
    case Condition::linear_positivity:
      for (std::size_t a = 0; a < n; ++a) {
        const Complex v = df.d.row(static_cast<Eigen::Index>(a)).sum();
        if (-v.real() > score) score = -v.real(), best = {{a}, v};
      }
      break;
  }
  return best;
}

std::string_view entry_name(Condition c) {
  switch (c) {
    case Condition::decoherence:
    case Condition::consistency: return "D";
    case Condition::partial_decoherence: return "offdiag_row_sum";
    case Condition::linear_positivity: return "row_sum";
  }
  return "?";
}

Witness composite_witness(Condition c, const DecoherenceFunctional& da, const DecoherenceFunctional& db,
                          const DecoherenceFunctional& dab) {
  const auto nb = db.size();
  const Entry e = offending_entry(dab, c);
  Witness w;
  const std::string name(entry_name(c));
  w.values.emplace_back(name + "_AB", e.value);
  if (e.indices.size() == 2) {
    const auto a = e.indices[0] / nb, b = e.indices[0] % nb, a2 = e.indices[1] / nb, b2 = e.indices[1] % nb;
    w.indices = {a, b, a2, b2};
    const Complex va = da.d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a2));
    const Complex vb = db.d(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b2));
    w.values.emplace_back("D_A", va);
    w.values.emplace_back("D_B", vb);
    w.note = "Re D_AB = Re D_A Re D_B - Im D_A Im D_B";
  } else {
    const auto a = e.indices[0] / nb, b = e.indices[0] % nb;
    w.indices = {a, b};
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    w.values.emplace_back("q_A", da.q(ia));
    w.values.emplace_back("q_B", db.q(ib));
    w.values.emplace_back("p_A p_B", Complex(da.p(ia) * db.p(ib)));
    w.values.emplace_back("q_A q_B", da.q(ia) * db.q(ib));
    w.note = "q_AB = q_A q_B";
  }
  return w;
}

Witness subsystem_witness(Condition c, std::size_t which, const DecoherenceFunctional& df) {
  const Entry e = offending_entry(df, c);
  Witness w;
  w.indices.push_back(which);
  w.indices.insert(w.indices.end(), e.indices.begin(), e.indices.end());
  w.values.emplace_back(std::string(entry_name(c)) + (which == 0 ? "_A" : "_B"), e.value);
  w.note = which == 0 ? "subsystem A" : "subsystem B";
  return w;
}

}  // namespace

double factorization_residual(const DecoherenceFunctional& a, const DecoherenceFunctional& b,
                              const DecoherenceFunctional& ab) {
  const auto na = static_cast<Eigen::Index>(a.size());
  const auto nb = static_cast<Eigen::Index>(b.size());
  if (ab.d.rows() != na * nb) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      for (Eigen::Index i2 = 0; i2 < na; ++i2)
        for (Eigen::Index j2 = 0; j2 < nb; ++j2)
          r = std::max(r, std::abs(ab.d(i * nb + j, i2 * nb + j2) - a.d(i, i2) * b.d(j, j2)));
  return r;
}

Scenario compose(const Scenario& a, const Scenario& b, double tol) {
  auto schedule = lift_schedules(a.schedule(), b.schedule());
  std::vector<ClassOperator> members;
  members.reserve(a.histories.size() * b.histories.size());
  for (const auto& ca : a.histories.members())
    for (const auto& cb : b.histories.members())
      members.push_back({tensor(ca.matrix, cb.matrix), product_label(ca.label, cb.label)});
  Scenario ab = make_scenario(a.name + "⊗" + b.name, HistorySet(std::move(members), std::move(schedule)),
                              product_state(a.state, b.state));

  const auto da = decoherence_functional(a.histories, a.state);
  const auto db = decoherence_functional(b.histories, b.state);
  const auto dab = decoherence_functional(ab.histories, ab.state);
  const double r = factorization_residual(da, db, dab);
  if (r > tol) throw InvariantError("composite decoherence functional does not factor", r);
  return ab;
}

std::string_view to_string(TestKind t) {
  switch (t) {
    case TestKind::forward_diosi: return "forward_diosi";
    case TestKind::reverse_diosi: return "reverse_diosi";
    case TestKind::robustness: return "robustness";
  }
  return "?";
}

TestVerdict forward_diosi_check(Condition condition, const Scenario& a, const Scenario& b, double tol) {
  const auto da = decoherence_functional(a.histories, a.state);
  const auto db = decoherence_functional(b.histories, b.state);
  for (const auto* df : {&da, &db}) {
    if (!classify(*df, tol).holds(condition))
      throw PreconditionError("precondition not met: " + std::string(to_string(condition)) +
                              " does not hold for subsystem " + (df == &da ? a.name : b.name));
  }
  const Scenario ab = compose(a, b);
  const auto dab = decoherence_functional(ab.histories, ab.state);
  const auto report = classify(dab, tol);

  TestVerdict v;
  v.test = TestKind::forward_diosi;
  v.condition = condition;
  v.passed = report.holds(condition);
  v.residual = report.residual(condition);
  if (!v.passed) v.witness = composite_witness(condition, da, db, dab);
  return v;
}

TestVerdict reverse_diosi_check(Condition condition, const Scenario& a, const Scenario& b, double tol,
                                ReverseOptions options) {
  const Scenario ab = compose(a, b);
  const auto dab = decoherence_functional(ab.histories, ab.state);
  if (!classify(dab, tol).holds(condition))
    throw PreconditionError("precondition not met: " + std::string(to_string(condition)) +
                            " does not hold for the composite " + ab.name);

  const auto da = decoherence_functional(a.histories, a.state);
  const auto db = decoherence_functional(b.histories, b.state);
  const auto ra = classify(da, tol);
  const auto rb = classify(db, tol);

  TestVerdict v;
  v.test = TestKind::reverse_diosi;
  v.condition = condition;
  v.passed = ra.holds(condition) && rb.holds(condition);
  v.residual = std::max(ra.residual(condition), rb.residual(condition));
  if (!v.passed) v.witness = ra.holds(condition) ? subsystem_witness(condition, 1, db) : subsystem_witness(condition, 0, da);

  if (condition == Condition::partial_decoherence) {
    v.homogeneous_subsystems = a.histories.all_homogeneous() && b.histories.all_homogeneous();
    const double sum_a = da.p.sum();
    const double sum_b = db.p.sum();
    v.probability_sums = {sum_a, sum_b};
    // q(α) Σ_α' p(α') = p(α), the form the composite condition forces.
    double r = 0.0;
    for (const auto* df : {&da, &db}) {
      const double total = df->p.sum();
      for (Eigen::Index i = 0; i < df->q.size(); ++i) r = std::max(r, std::abs(df->q(i) * total - df->p(i)));
    }
    v.normalized_identity_residual = r;
  }
  if (options.near_identical) {
    v.near_identical_residual = std::abs(da.p.sum() - db.p.sum());
    v.forced_normalization_residual = std::max(std::abs(da.p.sum() - 1.0), std::abs(db.p.sum() - 1.0));
  }
  return v;
}

RobustnessReport robustness_check(const Scenario& s, const PhasePerturbation& pert, double tol) {
  const HistorySet perturbed = phase_perturb(s.histories, pert);
  const auto before = decoherence_functional(s.histories, s.state);
  const auto after = decoherence_functional(perturbed, s.state);

  const auto lambda = perturbation_phases(s.histories, pert);
  double law = 0.0;
  for (Eigen::Index a = 0; a < before.d.rows(); ++a)
    for (Eigen::Index b = 0; b < before.d.cols(); ++b) {
      const Complex predicted = std::polar(1.0, lambda[a] - lambda[b]) * before.d(a, b);
      law = std::max(law, std::abs(after.d(a, b) - predicted));
    }
  if (law > kConstructionTol) throw InvariantError("phase transformation law violated", law);

  RobustnessReport out;
  out.law_residual = law;
  out.before = classify(before, tol);
  out.after = classify(after, tol);
  for (auto c : kAllConditions) {
    if (!out.before.holds(c)) continue;
    TestVerdict v;
    v.test = TestKind::robustness;
    v.condition = c;
    v.passed = out.after.holds(c);
    v.residual = out.after.residual(c);
    if (!v.passed) {
      Witness w = subsystem_witness(c, 0, after);
      w.indices.erase(w.indices.begin());
      w.values.front().first = std::string(entry_name(c)) + "_after";
      const Entry e = offending_entry(after, c);
      const auto i = static_cast<Eigen::Index>(e.indices[0]);
      const auto j = static_cast<Eigen::Index>(e.indices.size() > 1 ? e.indices[1] : e.indices[0]);
      if (e.indices.size() > 1)
        w.values.emplace_back("D_before", before.d(i, j));
      else
        w.values.emplace_back(std::string(entry_name(c)) + "_before",
                              c == Condition::partial_decoherence ? before.offdiagonal_row_sum(e.indices[0])
                                                                  : before.d.row(i).sum());
      w.note = "after perturbation";
      v.witness = std::move(w);
    }
    out.verdicts.push_back(std::move(v));
  }
  return out;
}

}  // namespace histlab
