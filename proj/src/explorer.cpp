#include "histlab/explorer.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace histlab {

std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::pure_random: return "pure_random";
    case StateKind::mixed_random: return "mixed_random";
    case StateKind::supplied: return "supplied";
  }
  return "?";
}

std::string_view to_string(CoarseGraining c) {
  switch (c) {
    case CoarseGraining::none: return "none";
    case CoarseGraining::random_partition: return "random_partition";
    case CoarseGraining::appendix_pairing: return "appendix_pairing";
  }
  return "?";
}

StateKind state_kind_from_string(std::string_view s) {
  for (auto k : {StateKind::pure_random, StateKind::mixed_random, StateKind::supplied})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown state_kind '" + std::string(s) + "'", 0.0);
}

CoarseGraining coarse_graining_from_string(std::string_view s) {
  for (auto c : {CoarseGraining::none, CoarseGraining::random_partition, CoarseGraining::appendix_pairing})
    if (to_string(c) == s) return c;
  throw ValidationError("unknown coarse_graining '" + std::string(s) + "'", 0.0);
}

std::vector<int> SampleConfig::block_sizes() const {
  return family_sizes.empty() ? std::vector<int>(static_cast<std::size_t>(dim), 1) : family_sizes;
}

void SampleConfig::validate() const {
  HilbertDim{dim};
  if (slots < 1) throw ValidationError("slots must be >= 1", slots);
  if (trials < 1) throw ValidationError("trials must be >= 1", 0.0);
  const auto sizes = block_sizes();
  for (int s : sizes)
    if (s < 1) throw ValidationError("family sizes must be >= 1", s);
  const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
  if (total != dim) throw ValidationError("family sizes must sum to the dimension", total - dim);
  if (state_kind == StateKind::supplied) {
    if (!state) throw ValidationError("state_kind supplied requires a state", 0.0);
    if (state->dim() != dim) throw ValidationError("supplied state has wrong dimension", state->dim() - dim);
  }
  if (coarse_graining == CoarseGraining::appendix_pairing && (sizes.size() != 2 || slots != 2))
    throw ValidationError("appendix_pairing needs two slots and binary families", 0.0);
}

Rng trial_rng(std::uint64_t seed, std::size_t trial) {
  const auto t = static_cast<std::uint64_t>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return Rng(seq);
}

std::vector<std::vector<std::size_t>> random_set_partition(std::size_t n, Rng& rng) {
  if (n == 0) return {};
  // ways[i][k]: completions of a restricted growth string from position i
  // when k blocks are already open.
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(n + 2, 0.0));
  for (std::size_t k = 0; k <= n + 1; ++k) ways[n][k] = 1.0;
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t k = 0; k <= i + 1 && k <= n; ++k)
      ways[i][k] = static_cast<double>(k) * ways[i + 1][k] + ways[i + 1][k + 1];

  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = blocks.size();
      const double r = u(rng) * ways[i][k];
      const double per_block = ways[i + 1][k];
      const auto j = static_cast<std::size_t>(r / per_block);
      if (j < k)
        blocks[j].push_back(i);
      else
        blocks.push_back({i});
    }
    if (n == 1 || blocks.size() < n) return blocks;
  }
}

namespace {

std::vector<std::vector<int>> contiguous_groups(const std::vector<int>& sizes) {
  std::vector<std::vector<int>> groups;
  int next = 0;
  for (int s : sizes) {
    std::vector<int> g;
    for (int i = 0; i < s; ++i) g.push_back(next++);
    groups.push_back(std::move(g));
  }
  return groups;
}

// Members (0,0)+(1,1) and (0,1)+(1,0) of a lexicographic 2x2 fine-grained set.
const std::vector<std::vector<std::size_t>> kAppendixPairing = {{0, 3}, {1, 2}};

}  // namespace

Scenario sample_scenario(const SampleConfig& cfg, std::size_t trial) {
  cfg.validate();
  Rng rng = trial_rng(cfg.seed, trial);
  const HilbertDim d(cfg.dim);
  int slots = cfg.slots;
  if (cfg.vary_slots) slots = std::uniform_int_distribution<int>(1, cfg.slots)(rng);

  const auto family = family_from_basis(haar_random_unitary(d, rng).matrix(), contiguous_groups(cfg.block_sizes()));
  std::vector<double> times;
  std::vector<Unitary> evolutions;
  std::vector<ProjectorFamily> families;
  for (int k = 0; k < slots; ++k) {
    times.push_back(static_cast<double>(k));
    evolutions.push_back(haar_random_unitary(d, rng));
    families.push_back(family);
  }
  auto schedule = std::make_shared<const Schedule>(std::move(times), std::move(evolutions), std::move(families));

  State state = [&] {
    switch (cfg.state_kind) {
      case StateKind::pure_random: return random_pure_state(d, rng);
      case StateKind::mixed_random: return random_mixed_state(d, rng);
      case StateKind::supplied: break;
    }
    return *cfg.state;
  }();

  HistorySet h = fine_grained_set(schedule);
  if (cfg.coarse_graining == CoarseGraining::random_partition && h.size() > 1)
    h = coarse_grain(h, random_set_partition(h.size(), rng));
  else if (cfg.coarse_graining == CoarseGraining::appendix_pairing && slots == 2)
    h = coarse_grain(h, kAppendixPairing);
  return make_scenario("trial-" + std::to_string(trial), std::move(h), std::move(state));
}

const RegionEntry& RegionCatalog::region(std::string_view name) const {
  for (std::size_t i = 0; i < kVennRegions.size(); ++i)
    if (kVennRegions[i] == name) return regions[i];
  throw ValidationError("unknown region '" + std::string(name) + "'", 0.0);
}

RegionCatalog venn_search(const SampleConfig& cfg) {
  cfg.validate();
  RegionCatalog cat;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Scenario s = sample_scenario(cfg, t);
    const auto report = classify(decoherence_functional(s.histories, s.state), cfg.tolerance);
    std::size_t idx = 0;
    while (kVennRegions[idx] != report.venn_region) ++idx;
    auto& e = cat.regions[idx];
    ++e.count;
    e.min_margin = std::min(e.min_margin, report.margin());
    if (!e.first_trial) {
      e.first_trial = t;
      e.witness.emplace(std::move(s));
    }
    ++cat.trials;
  }
  return cat;
}

SuperprobResult superprob_search(const SampleConfig& cfg) {
  cfg.validate();
  if (cfg.coarse_graining == CoarseGraining::none)
    throw PreconditionError("superprob search needs coarse graining: homogeneous probabilities never exceed 1");
  SuperprobResult out;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    ++out.trials_run;
    Scenario s = sample_scenario(cfg, t);
    const auto df = decoherence_functional(s.histories, s.state);
    for (std::size_t a = 0; a < s.histories.size(); ++a) {
      const double p = df.p(static_cast<Eigen::Index>(a));
      if (!s.histories[a].homogeneous() && p > 1.0 + cfg.tolerance) {
        out.trial = t;
        out.history = a;
        out.probability = p;
        out.witness.emplace(std::move(s));
        return out;
      }
    }
  }
  return out;
}

std::optional<LinearPositivityWitness> linear_positivity_search(const SampleConfig& cfg, double margin) {
  cfg.validate();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Scenario s = sample_scenario(cfg, t);
    const auto df = decoherence_functional(s.histories, s.state);
    if (!classify(df, cfg.tolerance).linearly_positive) continue;
    for (Eigen::Index a = 0; a < df.q.size(); ++a) {
      const Complex q = df.q(a);
      if ((q * q).real() < -margin)
        return LinearPositivityWitness{std::move(s), t, static_cast<std::size_t>(a), q};
    }
  }
  return std::nullopt;
}

AppendixScenario appendix_scenario(const Matrix& p, const Unitary& u12, const State& s) {
  const int d = static_cast<int>(p.rows());
  const auto family = validate_projector_family({p, identity(d) - p}, {"P", "P̄"});
  auto schedule = std::make_shared<const Schedule>(std::vector<double>{0.0, 1.0},
                                                   std::vector<Unitary>{Unitary::identity(d), u12},
                                                   std::vector<ProjectorFamily>{family, family});
  HistorySet h = coarse_grain(fine_grained_set(schedule), kAppendixPairing);
  const Matrix& c = h[0].matrix;
  const Matrix& cbar = h[1].matrix;
  const double cert = max_abs(Matrix(cbar.adjoint() * c + c.adjoint() * cbar));
  return {make_scenario("appendix", std::move(h), s), cert};
}

AppendixScenario random_appendix_scenario(HilbertDim d, Rng& rng, StateKind kind) {
  if (kind == StateKind::supplied) throw ValidationError("random appendix instances draw their own state", 0.0);
  const Matrix basis = haar_random_unitary(d, rng).matrix();
  const int rank = std::uniform_int_distribution<int>(1, std::max(1, d - 1))(rng);
  const Matrix p = basis.leftCols(rank) * basis.leftCols(rank).adjoint();
  const Unitary u12 = haar_random_unitary(d, rng);
  const State s = kind == StateKind::mixed_random ? random_mixed_state(d, rng) : random_pure_state(d, rng);
  return appendix_scenario(p, u12, s);
}

Scenario inhomogeneous_kernel_scenario(double weight) {
  constexpr double kMax = (3.0 + 2.23606797749979) / 8.0;
  if (!(weight >= 0.25 && weight <= kMax)) throw ValidationError("kernel weight outside [1/4, (3+√5)/8]", weight);
  // q(K) = cos φ cos θ cos(θ−φ) = 1/2 and p(K) = cos²θ cos²φ = weight.
  const double root = std::sqrt(weight);
  const double delta = std::acos(std::min(1.0, 1.0 / (2.0 * root)));
  const double sigma = std::acos(std::clamp(2.0 * root - std::cos(delta), -1.0, 1.0));
  const double theta = (sigma + delta) / 2.0;
  const double phi = (sigma - delta) / 2.0;

  Matrix rot(2, 2);
  rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  const auto family = family_from_basis(identity(2), {{0}, {1}});
  auto schedule = std::make_shared<const Schedule>(
      std::vector<double>{0.0, 1.0}, std::vector<Unitary>{Unitary::identity(2), Unitary::from_matrix(rot)},
      std::vector<ProjectorFamily>{family, family});
  Vector psi(2);
  psi << std::cos(phi), std::sin(phi);
  HistorySet h = coarse_grain(fine_grained_set(schedule), {{0}, {1, 2, 3}});
  return make_scenario("kernel-" + std::to_string(weight), std::move(h), make_state_pure(psi));
}

std::pair<Scenario, Scenario> inhomogeneous_pd_pair(double weight) {
  return {inhomogeneous_kernel_scenario(weight), inhomogeneous_kernel_scenario(1.0 / (4.0 * weight))};
}

std::vector<PhaseSweepPoint> phase_sweep(const Scenario& s, std::size_t steps, double tol) {
  std::vector<PhaseSweepPoint> out;
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<double> phases(s.histories.size(), 0.0);
    phases[0] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(steps);
    const auto pert = PhasePerturbation::per_history(phases, Unitary::identity(s.dim()));
    const auto report = classify(decoherence_functional(phase_perturb(s.histories, pert), s.state), tol);
    out.push_back({phases[0], report.consistent, report.residual(Condition::consistency)});
  }
  return out;
}

}  // namespace histlab
