#include "histlab/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace histlab {

ParseError::ParseError(const std::string& where, const std::string& what)
    : std::runtime_error(where + ": " + what), where_(where) {}

namespace {

const Json& require(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + "." + key, "missing field");
  return *it;
}

template <class T>
T get_as(const Json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(field, e.what());
  }
}

std::vector<std::vector<int>> int_groups(const Json& j, const std::string& field) {
  return get_as<std::vector<std::vector<int>>>(j, field);
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(field, "expected a complex number [re, im]");
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, "expected a non-empty array of rows");
  const auto rows = j.size();
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError(field, "expected a non-empty array of rows");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError(field + "[" + std::to_string(i) + "]", "ragged row");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, "expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

std::string_view to_string(Check c) {
  switch (c) {
    case Check::classify: return "classify";
    case Check::diosi_forward: return "diosi_forward";
    case Check::diosi_reverse: return "diosi_reverse";
    case Check::robustness: return "robustness";
    case Check::records: return "records";
  }
  return "?";
}

Check check_from_string(std::string_view s) {
  for (auto c : {Check::classify, Check::diosi_forward, Check::diosi_reverse, Check::robustness, Check::records})
    if (to_string(c) == s) return c;
  throw ParseError("checks", "unknown check '" + std::string(s) + "'");
}

namespace {

void check_square(const Matrix& m, int d, const std::string& field) {
  if (m.rows() != d || m.cols() != d)
    throw ValidationError("dimension mismatch in " + field + " (expected " + std::to_string(d) + ")",
                          static_cast<double>(m.rows()));
}

State state_from_json(const Json& j, int d) {
  const std::string ctx = "state";
  if (!j.is_object()) throw ParseError(ctx, "expected an object with 'vector' or 'density_matrix'");
  if (j.contains("vector")) {
    const Vector v = vector_from_json(j["vector"], "state.vector");
    if (v.size() != d) throw ValidationError("dimension mismatch in state.vector", static_cast<double>(v.size()));
    return make_state_pure(v);
  }
  if (j.contains("density_matrix")) {
    const Matrix m = matrix_from_json(j["density_matrix"], "state.density_matrix");
    check_square(m, d, "state.density_matrix");
    return make_state_mixed(m);
  }
  throw ParseError(ctx, "expected 'vector' or 'density_matrix'");
}

Json state_to_json(const State& s) {
  if (s.is_pure()) return {{"vector", to_json(*s.vector())}};
  return {{"density_matrix", to_json(s.rho())}};
}

ProjectorFamily family_from_json(const Json& j, int d, const std::string& ctx) {
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = get_as<std::vector<std::string>>(j["labels"], ctx + ".labels");
  if (j.contains("projectors")) {
    const Json& arr = j["projectors"];
    if (!arr.is_array()) throw ParseError(ctx + ".projectors", "expected an array of matrices");
    std::vector<Matrix> mats;
    for (std::size_t a = 0; a < arr.size(); ++a) {
      const std::string f = ctx + ".projectors[" + std::to_string(a) + "]";
      mats.push_back(matrix_from_json(arr[a], f));
      check_square(mats.back(), d, f);
    }
    return validate_projector_family(std::move(mats), std::move(labels));
  }
  if (j.contains("basis")) {
    const Matrix basis = matrix_from_json(j["basis"], ctx + ".basis");
    check_square(basis, d, ctx + ".basis");
    const auto groups = int_groups(require(j, "groups", ctx), ctx + ".groups");
    auto fam = family_from_basis(basis, groups);
    if (labels.empty()) return fam;
    return validate_projector_family(fam.members(), std::move(labels));
  }
  throw ParseError(ctx, "expected 'projectors' or 'basis' + 'groups'");
}

std::shared_ptr<const Schedule> schedule_from_json(const Json& j, const Json& families_json, int d) {
  const auto times = get_as<std::vector<double>>(require(j, "times", "schedule"), "schedule.times");
  std::vector<Unitary> evolutions;
  if (j.contains("unitaries")) {
    const Json& arr = j["unitaries"];
    if (!arr.is_array()) throw ParseError("schedule.unitaries", "expected an array of matrices");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string f = "schedule.unitaries[" + std::to_string(k) + "]";
      Matrix u = matrix_from_json(arr[k], f);
      check_square(u, d, f);
      evolutions.push_back(Unitary::from_matrix(std::move(u)));
    }
  } else if (j.contains("hamiltonian")) {
    const Matrix h = matrix_from_json(j["hamiltonian"], "schedule.hamiltonian");
    check_square(h, d, "schedule.hamiltonian");
    for (double t : times) evolutions.push_back(Unitary::from_hamiltonian(h, t));
  } else {
    throw ParseError("schedule", "expected 'unitaries' or 'hamiltonian'");
  }
  if (!families_json.is_array()) throw ParseError("families", "expected an array (one family per slot)");
  std::vector<ProjectorFamily> families;
  for (std::size_t k = 0; k < families_json.size(); ++k)
    families.push_back(family_from_json(families_json[k], d, "families[" + std::to_string(k) + "]"));
  return std::make_shared<const Schedule>(times, std::move(evolutions), std::move(families));
}

HistorySet histories_from_json(const Json& j, std::shared_ptr<const Schedule> schedule) {
  if (j.is_string()) {
    if (j.get<std::string>() != "fine_grained") throw ParseError("histories", "expected \"fine_grained\" or a list");
    return fine_grained_set(std::move(schedule));
  }
  if (!j.is_array() || j.empty()) throw ParseError("histories", "expected \"fine_grained\" or a non-empty list");
  std::vector<HistoryLabel> labels;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = "histories[" + std::to_string(i) + "]";
    const Json& e = j[i];
    if (!e.is_array() || e.empty()) throw ParseError(f, "expected an outcome tuple or a list of tuples");
    if (e[0].is_array())
      labels.push_back(HistoryLabel::of_sum(get_as<std::vector<Chain>>(e, f)));
    else
      labels.push_back(HistoryLabel::of_chain(get_as<Chain>(e, f)));
  }
  return history_set_from_labels(std::move(schedule), labels);
}

Json histories_to_json(const HistorySet& h) {
  Json out = Json::array();
  for (const auto& c : h.members()) {
    if (c.homogeneous())
      out.push_back(c.label.chains.front());
    else
      out.push_back(c.label.chains);
  }
  return out;
}

PhasePerturbation perturbation_from_json(const Json& j, int d) {
  Unitary u = Unitary::identity(d);
  if (j.contains("unitary")) {
    Matrix m = matrix_from_json(j["unitary"], "perturbation.unitary");
    check_square(m, d, "perturbation.unitary");
    u = Unitary::from_matrix(std::move(m));
  }
  if (j.contains("history_phases"))
    return PhasePerturbation::per_history(get_as<std::vector<double>>(j["history_phases"], "perturbation.history_phases"),
                                          std::move(u));
  return PhasePerturbation::at_slot(get_as<std::size_t>(require(j, "slot", "perturbation"), "perturbation.slot"),
                                    get_as<std::vector<double>>(require(j, "phases", "perturbation"), "perturbation.phases"),
                                    std::move(u));
}

void check_version(const Json& j, const std::string& ctx) {
  if (!j.contains("format_version")) return;
  const int v = get_as<int>(j["format_version"], ctx + ".format_version");
  if (v != kFormatVersion) throw ParseError(ctx + ".format_version", "unsupported version " + std::to_string(v));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

Json perturbation_to_json(const PhasePerturbation& p) {
  Json j;
  if (p.indexing == PhasePerturbation::Indexing::history) {
    j["history_phases"] = p.phases;
  } else {
    j["slot"] = p.slot;
    j["phases"] = p.phases;
  }
  j["unitary"] = to_json(p.u.matrix());
  return j;
}

ScenarioFile scenario_file_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("scenario", "expected an object");
  check_version(j, "scenario");
  const int d = get_as<int>(require(j, "dimension", "scenario"), "dimension");
  HilbertDim{d};
  State state = state_from_json(require(j, "state", "scenario"), d);
  auto schedule = schedule_from_json(require(j, "schedule", "scenario"), require(j, "families", "scenario"), d);
  HistorySet histories = j.contains("histories") ? histories_from_json(j["histories"], schedule) : fine_grained_set(schedule);
  const std::string name = j.contains("name") ? get_as<std::string>(j["name"], "name") : std::string("scenario");

  ScenarioFile f{make_scenario(name, std::move(histories), std::move(state)), {}, std::nullopt, std::nullopt,
                 std::nullopt, {}, nullptr, false, Json()};
  if (j.contains("checks")) {
    for (const auto& c : get_as<std::vector<std::string>>(j["checks"], "checks")) {
      const Check k = check_from_string(c);
      if (std::find(f.checks.begin(), f.checks.end(), k) != f.checks.end())
        throw ParseError("checks", "duplicate check '" + c + "'");
      f.checks.push_back(k);
    }
  } else {
    f.checks = {Check::classify};
  }
  if (j.contains("perturbation")) f.perturbation = perturbation_from_json(j["perturbation"], d);
  if (j.contains("tolerance")) f.tolerance = get_as<double>(j["tolerance"], "tolerance");
  if (j.contains("seed")) f.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("conditions"))
    for (const auto& c : get_as<std::vector<std::string>>(j["conditions"], "conditions"))
      f.conditions.push_back(condition_from_string(c));
  if (j.contains("near_identical")) f.near_identical = get_as<bool>(j["near_identical"], "near_identical");
  if (j.contains("partner")) {
    const Json& p = j["partner"];
    if (p.is_string())
      f.partner = std::make_shared<const ScenarioFile>(load_scenario_file(base_dir / p.get<std::string>()));
    else
      f.partner = std::make_shared<const ScenarioFile>(scenario_file_from_json(p, base_dir));
  }
  if (j.contains("recorded")) f.recorded = j["recorded"];
  return f;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(source + ":" + std::to_string(line), e.what());
  }
}

ScenarioFile load_scenario_file(const std::filesystem::path& path) {
  return scenario_file_from_json(parse_json_text(read_file(path), path.string()), path.parent_path());
}

Json scenario_to_json(const Scenario& s) {
  const Schedule& sch = s.schedule();
  Json unitaries = Json::array();
  Json families = Json::array();
  for (std::size_t k = 0; k < sch.slots(); ++k) {
    unitaries.push_back(to_json(sch.evolutions()[k].matrix()));
    Json mats = Json::array();
    for (const auto& p : sch.families()[k].members()) mats.push_back(to_json(p));
    families.push_back({{"projectors", std::move(mats)}, {"labels", sch.families()[k].labels()}});
  }
  return {{"format_version", kFormatVersion},
          {"name", s.name},
          {"dimension", s.dim()},
          {"state", state_to_json(s.state)},
          {"schedule", {{"times", sch.times()}, {"unitaries", std::move(unitaries)}}},
          {"families", std::move(families)},
          {"histories", histories_to_json(s.histories)}};
}

std::string_view to_string(SearchMode m) {
  switch (m) {
    case SearchMode::venn: return "venn";
    case SearchMode::superprob: return "superprob";
    case SearchMode::linear_positivity: return "linear_positivity";
  }
  return "?";
}

SearchConfig search_config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("config", "expected an object");
  check_version(j, "config");
  SearchConfig c;
  auto& s = c.sample;
  s.dim = get_as<int>(require(j, "dimension", "config"), "dimension");
  s.slots = get_as<int>(require(j, "slots", "config"), "slots");
  // No default seed: every run must be reproducible.
  s.seed = get_as<std::uint64_t>(require(j, "seed", "config"), "seed");
  s.trials = get_as<std::size_t>(require(j, "trials", "config"), "trials");
  if (j.contains("vary_slots")) s.vary_slots = get_as<bool>(j["vary_slots"], "vary_slots");
  if (j.contains("family_sizes")) s.family_sizes = get_as<std::vector<int>>(j["family_sizes"], "family_sizes");
  try {
    if (j.contains("state_kind")) s.state_kind = state_kind_from_string(get_as<std::string>(j["state_kind"], "state_kind"));
    if (j.contains("coarse_graining"))
      s.coarse_graining = coarse_graining_from_string(get_as<std::string>(j["coarse_graining"], "coarse_graining"));
  } catch (const ValidationError& e) {
    throw ParseError("config", e.what());
  }
  if (j.contains("state")) s.state = state_from_json(j["state"], s.dim);
  if (j.contains("tolerance")) s.tolerance = get_as<double>(j["tolerance"], "tolerance");
  if (j.contains("margin")) c.margin = get_as<double>(j["margin"], "margin");
  if (j.contains("mode")) {
    const auto m = get_as<std::string>(j["mode"], "mode");
    bool known = false;
    for (auto mode : {SearchMode::venn, SearchMode::superprob, SearchMode::linear_positivity})
      if (to_string(mode) == m) c.mode = mode, known = true;
    if (!known) throw ParseError("config.mode", "unknown mode '" + m + "'");
  }
  s.validate();
  return c;
}

SearchConfig load_search_config(const std::filesystem::path& path) {
  return search_config_from_json(parse_json_text(read_file(path), path.string()));
}

Json search_config_to_json(const SearchConfig& c) {
  const auto& s = c.sample;
  Json j = {{"format_version", kFormatVersion},
            {"mode", to_string(c.mode)},
            {"dimension", s.dim},
            {"slots", s.slots},
            {"vary_slots", s.vary_slots},
            {"family_sizes", s.block_sizes()},
            {"state_kind", to_string(s.state_kind)},
            {"coarse_graining", to_string(s.coarse_graining)},
            {"trials", s.trials},
            {"seed", s.seed},
            {"tolerance", s.tolerance},
            {"margin", c.margin}};
  if (s.state) j["state"] = state_to_json(*s.state);
  return j;
}

Json to_json(const DecoherenceFunctional& df, const HistorySet& h) {
  Json labels = Json::array();
  for (const auto& c : h.members()) labels.push_back(c.label.name);
  return {{"labels", std::move(labels)}, {"d", to_json(df.d)}, {"p", to_json(df.p)}, {"q", to_json(df.q)}};
}

Json to_json(const ConditionReport& r) {
  Json flags = {{"decoherent", r.decoherent},
                {"partially_decoherent", r.partially_decoherent},
                {"consistent", r.consistent},
                {"linearly_positive", r.linearly_positive}};
  Json residuals = Json::object();
  Json counts = Json::object();
  for (auto c : kAllConditions) {
    residuals[std::string(to_string(c))] = r.residual(c);
    counts[std::string(to_string(c))] = r.count(c);
  }
  return {{"flags", std::move(flags)},       {"residuals", std::move(residuals)},
          {"counts", std::move(counts)},     {"venn_region", r.venn_region},
          {"tolerance", r.tolerance},        {"min_real_row_sum", r.min_real_row_sum}};
}

Json to_json(const Witness& w) {
  Json values = Json::array();
  for (const auto& [name, z] : w.values) values.push_back({{"name", name}, {"value", to_json(z)}});
  return {{"indices", w.indices}, {"values", std::move(values)}, {"note", w.note}};
}

Json to_json(const TestVerdict& v) {
  Json j = {{"test", to_string(v.test)},
            {"condition", to_string(v.condition)},
            {"passed", v.passed},
            {"residual", v.residual},
            {"witness", v.witness ? to_json(*v.witness) : Json(nullptr)}};
  if (v.homogeneous_subsystems) j["homogeneous_subsystems"] = *v.homogeneous_subsystems;
  if (v.normalized_identity_residual) j["normalized_identity_residual"] = *v.normalized_identity_residual;
  if (v.probability_sums) j["probability_sums"] = {v.probability_sums->first, v.probability_sums->second};
  if (v.near_identical_residual) j["near_identical_residual"] = *v.near_identical_residual;
  if (v.forced_normalization_residual) j["forced_normalization_residual"] = *v.forced_normalization_residual;
  return j;
}

Json to_json(const RecordSet& r) {
  Json projectors = Json::array();
  for (std::size_t g = 0; g < r.projectors.size(); ++g)
    projectors.push_back({{"record", g}, {"matrix", to_json(r.projectors[g])}});
  Json mapping = Json::array();
  for (const auto& m : r.mapping) mapping.push_back(m ? Json(*m) : Json(nullptr));
  return {{"projectors", std::move(projectors)},
          {"remainder", to_json(r.remainder)},
          {"mapping", std::move(mapping)},
          {"record_equation_residual", r.record_equation_residual},
          {"probability_residual", r.probability_residual},
          {"completeness_residual", r.completeness_residual}};
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace histlab
