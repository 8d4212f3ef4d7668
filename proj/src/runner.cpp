#include "histlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace histlab {

namespace {

// Pads to a display width, counting UTF-8 code points rather than bytes.
std::string padded(std::string_view s, std::size_t width) {
  const auto cols = static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  return std::string(s) + std::string(width > cols ? width - cols : 0, ' ');
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string fmt(Complex z) {
  std::ostringstream os;
  os << std::setprecision(6) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string describe(const ConditionReport& r) {
  std::ostringstream os;
  os << "  region: " << r.venn_region << "  (tolerance " << fmt(r.tolerance) << ")\n";
  for (auto c : kAllConditions)
    os << "  " << std::left << std::setw(20) << to_string(c) << (r.holds(c) ? "yes" : "no ") << "  residual "
       << fmt(r.residual(c)) << "  (" << r.count(c) << " conditions)\n";
  return os.str();
}

std::string describe(const TestVerdict& v) {
  std::ostringstream os;
  os << "  " << to_string(v.test) << " / " << to_string(v.condition) << ": " << (v.passed ? "PASS" : "FAIL")
     << "  residual " << fmt(v.residual) << "\n";
  if (v.witness) {
    os << "    witness (";
    for (std::size_t i = 0; i < v.witness->indices.size(); ++i) os << (i ? "," : "") << v.witness->indices[i];
    os << ")";
    for (const auto& [name, z] : v.witness->values) os << "  " << name << " = " << fmt(z);
    os << "\n";
  }
  if (v.normalized_identity_residual)
    os << "    homogeneous subsystems: " << (*v.homogeneous_subsystems ? "yes" : "no")
       << "  Σp = (" << fmt(v.probability_sums->first) << ", " << fmt(v.probability_sums->second)
       << ")  q·Σp − p residual " << fmt(*v.normalized_identity_residual) << "\n";
  return os.str();
}

int exit_code_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const InvariantError&) {
    return kExitInternal;
  } catch (...) {
    return kExitInvalid;
  }
}

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

std::vector<Condition> applicable(const std::vector<Condition>& requested,
                                  const std::function<bool(Condition)>& holds) {
  if (!requested.empty()) return requested;
  std::vector<Condition> out;
  for (auto c : kAllConditions)
    if (holds(c)) out.push_back(c);
  return out;
}

Json diosi_entry(Check check, const Scenario& a, const Scenario& b, const ScenarioFile& file, double tol,
                 std::string& text) {
  Json verdicts = Json::array();
  std::vector<Condition> conditions;
  if (check == Check::diosi_forward) {
    const auto ra = classify(decoherence_functional(a.histories, a.state), tol);
    const auto rb = classify(decoherence_functional(b.histories, b.state), tol);
    conditions = applicable(file.conditions, [&](Condition c) { return ra.holds(c) && rb.holds(c); });
  } else {
    const Scenario ab = compose(a, b);
    const auto rab = classify(decoherence_functional(ab.histories, ab.state), tol);
    conditions = applicable(file.conditions, [&](Condition c) { return rab.holds(c); });
  }
  for (auto c : conditions) {
    const auto v = check == Check::diosi_forward
                       ? forward_diosi_check(c, a, b, tol)
                       : reverse_diosi_check(c, a, b, tol, ReverseOptions{file.near_identical});
    text += describe(v);
    verdicts.push_back(to_json(v));
  }
  return {{"partner", b.name}, {"verdicts", std::move(verdicts)}};
}

}  // namespace

Report guarded(const std::function<Report()>& body) {
  try {
    return body();
  } catch (...) {
    const auto e = std::current_exception();
    Report r;
    r.exit_code = exit_code_of(e);
    Json err = {{"message", message_of(e)}};
    try {
      std::rethrow_exception(e);
    } catch (const ValidationError& v) {
      Json list = Json::array();
      for (const auto& x : v.violations()) list.push_back({{"what", x.what}, {"residual", x.residual}});
      err["violations"] = std::move(list);
    } catch (const ParseError& p) {
      err["where"] = p.where();
    } catch (const InvariantError& i) {
      err["residual"] = i.residual();
    } catch (...) {
    }
    r.document = {{"format_version", kFormatVersion}, {"kind", "error"}, {"error", std::move(err)}};
    r.text = "error: " + message_of(e) + "\n";
    return r;
  }
}

Report run_scenario(const ScenarioFile& file, const Overrides& overrides) {
  const auto start = Clock::now();
  const double tol = overrides.tolerance.value_or(file.tolerance.value_or(kClassificationTol));
  const Scenario& s = file.scenario;
  const auto df = decoherence_functional(s.histories, s.state);
  const auto report = classify(df, tol);

  Report out;
  std::ostringstream text;
  text << "scenario " << s.name << ": dimension " << s.dim() << ", " << s.schedule().slots() << " slot(s), "
       << s.histories.size() << " histories\n";
  text << describe(report);

  Json checks = Json::array();
  for (auto check : file.checks) {
    Json entry = {{"check", to_string(check)}};
    std::string detail;
    try {
      switch (check) {
        case Check::classify:
          entry["venn_region"] = report.venn_region;
          break;
        case Check::records: {
          const auto rec = construct_records(s.histories, s.state, tol);
          entry["records"] = to_json(rec);
          detail = "  records: " + std::to_string(rec.projectors.size()) + " projectors, record equation residual " +
                   fmt(rec.record_equation_residual) + "\n";
          break;
        }
        case Check::robustness: {
          if (!file.perturbation) throw ValidationError("robustness check needs a perturbation", 0.0);
          const auto rob = robustness_check(s, *file.perturbation, tol);
          Json verdicts = Json::array();
          for (const auto& v : rob.verdicts) {
            verdicts.push_back(to_json(v));
            detail += describe(v);
          }
          entry["perturbation"] = perturbation_to_json(*file.perturbation);
          entry["law_residual"] = rob.law_residual;
          entry["after"] = to_json(rob.after);
          entry["verdicts"] = std::move(verdicts);
          detail = "  transformation law residual " + fmt(rob.law_residual) + "\n" + detail;
          break;
        }
        case Check::diosi_forward:
        case Check::diosi_reverse: {
          const Scenario& b = file.partner ? file.partner->scenario : s;
          entry.update(diosi_entry(check, s, b, file, tol, detail));
          break;
        }
      }
      entry["status"] = "ok";
    } catch (...) {
      const auto e = std::current_exception();
      entry["status"] = "error";
      entry["error"] = message_of(e);
      out.exit_code = std::max(out.exit_code, exit_code_of(e));
      detail = "  error: " + message_of(e) + "\n";
    }
    text << "check " << to_string(check) << ":\n" << detail;
    checks.push_back(std::move(entry));
  }

  Json residuals = {{"hermiticity", df.hermiticity_residual()},
                    {"normalization", df.normalization_residual()},
                    {"decomposition", df.decomposition_residual()},
                    {"quasi_sum", df.quasi_sum_residual()},
                    {"class_operator_sum", s.histories.sum_residual()},
                    {"class_operator_gram", s.histories.gram_residual()}};
  out.document = {{"format_version", kFormatVersion},
                  {"kind", "scenario_report"},
                  {"name", s.name},
                  {"tolerance", tol},
                  {"scenario", scenario_to_json(s)},
                  {"decoherence_functional", to_json(df, s.histories)},
                  {"conditions", to_json(report)},
                  {"checks", std::move(checks)},
                  {"residuals", std::move(residuals)},
                  {"timing_ms", elapsed_ms(start)}};
  out.text = text.str();
  return out;
}

Report run_scenario(const std::filesystem::path& path, const Overrides& overrides) {
  return run_scenario(load_scenario_file(path), overrides);
}

std::string region_slug(std::string_view region) {
  if (region == "D") return "D";
  if (region == "PD∩C∖D") return "PD_and_C_not_D";
  if (region == "PD∖C") return "PD_not_C";
  if (region == "C∖PD") return "C_not_PD";
  if (region == "LP∖(PD∪C)") return "LP_not_PD_or_C";
  return "none";
}

namespace {

Json witness_document(const Scenario& s, std::size_t trial, const SampleConfig& cfg) {
  Json j = scenario_to_json(s);
  j["checks"] = {"classify"};
  j["tolerance"] = cfg.tolerance;
  j["seed"] = cfg.seed;
  j["trial"] = trial;
  const auto df = decoherence_functional(s.histories, s.state);
  j["recorded"] = {{"conditions", to_json(classify(df, cfg.tolerance))}, {"p", to_json(df.p)}, {"q", to_json(df.q)}};
  return j;
}

}  // namespace

Report run_search(const SearchConfig& config_in, const Overrides& overrides,
                  const std::optional<std::filesystem::path>& out_dir) {
  const auto start = Clock::now();
  SearchConfig config = config_in;
  if (overrides.seed) config.sample.seed = *overrides.seed;
  if (overrides.tolerance) config.sample.tolerance = *overrides.tolerance;
  const auto& cfg = config.sample;

  Report out;
  std::ostringstream text;
  Json doc = {{"format_version", kFormatVersion},
              {"kind", "search_report"},
              {"mode", to_string(config.mode)},
              {"config", search_config_to_json(config)}};

  auto emit = [&](const std::string& file, const Scenario& s, std::size_t trial) -> Json {
    if (!out_dir) return nullptr;
    const auto path = *out_dir / file;
    write_atomic(path, witness_document(s, trial, cfg).dump(2) + "\n");
    return path.string();
  };

  switch (config.mode) {
    case SearchMode::venn: {
      const auto cat = venn_search(cfg);
      Json regions = Json::array();
      text << "venn search: " << cat.trials << " trials (seed " << cfg.seed << ")\n";
      for (std::size_t i = 0; i < kVennRegions.size(); ++i) {
        const auto& e = cat.regions[i];
        Json r = {{"name", kVennRegions[i]},
                  {"count", e.count},
                  {"first_trial", e.first_trial ? Json(*e.first_trial) : Json(nullptr)},
                  {"min_margin", e.count ? Json(e.min_margin) : Json(nullptr)},
                  {"witness_file", nullptr}};
        if (e.witness) r["witness_file"] = emit(region_slug(kVennRegions[i]) + ".scenario", *e.witness, *e.first_trial);
        text << "  " << padded(kVennRegions[i], 12) << " " << e.count
             << (e.count ? "  first trial " + std::to_string(*e.first_trial) : std::string("  (empty)")) << "\n";
        regions.push_back(std::move(r));
      }
      doc["trials"] = cat.trials;
      doc["regions"] = std::move(regions);
      break;
    }
    case SearchMode::superprob: {
      const auto res = superprob_search(cfg);
      doc["trials"] = res.trials_run;
      doc["found"] = res.found();
      if (res.found()) {
        doc["trial"] = *res.trial;
        doc["history"] = res.history;
        doc["label"] = res.witness->histories[res.history].label.name;
        doc["probability"] = res.probability;
        doc["witness_file"] = emit("superprob.scenario", *res.witness, *res.trial);
        text << "superprob search: p = " << fmt(res.probability) << " for history "
             << res.witness->histories[res.history].label.name << " at trial " << *res.trial << "\n";
      } else {
        text << "superprob search: not found after " << res.trials_run << " trials\n";
      }
      break;
    }
    case SearchMode::linear_positivity: {
      const auto res = linear_positivity_search(cfg, config.margin);
      doc["found"] = res.has_value();
      if (res) {
        doc["trial"] = res->trial;
        doc["history"] = res->history;
        doc["q"] = to_json(res->q);
        doc["witness_file"] = emit("linear_positivity.scenario", res->scenario, res->trial);
        text << "linear positivity search: q = " << fmt(res->q) << " at trial " << res->trial
             << " (Re q² = " << fmt((res->q * res->q).real()) << ")\n";
      } else {
        text << "linear positivity search: not found after " << cfg.trials << " trials\n";
      }
      break;
    }
  }
  doc["timing_ms"] = elapsed_ms(start);
  out.document = std::move(doc);
  out.text = text.str();
  return out;
}

Report run_search(const std::filesystem::path& path, const Overrides& overrides,
                  const std::optional<std::filesystem::path>& out_dir) {
  return run_search(load_search_config(path), overrides, out_dir);
}

Report run_compose(const std::filesystem::path& a_path, const std::filesystem::path& b_path,
                   const Overrides& overrides) {
  const auto start = Clock::now();
  const auto a = load_scenario_file(a_path);
  const auto b = load_scenario_file(b_path);
  const double tol = overrides.tolerance.value_or(a.tolerance.value_or(kClassificationTol));

  const auto da = decoherence_functional(a.scenario.histories, a.scenario.state);
  const auto db = decoherence_functional(b.scenario.histories, b.scenario.state);
  const Scenario ab = compose(a.scenario, b.scenario);
  const auto dab = decoherence_functional(ab.histories, ab.state);
  const auto ra = classify(da, tol), rb = classify(db, tol), rab = classify(dab, tol);

  std::ostringstream text;
  text << "A = " << a.scenario.name << "\n" << describe(ra) << "B = " << b.scenario.name << "\n" << describe(rb)
       << "A⊗B\n" << describe(rab);
  Json forward = Json::array(), reverse = Json::array();
  for (auto c : kAllConditions) {
    if (ra.holds(c) && rb.holds(c)) {
      const auto v = forward_diosi_check(c, a.scenario, b.scenario, tol);
      forward.push_back(to_json(v));
      text << describe(v);
    }
    if (rab.holds(c)) {
      const auto v = reverse_diosi_check(c, a.scenario, b.scenario, tol, ReverseOptions{a.near_identical});
      reverse.push_back(to_json(v));
      text << describe(v);
    }
  }
  Report out;
  out.document = {{"format_version", kFormatVersion},
                  {"kind", "compose_report"},
                  {"tolerance", tol},
                  {"a", {{"name", a.scenario.name}, {"conditions", to_json(ra)}}},
                  {"b", {{"name", b.scenario.name}, {"conditions", to_json(rb)}}},
                  {"composite", {{"name", ab.name}, {"conditions", to_json(rab)}}},
                  {"factorization_residual", factorization_residual(da, db, dab)},
                  {"forward", std::move(forward)},
                  {"reverse", std::move(reverse)},
                  {"timing_ms", elapsed_ms(start)}};
  out.text = text.str();
  return out;
}

Report run_appendix(const AppendixOptions& options, const Overrides& overrides) {
  const double tol = overrides.tolerance.value_or(kClassificationTol);
  const auto seed = options.seed ? options.seed : overrides.seed;
  const HilbertDim d(options.dim);

  const auto app = [&] {
    if (seed) {
      Rng rng(*seed);
      return random_appendix_scenario(d, rng);
    }
    if (d != 2) throw ValidationError("the parameterized appendix runner without a seed is qubit-only", d);
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    Matrix u(2, 2);
    const double c = std::cos(options.theta), s = std::sin(options.theta);
    u << c, Complex(0, -s), Complex(0, -s), c;
    Vector psi(2);
    psi << std::cos(options.phi), std::sin(options.phi);
    return appendix_scenario(p, Unitary::from_matrix(u), make_state_pure(psi));
  }();
  ScenarioFile file{app.scenario, {Check::classify}, std::nullopt, tol, seed, {}, nullptr, false, Json()};
  Report out = run_scenario(file, overrides);
  const auto df = decoherence_functional(app.scenario.histories, app.scenario.state);
  const Complex dcc = df.d(0, 1);

  Json sweep = Json::array();
  std::ostringstream text;
  text << out.text << "certificate ‖C̄†C + C†C̄‖∞ = " << fmt(app.certificate_residual) << "\n"
       << "D(C, C̄) = " << fmt(dcc) << "\n"
       << "phase sweep (per-history phase on C):\n";
  for (const auto& pt : phase_sweep(app.scenario, options.sweep_steps, tol)) {
    sweep.push_back({{"phase", pt.phase}, {"consistent", pt.consistent}, {"consistency_residual", pt.consistency_residual}});
    text << "  λ = " << fmt(pt.phase) << "  consistent " << (pt.consistent ? "yes" : "no") << "  residual "
         << fmt(pt.consistency_residual) << "\n";
  }
  out.document["kind"] = "appendix_report";
  out.document["certificate_residual"] = app.certificate_residual;
  out.document["interference"] = to_json(dcc);
  out.document["phase_sweep"] = std::move(sweep);
  out.text = text.str();
  return out;
}

}  // namespace histlab
