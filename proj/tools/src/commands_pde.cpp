#include <algorithm>
#include <cmath>
#include <limits>

#include "commands.hpp"
#include "dinilab/errors.hpp"
#include "dinilab/pde/problem.hpp"
#include "dinilab/pde/solver.hpp"
#include "dinilab/runner/descriptors.hpp"

namespace dinilab::runner {

namespace {

struct HolderOptions {
  bool enabled = true;
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.5;
  std::optional<double> exponent;  // empty: fitted from the first solve
};

void write_solution(RunContext& ctx, const std::string& name, const pde::GridSolution& s) {
  std::vector<std::string> header{"x"};
  if (s.dimension == 2) header.push_back("y");
  header.push_back("u");
  CsvWriter csv(ctx.file(name), header);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.dimension == 2) csv.row({s.x[i], s.y[i], s.values[i]});
    else csv.row({s.x[i], s.values[i]});
  }
  csv.close();
}

void write_decay(RunContext& ctx, const std::string& stem, const pde::DecayReport& r, int dimension) {
  std::vector<std::string> header{"n", "radius", "E_n", "A_n", "B_n"};
  if (dimension == 2) header.push_back("B_n_y");
  for (const char* h : {"tau_n", "predicted_n", "points"}) header.emplace_back(h);
  CsvWriter csv(ctx.file(stem + ".csv"), header);
  PlotSeries measured{"E_n", {}, {}}, predicted{"tau_n r^n", {}, {}};
  for (const auto& s : r.scales) {
    std::vector<CsvWriter::Cell> row{static_cast<unsigned long long>(s.n), s.radius, s.E, s.A, s.B[0]};
    if (dimension == 2) row.emplace_back(s.B[1]);
    row.emplace_back(s.tau);
    row.emplace_back(s.predicted);
    row.emplace_back(static_cast<unsigned long long>(s.points));
    csv.row(row);
    measured.x.push_back(static_cast<double>(s.n));
    measured.y.push_back(s.E);
    if (s.predicted > 0.0) {
      predicted.x.push_back(static_cast<double>(s.n));
      predicted.y.push_back(s.predicted);
    }
  }
  csv.close();
  std::vector<PlotSeries> series{measured};
  if (!predicted.x.empty()) series.push_back(predicted);
  write_log_plot(ctx.file(stem + ".svg"), "Tangent-plane error at radius r^n", "n", "E_n", series);
}

}  // namespace

PdeOutcome run_pde(RunContext& ctx, const Json& section, const RenormalizationTrace* trace) {
  JsonReader in(section, "pde");
  const DegeneracyLaw* default_sigma = trace != nullptr ? &trace->params.sigma : nullptr;
  pde::ProblemSpec base = parse_problem(in.raw("problem"), "pde.problem", ctx.config.base_dir, default_sigma);

  Json scaling = nullptr;
  if (const auto normalize = in.raw_optional("normalize")) {
    JsonReader n(*normalize, "pde.normalize");
    const double eps = n.number("eps");
    const std::optional<double> u_bound = n.optional_number("u_bound");
    n.finish();
    const pde::NormalizedProblem np = pde::normalize_problem(base, eps, u_bound);
    base = np.problem;
    scaling = {{"r", np.scaling.r}, {"K", np.scaling.K}, {"u_bound", np.scaling.u_bound},
               {"f_bound", np.scaling.f_bound}, {"u_bound_estimated", np.scaling.u_bound_estimated},
               {"r_shrunk", np.scaling.r_shrunk}};
  }

  pde::SolveOptions solver;
  if (const auto s = in.raw_optional("solver")) {
    JsonReader r(*s, "pde.solver");
    solver.tol = r.number("tol", solver.tol);
    solver.max_iter = static_cast<std::size_t>(r.count("max_iter", solver.max_iter));
    solver.relaxation = r.number("relaxation", solver.relaxation);
    solver.anderson_depth = static_cast<std::size_t>(r.count("anderson_depth", solver.anderson_depth));
    solver.adaptive_relaxation = r.boolean("adaptive_relaxation", solver.adaptive_relaxation);
    solver.floor = r.number("floor", solver.floor);
    r.finish();
  }

  std::array<double, 2> probe{0.0, 0.0};
  double ratio = trace != nullptr ? trace->r() : 0.25;
  std::size_t depth = 6;
  if (const auto d = in.raw_optional("decay")) {
    JsonReader r(*d, "pde.decay");
    probe = r.pair("probe", probe);
    ratio = r.number("ratio", ratio);
    depth = static_cast<std::size_t>(r.count("depth", depth));
    r.finish();
  }

  HolderOptions holder;
  if (const auto h = in.raw_optional("holder")) {
    if (h->is_boolean()) {
      holder.enabled = h->get<bool>();
    } else {
      JsonReader r(*h, "pde.holder");
      holder.center = r.pair("center", holder.center);
      holder.radius = r.number("radius", holder.radius);
      if (r.has("exponent")) {
        const Json& e = r.raw("exponent");
        if (!(e.is_string() && e.get<std::string>() == "fitted")) holder.exponent = json_number(e, "pde.holder.exponent");
      }
      r.finish();
    }
  }

  std::vector<double> xi_values;
  if (in.has("xi_values")) xi_values = in.numbers("xi_values");
  in.finish();

  std::vector<pde::ProblemSpec> problems;
  if (xi_values.empty()) {
    problems.push_back(base);
  } else {
    for (double xi : xi_values) {
      pde::ProblemSpec p = base;
      p.xi = {xi, 0.0};
      problems.push_back(p);
    }
  }

  PdeOutcome outcome;
  outcome.solutions.resize(problems.size());
  parallel_for(problems.size(), ctx.config.threads,
               [&](std::size_t i) { outcome.solutions[i] = pde::solve(problems[i], solver); });
  for (const auto& s : outcome.solutions)
    outcome.reports.push_back(pde::fit_tangent_planes(s, probe, ratio, depth, trace));

  double exponent = std::numeric_limits<double>::quiet_NaN();
  if (holder.enabled) {
    exponent = holder.exponent.value_or(outcome.reports.front().holder_exponent);
    if (!std::isfinite(exponent))
      throw NumericFailure("pde.holder: no exponent could be fitted; give pde.holder.exponent explicitly");
    exponent = std::clamp(exponent, 1e-3, 1.0);
  }

  const bool single = problems.size() == 1;
  Json runs = Json::array();
  std::vector<double> seminorms(problems.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const std::string suffix = single ? "" : "_xi" + std::to_string(i);
    const pde::GridSolution& s = outcome.solutions[i];
    const pde::DecayReport& r = outcome.reports[i];
    write_solution(ctx, "solution" + suffix + ".csv", s);
    write_decay(ctx, "decay" + suffix, r, s.dimension);
    if (holder.enabled) seminorms[i] = pde::holder_seminorm(s, holder.center, holder.radius, exponent);
    runs.push_back({{"xi", {problems[i].xi[0], problems[i].xi[1]}},
                    {"h", s.h},
                    {"iterations", s.iterations},
                    {"residual_norm", s.residual_norm},
                    {"floor_activations", s.floor_activations},
                    {"relaxation_used", s.relaxation_used},
                    {"holder_exponent", json_number_value(r.holder_exponent)},
                    {"slope_increment_exponent", json_number_value(r.slope_increment_exponent)},
                    {"fitted_C", json_number_value(r.fitted_C)},
                    {"seminorm", json_number_value(seminorms[i])},
                    {"warnings", r.warnings}});
    ctx.note("solve " + std::to_string(i) + ": " + std::to_string(s.iterations) + " sweeps, residual " +
             format_number(s.residual_norm) + ", holder exponent " + format_number(r.holder_exponent));
  }
  if (holder.enabled) {
    CsvWriter csv(ctx.file("seminorms.csv"), {"xi", "exponent", "seminorm", "iterations", "residual_norm"});
    for (std::size_t i = 0; i < problems.size(); ++i)
      csv.row({problems[i].xi[0], exponent, seminorms[i], static_cast<unsigned long long>(outcome.solutions[i].iterations),
               outcome.solutions[i].residual_norm});
    csv.close();
  }
  const Json summary = {{"scaling", scaling}, {"probe", {probe[0], probe[1]}}, {"ratio", ratio},
                        {"holder_exponent_used", json_number_value(exponent)}, {"runs", runs}};
  ctx.summary["pde"] = summary;
  write_json(ctx.file("pde.json"), summary);
  return outcome;
}

void run_pipeline(RunContext& ctx) {
  const Json& doc = ctx.config.document;
  if (!doc.contains("renorm") || !doc.contains("pde"))
    throw ValidationError("config: command 'pipeline' needs \"renorm\" and \"pde\" sections");
  if (doc.contains("pipeline")) JsonReader(doc["pipeline"], "pipeline").finish();

  auto [trace, c1] = run_renorm(ctx, doc["renorm"], false);
  const PdeOutcome outcome = run_pde(ctx, doc["pde"], &trace);
  const pde::DecayReport& report = outcome.reports.front();

  // Increments of the affine fits against C tau_n r^n and C tau_n.
  const double C = report.fitted_C;
  CsvWriter csv(ctx.file("crosscheck.csv"), {"n", "radius", "E_n", "predicted_n", "E_over_predicted", "A_increment",
                                             "A_bound", "B_increment", "B_bound"});
  bool increments_within = true;
  for (std::size_t k = 0; k < report.scales.size(); ++k) {
    const auto& s = report.scales[k];
    double da = std::nan(""), db = std::nan(""), a_bound = std::nan(""), b_bound = std::nan("");
    if (k + 1 < report.scales.size() && s.predicted > 0.0) {
      const auto& t = report.scales[k + 1];
      da = std::abs(t.A - s.A);
      db = std::hypot(t.B[0] - s.B[0], t.B[1] - s.B[1]);
      a_bound = C * s.predicted;
      b_bound = C * s.tau;
      increments_within = increments_within && da <= a_bound && db <= b_bound;
    }
    csv.row({static_cast<unsigned long long>(s.n), s.radius, s.E, s.predicted,
             s.predicted > 0.0 ? s.E / s.predicted : std::nan(""), da, a_bound, db, b_bound});
  }
  csv.close();

  C1Options fitted = c1;
  if (std::isfinite(C) && C > 0.0) fitted.C = C;
  write_c1_modulus(ctx, trace, fitted);

  const Json summary = {{"fitted_C", json_number_value(C)},
                        {"increments_within", increments_within},
                        {"shored_up", ctx.summary["renorm"]["shored_up"]},
                        {"c1_constant", fitted.C}};
  ctx.summary["pipeline"] = summary;
  write_json(ctx.file("pipeline.json"), summary);
}

}  // namespace dinilab::runner
