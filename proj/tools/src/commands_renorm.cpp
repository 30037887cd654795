#include <cmath>

#include "commands.hpp"
#include "dinilab/collapse.hpp"
#include "dinilab/errors.hpp"
#include "dinilab/runner/descriptors.hpp"

namespace dinilab::runner {

namespace {

constexpr double kShoringFloor = 1.0 - 1e-9;

C1Options parse_c1(const Json& j) {
  JsonReader in(j, "renorm.c1");
  C1Options o;
  o.C = in.number("C", o.C);
  o.points = static_cast<std::size_t>(in.count("points", o.points));
  const std::string tail = in.string("tail", "weighted_theta_tail");
  if (tail == "weighted_theta_tail") o.tail = TailPolicy::weighted_theta_tail;
  else if (tail == "geometric") o.tail = TailPolicy::geometric;
  else if (tail == "none") o.tail = TailPolicy::none;
  else throw ValidationError("renorm.c1.tail: expected weighted_theta_tail, geometric or none");
  in.finish();
  if (!(o.C > 0.0) || o.points == 0) throw ValidationError("renorm.c1: C and points must be positive");
  return o;
}

}  // namespace

void write_c1_modulus(RunContext& ctx, const RenormalizationTrace& trace, const C1Options& options) {
  // ln(1/t) sweeps (0, N] so every sample lies within the computed trace.
  const double N = static_cast<double>(trace.depth());
  CsvWriter csv(ctx.file("c1_modulus.csv"), {"t", "gamma"});
  PlotSeries series{"gamma(t)", {}, {}};
  for (std::size_t k = 1; k <= options.points; ++k) {
    const double s = N * static_cast<double>(k) / static_cast<double>(options.points);
    const double t = std::exp(-s);
    const double g = c1_modulus(trace, options.C, t, options.tail);
    csv.row({t, g});
    series.x.push_back(s);
    series.y.push_back(g);
  }
  csv.close();
  write_log_plot(ctx.file("c1_modulus.svg"), "C1 modulus, C = " + format_number(options.C), "ln(1/t)", "gamma(t)",
                 {series});
}

std::pair<RenormalizationTrace, C1Options> run_renorm(RunContext& ctx, const Json& section, bool write_c1) {
  Json params_json = section;
  C1Options c1;
  if (params_json.is_object() && params_json.contains("c1")) {
    c1 = parse_c1(params_json["c1"]);
    params_json.erase("c1");
  }
  const RenormParams params = parse_renorm(params_json, "renorm", ctx.config.base_dir);
  RenormalizationTrace trace = run_shoring_algorithm(params);

  CsvWriter csv(ctx.file("trace.csv"),
                {"k", "mu_k", "tau_k", "log_tau_k", "c_k", "sigma_k_at_c_k", "a_over_c", "branch"});
  for (const auto& s : trace.steps)
    csv.row({static_cast<unsigned long long>(s.k), s.mu, s.tau, s.log_tau, s.c, s.sigma_at_c, s.a_over_c,
             std::string(to_string(s.branch))});
  csv.close();

  const ShoringWitness shoring = is_shored_up(
      [&](std::size_t n, double t) { return renormalized_sigma_eval(trace, n, t); },
      [&](std::size_t n) { return trace.steps[n - 1].c; }, trace.depth(), kShoringFloor);

  const Json summary = {{"case", to_string(trace.scale.scale_case)},
                        {"case_overridden", trace.scale.overridden},
                        {"r", trace.scale.r},
                        {"mu1", trace.scale.mu1},
                        {"theta", trace.scale.theta},
                        {"epsilon", trace.epsilon},
                        {"depth", trace.depth()},
                        {"sigma1_at_one", trace.sigma1_at_one},
                        {"tau_sum", trace.tau_sum},
                        {"weighted_sum", trace.weighted_sum},
                        {"tau_l1_bound", json_number_value(trace.tau_l1_bound)},
                        {"raised_count", trace.raised_count},
                        {"clamped_count", trace.clamped_count},
                        {"xi_norm", {{"lower", json_number_value(trace.xi.lower)}, {"upper", json_number_value(trace.xi.upper)}}},
                        {"shored_up", shoring.shored_up},
                        {"shoring_min", shoring.min_value},
                        {"shoring_argmin", shoring.argmin}};
  ctx.summary["renorm"] = summary;
  write_json(ctx.file("renorm.json"), summary);
  if (trace.clamped_count > 0 || !shoring.shored_up) ctx.flag_failure();
  ctx.note("renorm: r=" + format_number(trace.scale.r) + ", " + std::to_string(trace.raised_count) + " raised, " +
           std::to_string(trace.clamped_count) + " clamped, shored up: " + (shoring.shored_up ? "yes" : "no"));
  if (write_c1) write_c1_modulus(ctx, trace, c1);
  return {std::move(trace), c1};
}

}  // namespace dinilab::runner
