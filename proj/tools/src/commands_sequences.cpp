#include <algorithm>
#include <cmath>
#include <random>

#include "commands.hpp"
#include "dinilab/collapse.hpp"
#include "dinilab/dini.hpp"
#include "dinilab/errors.hpp"
#include "dinilab/runner/descriptors.hpp"
#include "dinilab/sequences.hpp"

namespace dinilab::runner {

namespace {

Json certified(const CertifiedValue& v) {
  return {{"value", json_number_value(v.value)}, {"error", json_number_value(v.error)}};
}

// Random mixture of one to three members drawn from the geometric, power and
// finite families. Seeded per index so results do not depend on scheduling.
SummableSequence random_sequence(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int members = 1 + static_cast<int>(rng() % 3);
  std::vector<SummableSequence> parts;
  for (int m = 0; m < members; ++m) {
    const double scale = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
    switch (rng() % 3) {
      case 0: parts.push_back(SummableSequence::geometric(0.05 + 0.9 * unit(rng), scale)); break;
      case 1: parts.push_back(SummableSequence::power(1.2 + 2.8 * unit(rng), scale)); break;
      default: {
        std::vector<double> values(1 + rng() % 50);
        for (double& v : values) v = scale * unit(rng);
        values[0] += scale;  // keep the member non-zero
        parts.push_back(SummableSequence::finite(std::move(values)));
      }
    }
  }
  return parts.size() == 1 ? parts.front() : SummableSequence::mixture(parts);
}

// Largest ratio block_sum / (eps delta A / 2^j); below 1 means every block holds.
double worst_block_ratio(const ModulatorResult& m) {
  double worst = 0.0;
  for (std::size_t j = 1; j <= m.block_sums.size(); ++j) {
    const double limit = m.epsilon * m.delta * m.threshold_norm / std::ldexp(1.0, static_cast<int>(j));
    worst = std::max(worst, m.block_sums[j - 1] / limit);
  }
  return worst;
}

}  // namespace

void run_dini(RunContext& ctx, const Json& section) {
  JsonReader in(section, "dini");
  const ModulusOfContinuity modulus = parse_modulus(in.raw("modulus"), "dini.modulus", ctx.config.base_dir);
  DiniOptions base;
  base.tau = in.number("tau", base.tau);
  base.cap = in.number("cap", base.cap);
  base.tol = in.number("tol", base.tol);
  base.max_terms = in.count("max_terms", base.max_terms);
  std::vector<double> thetas;
  if (in.has("thetas")) thetas = in.numbers("thetas");
  else thetas.push_back(in.number("theta", base.theta));
  in.finish();
  if (thetas.empty()) throw ValidationError("dini.thetas: must not be empty");

  std::vector<DiniCertificate> certs(thetas.size());
  parallel_for(thetas.size(), ctx.config.threads, [&](std::size_t i) {
    DiniOptions o = base;
    o.theta = thetas[i];
    certs[i] = dini_integral(modulus, o);
  });

  CsvWriter csv(ctx.file("dini.csv"), {"theta", "tau", "verdict", "lower_bound", "upper_bound", "partial_sum",
                                       "tail_estimate", "tail_certified", "terms_used"});
  Json list = Json::array();
  for (const auto& c : certs) {
    csv.row({c.theta, c.tau, std::string(to_string(c.verdict)), c.lower_bound, c.upper_bound, c.partial_sum,
             c.tail_estimate, static_cast<long long>(c.tail_certified), static_cast<unsigned long long>(c.terms_used)});
    list.push_back({{"theta", c.theta},
                    {"verdict", to_string(c.verdict)},
                    {"lower_bound", json_number_value(c.lower_bound)},
                    {"upper_bound", json_number_value(c.upper_bound)},
                    {"tail_estimate", json_number_value(c.tail_estimate)},
                    {"tail_certified", c.tail_certified},
                    {"terms_used", c.terms_used}});
    if (c.verdict == DiniVerdict::inconclusive) ctx.flag_failure();
    ctx.note("theta=" + format_number(c.theta) + ": " + std::string(to_string(c.verdict)) + " [" +
             format_number(c.lower_bound) + ", " + format_number(c.upper_bound) + "]");
  }
  csv.close();
  ctx.summary = {{"modulus", modulus.label()}, {"certificates", list}};
  write_json(ctx.file("dini.json"), ctx.summary);
}

void run_modulator(RunContext& ctx, const Json& section) {
  JsonReader in(section, "modulator");
  const double delta = in.number("delta", 1.0 / 20.0);
  const double epsilon = in.number("epsilon", 1.0 / (1.0 + delta));
  ModulatorOptions options;
  options.horizon = in.count("horizon", options.horizon);
  options.norm_precision = in.number("norm_precision", options.norm_precision);
  const std::optional<Json> sequence = in.raw_optional("sequence");
  const std::optional<Json> family = in.raw_optional("family");
  const std::optional<Json> sweep = in.raw_optional("sweep");
  const std::uint64_t rows_requested = in.count("rows", 0);
  in.finish();
  if (sequence && family) throw ValidationError("modulator: give either \"sequence\" or \"family\", not both");
  if (!sequence && !family && !sweep)
    throw ValidationError("modulator: needs a \"sequence\", a \"family\" or a \"sweep\"");

  if (sequence || family) {
    ModulatorResult m;
    if (sequence) {
      m = dp_modulator(parse_sequence(*sequence, "modulator.sequence", ctx.config.base_dir), epsilon, delta, options);
    } else {
      if (!family->is_array() || family->empty())
        throw ValidationError("modulator.family: expected a non-empty array of sequences");
      std::vector<SummableSequence> members;
      for (std::size_t i = 0; i < family->size(); ++i)
        members.push_back(parse_sequence((*family)[i], "modulator.family[" + std::to_string(i) + "]", ctx.config.base_dir));
      m = dp_modulator_compact(members, epsilon, delta, options);
    }
    const std::uint64_t rows = rows_requested > 0 ? rows_requested : std::min<std::uint64_t>(m.blocks.back(), 100000);
    CsvWriter csv(ctx.file("modulator.csv"), {"j", "c_j", "block_index"});
    for (std::uint64_t j = 1; j <= rows; ++j)
      csv.row({static_cast<unsigned long long>(j), m.c(j), static_cast<unsigned long long>(m.block_of(j))});
    csv.close();
    CsvWriter blocks(ctx.file("modulator_blocks.csv"), {"j", "n_j", "block_sum", "block_limit"});
    for (std::size_t j = 1; j <= m.blocks.size(); ++j) {
      const bool has_sum = j <= m.block_sums.size();
      blocks.row({static_cast<unsigned long long>(j), static_cast<unsigned long long>(m.blocks[j - 1]),
                  has_sum ? m.block_sums[j - 1] : std::nan(""),
                  m.epsilon * m.delta * m.threshold_norm / std::ldexp(1.0, static_cast<int>(j))});
    }
    blocks.close();
    Json checks = Json::array();
    for (const auto& c : m.member_checks)
      checks.push_back({{"member", c.member}, {"a_norm", certified(c.a_norm)}, {"b_norm", certified(c.b_norm)},
                        {"bound_lower", c.bound_lower}, {"bound_upper", c.bound_upper}, {"holds", c.holds}});
    ctx.summary = {{"epsilon", m.epsilon},
                   {"delta", m.delta},
                   {"blocks", m.blocks.size()},
                   {"a_norm", certified(m.a_norm)},
                   {"b_norm", certified(m.b_norm)},
                   {"b_norm_lower_bound", m.b_norm_lower_bound},
                   {"b_norm_upper_bound", m.b_norm_upper_bound},
                   {"worst_block_ratio", worst_block_ratio(m)},
                   {"member_checks", checks},
                   {"within_bounds", m.within_bounds()}};
    if (!m.within_bounds()) ctx.flag_failure();
    ctx.note("modulator: " + std::to_string(m.blocks.size()) + " blocks, within bounds: " +
             (m.within_bounds() ? "yes" : "no"));
  }

  if (sweep) {
    JsonReader s(*sweep, "modulator.sweep");
    const std::size_t count = static_cast<std::size_t>(s.count("count"));
    s.finish();
    std::vector<std::optional<ModulatorResult>> results(count);
    std::vector<std::string> labels(count);
    parallel_for(count, ctx.config.threads, [&](std::size_t i) {
      const SummableSequence a = random_sequence(ctx.config.seed, i);
      labels[i] = a.label();
      results[i] = dp_modulator(a, epsilon, delta, options);
    });
    CsvWriter csv(ctx.file("modulator_sweep.csv"),
                  {"index", "label", "a_norm", "b_norm_lower", "b_norm_upper", "bound_lower", "bound_upper", "max_c",
                   "worst_block_ratio", "within_bounds"});
    std::size_t failures = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const ModulatorResult& m = *results[i];
      const bool ok = m.within_bounds() && m.c(1) <= 1.0 / epsilon;
      failures += ok ? 0 : 1;
      csv.row({static_cast<unsigned long long>(i), labels[i], m.a_norm.value, m.b_norm.lower(), m.b_norm.upper(),
               m.b_norm_lower_bound, m.b_norm_upper_bound, m.c(1), worst_block_ratio(m), static_cast<long long>(ok)});
    }
    csv.close();
    ctx.summary["sweep"] = {{"count", count}, {"seed", ctx.config.seed}, {"failures", failures}};
    if (failures > 0) ctx.flag_failure();
    ctx.note("sweep: " + std::to_string(count - failures) + "/" + std::to_string(count) + " within bounds");
  }
  write_json(ctx.file("modulator.json"), ctx.summary);
}

void run_adversary(RunContext& ctx, const Json& section) {
  JsonReader in(section, "adversary");
  const CoefficientSequence c = parse_coefficients(in.raw("coefficients"), "adversary.coefficients");
  const double target = in.number("target", 1e3);
  AdversaryOptions options;
  options.max_blocks = static_cast<std::size_t>(in.count("max_blocks", options.max_blocks));
  in.finish();
  const AdversaryResult r = adversarial_for(c, target, options);

  CsvWriter csv(ctx.file("adversary_blocks.csv"), {"k", "log_start", "start", "log_length", "value", "log_value",
                                                   "mass", "c_at_start", "contribution_lower"});
  for (const auto& b : r.blocks) {
    csv.row({static_cast<unsigned long long>(b.k), b.log_start,
             b.start ? CsvWriter::Cell(static_cast<unsigned long long>(*b.start)) : CsvWriter::Cell(std::string("")),
             b.log_length, b.value, b.log_value, b.mass, b.c_at_start, b.contribution_lower});
  }
  csv.close();
  ctx.summary = {{"coefficients", c.label()},
                 {"target", target},
                 {"log_head_end", r.log_head_end},
                 {"head_value", r.head_value},
                 {"log_K", r.log_K},
                 {"K", r.K ? Json(*r.K) : Json(nullptr)},
                 {"blocks_to_target", r.blocks_to_target},
                 {"partial_sum_lower", json_number_value(r.partial_sum_lower)},
                 {"partial_sum_direct", r.partial_sum_direct ? json_number_value(*r.partial_sum_direct) : Json(nullptr)},
                 {"norm", certified(r.norm)}};
  write_json(ctx.file("adversary.json"), ctx.summary);
  if (!(r.partial_sum_lower > target)) ctx.flag_failure();
}

void run_collapse(RunContext& ctx, const Json& section) {
  JsonReader in(section, "collapse");
  const ModulusCollection family = parse_collection(in.raw("family"), "collapse.family", ctx.config.base_dir);
  const std::size_t points = static_cast<std::size_t>(in.count("grid_points", 1000));
  const double end = in.number("grid_end", family.interval_end());
  const std::optional<std::size_t> largest = family.largest_part();
  if (!largest && !in.has("budget")) throw ValidationError("collapse.budget: required for infinite families");
  const std::size_t budget = in.has("budget") ? static_cast<std::size_t>(in.count("budget")) : *largest;
  const double threshold = in.number("threshold", 1e-9);
  in.finish();

  const CollapseReport report = collapsing_measure_estimate(family, uniform_grid(end, points), budget, threshold);
  CsvWriter csv(ctx.file("collapse.csv"), {"s", "inf_value"});
  for (std::size_t i = 0; i < report.grid.size(); ++i) csv.row({report.grid[i], report.inf_values[i]});
  csv.close();
  ctx.summary = {{"mu_estimate", report.mu_estimate},
                 {"budget", report.budget},
                 {"threshold", report.zero_threshold},
                 {"members_evaluated", report.members_evaluated}};
  write_json(ctx.file("collapse.json"), ctx.summary);
  ctx.note("collapse: mu_estimate " + format_number(report.mu_estimate));
}

}  // namespace dinilab::runner
