#include "dinilab/runner/descriptors.hpp"

#include <cmath>
#include <limits>

#include "dinilab/errors.hpp"

namespace dinilab::runner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

fs::path resolve(const fs::path& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::size_t index_count(JsonReader& in, const std::string& key) {
  const std::uint64_t n = in.count(key);
  if (n == 0) throw ValidationError(in.child_context(key) + ": must be positive");
  return static_cast<std::size_t>(n);
}

}  // namespace

ModulusOfContinuity parse_modulus(const Json& j, const std::string& context, const fs::path& base_dir) {
  JsonReader in(j, context);
  const std::string family = in.string("family");
  ModulusOfContinuity out = [&]() {
    if (family == "power")
      return ModulusOfContinuity::power(in.number("alpha"), in.number("coefficient", 1.0), in.number("domain_end", kInf));
    if (family == "constant") return ModulusOfContinuity::constant(in.number("value"), in.number("domain_end", kInf));
    if (family == "log_power") return ModulusOfContinuity::log_power(in.number("alpha"), in.number("domain_end", 1.0));
    if (family == "power_series")
      return ModulusOfContinuity::power_series(in.numbers("coefficients"), in.numbers("exponents"),
                                               in.number("tail_bound", 0.0), in.number("domain_end", 1.0));
    if (family == "root_series") return ModulusOfContinuity::root_series(index_count(in, "terms"));
    if (family == "tilde_phi") return ModulusOfContinuity::tilde_phi(index_count(in, "truncation"));
    if (family == "tabulated") {
      const double tolerance = in.number("monotone_tolerance", 0.0);
      if (in.has("csv")) return ModulusOfContinuity::from_csv(resolve(base_dir, in.string("csv")).string(), tolerance);
      return ModulusOfContinuity::tabulated(in.numbers("t"), in.numbers("values"), tolerance);
    }
    throw ValidationError(context + ".family: unknown modulus family '" + family +
                          "' (power, constant, log_power, power_series, root_series, tilde_phi, tabulated)");
  }();
  in.finish();
  return out;
}

DegeneracyLaw parse_law(const Json& j, const std::string& context, const fs::path& base_dir) {
  Json modulus = j;
  bool require_normalized = true;
  if (j.is_object() && j.contains("require_normalized")) {
    if (!j["require_normalized"].is_boolean())
      throw ValidationError(context + ".require_normalized: expected true or false");
    require_normalized = j["require_normalized"].get<bool>();
    modulus.erase("require_normalized");
  }
  return DegeneracyLaw::make(parse_modulus(modulus, context, base_dir), require_normalized);
}

SummableSequence parse_sequence(const Json& j, const std::string& context, const fs::path& base_dir) {
  JsonReader in(j, context);
  const std::string kind = in.string("kind");
  SummableSequence out = [&]() {
    if (kind == "geometric") return SummableSequence::geometric(in.number("ratio"), in.number("scale", 1.0));
    if (kind == "power") return SummableSequence::power(in.number("exponent"), in.number("scale", 1.0));
    if (kind == "finite") return SummableSequence::finite(in.numbers("values"));
    if (kind == "tabulated") return SummableSequence::from_csv(resolve(base_dir, in.string("csv")).string());
    if (kind == "mixture") {
      const Json& members = in.raw("members");
      if (!members.is_array() || members.empty())
        throw ValidationError(in.child_context("members") + ": expected a non-empty array");
      std::vector<SummableSequence> parts;
      for (std::size_t i = 0; i < members.size(); ++i)
        parts.push_back(parse_sequence(members[i], in.child_context("members") + "[" + std::to_string(i) + "]", base_dir));
      std::vector<double> weights;
      if (in.has("weights")) weights = in.numbers("weights");
      return SummableSequence::mixture(parts, weights);
    }
    throw ValidationError(context + ".kind: unknown sequence kind '" + kind +
                          "' (geometric, power, finite, tabulated, mixture)");
  }();
  in.finish();
  return out;
}

CoefficientSequence parse_coefficients(const Json& j, const std::string& context) {
  JsonReader in(j, context);
  const std::string kind = in.string("kind");
  in.finish();
  if (kind == "harmonic") return CoefficientSequence::harmonic();
  if (kind == "geometric") return CoefficientSequence::geometric();
  if (kind == "inverse_log") return CoefficientSequence::inverse_log();
  throw ValidationError(context + ".kind: unknown coefficient sequence '" + kind +
                        "' (harmonic, geometric, inverse_log)");
}

ModulusCollection parse_collection(const Json& j, const std::string& context, const fs::path& base_dir) {
  JsonReader in(j, context);
  const std::string kind = in.string("kind");
  ModulusCollection out = [&]() {
    if (kind == "powers") return ModulusCollection::powers(static_cast<std::size_t>(in.count("count")));
    if (kind == "finite") {
      const Json& members = in.raw("members");
      if (!members.is_array() || members.empty())
        throw ValidationError(in.child_context("members") + ": expected a non-empty array");
      std::vector<ModulusOfContinuity> list;
      for (std::size_t i = 0; i < members.size(); ++i)
        list.push_back(parse_modulus(members[i], in.child_context("members") + "[" + std::to_string(i) + "]", base_dir));
      return ModulusCollection::finite(std::move(list), in.number("interval_end", 1.0));
    }
    if (kind == "union") {
      const Json& parts = in.raw("parts");
      if (!parts.is_array() || parts.size() < 2)
        throw ValidationError(in.child_context("parts") + ": expected at least two families");
      ModulusCollection acc = parse_collection(parts[0], in.child_context("parts") + "[0]", base_dir);
      for (std::size_t i = 1; i < parts.size(); ++i)
        acc = ModulusCollection::unite(acc, parse_collection(parts[i], in.child_context("parts") + "[" + std::to_string(i) + "]", base_dir));
      return acc;
    }
    throw ValidationError(context + ".kind: unknown family kind '" + kind + "' (powers, finite, union)");
  }();
  in.finish();
  return out;
}

RenormParams parse_renorm(const Json& j, const std::string& context, const fs::path& base_dir) {
  JsonReader in(j, context);
  RenormParams p{.sigma = parse_law(in.raw("sigma"), in.child_context("sigma"), base_dir)};
  p.L = in.number("L", p.L);
  p.beta = in.number("beta", p.beta);
  p.alpha = in.optional_number("alpha");
  p.delta = in.number("delta", p.delta);
  p.depth = static_cast<std::size_t>(in.count("depth", p.depth));
  p.modulator.horizon = in.count("horizon", p.modulator.horizon);
  if (in.has("case")) {
    const std::string c = in.string("case");
    if (c == "fast_degeneracy") p.case_override = ScaleCase::fast_degeneracy;
    else if (c == "tame_degeneracy") p.case_override = ScaleCase::tame_degeneracy;
    else throw ValidationError(in.child_context("case") + ": expected fast_degeneracy or tame_degeneracy");
  }
  in.finish();
  p.validate();
  return p;
}

pde::Field parse_field(const Json& j, const std::string& context) {
  if (j.is_number()) {
    const double c = j.get<double>();
    return [c](double, double) { return c; };
  }
  JsonReader in(j, context);
  const std::string kind = in.string("kind");
  pde::Field out;
  if (kind == "constant") {
    const double c = in.number("value");
    out = [c](double, double) { return c; };
  } else if (kind == "linear") {
    const double c = in.number("value", 0.0);
    const auto g = in.pair("gradient", {0.0, 0.0});
    out = [c, g](double x, double y) { return c + g[0] * x + g[1] * y; };
  } else if (kind == "radial_power") {
    const double c = in.number("coefficient");
    const double p = in.number("exponent");
    if (!(p >= 0.0)) throw ValidationError(in.child_context("exponent") + ": must be >= 0");
    out = [c, p](double x, double y) { return c * std::pow(std::hypot(x, y), p); };
  } else {
    throw ValidationError(context + ".kind: unknown field kind '" + kind + "' (constant, linear, radial_power)");
  }
  in.finish();
  return out;
}

pde::ProblemSpec parse_problem(const Json& j, const std::string& context, const fs::path& base_dir,
                               const DegeneracyLaw* default_sigma) {
  JsonReader in(j, context);
  pde::ProblemSpec p;
  p.dimension = static_cast<int>(in.count("dimension", 1));
  if (in.has("sigma")) p.sigma = parse_law(in.raw("sigma"), in.child_context("sigma"), base_dir);
  else if (default_sigma != nullptr) p.sigma = *default_sigma;
  else throw ValidationError(in.child_context("sigma") + ": required key is missing");
  if (in.has("source")) p.source = parse_field(in.raw("source"), in.child_context("source"));
  if (in.has("boundary")) p.boundary = parse_field(in.raw("boundary"), in.child_context("boundary"));
  p.xi = in.pair("xi", {0.0, 0.0});
  p.h = in.number("h", p.h);
  p.source_bound = in.optional_number("source_bound");
  in.finish();
  p.validate();
  return p;
}

}  // namespace dinilab::runner
