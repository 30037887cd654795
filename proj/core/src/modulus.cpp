#include "dinilab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "dinilab/errors.hpp"
#include "internal/format.hpp"

namespace dinilab {

namespace {

using detail::number;

using InverseFunction = std::function<double(double y, double tol)>;

}  // namespace

struct ModulusOfContinuity::State {
  ModulusFamily family = ModulusFamily::composed;
  FamilyParameters params;
  std::string label;
  double domain_end = kInfinity;
  double supremum = kInfinity;
  double monotone_tolerance = 0.0;
  double truncation_tail = 0.0;
  bool closed_inverse = false;
  Function eval;
  InverseFunction inverse;  // empty -> bisection
  Function primitive;       // empty -> no closed form
  // Same functions of L = ln t, for arguments below the double range.
  Function log_eval;
  Function log_primitive;
};

std::string_view to_string(ModulusFamily family) {
  switch (family) {
    case ModulusFamily::power: return "power";
    case ModulusFamily::log_power: return "log_power";
    case ModulusFamily::power_series: return "power_series";
    case ModulusFamily::tilde_phi: return "tilde_phi";
    case ModulusFamily::composed: return "composed";
    case ModulusFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

ModulusOfContinuity::ModulusOfContinuity(std::shared_ptr<const State> state)
    : state_(std::move(state)) {}

ModulusOfContinuity ModulusOfContinuity::power(double alpha, double coefficient, double domain_end) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("power: alpha must be >= 0");
  if (!(coefficient > 0.0) || !std::isfinite(coefficient))
    throw ValidationError("power: coefficient must be positive");
  if (!(domain_end > 0.0)) throw ValidationError("power: domain_end must be positive");

  auto s = std::make_shared<State>();
  s->family = ModulusFamily::power;
  s->params.alpha = alpha;
  s->params.coefficient = coefficient;
  s->domain_end = domain_end;
  s->label = alpha == 0.0 ? "constant(" + number(coefficient) + ")"
                          : "power(alpha=" + number(alpha) + ", C=" + number(coefficient) + ")";
  if (alpha == 0.0) {
    s->supremum = coefficient;
  } else {
    s->supremum = std::isfinite(domain_end) ? coefficient * std::pow(domain_end, alpha) : kInfinity;
  }
  s->eval = [alpha, coefficient](double t) { return coefficient * std::pow(t, alpha); };
  s->closed_inverse = true;
  if (alpha == 0.0) {
    // inf{t > 0 : C >= y} is the left end of the domain.
    s->inverse = [](double, double) { return 0.0; };
    s->primitive = [](double) { return kInfinity; };
  } else {
    s->inverse = [alpha, coefficient](double y, double) {
      return std::pow(y / coefficient, 1.0 / alpha);
    };
    s->primitive = [alpha, coefficient](double x) {
      return coefficient * std::pow(x, alpha) / alpha;
    };
    s->log_eval = [alpha, coefficient](double L) { return coefficient * std::exp(alpha * L); };
    s->log_primitive = [alpha, coefficient](double L) { return coefficient * std::exp(alpha * L) / alpha; };
  }
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::constant(double value, double domain_end) {
  return power(0.0, value, domain_end);
}

ModulusOfContinuity ModulusOfContinuity::log_power(double alpha, double domain_end) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("log_power: alpha must be > 0");
  if (!(domain_end > 0.0) || !(domain_end < std::exp(1.0)))
    throw ValidationError("log_power: domain_end must lie in (0, e)");

  auto s = std::make_shared<State>();
  s->family = ModulusFamily::log_power;
  s->params.alpha = alpha;
  s->domain_end = domain_end;
  s->label = "log_power(alpha=" + number(alpha) + ")";
  s->eval = [alpha](double t) { return std::pow(1.0 - std::log(t), -alpha); };
  s->supremum = s->eval(domain_end);
  s->closed_inverse = true;
  // (1 - ln t)^-alpha = y  <=>  t = exp(1 - y^{-1/alpha})
  s->inverse = [alpha](double y, double) { return std::exp(1.0 - std::pow(y, -1.0 / alpha)); };
  // u = 1 - ln t turns the Dini integral into int u^-alpha du.
  s->primitive = [alpha](double x) {
    if (alpha <= 1.0) return kInfinity;
    return std::pow(1.0 - std::log(x), 1.0 - alpha) / (alpha - 1.0);
  };
  s->log_eval = [alpha](double L) { return std::pow(1.0 - L, -alpha); };
  s->log_primitive = [alpha](double L) {
    if (alpha <= 1.0) return kInfinity;
    return std::pow(1.0 - L, 1.0 - alpha) / (alpha - 1.0);
  };
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::power_series(std::vector<double> coefficients,
                                                      std::vector<double> exponents,
                                                      double tail_bound, double domain_end) {
  if (coefficients.empty() || coefficients.size() != exponents.size())
    throw ValidationError("power_series: need equally many coefficients and exponents");
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (!(coefficients[j] > 0.0) || !(exponents[j] > 0.0))
      throw ValidationError("power_series: coefficients and exponents must be positive");
  }
  if (!(tail_bound >= 0.0)) throw ValidationError("power_series: tail_bound must be >= 0");
  if (!(domain_end > 0.0) || !std::isfinite(domain_end))
    throw ValidationError("power_series: domain_end must be positive and finite");

  auto s = std::make_shared<State>();
  s->family = ModulusFamily::power_series;
  s->params.coefficients = coefficients;
  s->params.exponents = exponents;
  s->params.truncation = coefficients.size();
  s->domain_end = domain_end;
  s->truncation_tail = tail_bound;
  s->label = "power_series(terms=" + std::to_string(coefficients.size()) + ")";
  s->eval = [a = coefficients, g = exponents](double t) {
    double sum = 0.0;
    // smallest terms first
    for (std::size_t j = a.size(); j-- > 0;) sum += a[j] * std::pow(t, g[j]);
    return sum;
  };
  s->log_eval = [a = coefficients, g = exponents](double L) {
    double sum = 0.0;
    for (std::size_t j = a.size(); j-- > 0;) sum += a[j] * std::exp(g[j] * L);
    return sum;
  };
  s->log_primitive = [a = coefficients, g = exponents](double L) {
    double sum = 0.0;
    for (std::size_t j = a.size(); j-- > 0;) sum += a[j] * std::exp(g[j] * L) / g[j];
    return sum;
  };
  s->primitive = [a = std::move(coefficients), g = std::move(exponents)](double x) {
    double sum = 0.0;
    for (std::size_t j = a.size(); j-- > 0;) sum += a[j] * std::pow(x, g[j]) / g[j];
    return sum;
  };
  s->supremum = s->eval(domain_end);
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::root_series(std::size_t terms) {
  if (terms == 0) throw ValidationError("root_series: need at least one term");
  std::vector<double> a(terms), g(terms);
  for (std::size_t j = 1; j <= terms; ++j) {
    a[j - 1] = std::ldexp(1.0, -static_cast<int>(j));
    g[j - 1] = 1.0 / static_cast<double>(j);
  }
  // On (0, 1] every discarded term is at most 2^-j.
  const double tail = std::ldexp(1.0, -static_cast<int>(terms));
  return power_series(std::move(a), std::move(g), tail, 1.0);
}

ModulusOfContinuity ModulusOfContinuity::tilde_phi(std::size_t truncation) {
  if (truncation == 0) throw ValidationError("tilde_phi: truncation must be >= 1");
  auto s = std::make_shared<State>();
  s->family = ModulusFamily::tilde_phi;
  s->params.truncation = truncation;
  s->domain_end = 1.0;
  // b_n = int_0^1 (1 - ln t)^{-(1+1/n)} dt/t = n, so a_n = 1/(n 2^n).
  // sum_{n>N} a_n <= 2^-N/(N+1).
  s->truncation_tail =
      std::ldexp(1.0, -static_cast<int>(truncation)) / static_cast<double>(truncation + 1);
  s->label = "tilde_phi(N=" + std::to_string(truncation) + ")";
  s->log_eval = [truncation](double L) {
    const double u = 1.0 - L;
    double sum = 0.0;
    for (std::size_t n = truncation; n >= 1; --n) {
      const double dn = static_cast<double>(n);
      sum += std::ldexp(1.0, -static_cast<int>(n)) / dn * std::pow(u, -(1.0 + 1.0 / dn));
    }
    return sum;
  };
  s->log_primitive = [truncation](double L) {
    const double u = 1.0 - L;
    double sum = 0.0;
    for (std::size_t n = truncation; n >= 1; --n)
      sum += std::ldexp(1.0, -static_cast<int>(n)) * std::pow(u, -1.0 / static_cast<double>(n));
    return sum;
  };
  s->eval = [f = s->log_eval](double t) { return f(std::log(t)); };
  s->primitive = [f = s->log_primitive](double x) { return f(std::log(x)); };
  s->supremum = s->eval(1.0);
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::tabulated(std::vector<double> t, std::vector<double> values,
                                                   double monotone_tolerance) {
  if (t.empty() || t.size() != values.size())
    throw ValidationError("tabulated: need equally many abscissae and values");
  if (!(monotone_tolerance >= 0.0)) throw ValidationError("tabulated: tolerance must be >= 0");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i]))
      throw ValidationError("tabulated: abscissae must be positive and finite");
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InvariantError("tabulated: value at t=" + number(t[i]) + " is not positive");
    if (i > 0) {
      if (!(t[i] > t[i - 1])) throw ValidationError("tabulated: abscissae must be strictly ascending");
      if (values[i] < values[i - 1] - monotone_tolerance)
        throw InvariantError("tabulated: monotonicity violated at t=" + number(t[i]));
    }
  }

  auto s = std::make_shared<State>();
  s->family = ModulusFamily::tabulated;
  s->params.truncation = t.size();
  s->domain_end = t.back();
  s->monotone_tolerance = monotone_tolerance;
  s->supremum = *std::max_element(values.begin(), values.end());
  s->label = "tabulated(knots=" + std::to_string(t.size()) + ")";
  s->eval = [t, values](double x) {
    if (x <= t.front()) return values.front() * x / t.front();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
  };
  // Exact integral of the interpolant divided by t.
  s->primitive = [t = std::move(t), values = std::move(values)](double x) {
    const double first = std::min(x, t.front());
    double sum = values.front() * first / t.front();
    for (std::size_t i = 1; i < t.size() && t[i - 1] < x; ++i) {
      const double a = t[i - 1];
      const double b = std::min(x, t[i]);
      const double slope = (values[i] - values[i - 1]) / (t[i] - t[i - 1]);
      sum += (values[i - 1] - slope * a) * std::log(b / a) + slope * (b - a);
    }
    return sum;
  };
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::from_csv(const std::string& path, double monotone_tolerance) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open modulus table '" + path + "'");
  std::vector<double> t, w;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double a = 0.0, b = 0.0;
    if (!(fields >> a >> b)) {
      if (t.empty()) continue;  // header
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    t.push_back(a);
    w.push_back(b);
  }
  return tabulated(std::move(t), std::move(w), monotone_tolerance);
}

ModulusOfContinuity ModulusOfContinuity::custom(Function evaluator, double domain_end,
                                                std::string label, Function inverse,
                                                Function dini_primitive, double supremum) {
  if (!evaluator) throw ValidationError("custom modulus: evaluator is empty");
  if (!(domain_end > 0.0)) throw ValidationError("custom modulus: domain_end must be positive");
  auto s = std::make_shared<State>();
  s->family = ModulusFamily::composed;
  s->label = std::move(label);
  s->domain_end = domain_end;
  s->eval = std::move(evaluator);
  if (inverse) {
    s->closed_inverse = true;
    s->inverse = [inv = std::move(inverse)](double y, double) { return inv(y); };
  }
  s->primitive = std::move(dini_primitive);
  if (std::isnan(supremum))
    s->supremum = std::isfinite(domain_end) ? s->eval(domain_end) : kInfinity;
  else
    s->supremum = supremum;
  return ModulusOfContinuity(std::move(s));
}

double ModulusOfContinuity::evaluate(double t) const {
  const double end = state_->domain_end;
  if (!(t > 0.0) || (std::isfinite(end) && t > end * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())))
    throw DomainError(state_->label + ": argument " + number(t) + " outside (0, " + number(end) + "]");
  const double v = state_->eval(std::min(t, end));
  if (!std::isfinite(v))
    throw NumericFailure(state_->label + ": non-finite value at t=" + number(t));
  return v;
}

double ModulusOfContinuity::inverse_evaluate(double y, double tol) const {
  if (!(y > 0.0) || !std::isfinite(y))
    throw DomainError(state_->label + ": inverse argument must be positive, got " + number(y));
  if (!(tol > 0.0)) throw ValidationError("inverse_evaluate: tol must be positive");
  const double sup = state_->supremum;
  if (y > sup * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()))
    throw DomainError(state_->label + ": value " + number(y) + " above sup w = " + number(sup));

  if (state_->inverse) {
    const double t = state_->inverse(y, tol);
    return std::isfinite(state_->domain_end) ? std::min(t, state_->domain_end) : t;
  }

  const double mono_tol = state_->monotone_tolerance;
  double hi = state_->domain_end;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (state_->eval(hi) < y) {
      hi *= 2.0;
      if (hi > 1e300) throw DomainError(state_->label + ": value " + number(y) + " is never reached");
    }
  }
  double w_hi = state_->eval(hi);
  if (w_hi < y) {
    // y equals sup up to rounding
    return hi;
  }
  double lo = hi;
  double w_lo = w_hi;
  while (w_lo >= y) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) return 0.0;  // inverse underflows
    const double w = state_->eval(lo);
    if (w > w_lo + mono_tol)
      throw InvariantError(state_->label + ": non-monotone evaluator near t=" + number(lo));
    w_lo = w;
    if (w_lo >= y) {
      hi = lo;
      w_hi = w_lo;
    }
  }
  // invariant: w(lo) < y <= w(hi)
  for (int iter = 0; iter < 4000; ++iter) {
    if (hi - lo <= tol * std::min(1.0, hi)) break;
    const double mid = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double w = state_->eval(mid);
    if (w < w_lo - mono_tol || w > w_hi + mono_tol)
      throw InvariantError(state_->label + ": non-monotone evaluator near t=" + number(mid));
    if (w >= y) {
      hi = mid;
      w_hi = w;
    } else {
      lo = mid;
      w_lo = w;
    }
  }
  return hi;
}

bool ModulusOfContinuity::has_closed_form_inverse() const { return state_->closed_inverse; }

std::optional<double> ModulusOfContinuity::dini_primitive(double x) const {
  if (!state_->primitive) return std::nullopt;
  if (!(x > 0.0)) return 0.0;
  return state_->primitive(std::min(x, state_->domain_end));
}

bool ModulusOfContinuity::has_dini_primitive() const { return static_cast<bool>(state_->primitive); }

std::optional<double> ModulusOfContinuity::evaluate_log(double log_t) const {
  const double end = state_->domain_end;
  if (std::isnan(log_t) || (std::isfinite(end) && log_t > std::log(end) + 4.0 * std::numeric_limits<double>::epsilon()))
    throw DomainError(state_->label + ": log-argument " + number(log_t) + " outside the domain");
  if (state_->log_eval) {
    const double v = state_->log_eval(std::isfinite(end) ? std::min(log_t, std::log(end)) : log_t);
    if (!std::isfinite(v)) throw NumericFailure(state_->label + ": non-finite value at ln t=" + number(log_t));
    return v;
  }
  const double t = std::exp(log_t);
  if (!(t > 0.0)) return std::nullopt;
  return evaluate(t);
}

std::optional<double> ModulusOfContinuity::dini_primitive_log(double log_x) const {
  if (state_->log_primitive) {
    const double end = state_->domain_end;
    return state_->log_primitive(std::isfinite(end) ? std::min(log_x, std::log(end)) : log_x);
  }
  const double x = std::exp(log_x);
  if (!state_->primitive || !(x > 0.0)) return std::nullopt;
  return dini_primitive(x);
}

bool ModulusOfContinuity::has_log_form() const { return static_cast<bool>(state_->log_eval); }
double ModulusOfContinuity::domain_end() const { return state_->domain_end; }
double ModulusOfContinuity::supremum() const { return state_->supremum; }
ModulusFamily ModulusOfContinuity::family() const { return state_->family; }
const FamilyParameters& ModulusOfContinuity::parameters() const { return state_->params; }
const std::string& ModulusOfContinuity::label() const { return state_->label; }
double ModulusOfContinuity::monotone_tolerance() const { return state_->monotone_tolerance; }
double ModulusOfContinuity::truncation_tail_bound() const { return state_->truncation_tail; }

ModulusOfContinuity ModulusOfContinuity::with_argument_scale(double k) const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("argument scale must be positive");
  if (state_->family == ModulusFamily::power) {
    const auto& p = state_->params;
    return power(p.alpha, p.coefficient * std::pow(k, p.alpha), state_->domain_end / k);
  }
  auto s = std::make_shared<State>(*state_);
  s->family = ModulusFamily::composed;
  s->label = state_->label + "(" + number(k) + " t)";
  s->domain_end = state_->domain_end / k;
  s->truncation_tail = state_->truncation_tail;
  const ModulusOfContinuity base = *this;
  s->eval = [base, k](double t) { return base.state_->eval(k * t); };
  s->inverse = [base, k](double y, double tol) { return base.inverse_evaluate(y, tol) / k; };
  s->closed_inverse = state_->closed_inverse;
  if (state_->primitive)
    s->primitive = [base, k](double x) { return base.state_->primitive(k * x); };
  const double log_k = std::log(k);
  if (state_->log_eval) s->log_eval = [base, log_k](double L) { return base.state_->log_eval(L + log_k); };
  if (state_->log_primitive)
    s->log_primitive = [base, log_k](double L) { return base.state_->log_primitive(L + log_k); };
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::with_value_scale(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("value scale must be positive");
  if (state_->family == ModulusFamily::power) {
    const auto& p = state_->params;
    return power(p.alpha, p.coefficient * c, state_->domain_end);
  }
  auto s = std::make_shared<State>(*state_);
  s->family = ModulusFamily::composed;
  s->label = number(c) + " " + state_->label;
  s->supremum = c * state_->supremum;
  s->monotone_tolerance = c * state_->monotone_tolerance;
  s->truncation_tail = c * state_->truncation_tail;
  const ModulusOfContinuity base = *this;
  s->eval = [base, c](double t) { return c * base.state_->eval(t); };
  s->inverse = [base, c](double y, double tol) { return base.inverse_evaluate(y / c, tol); };
  s->closed_inverse = state_->closed_inverse;
  if (state_->primitive)
    s->primitive = [base, c](double x) { return c * base.state_->primitive(x); };
  if (state_->log_eval) s->log_eval = [base, c](double L) { return c * base.state_->log_eval(L); };
  if (state_->log_primitive)
    s->log_primitive = [base, c](double L) { return c * base.state_->log_primitive(L); };
  return ModulusOfContinuity(std::move(s));
}

ModulusOfContinuity ModulusOfContinuity::inverse_modulus(double tol) const {
  if (state_->family == ModulusFamily::power) {
    const auto& p = state_->params;
    if (p.alpha == 0.0) throw ValidationError("constant law has no inverse modulus");
    return power(1.0 / p.alpha, std::pow(p.coefficient, -1.0 / p.alpha), state_->supremum);
  }
  if (state_->family == ModulusFamily::log_power) {
    const double alpha = state_->params.alpha;
    // s = u^-alpha turns int_0^x exp(1 - s^{-1/alpha}) ds/s into alpha e E1(x^{-1/alpha}).
    return custom([alpha](double y) { return std::exp(1.0 - std::pow(y, -1.0 / alpha)); },
                  state_->supremum, "inverse(" + state_->label + ")",
                  [alpha](double t) { return std::pow(1.0 - std::log(t), -alpha); },
                  [alpha](double x) {
                    return -alpha * std::exp(1.0) * std::expint(-std::pow(x, -1.0 / alpha));
                  },
                  state_->domain_end);
  }
  auto s = std::make_shared<State>();
  s->family = ModulusFamily::composed;
  s->label = "inverse(" + state_->label + ")";
  s->domain_end = state_->supremum;
  s->supremum = state_->domain_end;
  const ModulusOfContinuity base = *this;
  s->eval = [base, tol](double y) { return base.inverse_evaluate(y, tol); };
  s->closed_inverse = true;
  s->inverse = [base](double t, double) { return base.state_->eval(t); };
  return ModulusOfContinuity(std::move(s));
}

void ModulusOfContinuity::check_invariants(const ModulusCheckOptions& options) const {
  const double top = std::isfinite(state_->domain_end) ? state_->domain_end : 1.0;
  double prev_t = top;
  double prev_w = evaluate(top);
  if (!(prev_w > 0.0)) throw InvariantError(state_->label + ": w(T) is not positive");
  for (double t = top * 0.5; t >= options.floor; t *= 0.5) {
    const double w = evaluate(t);
    if (!(w > 0.0)) throw InvariantError(state_->label + ": w(" + number(t) + ") is not positive");
    if (w > prev_w + state_->monotone_tolerance)
      throw InvariantError(state_->label + ": monotonicity violated between t=" + number(t) +
                           " and t=" + number(prev_t));
    prev_t = t;
    prev_w = w;
  }
  if (options.require_vanishing && !(prev_w <= options.vanishing_ratio * evaluate(top)))
    throw InvariantError(state_->label + ": does not decay toward 0 (w(" + number(prev_t) +
                         ") = " + number(prev_w) + ")");
}

DegeneracyLaw DegeneracyLaw::make(ModulusOfContinuity sigma, bool require_normalized) {
  bool normalized = false;
  if (sigma.domain_end() >= 1.0) normalized = sigma.evaluate(1.0) >= 1.0;
  if (require_normalized && !normalized)
    throw ValidationError("degeneracy law " + sigma.label() + " is not normalized: need sigma(1) >= 1");
  return DegeneracyLaw{std::move(sigma), normalized};
}

ModulusOfContinuity gamma_of(const DegeneracyLaw& law) {
  const ModulusOfContinuity& sigma = law.sigma;
  if (sigma.family() == ModulusFamily::power) {
    const auto& p = sigma.parameters();
    return ModulusOfContinuity::power(p.alpha + 1.0, p.coefficient, sigma.domain_end());
  }
  const double end = sigma.domain_end();
  const double sup = std::isfinite(end) ? end * sigma.evaluate(end) : ModulusOfContinuity::kInfinity;
  return ModulusOfContinuity::custom([sigma](double t) { return t * sigma.evaluate(t); }, end,
                                     "t*" + sigma.label(), {}, {}, sup);
}

RescuedLaw equivalent_law_rescue(const std::function<double(double)>& sigma_raw,
                                 const ModulusOfContinuity& rho, double sandwich_constant,
                                 const std::vector<double>& grid) {
  if (!(sandwich_constant >= 1.0)) throw ValidationError("sandwich constant must be >= 1");
  if (grid.empty()) throw ValidationError("sandwich check needs a non-empty grid");
  for (const double t : grid) {
    const double raw = sigma_raw(t);
    const double r = rho.evaluate(t);
    if (!(raw >= r / sandwich_constant) || !(raw <= r * sandwich_constant)) {
      throw SandwichViolation("sandwich C^-1 rho <= sigma <= C rho fails at t=" + number(t) +
                                  " (sigma=" + number(raw) + ", rho=" + number(r) + ")",
                              t);
    }
  }
  return RescuedLaw{DegeneracyLaw::make(rho, false), sandwich_constant};
}

}  // namespace dinilab
