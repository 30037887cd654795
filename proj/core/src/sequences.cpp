#include "dinilab/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "internal/compensated_sum.hpp"
#include "internal/format.hpp"

namespace dinilab {

namespace {

using detail::number;

}  // namespace

struct SummableSequence::State {
  Terms terms;
  Tail tail_upper;
  Tail tail_lower;
  std::string label;
  std::optional<std::uint64_t> support_end;
};

SummableSequence::SummableSequence(std::shared_ptr<const State> state) : state_(std::move(state)) {}

SummableSequence SummableSequence::custom(Terms terms, Tail tail_upper, std::string label,
                                          Tail tail_lower) {
  if (!terms || !tail_upper) throw ValidationError("sequence needs both terms and a tail oracle");
  auto s = std::make_shared<State>();
  s->terms = std::move(terms);
  s->tail_upper = std::move(tail_upper);
  s->tail_lower = std::move(tail_lower);
  s->label = std::move(label);
  return SummableSequence(std::move(s));
}

SummableSequence SummableSequence::geometric(double ratio, double scale) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("geometric sequence: ratio must lie in (0, 1)");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("geometric sequence: scale must be positive");
  const double log_q = std::log(ratio);
  auto power_of = [log_q](std::uint64_t k) { return std::exp(static_cast<double>(k) * log_q); };
  // sum_{k>=n} q^k = q^n / (1 - q)
  auto tail = [power_of, ratio, scale](std::uint64_t n) {
    return scale * power_of(std::max<std::uint64_t>(n, 1)) / (1.0 - ratio);
  };
  const double slack = 1.0 + 1e-13;
  return custom([power_of, scale](std::uint64_t k) { return scale * power_of(k); },
                [tail, slack](std::uint64_t n) { return tail(n) * slack; },
                "geometric(ratio=" + number(ratio) + ", scale=" + number(scale) + ")",
                [tail, slack](std::uint64_t n) { return tail(n) / slack; });
}

SummableSequence SummableSequence::power(double exponent, double scale) {
  if (!(exponent > 1.0) || !std::isfinite(exponent))
    throw ValidationError("power sequence: exponent must be > 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("power sequence: scale must be positive");
  const double p = exponent;
  // Euler-Maclaurin for the completely monotone f(x) = x^-p: with
  // S = I + f/2 - f'/12 + R and I = int_n^inf f, the remainder R lies
  // between 0 and f'''/720 < 0.
  auto parts = [p](double n) {
    const double f = std::pow(n, -p);
    const double base = n * f / (p - 1.0) + 0.5 * f + p * f / (12.0 * n);
    const double correction = p * (p + 1.0) * (p + 2.0) * f / (720.0 * n * n * n);
    return std::pair<double, double>(base, correction);
  };
  const double slack = 1.0 + 1e-13;
  return custom(
      [p, scale](std::uint64_t k) { return scale * std::pow(static_cast<double>(k), -p); },
      [=](std::uint64_t n) {
        const double x = static_cast<double>(std::max<std::uint64_t>(n, 1));
        return slack * scale * parts(x).first;
      },
      "power(exponent=" + number(p) + ", scale=" + number(scale) + ")",
      [=](std::uint64_t n) {
        const double x = static_cast<double>(std::max<std::uint64_t>(n, 1));
        const auto [base, correction] = parts(x);
        return scale * (base - correction) / slack;
      });
}

SummableSequence SummableSequence::finite(std::vector<double> values) {
  for (const double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("finite sequence: terms must be finite and >= 0");
  }
  std::size_t end = values.size();
  while (end > 0 && values[end - 1] == 0.0) --end;
  values.resize(end);
  // suffix[i] = sum_{k >= i+1} a_k, accumulated smallest first
  std::vector<double> suffix(values.size() + 1, 0.0);
  for (std::size_t i = values.size(); i-- > 0;) suffix[i] = suffix[i + 1] + values[i];
  const double rounding = 4.0 * std::numeric_limits<double>::epsilon();
  auto shared_values = std::make_shared<const std::vector<double>>(std::move(values));
  auto shared_suffix = std::make_shared<const std::vector<double>>(std::move(suffix));
  auto s = std::make_shared<State>();
  s->terms = [shared_values](std::uint64_t k) {
    return (k >= 1 && k <= shared_values->size()) ? (*shared_values)[k - 1] : 0.0;
  };
  s->tail_upper = [shared_suffix, rounding](std::uint64_t n) {
    const std::size_t i = static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(n, 1) - 1, shared_suffix->size() - 1));
    const double v = (*shared_suffix)[i];
    return v * (1.0 + rounding * static_cast<double>(shared_suffix->size()));
  };
  s->tail_lower = [shared_suffix, rounding](std::uint64_t n) {
    const std::size_t i = static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(n, 1) - 1, shared_suffix->size() - 1));
    return (*shared_suffix)[i] * (1.0 - rounding * static_cast<double>(shared_suffix->size()));
  };
  s->label = "finite(length=" + std::to_string(shared_values->size()) + ")";
  s->support_end = shared_values->size() + 1;
  return SummableSequence(std::move(s));
}

SummableSequence SummableSequence::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sequence table '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (row.empty()) {
      if (values.empty() && line_no == 1) continue;  // header
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected a number");
    }
    if (row.size() == 1) {
      values.push_back(row[0]);
    } else {
      const double index = row[0];
      if (index != std::floor(index) || index < 1.0)
        throw ValidationError(path + ":" + std::to_string(line_no) + ": index must be a positive integer");
      const auto k = static_cast<std::size_t>(index);
      if (k < values.size() + 1)
        throw ValidationError(path + ":" + std::to_string(line_no) + ": indices must ascend");
      values.resize(k - 1, 0.0);
      values.push_back(row[1]);
    }
  }
  return finite(std::move(values));
}

SummableSequence SummableSequence::mixture(const std::vector<SummableSequence>& members,
                                           std::vector<double> weights) {
  if (members.empty()) throw ValidationError("mixture needs at least one member");
  if (weights.empty()) weights.assign(members.size(), 1.0);
  if (weights.size() != members.size()) throw ValidationError("mixture: one weight per member");
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("mixture: weights must be finite and >= 0");
  }
  std::string label = "mixture(";
  std::optional<std::uint64_t> support = std::uint64_t{0};
  for (std::size_t i = 0; i < members.size(); ++i) {
    label += (i ? ", " : "") + members[i].label();
    const auto end = members[i].support_end();
    if (support && end)
      support = std::max(*support, *end);
    else
      support.reset();
  }
  label += ")";
  auto s = std::make_shared<State>();
  s->terms = [members, weights](std::uint64_t k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) sum += weights[i] * members[i].term(k);
    return sum;
  };
  const double slack = 1.0 + 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(members.size());
  s->tail_upper = [members, weights, slack](std::uint64_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) sum += weights[i] * members[i].tail(n);
    return sum * slack;
  };
  s->tail_lower = [members, weights, slack](std::uint64_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) sum += weights[i] * members[i].tail_lower(n);
    return sum / slack;
  };
  s->label = std::move(label);
  s->support_end = support;
  return SummableSequence(std::move(s));
}

double SummableSequence::term(std::uint64_t k) const {
  if (k == 0) throw DomainError(state_->label + ": indices start at 1");
  const double v = state_->terms(k);
  if (!(v >= 0.0) || !std::isfinite(v))
    throw InvariantError(state_->label + ": term " + std::to_string(k) + " is negative or non-finite");
  return v;
}

double SummableSequence::tail(std::uint64_t n) const {
  if (n == 0) n = 1;
  const double v = state_->tail_upper(n);
  if (!(v >= 0.0) || std::isnan(v))
    throw InvariantError(state_->label + ": tail oracle returned an invalid bound at n=" + std::to_string(n));
  return v;
}

double SummableSequence::tail_lower(std::uint64_t n) const {
  if (!state_->tail_lower) return 0.0;
  if (n == 0) n = 1;
  return std::max(0.0, state_->tail_lower(n));
}

const std::string& SummableSequence::label() const { return state_->label; }

std::optional<std::uint64_t> SummableSequence::support_end() const { return state_->support_end; }

CertifiedValue l1_norm(const SummableSequence& a, double precision, std::uint64_t max_terms) {
  if (!(precision > 0.0)) throw ValidationError("l1_norm: precision must be positive");
  // Width of the tail bracket after summing the first n-1 terms.
  auto width = [&a](std::uint64_t n) { return a.tail(n) - a.tail_lower(n); };
  const double target = precision;

  std::uint64_t n = 1;
  if (const auto end = a.support_end()) {
    n = *end;  // everything past the support is exactly zero
  } else if (width(1) > target) {
    // exponential search for an admissible start of the tail, then bisection
    std::uint64_t lo = 1, hi = 2;
    while (width(hi) > target) {
      lo = hi;
      if (hi > max_terms)
        throw NumericFailure("l1_norm: " + a.label() + " needs more than " + std::to_string(max_terms) +
                             " terms for precision " + number(precision));
      hi *= 2;
    }
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (width(mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    n = hi;
  }
  if (n - 1 > max_terms)
    throw NumericFailure("l1_norm: " + a.label() + " needs more than " + std::to_string(max_terms) + " terms");

  detail::CompensatedSum sum;
  for (std::uint64_t k = 1; k < n; ++k) sum.add(a.term(k));
  const double head = sum.value();
  const double hi = a.tail(n);
  const double lo = a.tail_lower(n);
  CertifiedValue out;
  out.value = head + 0.5 * (hi + lo);
  out.error = 0.5 * (hi - lo) + 2.0 * std::numeric_limits<double>::epsilon() * head;
  return out;
}

}  // namespace dinilab
