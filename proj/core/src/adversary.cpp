// Adversarial sequence against a fixed c -> 0: pick n_k with c_j < 2^-(2k+3)
// for j >= n_k, spread mass 2^-(k+1) evenly over [n_k, n_{k+1}) and 1/2 over
// the head [1, n_1). Then ||a||_1 = 1 while block k alone contributes
// more than 2^(k+2) to sum a_j / c_j.
//
// Indices are tracked through L = ln n so that c decaying like 1/ln j (whose
// block starts exceed e^1000) stays representable.
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dinilab/sequences.hpp"
#include "internal/compensated_sum.hpp"

namespace dinilab {

namespace {

constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;
const double kLogExactLimit = 53.0 * std::log(2.0);
const double kLogUint64 = 64.0 * std::log(2.0);

struct Position {
  double log_index = 0.0;
  std::optional<std::uint64_t> index;  // set while below 2^53
};

Position at_integer(std::uint64_t n) { return {std::log(static_cast<double>(n)), n}; }

double c_at(const CoefficientSequence& c, const Position& p) {
  if (p.index) return c.at(*p.index);
  return c.at_log(p.log_index);
}

// ln(e^b - e^a) for b > a.
double log_difference(double b, double a) { return b + std::log1p(-std::exp(a - b)); }

// Least position >= from with c < threshold.
Position first_below(const CoefficientSequence& c, double threshold, Position from,
                     double max_log_index) {
  if (from.index) {
    std::uint64_t lo = *from.index;
    if (c.at(lo) < threshold) return from;
    std::uint64_t step = 1;
    while (true) {
      const std::uint64_t candidate = lo + step;
      if (candidate >= kExactLimit) break;
      if (c.at(candidate) < threshold) {
        std::uint64_t hi = candidate;  // c(lo) >= threshold > c(hi)
        while (hi - lo > 1) {
          const std::uint64_t mid = lo + (hi - lo) / 2;
          if (c.at(mid) < threshold)
            hi = mid;
          else
            lo = mid;
        }
        return at_integer(hi);
      }
      lo = candidate;
      step *= 2;
    }
    from = Position{kLogExactLimit, std::nullopt};
  }
  if (!c.has_log_form())
    throw NumericFailure("adversary: " + c.label() + " stays above " + std::to_string(threshold) +
                         " for every index below 2^53");
  double lo = from.log_index;
  if (c.at_log(lo) < threshold) return from;
  double hi = std::max(2.0 * lo, lo + 1.0);
  while (!(c.at_log(hi) < threshold)) {
    lo = hi;
    if (hi > max_log_index)
      throw NumericFailure("adversary: " + c.label() + " does not fall below " + std::to_string(threshold) +
                           " within the search limit");
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (c.at_log(mid) < threshold)
      hi = mid;
    else
      lo = mid;
  }
  return Position{hi, std::nullopt};
}

Position doubled(const Position& p) {
  if (p.index && *p.index < kExactLimit / 2) return at_integer(2 * *p.index);
  return Position{p.log_index + std::log(2.0), std::nullopt};
}

void check_non_increasing(const CoefficientSequence& c) {
  double previous = c.at(1);
  if (!(previous > 0.0)) throw ValidationError("adversary: c_1 must be positive");
  for (std::uint64_t j = 2; j <= 4096; ++j) {
    const double v = c.at(j);
    if (!(v >= 0.0) || v > previous)
      throw ValidationError("adversary: " + c.label() + " is not non-increasing at j=" + std::to_string(j));
    previous = v;
  }
  if (c.has_log_form()) {
    double prev_log = c.at_log(std::log(4096.0));
    for (double L = 9.0; L < 1e6; L *= 1.5) {
      const double v = c.at_log(L);
      if (v > prev_log)
        throw ValidationError("adversary: " + c.label() + " is not non-increasing near ln j=" + std::to_string(L));
      prev_log = v;
    }
  }
}

struct BlockEdge {
  Position start;
  double c_value;
};

}  // namespace

CoefficientSequence::CoefficientSequence(IndexFunction at_index, LogIndexFunction at_log_index,
                                         std::string label)
    : at_index_(std::move(at_index)), at_log_index_(std::move(at_log_index)), label_(std::move(label)) {
  if (!at_index_) throw ValidationError("coefficient sequence needs an index evaluator");
}

CoefficientSequence CoefficientSequence::from_function(IndexFunction at_index, std::string label) {
  return CoefficientSequence(std::move(at_index), {}, std::move(label));
}

CoefficientSequence CoefficientSequence::harmonic() {
  return CoefficientSequence([](std::uint64_t j) { return 1.0 / static_cast<double>(j); },
                             [](double L) { return std::exp(-L); }, "1/j");
}

CoefficientSequence CoefficientSequence::geometric() {
  return CoefficientSequence(
      [](std::uint64_t j) { return std::exp(-std::log(2.0) * static_cast<double>(j)); },
      [](double L) { return std::exp(-std::log(2.0) * std::exp(L)); }, "2^-j");
}

CoefficientSequence CoefficientSequence::inverse_log() {
  return CoefficientSequence(
      [](std::uint64_t j) { return 1.0 / std::log1p(static_cast<double>(j)); },
      // ln(e^L + 1) = L + ln(1 + e^-L)
      [](double L) { return 1.0 / (L + std::log1p(std::exp(-L))); }, "1/ln(j+1)");
}

AdversaryResult adversarial_for(const CoefficientSequence& c, double target,
                                const AdversaryOptions& options) {
  if (!std::isfinite(target)) throw ValidationError("adversary: target must be finite");
  check_non_increasing(c);

  // n_1 >= 2 so that the head is non-empty; n_{k+1} >= 2 n_k keeps the block
  // lengths growing, which makes a non-increasing.
  std::vector<BlockEdge> edges;
  Position first = first_below(c, std::ldexp(1.0, -5), at_integer(2), options.max_log_index);
  edges.push_back({first, c_at(c, first)});

  const double c_first = c.at(1);
  const double head_mass = 0.5;
  double lower = head_mass / c_first;
  std::size_t reached = 0;
  for (std::size_t k = 1; k <= options.max_blocks; ++k) {
    const double threshold = std::ldexp(1.0, -(2 * static_cast<int>(k + 1) + 3));
    const Position next = first_below(c, threshold, doubled(edges.back().start), options.max_log_index);
    edges.push_back({next, c_at(c, next)});
    const double contribution = std::ldexp(1.0, -static_cast<int>(k + 1)) / edges[k - 1].c_value;
    if (reached == 0) {
      lower += contribution;
      if (lower > target) reached = k;
    }
    // keep going until every uint64 index lies in a closed block
    if (reached != 0 && edges.back().start.log_index > kLogUint64) break;
  }
  if (reached == 0)
    throw NumericFailure("adversary: target not exceeded within " + std::to_string(options.max_blocks) + " blocks");

  const std::size_t block_count = edges.size() - 1;
  AdversaryResult out{SummableSequence::finite({1.0}), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  out.log_head_end = edges[0].start.log_index;
  out.head_end = edges[0].start.index;
  out.c_first = c_first;
  // head [1, n_1): n_1 - 1 terms of 1/(2(n_1 - 1))
  const double log_head_len = out.head_end ? std::log(static_cast<double>(*out.head_end - 1))
                                           : log_difference(out.log_head_end, 0.0);
  out.head_value = 0.5 * std::exp(-log_head_len);
  out.partial_sum_lower = head_mass / c_first;
  for (std::size_t k = 1; k <= block_count; ++k) {
    AdversaryBlock b;
    b.k = k;
    b.log_start = edges[k - 1].start.log_index;
    b.start = edges[k - 1].start.index;
    const auto& end = edges[k].start;
    if (b.start && end.index)
      b.log_length = std::log(static_cast<double>(*end.index - *b.start));
    else
      b.log_length = log_difference(end.log_index, b.log_start);
    b.mass = std::ldexp(1.0, -static_cast<int>(k + 1));
    b.log_value = std::log(b.mass) - b.log_length;
    b.value = std::exp(b.log_value);
    b.c_at_start = edges[k - 1].c_value;
    b.contribution_lower = b.mass / b.c_at_start;
    if (k <= reached) out.partial_sum_lower += b.contribution_lower;
    out.blocks.push_back(b);
  }
  out.blocks_to_target = reached;
  const Position& k_end = edges[reached].start;
  if (k_end.index) {
    out.K = *k_end.index - 1;
    out.log_K = std::log(static_cast<double>(*out.K));
  } else {
    out.log_K = log_difference(k_end.log_index, 0.0);
  }

  // sum of head and block masses recomputed from lengths and values, in
  // log-space since far blocks have lengths beyond double range
  detail::CompensatedSum mass;
  mass.add(std::exp(log_head_len + std::log(out.head_value)));
  for (const auto& b : out.blocks) mass.add(std::exp(b.log_length + b.log_value));
  const double remainder = std::ldexp(1.0, -static_cast<int>(block_count + 1));
  out.norm.value = mass.value() + remainder;
  // exp(L + ln v) carries a relative error of a few eps times |L|
  const double eps = std::numeric_limits<double>::epsilon();
  double error = 8.0 * eps * static_cast<double>(block_count + 2) + 4.0 * eps * 0.5 * (1.0 + log_head_len);
  for (const auto& b : out.blocks) error += 4.0 * eps * b.mass * (1.0 + std::abs(b.log_length));
  out.norm.error = error;

  // lazily evaluable sequence over uint64 indices
  struct Layout {
    std::vector<double> log_starts;  // ln n_k, k = 1..J+1
    std::vector<std::optional<std::uint64_t>> starts;
    std::vector<double> values;      // head, block 1, ..., block J
  };
  auto layout = std::make_shared<Layout>();
  for (const auto& e : edges) {
    layout->log_starts.push_back(e.start.log_index);
    layout->starts.push_back(e.start.index);
  }
  layout->values.push_back(out.head_value);
  for (const auto& b : out.blocks) layout->values.push_back(b.value);

  // block number containing j: 0 for the head
  auto locate = [layout](std::uint64_t j) {
    const double L = std::log(static_cast<double>(j));
    auto past = [&](std::size_t k) {
      const auto& s = layout->starts[k];
      return s ? j >= *s : L >= layout->log_starts[k];
    };
    std::size_t lo = 0, hi = layout->starts.size();  // first k with !past(k)
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (past(mid))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  };
  auto terms = [layout, locate](std::uint64_t j) {
    const std::size_t k = locate(j);
    return k < layout->values.size() ? layout->values[k] : 0.0;
  };
  auto tail = [layout, locate](std::uint64_t n, double slack) {
    const std::size_t k = locate(n);
    if (k >= layout->values.size()) return std::ldexp(1.0, -static_cast<int>(k)) * slack;
    const auto& end = layout->starts[k];
    const double remaining = end ? static_cast<double>(*end - n)
                                 : std::exp(layout->log_starts[k]) - static_cast<double>(n);
    return (remaining * layout->values[k] + std::ldexp(1.0, -static_cast<int>(k + 1))) * slack;
  };
  std::ostringstream label;
  label << "adversary(" << c.label() << ", target=" << target << ")";
  out.a = SummableSequence::custom(
      terms, [tail](std::uint64_t n) { return tail(n, 1.0 + 1e-12); }, label.str(),
      [tail](std::uint64_t n) { return tail(n, 1.0 - 1e-12); });

  if (out.K && *out.K <= options.direct_sum_limit) {
    detail::CompensatedSum direct;
    for (std::uint64_t j = 1; j <= *out.K; ++j) direct.add(terms(j) / c.at(j));
    out.partial_sum_direct = direct.value();
  }
  return out;
}

}  // namespace dinilab
