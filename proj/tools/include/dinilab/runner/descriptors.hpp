/// @file descriptors.hpp
/// @brief JSON descriptors for moduli, sequences, families, renormalization
/// parameters and PDE problems. Relative CSV paths resolve against
/// `base_dir` (the directory of the config file).
#pragma once

#include <filesystem>

#include "dinilab/collapse.hpp"
#include "dinilab/modulus.hpp"
#include "dinilab/pde/problem.hpp"
#include "dinilab/renorm.hpp"
#include "dinilab/runner/json_reader.hpp"
#include "dinilab/sequences.hpp"

namespace dinilab::runner {

namespace fs = std::filesystem;

/// {"family": "power", "alpha": 1, "coefficient": 1, "domain_end": "inf"},
/// {"family": "constant", "value": 1}, {"family": "log_power", "alpha": 2},
/// {"family": "power_series", "coefficients": [...], "exponents": [...], "tail_bound": 0},
/// {"family": "root_series", "terms": 40}, {"family": "tilde_phi", "truncation": 40},
/// {"family": "tabulated", "csv": "path"} or {"family": "tabulated", "t": [...], "values": [...]}.
ModulusOfContinuity parse_modulus(const Json& j, const std::string& context, const fs::path& base_dir);

/// A modulus descriptor plus optional "require_normalized" (default true).
DegeneracyLaw parse_law(const Json& j, const std::string& context, const fs::path& base_dir);

/// {"kind": "geometric", "ratio": 0.5, "scale": 1}, {"kind": "power", "exponent": 2},
/// {"kind": "finite", "values": [...]}, {"kind": "tabulated", "csv": "path"},
/// {"kind": "mixture", "members": [...], "weights": [...]}.
SummableSequence parse_sequence(const Json& j, const std::string& context, const fs::path& base_dir);

/// {"kind": "harmonic"}, {"kind": "geometric"}, {"kind": "inverse_log"}.
CoefficientSequence parse_coefficients(const Json& j, const std::string& context);

/// {"kind": "powers", "count": 200}, {"kind": "finite", "members": [...], "interval_end": 1},
/// {"kind": "union", "parts": [...]}.
ModulusCollection parse_collection(const Json& j, const std::string& context, const fs::path& base_dir);

/// {"sigma": ..., "L": 2, "beta": 0.5, "alpha": ..., "delta": 0.05, "depth": 30,
///  "case": "fast_degeneracy" | "tame_degeneracy"}.
RenormParams parse_renorm(const Json& j, const std::string& context, const fs::path& base_dir);

/// {"dimension": 1, "sigma": ..., "source": field, "boundary": field, "xi": [..], "h": 1e-3,
///  "source_bound": ...}. A field is a number, {"kind": "constant", "value": c},
/// {"kind": "linear", "value": c, "gradient": [gx, gy]} or
/// {"kind": "radial_power", "coefficient": c, "exponent": p}.
/// `default_sigma` fills in a missing "sigma".
pde::ProblemSpec parse_problem(const Json& j, const std::string& context, const fs::path& base_dir,
                               const DegeneracyLaw* default_sigma = nullptr);

pde::Field parse_field(const Json& j, const std::string& context);

}  // namespace dinilab::runner
