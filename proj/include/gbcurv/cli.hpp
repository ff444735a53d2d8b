#pragma once

// Manifold spec files, JSON reports and the command-line driver.

#include "gbcurv/geometry.hpp"
#include "gbcurv/verification.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbcurv::cli {

/// Malformed spec file or flag value. Maps to exit code 2.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EntrySource {
  int i = 1;
  int j = 1;
  std::string expr;
};

/// Either explicit covariant entries or the pullback of an ambient tensor
/// through a map (see pullback_entries).
struct PerturbationSpec {
  std::vector<EntrySource> entries;
  std::vector<std::string> map;
  std::vector<std::vector<std::string>> ambient;

  bool is_pullback() const { return !map.empty(); }
};

struct ManifoldSpec {
  std::string name;
  int dim = 0;
  std::vector<int> signature;
  std::vector<std::string> coordinates;
  std::vector<Interval> domain;
  std::vector<EntrySource> metric;
  bool boundary = false;
  std::vector<std::pair<std::string, PerturbationSpec>> perturbations;
  std::optional<int> euler_characteristic;
  std::optional<int> quadrature_order;
  std::optional<double> tolerance;
  std::map<std::string, double> parameters;
  std::optional<std::string> volume_weight;
};

/// Parses and validates a spec document: shapes, index ranges, and that every
/// expression parses against the declared coordinates and parameters.
ManifoldSpec parse_spec(const std::string& json_text);
ManifoldSpec load_spec(const std::string& path);
std::string spec_to_json(const ManifoldSpec& spec);

MetricChart build_chart(const ManifoldSpec& spec);
/// Perturbation by name; an empty name selects the first one.
std::vector<MetricEntry> build_perturbation(const ManifoldSpec& spec, const std::string& name = "");

/// R_1221 of the unit round sphere in an orthonormal frame (+1 by convention).
double sphere_calibration();

/// {"subcommand", "calibration", "pass", "reports": [...]}. With
/// `timing = false` every runtime is written as 0 so output is reproducible.
std::string reports_to_json(const std::string& subcommand,
                            const std::vector<VerificationReport>& reports, bool timing,
                            const std::vector<std::pair<std::string, std::string>>& notes = {});

/// One line per report.
void print_reports(std::ostream& out, const std::vector<VerificationReport>& reports);

/// Signature family used by invariant-dims: euclidean, negative (all
/// timelike), lorentzian (one timelike), split (floor(m/2) timelike).
Signature named_signature(const std::string& family, int dim);

/// Closed-form count 1 + (m-1)/2 for odd m and 1 + m/2 for even m, reported
/// next to the exact kernel dimension (it overcounts for even m).
int stated_invariant_count(int boundary_dim);
/// Number of Q_k: #{0 <= k <= m-1, k = m-1 mod 2}.
int q_basis_count(int boundary_dim);

/// Exit codes: 0 all reports pass, 1 some report fails, 2 parse or usage
/// error, 3 internal or numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gbcurv::cli
