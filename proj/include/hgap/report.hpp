#pragma once

// JSON/CSV serialization of results and the end-to-end gap-estimation run
// shared by the command-line tool and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgap/bounds.hpp"
#include "hgap/clifford.hpp"
#include "hgap/dirichlet.hpp"
#include "hgap/sde.hpp"
#include "hgap/smalldev.hpp"

namespace hgap {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// printf %.17g.
std::string format_double(double x);

std::string sha256_hex(const std::string& data);

nlohmann::json to_json(const EigenvalueResult& r);
nlohmann::json to_json(const GapBoundResult& r);
nlohmann::json to_json(const GapEstimate& e);
nlohmann::json to_json(const SandwichVerdict& v);
nlohmann::json to_json(const AgreementResult& a);
nlohmann::json to_json(const ExitTimeStats& s);
nlohmann::json to_json(const ScalingRow& r);
nlohmann::json to_json(const SurvivalCurve& c);
nlohmann::json to_json(const SmallDevCurve& c);
nlohmann::json to_json(const LemmaDiagnostics& d);

enum class GapMethod { Exit, SmallDev, Both };
GapMethod parse_gap_method(const std::string& s);
std::string to_string(GapMethod m);
ExtrapolationModel parse_extrapolation_model(const std::string& s);

/// `points` evenly spaced values in [sqrt(lambda/8), sqrt(lambda/2)], where the
/// small-ball probability exp(-lambda/eps^2) spans roughly e^-8 .. e^-2.
std::vector<double> default_eps_grid(double lambda_lower, int points = 13);

struct GapRunConfig {
  GapMethod method = GapMethod::Both;
  std::int64_t paths = 200'000;
  double dt = 1e-4;
  std::uint64_t seed = 20240601;
  double t_max = 6.0;
  std::vector<double> eps_grid;  // empty: default_eps_grid(lower bound)
  ExtrapolationModel model = ExtrapolationModel::AffineEpsSquared;
  WindowPolicy window;
  int ladder = 2;
  double grid_dt = 0.02;
  double k_sigma = 3.0;
  std::vector<double> scaling_eps{0.5, 0.7, 1.0};
  Execution execution;
};

nlohmann::json config_to_json(const GapRunConfig& c);

/// Simulates the requested ensembles and assembles estimates, bounds,
/// sandwich verdicts, the dt-ladder diagnostics, the scaling identity and the
/// curves. The result depends only on (structure, config minus execution).
/// n = 0 runs the Euclidean calibration, with the exact eigenvalue as both
/// bounds.
nlohmann::json estimate_gap_report(const HTypeStructure& s, const GapRunConfig& config);

/// kind, abscissa, estimate, ci_low, ci_high.
std::string curves_csv(const nlohmann::json& report);

}  // namespace hgap
