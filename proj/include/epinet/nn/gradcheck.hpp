#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epinet::nn {

inline constexpr double kLinearGradTolerance = 1e-6;
inline constexpr double kGradTolerance = 1e-4;
inline constexpr double kFiniteDifferenceStep = 1e-5;

struct GradCheckCase {
    std::string layer;
    std::string shape;
    std::string argument;  // which input or parameter was differentiated
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;
    double max_linear = 0.0;
    double max_nonlinear = 0.0;
    bool all_pass = true;
};

/// Relative error ||a - b|| / max(||a||, ||b||); 0 when both vanish.
double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

/// Central finite-difference check, in double precision, of conv2x2,
/// concat (linear, tolerance 1e-6), ReLU, train-mode batch norm and MAE
/// (tolerance 1e-4) on `shapes` random configurations, plus a miniature
/// two-stream network every tenth configuration. Inputs to ReLU and
/// MAE keep a margin from the kink so the step never crosses it.
GradCheckReport run_gradcheck(int shapes = 100, std::uint64_t seed = 1);

}  // namespace epinet::nn
