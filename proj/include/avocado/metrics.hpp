// metrics.hpp - validation measurements: target registration error, mask
// volume, DICE overlap, paired t-test, and the landmark-perturbation study.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "avocado/flow_params.hpp"
#include "avocado/inverse_map.hpp"
#include "avocado/landmarks.hpp"

namespace avocado {

struct MetricsReport {
    std::vector<double> tre_per_landmark;  // mm, aligned with tre_valid
    std::vector<bool> tre_valid;           // false when the landmark fell outside the grid
    double tre_mean = 0.0;
    double tre_std = 0.0;
    bool has_tre = false;

    double volume_before = 0.0;
    double volume_after = 0.0;
    double volume_change_pct = 0.0;
    bool has_volume = false;

    double jacobian_min = 0.0;
    double jacobian_max = 0.0;
    double jacobian_mean = 0.0;
    bool has_jacobian = false;

    std::optional<double> dice_value;
    bool dice_both_empty = false;
};

struct TreResult {
    std::vector<double> tre;  // mm per landmark (0.0 placeholder when excluded)
    std::vector<bool> valid;

    double mean() const;
    double stddev() const;
};

// For each pair, deforms the target-frame landmark c_i through the map and
// measures the Euclidean distance to its source-frame partner p_i. Landmarks
// outside the map's grid are flagged and excluded from the statistics.
TreResult target_registration_error(const InverseMap& map, const LandmarkSet& validation);

// Count of 1-voxels scaled by the voxel volume. Throws on non-binary input.
double mask_volume(const ScalarField& seg);

// 2|A n B| / (|A| + |B|); two empty masks score 1.0 by convention.
double dice(const ScalarField& a, const ScalarField& b);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate_variance = false;  // zero-variance, nonzero-mean differences
};

// Paired two-sided t-test of matched error samples, n-1 degrees of freedom.
TTestResult paired_t_test(const std::vector<double>& errs_a, const std::vector<double>& errs_b);

// Two-sided Student-t tail probability via the regularized incomplete beta
// function (continued-fraction evaluation).
double student_t_two_sided_p(double t, int dof);

struct PerturbationPoint {
    double sigma = 0.0;              // requested noise level, mm
    double mean_perturbation = 0.0;  // mean applied landmark displacement, mm
    double mean_tre = 0.0;           // mean validation TRE after registration, mm
    int failed_runs = 0;             // registrations that threw, recorded not fatal
};

// Re-runs the full registration with Gaussian-perturbed source landmarks for
// each sigma and reports the mean held-out TRE. sigma == 0 runs the baseline
// exactly once with no noise. Repeats > 1 average independent noise draws
// with seeds derived from `seed`.
std::vector<PerturbationPoint> perturbation_study(const ScalarField& target_image,
                                                  const ScalarField& source_image,
                                                  const LandmarkSet& init_landmarks,
                                                  const LandmarkSet& validation_landmarks,
                                                  const std::vector<double>& sigmas,
                                                  std::uint64_t seed, const FlowParams& params,
                                                  int repeats = 3);

}  // namespace avocado
