#pragma once

#include "liftsim/errors.hpp"

namespace liftsim::vision {

struct TrackerConfig {
  double sigma = 0.5;                 // base Gaussian std, pixels; level s blurs with s*sigma
  int n_scales = 6;                   // blurred levels s = 1..n_scales
  double contrast_threshold = 0.004;  // minimum |DoG|
  double edge_eigenvalue_ratio = 10.0;
  double epsilon = 1e-3;              // convergence tolerance on |delta a|
  int max_iterations = 30;            // per pyramid level
  int pyramid_levels = 3;             // fixed
  double median_gate = 3.0;           // pixels
  // Tracking window side = max(min_window_size, 2*ceil(window_scale_factor * s*sigma) + 1).
  double window_scale_factor = 3.0;
  int min_window_size = 15;

  void validate() const {
    detail::require(sigma > 0.0, "TrackerConfig: sigma must be positive");
    detail::require(n_scales >= 3, "TrackerConfig: n_scales must be >= 3");
    detail::require(contrast_threshold > 0.0, "TrackerConfig: contrast_threshold must be positive");
    detail::require(edge_eigenvalue_ratio > 1.0, "TrackerConfig: edge_eigenvalue_ratio must exceed 1");
    detail::require(epsilon > 0.0, "TrackerConfig: epsilon must be positive");
    detail::require(max_iterations > 0, "TrackerConfig: max_iterations must be positive");
    detail::require(pyramid_levels == 3, "TrackerConfig: pyramid_levels is fixed at 3");
    detail::require(median_gate > 0.0, "TrackerConfig: median gate must be positive");
    detail::require(window_scale_factor > 0.0 && min_window_size >= 3,
                    "TrackerConfig: window sizing must be positive");
  }
};

}  // namespace liftsim::vision
