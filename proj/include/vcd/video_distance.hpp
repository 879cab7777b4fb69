#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "vcd/backend.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/frame.hpp"

namespace vcd {

// Weight applied to a lag's summed absolute difference in delta4.
enum class MeanMode {
  kPaperOneOverLag,  // 1 / lag
  kPerEntry,         // 1 / (window length - lag), the mean over entries
};

MeanMode parse_mean_mode(std::string_view name);  // "paper" | "per-entry"
std::string_view mean_mode_name(MeanMode mode);

struct DistanceConfig {
  MeanMode mean_mode = MeanMode::kPaperOneOverLag;
  double norm_epsilon = 1e-12;  // lag-window sums below this normalize to uniform
  std::size_t window_stride = 1;
};

void validate(const DistanceConfig& config);

// Sum over aligned frames of the pixel-sum image distance. Requires equal
// length and resolution.
double delta1(const Video& u, const Video& v);

// max over lags j of sum_i |A(i,j) - B(i,j)|.
double delta2(const FullSsm& a, const FullSsm& b);

// max over lags j of (1/(n-j)) * sum_i |A(i,j) - B(i,j)|.
double delta3(const FullSsm& a, const FullSsm& b);

// diag[lag][offset .. offset+length-lag) divided by its sum. A window whose
// sum is below norm_epsilon (a static stretch) becomes the uniform
// distribution 1/(length-lag), so the result always sums to 1.
std::vector<double> normalize_window(const ReducedDescriptor& d, std::size_t lag, std::size_t offset,
                                     std::size_t length, const DistanceConfig& config = {});

// Lag-normalized descriptor distance between two equal-length windows:
// max over power-of-two lags j < length of w(j) * sum_i |a_i - b_i| with a, b
// the normalized windows. Window sums come from the prefix arrays.
double delta4(const ReducedDescriptor& u, const ReducedDescriptor& v, std::size_t offset_u,
              std::size_t offset_v, std::size_t length, const DistanceConfig& config = {});

struct WindowMatch {
  double distance = 0.0;
  std::size_t best_offset = 0;  // frame offset into the longer video
};

// Slides the shorter descriptor over the longer one and keeps the minimum
// delta4 (smallest offset on ties). Symmetric in its arguments.
WindowMatch windowed_distance(const ReducedDescriptor& u, const ReducedDescriptor& v,
                              const DistanceConfig& config = {}, Backend backend = Backend::kOpenMP);

// windowed_distance restricted to descriptors built with the differing-pixel
// mean metric, the combination the detector uses.
WindowMatch muscle_distance(const ReducedDescriptor& u, const ReducedDescriptor& v,
                            const DistanceConfig& config = {}, Backend backend = Backend::kOpenMP);

}  // namespace vcd
