// include/wavefront/gradcheck.h

// Copyright 2026  The Wavefront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WAVEFRONT_GRADCHECK_H_
#define WAVEFRONT_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

namespace wavefront {

struct GradcheckOptions {
  double step = 1e-5;
  std::uint64_t seed = 7;
  /// Added to the first analytic entry of every tensor. Non-zero only when
  /// testing the harness itself.
  double perturb_analytic = 0.0;
};

struct GradcheckRow {
  std::string op;
  std::string tensor;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

/// Registered op names, e.g. "tdfb.log", "pcen.alpha", "end_to_end.tdfb_pcen.r".
std::vector<std::string> gradcheck_ops();

/// `selector` is "all", an exact op name, or a group prefix ("tdfb", "pcen",
/// "lstm_attention", "end_to_end"). Throws std::invalid_argument when nothing
/// matches.
std::vector<GradcheckRow> run_gradcheck(const std::string& selector,
                                        const GradcheckOptions& options = {});

}  // namespace wavefront

#endif  // WAVEFRONT_GRADCHECK_H_
