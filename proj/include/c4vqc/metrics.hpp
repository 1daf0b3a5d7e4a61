// Copyright 2026 The c4vqc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

namespace c4vqc {

/// sign threshold at 0; an exact 0 counts as +1.
std::vector<int> classify(const std::vector<double>& outputs);

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    // zero-denominator ratios are reported as 0 with the matching flag unset
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

/// Positive class is +1. preds and labels hold +-1.
MetricsReport compute_metrics(const std::vector<int>& preds, const std::vector<int>& labels);

struct MinimaCensus {
    double mean_loss = 0.0;
    double min_loss = 0.0;
    double percent_below_mean = 0.0; // strictly below
};

MinimaCensus minima_census(const std::vector<double>& final_losses);

} // namespace c4vqc
