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

#include "c4vqc/metrics.hpp"

#include <algorithm>
#include <string>

#include "c4vqc/errors.hpp"

namespace c4vqc {

std::vector<int> classify(const std::vector<double>& outputs) {
    std::vector<int> preds;
    preds.reserve(outputs.size());
    for (double v : outputs) {
        preds.push_back(v >= 0.0 ? 1 : -1);
    }
    return preds;
}

MetricsReport compute_metrics(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.empty() || preds.size() != labels.size()) {
        throw ValidationError("compute_metrics: predictions and labels must be nonempty and equal length");
    }
    MetricsReport r;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool predicted_pos = preds[i] > 0;
        const bool actual_pos = labels[i] > 0;
        if (predicted_pos && actual_pos) {
            ++r.tp;
        } else if (predicted_pos && !actual_pos) {
            ++r.fp;
        } else if (!predicted_pos && actual_pos) {
            ++r.fn;
        } else {
            ++r.tn;
        }
    }
    const auto total = static_cast<double>(preds.size());
    r.accuracy = static_cast<double>(r.tp + r.tn) / total;
    if (r.tp + r.fp > 0) {
        r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    } else {
        r.precision_defined = false;
    }
    if (r.tp + r.fn > 0) {
        r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    } else {
        r.recall_defined = false;
    }
    if (r.precision_defined && r.recall_defined && r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
        r.f1_defined = false;
    }
    return r;
}

MinimaCensus minima_census(const std::vector<double>& final_losses) {
    if (final_losses.size() < 2) {
        throw ValidationError("minima_census: need at least 2 records");
    }
    MinimaCensus c;
    double sum = 0.0;
    double mn = final_losses.front();
    for (double v : final_losses) {
        sum += v;
        mn = std::min(mn, v);
    }
    c.mean_loss = sum / static_cast<double>(final_losses.size());
    c.min_loss = mn;
    long below = 0;
    for (double v : final_losses) {
        below += v < c.mean_loss ? 1 : 0;
    }
    c.percent_below_mean = 100.0 * static_cast<double>(below) / static_cast<double>(final_losses.size());
    return c;
}

} // namespace c4vqc
