/*
 * Copyright 2026 The SIFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SIFL_METRICS_H_
#define SIFL_METRICS_H_

// Per-round metrics CSV:
//   round,mode,train_loss,test_accuracy,t_encrypt_ms,t_decrypt_ms,t_train_ms,
//   equivalence_rel_err
// Reals use 17 significant digits; an absent error is an empty cell.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sifl/federation.h"

namespace sifl {

inline constexpr std::string_view kMetricsHeader =
    "round,mode,train_loss,test_accuracy,t_encrypt_ms,t_decrypt_ms,t_train_ms,"
    "equivalence_rel_err";

std::string format_real(double x);
std::string format_metrics(const std::vector<RoundRecord>& records);

// Throws InvalidArgument on empty records, Error if the path is unwritable.
void write_metrics(const std::vector<RoundRecord>& records,
                   const std::filesystem::path& path);

struct TimingSummary {
  double encrypt_ms = 0.0;  // per-round means over SIFL rounds
  double decrypt_ms = 0.0;
  double train_ms = 0.0;
  double overhead_ratio = 0.0;  // (encrypt + decrypt) / train
};

TimingSummary summarize_timings(const std::vector<RoundRecord>& records);

}  // namespace sifl

#endif  // SIFL_METRICS_H_
