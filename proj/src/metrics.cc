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

#include "sifl/metrics.h"

#include <cstdio>
#include <fstream>

#include "sifl/error.h"

namespace sifl {

std::string format_real(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_metrics(const std::vector<RoundRecord>& records) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const RoundRecord& r : records) {
    out += std::to_string(r.round);
    out += ',';
    out += mode_name(r.mode);
    for (double x : {r.train_loss, r.test_accuracy, r.t_encrypt_ms, r.t_decrypt_ms,
                     r.t_train_ms}) {
      out += ',';
      out += format_real(x);
    }
    out += ',';
    if (r.equivalence_rel_err) out += format_real(*r.equivalence_rel_err);
    out += '\n';
  }
  return out;
}

void write_metrics(const std::vector<RoundRecord>& records,
                   const std::filesystem::path& path) {
  if (records.empty()) throw InvalidArgument("write_metrics: no records");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_metrics: cannot open " + path.string() + " for writing");
  out << format_metrics(records);
  out.flush();
  if (!out) throw Error("write_metrics: write to " + path.string() + " failed");
}

TimingSummary summarize_timings(const std::vector<RoundRecord>& records) {
  TimingSummary s;
  std::size_t n = 0;
  for (const RoundRecord& r : records) {
    if (r.mode != Mode::kSifl) continue;
    s.encrypt_ms += r.t_encrypt_ms;
    s.decrypt_ms += r.t_decrypt_ms;
    s.train_ms += r.t_train_ms;
    ++n;
  }
  if (n == 0) return s;
  s.encrypt_ms /= n;
  s.decrypt_ms /= n;
  s.train_ms /= n;
  s.overhead_ratio = s.train_ms > 0 ? (s.encrypt_ms + s.decrypt_ms) / s.train_ms : 0.0;
  return s;
}

}  // namespace sifl
