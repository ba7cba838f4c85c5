// Copyright 2026 The dailystudy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DAILYSTUDY_REPORTS_HPP_
#define DAILYSTUDY_REPORTS_HPP_

#include <string>

#include "dailystudy/analytics.hpp"
#include "dailystudy/domain.hpp"
#include "dailystudy/stats.hpp"
#include "dailystudy/store.hpp"

namespace dailystudy {

// Every report here is a pure function of the store (or config), so a
// replayed log renders byte-identical output. Gateway-side data (the money
// ledger) is deliberately not an input; conservation against the ledger is
// checked by the tests that own a live gateway.

// The payment reference card: cumulative and equivalent-hourly pay for all
// schemes at checkpoints 1, 11, 21, 31.
std::string paytable_text(const StudyConfig& config);
std::string paytable_csv(const StudyConfig& config);

// Retention aggregates plus per-scheme breakdown.
std::string retention_report_text(const StudyStore& store);

// Per-worker pay reconciliation: recorded enrollment + bonus events against
// the cumulative_pay formula. Any nonzero delta is a bug.
std::string payments_report_text(const StudyConfig& config,
                                 const StudyStore& store);

// CSV exports. Column layouts are stable; see each function body.
std::string histogram_csv(const StudyStore& store);
std::string completion_csv(const CompletionMatrix& matrix);
std::string tests_csv(const StudyStore& store, TTestVariant variant);
std::string battery_text(const StudyStore& store, TTestVariant variant);

// Fig-2-style participation heatmap: one row per worker, one column per
// study day. The text form uses '#' for completed and '.' for missed; the
// PBM form is the same grid as a portable bitmap (P1).
std::string heatmap_text(const CompletionMatrix& matrix);
std::string heatmap_pbm(const CompletionMatrix& matrix);

}  // namespace dailystudy

#endif  // DAILYSTUDY_REPORTS_HPP_
