// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "astoi/pipeline.hpp"

namespace astoi {

namespace {

std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Snr(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

void TextTable(std::string& out, const std::string& title, const std::vector<EvalRow>& rows, bool stoi) {
  out += title + "\n";
  out += Pad("noise", 12) + Pad("snr_db", 8) + Pad("unprocessed", 13) + "enhanced\n";
  for (const EvalRow& r : rows) {
    out += Pad(r.noise_type, 12) + Pad(Snr(r.snr_db), 8);
    out += Pad(Fixed2(stoi ? r.stoi_unprocessed : r.elc_unprocessed), 13);
    out += Fixed2(stoi ? r.stoi_enhanced : r.elc_enhanced) + "\n";
  }
}

}  // namespace

std::string RenderTables(std::span<const EvalRow> rows, TableFormat format) {
  std::vector<EvalRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const EvalRow& a, const EvalRow& b) {
    if (a.noise_type != b.noise_type) return a.noise_type < b.noise_type;
    return a.snr_db < b.snr_db;
  });

  std::string out;
  if (format == TableFormat::kCsv) {
    out = "noise_type,snr_db,elc_unprocessed,elc_enhanced,stoi_unprocessed,stoi_enhanced\n";
    for (const EvalRow& r : sorted) {
      out += r.noise_type + "," + Snr(r.snr_db) + "," + Fixed2(r.elc_unprocessed) + "," +
             Fixed2(r.elc_enhanced) + "," + Fixed2(r.stoi_unprocessed) + "," + Fixed2(r.stoi_enhanced) + "\n";
    }
    return out;
  }
  TextTable(out, "ELC", sorted, false);
  out += "\n";
  TextTable(out, "STOI (approximate)", sorted, true);
  return out;
}

}  // namespace astoi
