#pragma once

#include <string>
#include <vector>

#include "proxctl/dataset.hpp"

namespace proxctl {

//! Result of loading a CSV file under a role map. Role pairs have the form
//! "column=role" with roles y, id, period, x:j, z:j, v:j (j counted from 1).
//! Files mapping id and period become balanced wide-form panels; otherwise
//! the mapped columns form a cross-sectional dataset. Unmapped columns are
//! ignored.
struct LoadedData {
  bool is_panel = false;
  Dataset data;
  PanelDataset panel;
};

LoadedData load_csv(const std::string& path, const std::vector<std::string>& role_pairs);

//! Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded commas
//! and newlines. Returns one row per record including the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // 1-based starting line of each data row
};

CsvTable parse_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

//! Plot data with one row per grid point, serialized with 17 significant
//! digits so values survive a decimal round trip.
void write_plot_csv(const std::string& path, const std::vector<double>& x,
                    const std::vector<double>& estimate, const std::vector<double>& lo,
                    const std::vector<double>& hi);

}  // namespace proxctl
