#include "proxctl/io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "proxctl/errors.hpp"
#include "proxctl/util.hpp"

namespace proxctl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

//! Parsed role assignment, validated for syntax and completeness.
struct Roles {
  int y_col = -1;
  int id_col = -1;
  int period_col = -1;
  std::vector<int> x_cols, z_cols, v_cols;  // position j-1 holds the column
};

int find_column(const CsvTable& table, const std::string& name) {
  int hit = -1;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (table.header[c] == name) {
      if (hit >= 0)
        throw DataError("role map: column name '" + name + "' appears twice in the header");
      hit = c;
    }
  }
  if (hit < 0) throw DataError("role map: no column named '" + name + "' in the file");
  return hit;
}

void place_indexed(std::vector<int>& slots, const std::string& role, int index, int col) {
  if (index < 1)
    throw std::invalid_argument("role map: indices in '" + role + "' start at 1");
  if (static_cast<int>(slots.size()) < index) slots.resize(index, -1);
  if (slots[index - 1] >= 0)
    throw std::invalid_argument("role map: role '" + role + "' assigned twice");
  slots[index - 1] = col;
}

void check_contiguous(const std::vector<int>& slots, const char* family) {
  for (std::size_t j = 0; j < slots.size(); ++j)
    if (slots[j] < 0) {
      std::ostringstream msg;
      msg << "role map: " << family << ":" << (j + 1) << " is missing while "
          << family << ":" << slots.size() << " is assigned";
      throw std::invalid_argument(msg.str());
    }
}

Roles parse_roles(const CsvTable& table, const std::vector<std::string>& pairs) {
  Roles roles;
  auto assign_unique = [](int& slot, const std::string& role, int col) {
    if (slot >= 0) throw std::invalid_argument("role map: role '" + role + "' assigned twice");
    slot = col;
  };
  for (const std::string& pair : pairs) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
      throw std::invalid_argument("role map: expected column=role, got '" + pair + "'");
    const std::string column = trim(pair.substr(0, eq));
    const std::string role = trim(pair.substr(eq + 1));
    const int col = find_column(table, column);
    if (role == "y") {
      assign_unique(roles.y_col, role, col);
    } else if (role == "id") {
      assign_unique(roles.id_col, role, col);
    } else if (role == "period") {
      assign_unique(roles.period_col, role, col);
    } else if (role.rfind("x:", 0) == 0 || role.rfind("z:", 0) == 0 ||
               role.rfind("v:", 0) == 0) {
      char* end = nullptr;
      const long index = std::strtol(role.c_str() + 2, &end, 10);
      if (end == nullptr || *end != '\0')
        throw std::invalid_argument("role map: bad index in role '" + role + "'");
      auto& slots = role[0] == 'x' ? roles.x_cols : role[0] == 'z' ? roles.z_cols
                                                                   : roles.v_cols;
      place_indexed(slots, role, static_cast<int>(index), col);
    } else {
      throw std::invalid_argument("role map: unknown role '" + role + "'");
    }
  }
  check_contiguous(roles.x_cols, "x");
  check_contiguous(roles.z_cols, "z");
  check_contiguous(roles.v_cols, "v");
  if (roles.y_col < 0) throw std::invalid_argument("role map: no column assigned role y");
  if (roles.x_cols.empty())
    throw std::invalid_argument("role map: no column assigned role x:1");
  if ((roles.id_col >= 0) != (roles.period_col >= 0))
    throw std::invalid_argument("role map: id and period must be assigned together");
  if (roles.id_col >= 0) {
    if (!roles.z_cols.empty() || !roles.v_cols.empty())
      throw std::invalid_argument(
          "role map: z and v roles are not used with panels; proxies come from the history");
  } else {
    if (roles.z_cols.empty())
      throw std::invalid_argument("role map: no column assigned role z:1");
    if (roles.v_cols.empty())
      throw std::invalid_argument("role map: no column assigned role v:1");
  }
  return roles;
}

//! Converts one mapped column to numbers, collecting offending lines.
Eigen::VectorXd numeric_column(const CsvTable& table, int col, const std::string& name) {
  const int n = static_cast<int>(table.rows.size());
  Eigen::VectorXd out(n);
  std::vector<std::string> problems;
  for (int i = 0; i < n; ++i) {
    const std::string field = trim(table.rows[i][col]);
    bool bad = field.empty();
    if (!bad) {
      char* end = nullptr;
      out(i) = std::strtod(field.c_str(), &end);
      bad = (end != field.c_str() + field.size());
    }
    if (bad && problems.size() < 10) {
      std::ostringstream msg;
      msg << "line " << table.row_lines[i]
          << (field.empty() ? ": missing value" : ": cannot parse '" + field + "'");
      problems.push_back(msg.str());
    } else if (bad) {
      problems.push_back("");
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "column '" << name << "': " << problems.size() << " bad value(s)";
    for (const std::string& p : problems)
      if (!p.empty()) msg << "\n  " << p;
    throw DataError(msg.str());
  }
  return out;
}

Eigen::MatrixXd numeric_block(const CsvTable& table, const std::vector<int>& cols) {
  Eigen::MatrixXd out(table.rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.col(j) = numeric_column(table, cols[j], table.header[cols[j]]);
  return out;
}

PanelDataset assemble_panel(const CsvTable& table, const Roles& roles) {
  const int n_rows = static_cast<int>(table.rows.size());
  const Eigen::VectorXd periods = numeric_column(table, roles.period_col,
                                                 table.header[roles.period_col]);
  const Eigen::VectorXd y = numeric_column(table, roles.y_col, table.header[roles.y_col]);
  const Eigen::MatrixXd x = numeric_block(table, roles.x_cols);

  std::vector<double> labels(periods.data(), periods.data() + n_rows);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const int t = static_cast<int>(labels.size());
  auto period_index = [&](double label) {
    return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), label) -
                            labels.begin());
  };

  std::vector<std::string> unit_order;
  std::map<std::string, int> unit_index;
  for (int i = 0; i < n_rows; ++i) {
    const std::string id = trim(table.rows[i][roles.id_col]);
    if (id.empty()) {
      std::ostringstream msg;
      msg << "panel: missing unit id at line " << table.row_lines[i];
      throw DataError(msg.str());
    }
    if (unit_index.emplace(id, static_cast<int>(unit_order.size())).second)
      unit_order.push_back(id);
  }
  const int n = static_cast<int>(unit_order.size());

  PanelDataset panel;
  panel.y.setConstant(n, t, std::numeric_limits<double>::quiet_NaN());
  panel.x.assign(t, Eigen::MatrixXd::Constant(n, roles.x_cols.size(),
                                              std::numeric_limits<double>::quiet_NaN()));
  panel.period_labels = labels;
  panel.unit_ids = unit_order;

  std::vector<std::vector<char>> seen(n, std::vector<char>(t, 0));
  for (int i = 0; i < n_rows; ++i) {
    const int u = unit_index[trim(table.rows[i][roles.id_col])];
    const int p = period_index(periods(i));
    if (seen[u][p]) {
      std::ostringstream msg;
      msg << "panel: unit '" << unit_order[u] << "' has two rows for period "
          << labels[p] << " (line " << table.row_lines[i] << ")";
      throw DataError(msg.str());
    }
    seen[u][p] = 1;
    panel.y(u, p) = y(i);
    panel.x[p].row(u) = x.row(i);
  }

  std::vector<std::string> incomplete;
  for (int u = 0; u < n; ++u)
    for (int p = 0; p < t; ++p)
      if (!seen[u][p]) {
        if (incomplete.size() < 5) {
          std::ostringstream msg;
          msg << "unit '" << unit_order[u] << "' lacks period " << labels[p];
          incomplete.push_back(msg.str());
        } else {
          incomplete.push_back("");
        }
        p = t;  // one report per unit is enough
      }
  if (!incomplete.empty()) {
    std::ostringstream msg;
    msg << "panel: unbalanced, " << incomplete.size() << " incomplete unit(s)";
    for (const std::string& s : incomplete)
      if (!s.empty()) msg << "\n  " << s;
    throw DataError(msg.str());
  }
  validate(panel);
  return panel;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool record_started = false;
  int line = 1;
  int record_line = 1;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&]() {
    end_field();
    if (table.header.empty()) {
      table.header = record;
    } else {
      if (record.size() != table.header.size()) {
        std::ostringstream msg;
        msg << "csv: line " << record_line << " has " << record.size()
            << " fields, header has " << table.header.size();
        throw DataError(msg.str());
      }
      table.rows.push_back(record);
      table.row_lines.push_back(record_line);
    }
    record.clear();
    record_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!record_started) {
      record_started = true;
      record_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (record_started || !field.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record();
  }
  if (table.header.empty()) throw DataError("csv: empty file");
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

LoadedData load_csv(const std::string& path, const std::vector<std::string>& role_pairs) {
  const CsvTable table = parse_csv(read_text_file(path));
  if (table.rows.empty()) throw DataError("csv: no data rows in '" + path + "'");
  const Roles roles = parse_roles(table, role_pairs);

  LoadedData loaded;
  if (roles.id_col >= 0) {
    loaded.is_panel = true;
    loaded.panel = assemble_panel(table, roles);
    return loaded;
  }
  loaded.data.y = numeric_column(table, roles.y_col, table.header[roles.y_col]);
  loaded.data.x = numeric_block(table, roles.x_cols);
  loaded.data.z = numeric_block(table, roles.z_cols);
  loaded.data.v = numeric_block(table, roles.v_cols);
  validate(loaded.data);
  return loaded;
}

void write_plot_csv(const std::string& path, const std::vector<double>& x,
                    const std::vector<double>& estimate, const std::vector<double>& lo,
                    const std::vector<double>& hi) {
  if (x.size() != estimate.size() || x.size() != lo.size() || x.size() != hi.size())
    throw std::invalid_argument("write_plot_csv: column lengths differ");
  std::ostringstream out;
  out << "x,estimate,lo,hi\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << format_full(x[i]) << "," << format_full(estimate[i]) << ","
        << format_full(lo[i]) << "," << format_full(hi[i]) << "\n";
  write_text_file(path, out.str());
}

}  // namespace proxctl
