#include "fogsim/report.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

#include "fogsim/experiments.hpp"

namespace fogsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool numeric_field(const std::string& s) {
  bool any_digit = false;
  for (char ch : s) {
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      any_digit = true;
    } else if (ch != '.' && ch != '-') {
      return false;
    }
  }
  return any_digit;
}

struct Group {
  std::string experiment;
  std::vector<std::vector<std::string>> rows;  // columns minus `experiment`
};

}  // namespace

std::string render_report(const std::string& csv_text) {
  const std::vector<std::string> columns = split_csv_line(kResultCsvColumns);

  std::istringstream in(csv_text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> meta;
  bool header_seen = false;
  std::vector<Group> groups;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string note = line.substr(1);
      if (!note.empty() && note.front() == ' ') note.erase(0, 1);
      meta.push_back(note);
      continue;
    }
    if (!header_seen) {
      if (line != kResultCsvColumns) {
        throw FormatError("line " + std::to_string(lineno) +
                          ": unrecognized column header; not a result CSV "
                          "from this tool");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != columns.size()) {
      throw FormatError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(columns.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    const std::string& experiment = fields[0];
    if (groups.empty() || groups.back().experiment != experiment) {
      groups.push_back({experiment, {}});
    }
    groups.back().rows.push_back(
        std::vector<std::string>(fields.begin() + 1, fields.end()));
  }

  if (!header_seen) {
    throw FormatError("line " + std::to_string(lineno + 1) +
                      ": missing column header; not a result CSV from this "
                      "tool");
  }

  std::string out;
  for (const std::string& m : meta) out += m + "\n";
  if (!meta.empty()) out += "\n";

  if (groups.empty()) {
    out += "no rows\n";
    return out;
  }

  const std::vector<std::string> heads(columns.begin() + 1, columns.end());
  for (const Group& g : groups) {
    out += "experiment " + g.experiment + " (" + std::to_string(g.rows.size()) +
           (g.rows.size() == 1 ? " row)\n" : " rows)\n");

    std::vector<std::size_t> width(heads.size());
    for (std::size_t c = 0; c < heads.size(); ++c) {
      width[c] = heads[c].size();
      for (const auto& row : g.rows) width[c] = std::max(width[c], row[c].size());
    }
    auto emit = [&](const std::vector<std::string>& cells, bool align_numbers) {
      std::string text = "  ";
      for (std::size_t c = 0; c < cells.size(); ++c) {
        std::size_t pad = width[c] - cells[c].size();
        bool right = align_numbers && numeric_field(cells[c]);
        if (right) text += std::string(pad, ' ');
        text += cells[c];
        if (c + 1 < cells.size()) {
          if (!right) text += std::string(pad, ' ');
          text += "  ";
        }
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out += text + "\n";
    };
    emit(heads, false);
    for (const auto& row : g.rows) emit(row, true);
    out += "\n";
  }
  return out;
}

}  // namespace fogsim
