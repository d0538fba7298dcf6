#include <fstream>
#include <sstream>

#include "clintime/crf.hpp"
#include "clintime/text.hpp"

namespace clintime::crf {

FeatureTemplate parse_template_line(const std::string& line, int lineNo) {
  FeatureTemplate tpl;
  tpl.source = line;
  std::size_t colon = line.find(':');
  if (colon == std::string::npos || colon == 0)
    throw TemplateSyntaxError(lineNo, 0, "expected '<id>:%x[row,col]...'");
  tpl.id = line.substr(0, colon);
  if (tpl.id[0] != 'U')
    throw TemplateSyntaxError(lineNo, 0, "only unigram (U...) templates are supported");

  std::size_t pos = colon + 1;
  if (pos >= line.size()) throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "empty cell list");
  while (pos < line.size()) {
    if (line.compare(pos, 3, "%x[") != 0)
      throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "expected '%x['");
    pos += 3;
    std::size_t comma = line.find(',', pos);
    std::size_t close = line.find(']', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "expected '%x[row,col]'");
    TemplateCell cell;
    try {
      std::size_t used = 0;
      cell.rowOffset = std::stoi(line.substr(pos, comma - pos), &used);
      if (used != comma - pos) throw std::invalid_argument("row");
      cell.columnIndex = std::stoi(line.substr(comma + 1, close - comma - 1), &used);
      if (used != close - comma - 1) throw std::invalid_argument("col");
    } catch (const std::exception&) {
      throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "malformed row/column index");
    }
    if (cell.rowOffset < -4 || cell.rowOffset > 4)
      throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "row offset outside [-4,4]");
    if (cell.columnIndex < 0)
      throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "negative column index");
    tpl.cells.push_back(cell);
    pos = close + 1;
    if (pos < line.size()) {
      if (line[pos] != '/')
        throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "expected '/' between cells");
      ++pos;
      if (pos >= line.size())
        throw TemplateSyntaxError(lineNo, static_cast<int>(pos), "trailing '/'");
    }
  }
  return tpl;
}

std::vector<FeatureTemplate> parse_templates(const std::string& body) {
  std::vector<FeatureTemplate> out;
  std::istringstream in(body);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    line = text::trim(line);
    if (line.empty() || line[0] == '#' || line == "B") continue;
    out.push_back(parse_template_line(line, lineNo));
  }
  return out;
}

std::vector<FeatureTemplate> load_templates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_templates(ss.str());
}

std::string cell_value(const FeatureMatrix& m, int row, const TemplateCell& cell,
                       const std::string& templateId) {
  const int n = static_cast<int>(m.size());
  int r = row + cell.rowOffset;
  if (r < 0) return "_B" + std::to_string(r);
  if (r >= n) return "_B+" + std::to_string(r - n + 1);
  const auto& cols = m.rows[r];
  if (cell.columnIndex >= static_cast<int>(cols.size()))
    throw ColumnOutOfRange(templateId, cell.columnIndex);
  return cols[cell.columnIndex];
}

std::vector<std::vector<std::string>> expand_features(
    const FeatureMatrix& m, const std::vector<FeatureTemplate>& templates) {
  std::vector<std::vector<std::string>> out(m.size());
  for (std::size_t t = 0; t < m.size(); ++t) {
    out[t].reserve(templates.size());
    for (const auto& tpl : templates) {
      std::string f = tpl.id;
      f.push_back(':');
      for (std::size_t k = 0; k < tpl.cells.size(); ++k) {
        if (k) f.push_back('/');
        f += cell_value(m, static_cast<int>(t), tpl.cells[k], tpl.id);
      }
      out[t].push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace clintime::crf
