#include "hopeal/csv.hpp"

#include "hopeal/error.hpp"

namespace hopeal::csv {

std::vector<Row> parse(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;   // just closed a quoted field
  bool row_started = false;   // anything seen on this record yet
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    after_quote = false;
  };
  auto end_row = [&] {
    if (row_started) {
      end_field();
      rows.push_back(std::move(row));
      row.clear();
    }
    row_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case ',':
        row_started = true;
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        break;
      case '"':
        if (after_quote || !field.empty()) {
          throw InputError("csv: unexpected quote on line " + std::to_string(line));
        }
        in_quotes = true;
        row_started = true;
        break;
      default:
        if (after_quote) {
          throw InputError("csv: unexpected character after closing quote on line " + std::to_string(line));
        }
        field.push_back(c);
        row_started = true;
    }
  }
  if (in_quotes) throw InputError("csv: unterminated quoted field starting before line " + std::to_string(line));
  end_row();
  return rows;
}

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape_field(row[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace hopeal::csv
