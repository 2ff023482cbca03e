#pragma once

#include <cstdio>
#include <initializer_list>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace effortcontract::harness {

/// CSV text builder: ',' separator, '.' decimal point, header row, doubles
/// printed with 17 significant digits so they round-trip exactly.
class CsvTable
{
public:
  using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

  explicit CsvTable(std::vector<std::string> header) : columns_(header.size())
  {
    append_row(header);
  }

  void add(std::initializer_list<Cell> cells)
  {
    std::vector<std::string> row;
    for (auto const& c : cells)
    {
      row.push_back(format(c));
    }
    if (row.size() != columns_)
    {
      throw std::logic_error("CsvTable: row width does not match header");
    }
    append_row(row);
  }

  const std::string& str() const { return text_; }

  static std::string format(const Cell& c)
  {
    struct Visitor
    {
      std::string operator()(std::monostate) const { return {}; }
      std::string operator()(double v) const
      {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
      }
      std::string operator()(long long v) const { return std::to_string(v); }
      std::string operator()(bool v) const { return v ? "true" : "false"; }
      std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, c);
  }

private:
  void append_row(const std::vector<std::string>& row)
  {
    for (std::size_t k = 0; k < row.size(); ++k)
    {
      if (k)
      {
        text_ += ',';
      }
      text_ += row[k];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

}  // namespace effortcontract::harness
