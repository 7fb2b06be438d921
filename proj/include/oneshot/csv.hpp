#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace oneshot {

/// Comma-separated output with a header row, LF line endings, and numeric
/// fields printed at full precision. Cell content must not contain commas.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  class Row {
   public:
    explicit Row(CsvWriter& writer) : writer_(writer) {}
    Row& col(const std::string& value);
    Row& col(double value);
    Row& col(long value);
    Row& col(int value) { return col(static_cast<long>(value)); }
    Row& col(unsigned long long value);
    ~Row();

   private:
    CsvWriter& writer_;
    std::vector<std::string> cells_;
    friend class CsvWriter;
  };

  Row row() { return Row(*this); }
  const std::string& path() const { return path_; }

  static std::string format_double(double value);

 private:
  void write_row(const std::vector<std::string>& cells);

  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace oneshot
