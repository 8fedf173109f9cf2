#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lotto {

/// Minimal delimited-text reader: configurable single-char delimiter,
/// double-quoted fields with "" escapes, tolerant of CRLF line ends.
class CsvReader {
public:
    explicit CsvReader(std::istream& in, char delimiter = ',');

    /// Read the next record into `fields`. Returns false at end of input.
    /// Quoted fields may contain delimiters and newlines.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number where the last record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool first_record_ = true;
};

/// Quote a field if it contains the delimiter, a quote, or a newline.
std::string csv_escape(const std::string& field, char delimiter = ',');

/// Join and escape one row.
std::string csv_row(const std::vector<std::string>& fields, char delimiter = ',');

} // namespace lotto
