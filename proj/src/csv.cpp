#include "lotto/csv.hpp"

#include <istream>

namespace lotto {

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;

    // Strip a UTF-8 BOM in front of the very first record.
    if (first_record_ && c == 0xEF) {
        int c2 = in_.get(), c3 = in_.get();
        if (c2 == 0xBB && c3 == 0xBF) {
            c = in_.get();
            if (c == EOF) return false;
        } else {
            in_.unget();
            in_.unget();
        }
    }
    first_record_ = false;

    // Skip blank lines between records.
    while (c == '\n' || c == '\r') {
        if (c == '\n') ++line_;
        c = in_.get();
        if (c == EOF) return false;
    }
    record_line_ = line_;

    std::string field;
    bool in_quotes = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int peek = in_.get();
                if (peek == '"') {
                    field.push_back('"');
                } else {
                    in_quotes = false;
                    if (peek == EOF) { fields.push_back(std::move(field)); return true; }
                    in_.unget();
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == delim_) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            // swallow; the following \n (if any) ends the record
        } else if (ch == '\n') {
            ++line_;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
        c = in_.get();
    }
}

std::string csv_escape(const std::string& field, char delimiter) {
    bool needs_quotes = false;
    for (char ch : field) {
        if (ch == delimiter || ch == '"' || ch == '\n' || ch == '\r') { needs_quotes = true; break; }
    }
    if (!needs_quotes) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string csv_row(const std::vector<std::string>& fields, char delimiter) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(delimiter);
        out += csv_escape(fields[i], delimiter);
    }
    out.push_back('\n');
    return out;
}

} // namespace lotto
