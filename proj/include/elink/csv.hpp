#pragma once

// Minimal delimited-text reader/writer: header row, RFC 4180 style quoting,
// LF or CRLF line endings.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elink/errors.hpp"

namespace elink::csv {

struct Row {
    std::size_t line = 0;  // 1-based line where the row starts
    std::vector<std::string> fields;
};

inline std::vector<Row> parse(std::string_view text, char delimiter = ',') {
    std::vector<Row> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM

    while (i < text.size()) {
        Row row;
        row.line = line;
        std::string field;
        bool done = false;
        while (!done) {
            field.clear();
            if (i < text.size() && text[i] == '"') {
                const std::size_t open_line = line;
                ++i;
                while (true) {
                    if (i >= text.size())
                        throw DataError("unterminated quoted field starting on line " +
                                        std::to_string(open_line));
                    const char c = text[i++];
                    if (c == '"') {
                        if (i < text.size() && text[i] == '"') {
                            field.push_back('"');
                            ++i;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line;
                        field.push_back(c);
                    }
                }
                if (i < text.size() && text[i] != delimiter && text[i] != '\n' && text[i] != '\r')
                    throw DataError("unexpected character after closing quote on line " +
                                    std::to_string(line));
            } else {
                while (i < text.size() && text[i] != delimiter && text[i] != '\n' && text[i] != '\r') {
                    if (text[i] == '"')
                        throw DataError("stray quote inside unquoted field on line " +
                                        std::to_string(line));
                    field.push_back(text[i++]);
                }
            }
            row.fields.push_back(field);
            if (i >= text.size()) {
                done = true;
            } else if (text[i] == delimiter) {
                ++i;
            } else {
                if (text[i] == '\r') ++i;
                if (i < text.size() && text[i] == '\n') ++i;
                ++line;
                done = true;
            }
        }
        // Skip blank lines entirely.
        if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string escape(std::string_view value, char delimiter = ',') {
    const bool needs_quotes = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs_quotes) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string format_row(const std::vector<std::string>& fields, char delimiter = ',') {
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out.push_back(delimiter);
        out += escape(fields[k], delimiter);
    }
    return out;
}

}  // namespace elink::csv
