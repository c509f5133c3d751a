#include "crossview/csv.hpp"

#include "crossview/errors.hpp"

namespace crossview::io {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool field_started = false;

    std::size_t pos = 0;
    const std::size_t n = text.size();

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    while (pos < n) {
        const char c = text[pos];
        if (c == '"' && !field_started && field.empty()) {
            // Quoted field: consume through the closing quote.
            const std::size_t quote_start = pos;
            ++pos;
            bool closed = false;
            while (pos < n) {
                if (text[pos] == '"') {
                    if (pos + 1 < n && text[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    closed = true;
                    break;
                }
                field.push_back(text[pos]);
                ++pos;
            }
            if (!closed) {
                throw ParseError("unterminated quoted field", quote_start);
            }
            field_started = true;
            if (pos < n && text[pos] != ',' && text[pos] != '\r' && text[pos] != '\n') {
                throw ParseError("unexpected character after closing quote", pos);
            }
            continue;
        }
        if (c == ',') {
            end_field();
            ++pos;
            continue;
        }
        if (c == '\r') {
            if (pos + 1 < n && text[pos + 1] == '\n') {
                end_record();
                pos += 2;
                continue;
            }
            throw ParseError("bare carriage return", pos);
        }
        if (c == '\n') {
            end_record();
            ++pos;
            continue;
        }
        if (c == '"') {
            throw ParseError("quote inside unquoted field", pos);
        }
        field.push_back(c);
        field_started = true;
        ++pos;
    }
    // Final record without a trailing newline.
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }

    if (records.empty()) {
        throw ParseError("empty CSV input", 0);
    }
    CsvTable table;
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1),
                      std::make_move_iterator(records.end()));
    return table;
}

} // namespace crossview::io
