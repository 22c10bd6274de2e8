#pragma once

#include <charconv>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace chiral::io {

/// 17 significant digits, independent of the locale.
inline std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

/// Shortest text that reads back to the same double.
inline std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Compact label for file names: up to 6 significant digits.
inline std::string label(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, r.ptr);
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header) {
        std::size_t i = 0;
        for (const auto& h : header) text_ += (i++ ? "," : "") + h;
        text_ += '\n';
        columns_ = header.size();
    }

    void comment(const std::string& line) { text_ += "# " + line + '\n'; }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) text_ += ',';
            text_ += fmt(values[i]);
        }
        text_ += '\n';
    }

    std::size_t columns() const { return columns_; }
    const std::string& str() const { return text_; }

private:
    std::string text_;
    std::size_t columns_ = 0;
};

}  // namespace chiral::io
