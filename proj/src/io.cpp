#include "csphere/io.hpp"

#include <cstdio>
#include <fstream>

namespace csphere::io {

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt17(angular::Complex v)
{
    return fmt17(v.real()) + (v.imag() < 0 ? "-" : "+") + fmt17(std::abs(v.imag())) +
           "i";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw Error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw Error("write_text: cannot open " + path);
    out << text;
}

} // namespace csphere::io
