// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirdde {

/// Full round-trip precision for all numeric CSV output.
inline std::string format_full(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Line-oriented CSV writer; throws std::runtime_error on I/O failure.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path)
    {
        if (!out_)
            throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        path_ = path.string();
    }

    void header(std::initializer_list<const char*> names)
    {
        bool first = true;
        for (const char* n : names) {
            if (!first)
                out_ << ',';
            out_ << n;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::span<const double> values)
    {
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (j)
                out_ << ',';
            out_ << format_full(values[j]);
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values)
    {
        row(std::span<const double>(values.begin(), values.size()));
    }

    void close()
    {
        out_.close();
        if (out_.fail())
            throw std::runtime_error("write to '" + path_ + "' failed");
    }

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace sirdde
