// afisac: affine-domain full-duplex ISAC link simulator
// Copyright (C) 2026 The afisac Authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pctd.hpp"

namespace afisac
{
    class IoError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double db_floor = -300.0;

    inline double magnitude_db(cplx v)
    {
        const double p = std::norm(v);
        return p > 0.0 ? std::max(db_floor, 10.0 * std::log10(p)) : db_floor;
    }

    // Shortest text that reads back to the same double.
    inline std::string fmt(double v)
    {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    }

    inline std::ofstream open_out(const std::string &path, std::ios::openmode mode = std::ios::out)
    {
        std::ofstream f(path, mode);
        if (!f)
            throw IoError("cannot write '" + path + "'");
        return f;
    }

    inline void write_matrix_db_csv(const CMatrix &m, const std::string &path)
    {
        auto f = open_out(path);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                if (c)
                    f << ',';
                const double db = magnitude_db(m(r, c));
                f << (db == db_floor ? std::string("-300.0") : fmt(db));
            }
            f << '\n';
        }
        if (!f)
            throw IoError("write failed for '" + path + "'");
    }

    // Row-major interleaved complex64 plus a key = value header next to it.
    inline void write_matrix_bin(const CMatrix &m, const std::string &path, const std::string &header_extra = "")
    {
        auto f = open_out(path, std::ios::out | std::ios::binary);
        std::vector<float> buf(std::size_t(m.cols()) * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                buf[2 * std::size_t(c)] = float(m(r, c).real());
                buf[2 * std::size_t(c) + 1] = float(m(r, c).imag());
            }
            f.write(reinterpret_cast<const char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
        }
        if (!f)
            throw IoError("write failed for '" + path + "'");
        auto h = open_out(path + ".hdr");
        h << "format = complex64-le row-major\n"
          << "rows = " << m.rows() << "\n"
          << "cols = " << m.cols() << "\n"
          << header_extra;
    }

    inline CMatrix read_matrix_bin(const std::string &path)
    {
        std::ifstream h(path + ".hdr");
        if (!h)
            throw IoError("cannot read '" + path + ".hdr'");
        long rows = -1, cols = -1;
        std::string line;
        while (std::getline(h, line))
        {
            std::istringstream ls(line);
            std::string k, eq;
            ls >> k >> eq;
            if (k == "rows")
                ls >> rows;
            else if (k == "cols")
                ls >> cols;
        }
        if (rows < 0 || cols < 0)
            throw IoError("'" + path + ".hdr' lacks rows or cols");
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw IoError("cannot read '" + path + "'");
        CMatrix m(rows, cols);
        std::vector<float> buf(std::size_t(cols) * 2);
        for (long r = 0; r < rows; ++r)
        {
            f.read(reinterpret_cast<char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
            if (!f)
                throw IoError("'" + path + "' is shorter than its header says");
            for (long c = 0; c < cols; ++c)
                m(r, c) = cplx(buf[2 * std::size_t(c)], buf[2 * std::size_t(c) + 1]);
        }
        return m;
    }

    // Doppler matrix: rows are Doppler bins, columns range gates. Writes <stem>.csv, <stem>.bin
    // and <stem>.bin.hdr.
    inline void emit_rdm(const RangeDopplerMap &map, const std::string &stem)
    {
        const CMatrix &D = map.doppler_matrix;
        const Eigen::Index cols = map.gates ? Eigen::Index(map.gates) : D.cols();
        const CMatrix view = D.leftCols(cols);
        write_matrix_db_csv(view, stem + ".csv");
        std::ostringstream extra;
        extra << "rows_axis = doppler\n"
              << "cols_axis = range_gate\n"
              << "z_p = " << map.z_p << "\n"
              << "side = " << map.side << "\n"
              << "range_per_gate_m = " << fmt(map.range_per_gate_m) << "\n"
              << "velocity_per_cycle_mps = " << fmt(map.velocity_per_cycle_mps) << "\n";
        write_matrix_bin(view, stem + ".bin", extra.str());
    }

    inline CMatrix load_rdm(const std::string &stem) { return read_matrix_bin(stem + ".bin"); }

    // Minimal CSV writer: a header once, then rows of preformatted cells.
    class CsvWriter
    {
      public:
        CsvWriter(const std::string &path, const std::vector<std::string> &header) : path_(path), f_(open_out(path))
        {
            row(header);
        }

        void row(const std::vector<std::string> &cells)
        {
            for (std::size_t i = 0; i < cells.size(); ++i)
                f_ << (i ? "," : "") << cells[i];
            f_ << '\n';
            if (!f_)
                throw IoError("write failed for '" + path_ + "'");
        }

      private:
        std::string path_;
        std::ofstream f_;
    };
}
