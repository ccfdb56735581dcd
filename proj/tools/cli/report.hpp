// Copyright 2026 The nla-weaksim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NLA_CLI_REPORT_HPP
#define NLA_CLI_REPORT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace nla::cli {

/// "%.12g", with nan / inf / -inf spelled out.
std::string format_number(double v);

/// RFC 4180 output: fields containing a comma, quote or line break are
/// quoted, quotes doubled, records end in CRLF.
class CsvWriter {
   public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& field(std::string_view text);
    CsvWriter& field(const char* text) { return field(std::string_view(text)); }
    CsvWriter& field(double v);
    CsvWriter& field(bool v);
    void end_row();

    std::size_t rows() const { return rows_; }
    std::string str() const;

   private:
    void append(std::string_view text);

    std::size_t columns_;
    std::size_t current_ = 0;
    std::size_t rows_ = 0;
    std::string out_;
};

std::string csv_escape(std::string_view text);

enum class LineStyle { solid, dashed, markers };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    LineStyle style = LineStyle::solid;
    int color = 0;  // palette index
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Self-contained SVG document (no scripts, fonts or external references).
std::string render_svg(const Plot& plot);

}  // namespace nla::cli

#endif  // NLA_CLI_REPORT_HPP
