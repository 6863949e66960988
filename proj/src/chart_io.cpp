#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"
#include "spcdrift/spc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace spcdrift {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

void write_chart_csv(std::ostream& out, const ChartTrace& trace) {
  out << "day,value,lower,upper,s_plus,s_minus,flag,side\n";
  for (const auto& row : trace.rows) {
    out << row.day << ',' << format_real(row.value) << ',' << cell(row.lower) << ','
        << cell(row.upper) << ',' << cell(row.s_plus) << ',' << cell(row.s_minus) << ','
        << (row.flagged() ? 1 : 0) << ',' << (row.side ? to_string(*row.side) : "") << '\n';
  }
}

std::vector<DayValue> read_daily_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> day_col;
  std::optional<std::size_t> value_col;
  std::vector<DayValue> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (!day_col) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "day") day_col = i;
        if (fields[i] == "value") value_col = i;
      }
      if (!day_col || !value_col) {
        throw Error(ErrorCode::MalformedRow, "daily CSV header needs 'day' and 'value' columns");
      }
      continue;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() <= std::max(*day_col, *value_col)) {
      throw Error(ErrorCode::MalformedRow, where + "too few fields");
    }
    const auto day = parse_integer(fields[*day_col]);
    const auto value = parse_real(fields[*value_col]);
    if (!day || *day < 0) throw Error(ErrorCode::MalformedRow, where + "bad day");
    if (!value) throw Error(ErrorCode::MalformedRow, where + "bad value");
    if (!std::isfinite(*value)) throw Error(ErrorCode::NonFiniteValue, where + "value");
    out.push_back({static_cast<std::uint32_t>(*day), *value});
  }
  return out;
}

std::string render_chart_svg(const ChartTrace& trace, std::string_view title) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 360.0;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 30.0;
  constexpr double kBottom = 40.0;

  const bool cusum = trace.kind == ChartKind::Cusum;
  // Series drawn: the daily value for 3-sigma; +S and -S- for CUSUM.
  std::vector<double> ys;
  for (const auto& r : trace.rows) {
    if (cusum) {
      ys.push_back(r.s_plus.value_or(0.0));
      ys.push_back(-r.s_minus.value_or(0.0));
    } else {
      ys.push_back(r.value);
      if (r.lower) ys.push_back(*r.lower);
      if (r.upper) ys.push_back(*r.upper);
    }
  }
  if (cusum) {
    ys.push_back(trace.h);
    ys.push_back(-trace.h);
  }
  double y_min = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end());
  double y_max = ys.empty() ? 1.0 : *std::max_element(ys.begin(), ys.end());
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  const double x_min = trace.rows.empty() ? 0.0 : trace.rows.front().day;
  const double x_max = trace.rows.empty() ? 1.0 : std::max<double>(trace.rows.back().day, x_min + 1.0);

  auto px = [&](double day) { return kLeft + (day - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * (kHeight - kTop - kBottom); };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) svg << "<text x=\"" << kLeft << "\" y=\"18\">" << title << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8 << "\">day</text>\n";

  auto hline = [&](double y, const char* colour) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << py(y) << "\" stroke=\"" << colour << "\" stroke-dasharray=\"6,4\"/>\n";
  };
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* colour) {
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (const auto& [x, y] : pts) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
  };

  if (cusum) {
    hline(trace.h, "black");
    hline(-trace.h, "black");
    std::vector<std::pair<double, double>> hi;
    std::vector<std::pair<double, double>> lo;
    for (const auto& r : trace.rows) {
      hi.emplace_back(r.day, r.s_plus.value_or(0.0));
      lo.emplace_back(r.day, -r.s_minus.value_or(0.0));
    }
    polyline(hi, "steelblue");
    polyline(lo, "seagreen");
    for (const auto& r : trace.rows) {
      if (!r.flagged()) continue;
      const double y = *r.side == Side::High ? r.s_plus.value_or(0.0) : -r.s_minus.value_or(0.0);
      svg << "<circle cx=\"" << px(r.day) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"black\"/>\n";
    }
  } else {
    hline(trace.stats.mu, "gray");
    if (!trace.rows.empty() && trace.rows.front().lower) {
      hline(*trace.rows.front().lower, "black");
      hline(*trace.rows.front().upper, "black");
    }
    for (const auto& r : trace.rows) {
      svg << "<circle cx=\"" << px(r.day) << "\" cy=\"" << py(r.value) << "\" r=\"3\" fill=\""
          << (r.flagged() ? "crimson" : "steelblue") << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace spcdrift
