#include "hazsvm/csv.hpp"
#include "hazsvm/data.hpp"
#include "hazsvm/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace hazsvm {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = lat1 * deg;
  const double phi2 = lat2 * deg;
  const double dphi = (lat2 - lat1) * deg;
  const double dlambda = (lon2 - lon1) * deg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::min(1.0, s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

namespace {

bool read_int(std::string_view& s, std::size_t digits, int& out) {
  if (s.size() < digits) {
    return false;
  }
  const auto* end = s.data() + digits;
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    return false;
  }
  s.remove_prefix(digits);
  return true;
}

bool expect(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) {
    return false;
  }
  s.remove_prefix(1);
  return true;
}

} // namespace

std::optional<double> parse_timestamp(std::string_view s) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_int(s, 4, year) || !expect(s, '-') || !read_int(s, 2, month) || !expect(s, '-') ||
      !read_int(s, 2, day)) {
    return std::nullopt;
  }
  if (s.empty() || (s.front() != 'T' && s.front() != 't' && s.front() != ' ')) {
    return std::nullopt;
  }
  s.remove_prefix(1);
  if (!read_int(s, 2, hour) || !expect(s, ':') || !read_int(s, 2, minute)) {
    return std::nullopt;
  }
  double fraction = 0.0;
  if (!s.empty() && s.front() == ':') {
    s.remove_prefix(1);
    if (!read_int(s, 2, second)) {
      return std::nullopt;
    }
    if (!s.empty() && s.front() == '.') {
      std::size_t n = 1;
      while (n < s.size() && s[n] >= '0' && s[n] <= '9') {
        ++n;
      }
      if (n == 1) {
        return std::nullopt;
      }
      fraction = std::stod("0" + std::string(s.substr(0, n)));
      s.remove_prefix(n);
    }
  }

  int offset_minutes = 0;
  if (!s.empty()) {
    if (s == "Z" || s == "z") {
      s.remove_prefix(1);
    } else if (s.front() == '+' || s.front() == '-') {
      const int sign = s.front() == '+' ? 1 : -1;
      s.remove_prefix(1);
      int oh = 0, om = 0;
      if (!read_int(s, 2, oh)) {
        return std::nullopt;
      }
      if (!s.empty()) {
        expect(s, ':');
        if (!read_int(s, 2, om)) {
          return std::nullopt;
        }
      }
      if (oh > 23 || om > 59) {
        return std::nullopt;
      }
      offset_minutes = sign * (oh * 60 + om);
    }
  }
  if (!s.empty()) {
    return std::nullopt;
  }

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    return std::nullopt;
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hour * 3600.0 + minute * 60.0 + second + fraction -
         offset_minutes * 60.0;
}

const std::vector<std::string>& observation_feature_names() {
  static const std::vector<std::string> names{"temperature",  "humidity",     "wind_speed",
                                              "wind_dir_sin", "wind_dir_cos", "pressure"};
  return names;
}

namespace {

struct Point {
  double time = 0.0;
  double lat = 0.0;
  double lon = 0.0;
};

class ColumnMap {
public:
  ColumnMap(const csv::Row& header, const std::string& source,
            std::initializer_list<std::string_view> required) {
    for (std::size_t i = 0; i < header.cells.size(); ++i) {
      index_.emplace(header.cells[i], i);
    }
    for (auto name : required) {
      if (!index_.contains(std::string(name))) {
        throw Error(ErrorKind::parse, source + ":" + std::to_string(header.line) +
                                          ": missing required column '" + std::string(name) + "'");
      }
    }
    width_ = header.cells.size();
  }

  std::size_t operator[](const std::string& name) const { return index_.at(name); }
  std::size_t width() const noexcept { return width_; }

private:
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

void check_width(const csv::Row& row, const ColumnMap& cols, const std::string& source) {
  if (row.cells.size() != cols.width()) {
    throw Error(ErrorKind::parse, where(source, row.line) + ": expected " +
                                      std::to_string(cols.width()) + " columns, got " +
                                      std::to_string(row.cells.size()));
  }
}

double number_at(const csv::Row& row, const ColumnMap& cols, const std::string& column,
                 const std::string& source) {
  const auto& cell = row.cells[cols[column]];
  auto v = csv::parse_double(cell);
  if (!v) {
    throw Error(ErrorKind::parse, where(source, row.line) + ": column '" + column +
                                      "': not a number: '" + cell + "'");
  }
  return *v;
}

Point point_at(const csv::Row& row, const ColumnMap& cols, const std::string& source) {
  const auto& stamp = row.cells[cols["timestamp"]];
  auto t = parse_timestamp(stamp);
  if (!t) {
    throw Error(ErrorKind::parse, where(source, row.line) + ": column 'timestamp': bad ISO-8601 time '" +
                                      stamp + "'");
  }
  Point p{*t, number_at(row, cols, "lat", source), number_at(row, cols, "lon", source)};
  if (p.lat < -90.0 || p.lat > 90.0) {
    throw Error(ErrorKind::range, where(source, row.line) + ": lat out of [-90, 90]");
  }
  if (p.lon < -180.0 || p.lon > 180.0) {
    throw Error(ErrorKind::range, where(source, row.line) + ": lon out of [-180, 180]");
  }
  return p;
}

} // namespace

Dataset label_from_reports(std::istream& observations, std::istream& reports,
                           const JoinOptions& options) {
  if (!(options.window_secs >= 0.0) || !(options.radius_km >= 0.0)) {
    throw Error(ErrorKind::argument, "window and radius must be non-negative");
  }

  std::vector<Point> events;
  {
    csv::Reader reader(reports, options.reports_name);
    auto header = reader.next();
    if (!header) {
      throw Error(ErrorKind::empty_input, options.reports_name + ": empty file");
    }
    const ColumnMap cols(*header, options.reports_name, {"timestamp", "lat", "lon", "event_type"});
    while (auto row = reader.next()) {
      check_width(*row, cols, options.reports_name);
      events.push_back(point_at(*row, cols, options.reports_name));
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Point& a, const Point& b) { return a.time < b.time; });

  csv::Reader reader(observations, options.observations_name);
  auto header = reader.next();
  if (!header) {
    throw Error(ErrorKind::empty_input, options.observations_name + ": empty file");
  }
  const ColumnMap cols(*header, options.observations_name,
                       {"timestamp", "lat", "lon", "temperature", "humidity", "wind_speed",
                        "wind_direction", "pressure"});

  Dataset data;
  data.feature_names = observation_feature_names();
  const auto& src = options.observations_name;
  while (auto row = reader.next()) {
    check_width(*row, cols, src);
    const Point obs = point_at(*row, cols, src);
    const double theta = number_at(*row, cols, "wind_direction", src) * std::numbers::pi / 180.0;

    LabeledSample sample;
    sample.features = {number_at(*row, cols, "temperature", src),
                       number_at(*row, cols, "humidity", src),
                       number_at(*row, cols, "wind_speed", src),
                       std::sin(theta),
                       std::cos(theta),
                       number_at(*row, cols, "pressure", src)};

    auto first = std::lower_bound(events.begin(), events.end(), obs.time - options.window_secs,
                                  [](const Point& e, double t) { return e.time < t; });
    bool hazardous = false;
    for (auto it = first; it != events.end() && it->time <= obs.time + options.window_secs; ++it) {
      if (haversine_km(obs.lat, obs.lon, it->lat, it->lon) <= options.radius_km) {
        hazardous = true;
        break;
      }
    }
    sample.label = hazardous ? Label::hazard : Label::normal;
    data.samples.push_back(std::move(sample));
  }
  return data;
}

} // namespace hazsvm
