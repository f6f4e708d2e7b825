#include "popdyn/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "popdyn/errors.hpp"

namespace popdyn {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- CSV input

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvRow {
  std::size_t row = 0;  // 1-based file line, header is row 1
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string path;
  std::string header;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  t.path = path.string();
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string clean = trim(line);
    if (clean.empty()) continue;
    if (!have_header) {
      std::string header;
      for (const auto& f : split_fields(clean)) {
        header += (header.empty() ? "" : ",") + f;
      }
      t.header = header;
      have_header = true;
      continue;
    }
    t.rows.push_back({row, split_fields(clean)});
  }
  if (in.bad()) throw IoError("error while reading " + path.string());
  if (!have_header) throw ParseError(t.path, 1, "missing header row");
  return t;
}

void expect_header(const CsvTable& t, const std::string& expected) {
  if (t.header != expected) {
    throw ParseError(t.path, 1,
                     "expected header '" + expected + "', got '" + t.header + "'");
  }
}

void expect_fields(const CsvTable& t, const CsvRow& r, std::size_t n) {
  if (r.fields.size() != n) {
    throw ParseError(t.path, r.row,
                     "expected " + std::to_string(n) + " fields, got " +
                         std::to_string(r.fields.size()));
  }
}

double parse_double(const CsvTable& t, const CsvRow& r, std::size_t col,
                    const char* what) {
  const std::string& s = r.fields[col];
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(t.path, r.row,
                     std::string(what) + ": not a number: '" + s + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(t.path, r.row, std::string(what) + " is not finite");
  }
  return v;
}

int parse_age(const CsvTable& t, const CsvRow& r, std::size_t col,
              const char* what = "age") {
  const std::string& s = r.fields[col];
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw ParseError(t.path, r.row,
                     std::string(what) + ": expected a non-negative integer, got '" +
                         s + "'");
  }
  return v;
}

Sex parse_sex(const CsvTable& t, const CsvRow& r) {
  const std::string& s = r.fields[0];
  if (s == "m") return Sex::male;
  if (s == "f") return Sex::female;
  throw ParseError(t.path, r.row, "unknown sex label '" + s + "' (expected m or f)");
}

// Collects (age -> value, row) and turns it into a contiguous series.
class AgeCollector {
 public:
  AgeCollector(const CsvTable& t, Sex sex, SeriesKind kind)
      : t_(t), sex_(sex), kind_(kind) {}

  void add(const CsvRow& r, int age, double value) {
    if (!values_.emplace(age, std::make_pair(value, r.row)).second) {
      throw ParseError(t_.path, r.row,
                       "duplicate age " + std::to_string(age) + " for sex " +
                           sex_label(sex_));
    }
  }

  bool empty() const { return values_.empty(); }

  // Either the ages must start at 0, or ages below the first listed one are
  // zero-filled.
  AnnualSeries finish(bool must_start_at_zero) const {
    AnnualSeries s;
    s.sex = sex_;
    s.kind = kind_;
    if (values_.empty()) return s;
    int expected = must_start_at_zero ? 0 : values_.begin()->first;
    s.values.assign(static_cast<std::size_t>(expected), 0.0);
    for (const auto& [age, vr] : values_) {
      if (age != expected) {
        throw ParseError(t_.path, vr.second,
                         "gap in ages for sex " + std::string(sex_label(sex_)) +
                             ": missing age " + std::to_string(expected));
      }
      s.values.push_back(vr.first);
      ++expected;
    }
    return s;
  }

 private:
  const CsvTable& t_;
  Sex sex_;
  SeriesKind kind_;
  std::map<int, std::pair<double, std::size_t>> values_;
};

SexPair<AnnualSeries> finish_pair(const CsvTable& t,
                                  const SexPair<AgeCollector>& c) {
  SexPair<AnnualSeries> out;
  for (Sex s : kSexes) {
    if (c[s].empty()) {
      throw ParseError(t.path, t.rows.empty() ? 1 : t.rows.back().row,
                       std::string("no rows for sex ") + sex_label(s));
    }
    out[s] = c[s].finish(true);
  }
  return out;
}

// ------------------------------------------------------------ numerics

constexpr double kCountQuantum = 1.0 / 1048576.0;  // 2^-20 persons

void check_bins(const GroupedSeries& g) {
  int next = -1;
  for (const auto& b : g.bins) {
    if (b.age_hi < b.age_lo) {
      throw InvalidArgument("disaggregate: zero-width bin [" +
                            std::to_string(b.age_lo) + ", " +
                            std::to_string(b.age_hi) + "]");
    }
    if (b.age_lo < 0) throw InvalidArgument("disaggregate: negative age");
    if (next >= 0 && b.age_lo != next) {
      throw InvalidArgument("disaggregate: bins must be contiguous and ascending (bin " +
                            std::to_string(b.age_lo) + " follows " +
                            std::to_string(next - 1) + ")");
    }
    if (!std::isfinite(b.value)) {
      throw InvalidArgument("disaggregate: non-finite bin value");
    }
    if (g.kind == SeriesKind::counts && b.value < 0.0) {
      throw InvalidArgument("disaggregate: negative count");
    }
    next = b.age_hi + 1;
  }
}

// Non-negative data keep a non-negative reconstruction.
bool nonnegative_kind(const AnnualSeries& s) {
  return std::all_of(s.values.begin(), s.values.end(),
                     [](double v) { return v >= 0.0; });
}

// Integer steps per year, e.g. 12 for h = 1/12.
std::size_t steps_per_year(double h, const char* what) {
  const double r = 1.0 / h;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-9 * k) {
    throw InvalidArgument(std::string(what) + ": h = " + format_number(h) +
                          " does not divide one year");
  }
  return static_cast<std::size_t>(k);
}

double parse_config_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  auto parse = [&](std::string_view p) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || ec != std::errc() || ptr != p.data() + p.size()) {
      throw InvalidArgument("config key '" + key + "': not a number: '" + s + "'");
    }
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse(s);
  const double num = parse(trim(s.substr(0, slash)));
  const double den = parse(trim(s.substr(slash + 1)));
  if (den == 0.0) throw InvalidArgument("config key '" + key + "': division by zero");
  return num / den;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace

// ---------------------------------------------------------------- series

double AnnualSeries::total() const {
  double t = 0.0;
  for (double v : values) t += v;
  return t;
}

AnnualSeries disaggregate(const GroupedSeries& grouped) {
  check_bins(grouped);
  AnnualSeries out;
  out.sex = grouped.sex;
  out.kind = grouped.kind;
  if (grouped.bins.empty()) return out;
  out.values.assign(static_cast<std::size_t>(grouped.bins.front().age_lo), 0.0);
  for (const auto& b : grouped.bins) {
    const int width = b.age_hi - b.age_lo + 1;
    if (grouped.kind == SeriesKind::rates || width == 1) {
      out.values.insert(out.values.end(), static_cast<std::size_t>(width), b.value);
      continue;
    }
    // Quantized share; every partial sum of quantized values stays exact
    // while the magnitudes fit in 53 - 20 bits.
    double share = b.value / width;
    if (b.value < 4294967296.0) {
      share = std::floor(share / kCountQuantum) * kCountQuantum;
    }
    double acc = 0.0;
    for (int k = 0; k + 1 < width; ++k) {
      out.values.push_back(share);
      acc += share;
    }
    out.values.push_back(b.value - acc);
  }
  return out;
}

AnnualSeries resized(const AnnualSeries& series, std::size_t ages) {
  AnnualSeries out = series;
  out.values.resize(ages, 0.0);
  return out;
}

// ---------------------------------------------------------------- loaders

SexPair<AnnualSeries> load_population(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header == "sex,age_lo,age_hi,count") {
    SexPair<GroupedSeries> g;
    SexPair<std::size_t> last_row{};
    for (Sex s : kSexes) g[s].sex = s;
    for (const auto& r : t.rows) {
      expect_fields(t, r, 4);
      const Sex s = parse_sex(t, r);
      GroupBin b;
      b.age_lo = parse_age(t, r, 1, "age_lo");
      b.age_hi = parse_age(t, r, 2, "age_hi");
      b.value = parse_double(t, r, 3, "count");
      if (b.value < 0.0) throw ParseError(t.path, r.row, "negative count");
      if (b.age_hi < b.age_lo) {
        throw ParseError(t.path, r.row, "zero-width bin (age_hi < age_lo)");
      }
      const int expected = g[s].bins.empty() ? 0 : g[s].bins.back().age_hi + 1;
      if (b.age_lo != expected) {
        throw ParseError(t.path, r.row,
                         "gap in ages for sex " + std::string(sex_label(s)) +
                             ": expected bin starting at " + std::to_string(expected));
      }
      g[s].bins.push_back(b);
      last_row[s] = r.row;
    }
    SexPair<AnnualSeries> out;
    for (Sex s : kSexes) {
      if (g[s].bins.empty()) {
        throw ParseError(t.path, 1, std::string("no rows for sex ") + sex_label(s));
      }
      out[s] = disaggregate(g[s]);
    }
    return out;
  }
  expect_header(t, "sex,age,count");
  SexPair<AgeCollector> c{AgeCollector(t, Sex::male, SeriesKind::counts),
                          AgeCollector(t, Sex::female, SeriesKind::counts)};
  for (const auto& r : t.rows) {
    expect_fields(t, r, 3);
    const Sex s = parse_sex(t, r);
    const int age = parse_age(t, r, 1);
    const double v = parse_double(t, r, 2, "count");
    if (v < 0.0) throw ParseError(t.path, r.row, "negative count");
    c[s].add(r, age, v);
  }
  return finish_pair(t, c);
}

SexPair<AnnualSeries> load_life_table(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, "sex,age,qx");
  SexPair<AgeCollector> c{AgeCollector(t, Sex::male, SeriesKind::rates),
                          AgeCollector(t, Sex::female, SeriesKind::rates)};
  for (const auto& r : t.rows) {
    expect_fields(t, r, 3);
    const Sex s = parse_sex(t, r);
    const int age = parse_age(t, r, 1);
    const double q = parse_double(t, r, 2, "qx");
    if (q < 0.0 || q >= 1.0) {
      throw ParseError(t.path, r.row, "qx = " + r.fields[2] + " outside [0, 1)");
    }
    c[s].add(r, age, q);
  }
  return finish_pair(t, c);
}

AnnualSeries load_fertility(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, "age,rate");
  AgeCollector c(t, Sex::female, SeriesKind::rates);
  for (const auto& r : t.rows) {
    expect_fields(t, r, 2);
    const int age = parse_age(t, r, 0);
    const double v = parse_double(t, r, 1, "rate");
    if (v < 0.0) throw ParseError(t.path, r.row, "negative rate");
    c.add(r, age, v);
  }
  if (c.empty()) throw ParseError(t.path, 1, "no fertility rows");
  return c.finish(false);
}

SexPair<AnnualSeries> load_migration(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, "sex,age,net_per_year");
  SexPair<AgeCollector> c{AgeCollector(t, Sex::male, SeriesKind::counts),
                          AgeCollector(t, Sex::female, SeriesKind::counts)};
  for (const auto& r : t.rows) {
    expect_fields(t, r, 3);
    const Sex s = parse_sex(t, r);
    const int age = parse_age(t, r, 1);
    c[s].add(r, age, parse_double(t, r, 2, "net_per_year"));
  }
  return finish_pair(t, c);
}

// ------------------------------------------------------------ grid transfer

LatticeFunction interpolate_to_grid(const AnnualSeries& series,
                                    const AgeGrid& grid) {
  const std::size_t K = series.size();
  if (K == 0) throw InvalidArgument("interpolate_to_grid: empty series");
  if (grid.a_dag() > static_cast<double>(K) * (1.0 + 1e-12)) {
    throw ExtrapolationError("interpolate_to_grid: grid reaches age " +
                             format_number(grid.a_dag()) +
                             " but data cover ages [0, " + std::to_string(K) + ")");
  }
  const auto& c = series.values;
  const bool clamp = nonnegative_kind(series);
  auto clamped = [clamp](double v) { return clamp ? std::max(v, 0.0) : v; };

  // Breakpoint values at integer ages d[0..K] and cell midpoints e[0..K-1].
  std::vector<double> d(K + 1), e(K);
  if (K == 1) {
    d[0] = d[1] = c[0];
  } else {
    for (std::size_t j = 1; j < K; ++j) d[j] = 0.5 * (c[j - 1] + c[j]);
    d[0] = clamped(0.5 * (3.0 * c[0] - c[1]));
    d[K] = clamped(0.5 * (3.0 * c[K - 1] - c[K - 2]));
  }
  if (clamp) {
    // Lower the shared breakpoints of any cell whose midpoint would go
    // negative until it reaches zero; this only raises neighbouring
    // midpoints, so one pass suffices and every cell integral is kept.
    for (std::size_t j = 0; j < K; ++j) {
      const double sum = d[j] + d[j + 1];
      if (sum > 4.0 * c[j]) {
        const double f = 4.0 * c[j] / sum;
        d[j] *= f;
        d[j + 1] *= f;
      }
    }
  }
  for (std::size_t j = 0; j < K; ++j) {
    e[j] = clamped(2.0 * c[j] - 0.5 * (d[j] + d[j + 1]));
  }

  return LatticeFunction::sample(grid, [&](double a) {
    double cell = std::floor(a);
    if (cell >= static_cast<double>(K)) return d[K];
    const auto j = static_cast<std::size_t>(cell);
    const double x = a - cell;
    if (x <= 0.5) return d[j] + (e[j] - d[j]) * (2.0 * x);
    return e[j] + (d[j + 1] - e[j]) * (2.0 * x - 1.0);
  });
}

SexPair<AnnualSeries> restrict_to_annual(const PopulationState& state) {
  if (state.units != Units::natural) {
    throw InvalidState("restrict_to_annual: state must be in natural units");
  }
  state.validate();
  SexPair<AnnualSeries> out;
  for (Sex s : kSexes) {
    const AgeGrid& g = state.grids[s];
    const std::size_t r = steps_per_year(g.h(), "restrict_to_annual");
    const LatticeFunction p = state.lattice(s);
    const std::size_t years = g.n() / r;
    out[s].sex = s;
    out[s].kind = SeriesKind::counts;
    out[s].values.resize(years);
    for (std::size_t j = 0; j < years; ++j) {
      double acc = 0.0;
      for (std::size_t i = j * r; i < (j + 1) * r; ++i) acc += p[i] + p[i + 1];
      out[s].values[j] = 0.5 * g.h() * acc;
    }
  }
  return out;
}

FertilityModuli fertility_from_schedule(const AnnualSeries& rate,
                                        const SexPair<AgeGrid>& grids,
                                        double sex_ratio) {
  const auto ages = static_cast<std::size_t>(std::ceil(grids.female.a_dag()));
  AnnualSeries padded = rate;
  if (padded.size() < ages) padded = resized(rate, ages);
  const LatticeFunction on_grid = interpolate_to_grid(padded, grids.female);
  return FertilityModuli::from_mother_schedule(on_grid, grids.male, sex_ratio);
}

// ---------------------------------------------------------------- config

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("config: ") + key + " must be positive");
    }
  };
  positive(a_dag_m, "a_dag_m");
  positive(a_dag_f, "a_dag_f");
  positive(h, "h");
  positive(tau, "tau");
  positive(horizon, "horizon");
  positive(sex_ratio, "sex_ratio");
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("config: theta must lie in [0, 1]");
  }
}

ScenarioConfig load_scenario_config(const fs::path& path) {
  namespace pt = boost::property_tree;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }

  const fs::path base = path.parent_path();
  const std::vector<std::string> known = {
      "a_dag_m", "a_dag_f", "h", "tau", "theta", "horizon", "sex_ratio",
      "population", "life_table", "fertility", "migration", "out_dir", "start_year"};
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      throw InvalidArgument("config: sections are not supported ('" + key + "')");
    }
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  auto text = [&](const char* key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  };
  auto required = [&](const char* key) {
    auto v = text(key);
    if (!v || v->empty()) {
      throw InvalidArgument("config " + path.string() + ": missing key '" + key + "'");
    }
    return *v;
  };
  auto number = [&](const char* key) { return parse_config_number(key, required(key)); };
  auto file = [&](const char* key) {
    fs::path p = required(key);
    return p.is_absolute() ? p : base / p;
  };

  ScenarioConfig c;
  c.a_dag_m = number("a_dag_m");
  c.a_dag_f = number("a_dag_f");
  c.h = number("h");
  c.tau = number("tau");
  c.theta = number("theta");
  c.horizon = number("horizon");
  c.sex_ratio = number("sex_ratio");
  c.population = file("population");
  c.life_table = file("life_table");
  c.fertility = file("fertility");
  c.migration = file("migration");
  if (auto out = text("out_dir"); out && !out->empty()) {
    fs::path p = *out;
    c.out_dir = p.is_absolute() ? p : base / p;
  }
  if (auto y = text("start_year"); y && !y->empty()) {
    const double v = parse_config_number("start_year", *y);
    if (v != std::floor(v)) throw InvalidArgument("config: start_year must be an integer");
    c.start_year = static_cast<int>(v);
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------- export

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ResultBundle annual_snapshots(const Trajectory& trajectory,
                              const SexPair<SurvivalCurve>& survival,
                              int start_year) {
  ResultBundle b;
  b.diagnostics = trajectory.diagnostics;
  for (const auto& st : trajectory.states) {
    const double year = std::round(st.time);
    if (std::abs(st.time - year) > 1e-9) continue;
    AnnualSnapshot snap;
    snap.time = st.time;
    snap.year = start_year + static_cast<int>(year);
    snap.population = restrict_to_annual(from_transformed(st, survival));
    b.snapshots.push_back(std::move(snap));
  }
  return b;
}

void export_results(const ResultBundle& bundle, const fs::path& out_dir) {
  const fs::path target = out_dir.empty() ? fs::path(".") : out_dir;
  const fs::path parent = fs::absolute(target).parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
  const fs::path staging =
      parent / (fs::absolute(target).filename().string() + ".staging");
  fs::remove_all(staging, ec);
  if (!fs::create_directory(staging, ec) || ec) {
    throw IoError("cannot create staging directory " + staging.string());
  }

  try {
    std::string summary = "year,male,female,total\n";
    for (const auto& snap : bundle.snapshots) {
      const std::string year = std::to_string(snap.year);
      std::string pop = "sex,age,count\n";
      SexPair<double> totals{};
      for (Sex s : kSexes) {
        const auto& v = snap.population[s].values;
        for (std::size_t a = 0; a < v.size(); ++a) {
          pop += std::string(sex_label(s)) + "," + std::to_string(a) + "," +
                 format_number(v[a]) + "\n";
          totals[s] += v[a];
        }
      }
      write_file(staging / ("population_" + year + ".csv"), pop);

      std::string pyr = "age,male,female\n";
      const auto& m = snap.population.male.values;
      const auto& f = snap.population.female.values;
      for (std::size_t a = 0; a < std::max(m.size(), f.size()); ++a) {
        const double mv = a < m.size() ? m[a] : 0.0;
        const double fv = a < f.size() ? f[a] : 0.0;
        pyr += std::to_string(a) + "," + format_number(mv == 0.0 ? 0.0 : -mv) +
               "," + format_number(fv) + "\n";
      }
      write_file(staging / ("pyramid_" + year + ".csv"), pyr);

      summary += year + "," + format_number(totals.male) + "," +
                 format_number(totals.female) + "," +
                 format_number(totals.male + totals.female) + "\n";
    }
    if (!bundle.snapshots.empty()) {
      std::string diag = "t,energy,births_m,births_f\n";
      for (const auto& d : bundle.diagnostics) {
        diag += format_number(d.time) + "," + format_number(d.energy) + "," +
                format_number(d.boundary.male) + "," +
                format_number(d.boundary.female) + "\n";
      }
      write_file(staging / "diagnostics.csv", diag);
    }
    write_file(staging / "summary.csv", summary);

    // A fresh directory appears in one rename; an existing one receives the
    // complete file set, each file replaced atomically.
    if (!fs::exists(target)) {
      fs::rename(staging, target, ec);
      if (ec) throw IoError("cannot move results to " + target.string() + ": " + ec.message());
      return;
    }
    if (!fs::is_directory(target)) {
      throw IoError(target.string() + " exists and is not a directory");
    }
    for (const auto& entry : fs::directory_iterator(staging)) {
      fs::rename(entry.path(), target / entry.path().filename(), ec);
      if (ec) throw IoError("cannot move " + entry.path().filename().string() +
                            " into " + target.string() + ": " + ec.message());
    }
    fs::remove(staging, ec);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace popdyn
